//! Links, horn exponents and Hölder complexes of weighted homogeneous surfaces in R^3.
//!
//! The link is traced on the slices `x3 = +1` and `x3 = -1`; by the weighted flow every
//! other slice radius gives the same picture. Each closed slice component is a circle of
//! leaves, and its exponent is the smallest contact order between leaves through it.

use serde::Serialize;
use thiserror::Error;

use crate::complex::{ComplexError, HolderComplex};
use crate::foliation::{leaf_contact_order, leaf_normal_form, FoliationError, Leaf};
use crate::marching::{march, MarchError, Polyline};
use crate::polynomial::{PolynomialError, SurfaceGerm};
use crate::rational::Rational;
use crate::weights::WeightVector;

/// Largest box half-width tried when a slice component reaches the boundary.
pub const MAX_BOX: f64 = 1024.0;
/// Variance of `x2` below which a component counts as a straight line `x2 = r`.
pub const DEGENERATE_VARIANCE: f64 = 1e-9;
/// Gradient norm below which a link point counts as possibly singular.
pub const GRADIENT_THRESHOLD: f64 = 1e-6;
pub const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Polynomial(#[from] PolynomialError),
    #[error(transparent)]
    March(#[from] MarchError),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("cannot decide whether x3 = 0 meets the surface away from 0: |f| = {value:e} near theta = {theta}")]
    Inconclusive { theta: f64, value: f64 },
    #[error("slice component lies on the line x2 = {r}")]
    Degenerate { r: f64 },
    #[error("need at least {MIN_SAMPLES} samples and two distinct leaves on the component")]
    TooFewPoints,
    #[error("the plane x3 = 0 meets the surface away from 0; its complex needs a stratification")]
    OriginSliceNontrivial,
    #[error("slice component at x3 = {slice} is not closed")]
    OpenComponent { slice: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceOptions {
    /// Grid resolution `m` of the marching-squares grid.
    pub grid: usize,
    /// Initial box half-width; doubled up to [`MAX_BOX`] while components touch it.
    pub box_half_width: f64,
    /// Points sampled per component for leaf comparisons.
    pub samples: usize,
    /// Angular resolution of the origin-slice probe.
    pub probe: usize,
    /// Largest denominator when snapping sampled coordinates to rationals.
    pub snap_denominator: u64,
}

impl Default for SliceOptions {
    fn default() -> Self {
        SliceOptions {
            grid: 256,
            box_half_width: 2.0,
            samples: 16,
            probe: 4096,
            snap_denominator: 1_000_000,
        }
    }
}

/// The curve `{f(x1, x2, c) = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkSlice {
    pub c: i32,
    pub box_half_width: f64,
    pub grid: usize,
    pub components: Vec<Polyline>,
    /// Largest `|f|` over all polyline points.
    pub max_residual: f64,
}

pub fn slice_curve(s: &SurfaceGerm, c: i32, b: f64, m: usize) -> Result<LinkSlice, SurfaceError> {
    assert!(c == 1 || c == -1, "slices sit at x3 = +1 or -1");
    let f = s.polynomial();
    let z = c as f64;
    let components = march(|x, y| f.eval(&[x, y, z]), b, m)?;
    let max_residual = components
        .iter()
        .flat_map(|p| &p.points)
        .map(|p| f.eval(&[p[0], p[1], z]).abs())
        .fold(0.0, f64::max);
    Ok(LinkSlice {
        c,
        box_half_width: b,
        grid: m,
        components,
        max_residual,
    })
}

/// [`slice_curve`] on a box enlarged to cover the slice, and doubled further while a
/// component reaches its boundary.
pub fn slice_auto(s: &SurfaceGerm, c: i32, opts: &SliceOptions) -> Result<LinkSlice, SurfaceError> {
    let mut b = opts.box_half_width;
    if let Some(extent) = slice_extent(s, c, 1024) {
        while b < 1.25 * extent && b * 2.0 <= MAX_BOX {
            b *= 2.0;
        }
    }
    loop {
        match slice_curve(s, c, b, opts.grid) {
            Err(SurfaceError::March(MarchError::BoxTooSmall(_))) if b * 2.0 <= MAX_BOX => b *= 2.0,
            other => return other,
        }
    }
}

/// Whether `{f(x1, x2, 0) = 0}` reduces to the origin, probed on the unit circle. Every
/// flow orbit in the plane `x3 = 0` crosses the unit circle exactly once.
pub fn origin_slice_trivial(s: &SurfaceGerm, probe: usize) -> Result<bool, SurfaceError> {
    let f = s.polynomial();
    let g = |theta: f64| f.eval(&[theta.cos(), theta.sin(), 0.0]);
    let scale = 1.0 + f.max_abs_coefficient();
    let tol = 1e-9 * scale;
    let probe = probe.max(8);
    let step = std::f64::consts::TAU / probe as f64;
    let values: Vec<f64> = (0..probe).map(|j| g(j as f64 * step)).collect();
    if values.contains(&0.0)
        || (values.iter().any(|&v| v > 0.0) && values.iter().any(|&v| v < 0.0))
    {
        return Ok(false);
    }
    // Refine every local minimum of |g|: tangential zeros fall between probe points.
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let refine = |j: usize| {
        let (mut lo, mut hi) = ((j as f64 - 1.0) * step, (j as f64 + 1.0) * step);
        for _ in 0..200 {
            let a = hi - ratio * (hi - lo);
            let b = lo + ratio * (hi - lo);
            if g(a).abs() < g(b).abs() {
                hi = b;
            } else {
                lo = a;
            }
        }
        let theta = (lo + hi) / 2.0;
        (theta, g(theta).abs())
    };
    let (theta, value) = (0..probe)
        .filter(|&j| {
            let v = values[j].abs();
            v <= values[(j + probe - 1) % probe].abs() && v <= values[(j + 1) % probe].abs()
        })
        .map(refine)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("a periodic sequence has a minimum");
    if value <= 1e-13 * scale {
        Ok(false)
    } else if value > tol {
        Ok(true)
    } else {
        Err(SurfaceError::Inconclusive { theta, value })
    }
}

/// Largest coordinate of a point of `{f(x1, x2, c) = 0}`, located by following flow
/// orbits from the plane `x3 = 0`, or `None` if no orbit meets the slice. Requires a
/// trivial origin slice.
pub fn slice_extent(s: &SurfaceGerm, c: i32, rays: usize) -> Option<f64> {
    let f = s.polynomial();
    let w = s.weights().as_slice();
    let (a1, a2, a3) = (w[0] as f64, w[1] as f64, w[2] as f64);
    let mut extent: Option<f64> = None;
    for j in 0..rays.max(8) {
        let theta = std::f64::consts::TAU * j as f64 / rays.max(8) as f64;
        let (x, y) = (theta.cos(), theta.sin());
        // The orbit of (x, y, sigma) meets x3 = c at scale t = |sigma|^(-1/a3); the
        // slice point nearest the far end comes from the smallest root |sigma|.
        let p = |sigma: f64| f.eval(&[x, y, c as f64 * sigma]);
        let b0 = p(0.0);
        let mut sigma = 1e-6;
        let mut found = None;
        while sigma < 1e6 {
            let next = sigma * 1.02;
            if (p(next) > 0.0) != (b0 > 0.0) {
                found = Some(next);
                break;
            }
            sigma = next;
        }
        if let Some(sigma) = found {
            let t = sigma.powf(-1.0 / a3);
            let reach = (t.powf(a1) * x.abs()).max(t.powf(a2) * y.abs());
            extent = Some(extent.map_or(reach, |e: f64| e.max(reach)));
        }
    }
    extent
}

/// The leaf through `(p1, p2, c)` after snapping `p` to rationals.
pub fn slice_to_leaf(w: &WeightVector, p: [f64; 2], c: i32, max_den: u64) -> Leaf {
    leaf_normal_form(w, &snapped_seed(p, c, max_den)).expect("c is nonzero")
}

fn snapped_seed(p: [f64; 2], c: i32, max_den: u64) -> Vec<Rational> {
    let snap = |x: f64| Rational::snap(x, max_den).expect("slice points are finite");
    vec![snap(p[0]), snap(p[1]), Rational::integer(c as i64)]
}

/// Smallest contact order between leaves through `k` evenly spread points of a slice
/// component.
pub fn component_exponent(
    w: &WeightVector,
    component: &Polyline,
    c: i32,
    k: usize,
    max_den: u64,
) -> Result<Rational, SurfaceError> {
    if k < MIN_SAMPLES || component.points.len() < 2 {
        return Err(SurfaceError::TooFewPoints);
    }
    let points = component.spread(k);
    let n = points.len() as f64;
    let mean = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let variance = points.iter().map(|p| (p[1] - mean).powi(2)).sum::<f64>() / n;
    if variance < DEGENERATE_VARIANCE {
        return Err(SurfaceError::Degenerate { r: mean });
    }
    let mut seeds: Vec<Vec<Rational>> = points.iter().map(|&p| snapped_seed(p, c, max_den)).collect();
    seeds.sort();
    seeds.dedup();
    let mut best: Option<Rational> = None;
    for (i, x) in seeds.iter().enumerate() {
        for y in &seeds[i + 1..] {
            let order = leaf_contact_order(w, x, y)?.into_inner();
            if best.as_ref().is_none_or(|b| order < *b) {
                best = Some(order);
            }
        }
    }
    best.ok_or(SurfaceError::TooFewPoints)
}

/// A single exponent for a connected link, or one per link component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Beta {
    Single(Rational),
    PerComponent(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub slice: i32,
    pub closed: bool,
    pub points: usize,
    pub exponent: Option<Rational>,
    /// `x2 = r` when the component is a straight line.
    pub degenerate_line: Option<f64>,
    pub applicable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HornReport {
    pub applicable: bool,
    pub reasons: Vec<String>,
    pub origin_slice_trivial: bool,
    /// `None` when the link was not traced.
    pub link_component_count: Option<usize>,
    pub beta: Option<Beta>,
    pub components: Vec<ComponentReport>,
    /// Smallest `|grad f|` over sampled link points.
    pub gradient_min: Option<f64>,
    /// Numeric evidence only: an isolated singularity is not certified.
    pub isolated_singularity_evidence: Option<bool>,
    pub box_half_width: Option<f64>,
    pub grid: usize,
    /// Variable `i` of the analysed germ is input variable `permutation[i]`.
    pub permutation: Vec<usize>,
}

struct TracedLink {
    slices: Vec<LinkSlice>,
    components: Vec<ComponentReport>,
    gradient_min: Option<f64>,
}

fn trace_link(s: &SurfaceGerm, opts: &SliceOptions) -> Result<TracedLink, SurfaceError> {
    let w = s.weights();
    let f = s.polynomial();
    let mut slices = Vec::new();
    let mut components = Vec::new();
    let mut gradient_min: Option<f64> = None;
    for c in [1, -1] {
        let slice = slice_auto(s, c, opts)?;
        for poly in &slice.components {
            for p in poly.spread(opts.samples) {
                let g = f.gradient(&[p[0], p[1], c as f64]);
                let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                gradient_min = Some(gradient_min.map_or(norm, |m| m.min(norm)));
            }
            let (exponent, degenerate_line) =
                match component_exponent(w, poly, c, opts.samples, opts.snap_denominator) {
                    Ok(beta) => (Some(beta), None),
                    Err(SurfaceError::Degenerate { r }) => (None, Some(r)),
                    Err(e) => return Err(e),
                };
            components.push(ComponentReport {
                slice: c,
                closed: poly.closed,
                points: poly.points.len(),
                applicable: poly.closed && exponent.is_some(),
                exponent,
                degenerate_line,
            });
        }
        slices.push(slice);
    }
    Ok(TracedLink {
        slices,
        components,
        gradient_min,
    })
}

/// Horn exponent of the germ, with the checks that support it.
pub fn horn_exponent(s: &SurfaceGerm, opts: &SliceOptions) -> Result<HornReport, SurfaceError> {
    let w = s.weights().as_slice();
    let mut reasons = Vec::new();
    let mut report = HornReport {
        applicable: false,
        reasons: Vec::new(),
        origin_slice_trivial: false,
        link_component_count: None,
        beta: None,
        components: Vec::new(),
        gradient_min: None,
        isolated_singularity_evidence: None,
        box_half_width: None,
        grid: opts.grid,
        permutation: vec![0, 1, 2],
    };

    if !origin_slice_trivial(s, opts.probe)? {
        reasons.push("x3 = 0 meets the surface away from 0, so beta = 1".to_string());
        reasons.push(
            "the horn model additionally needs a connected link and an isolated singularity; neither is checked here"
                .to_string(),
        );
        report.applicable = true;
        report.beta = Some(Beta::Single(Rational::one()));
        report.reasons = reasons;
        return Ok(report);
    }
    report.origin_slice_trivial = true;
    reasons.push("x3 = 0 meets the surface only at 0".to_string());

    let link = trace_link(s, opts)?;
    let count = link.components.len();
    report.link_component_count = Some(count);
    report.box_half_width = link.slices.iter().map(|l| l.box_half_width).reduce(f64::max);
    report.gradient_min = link.gradient_min;
    let evidence = link.gradient_min.map(|g| g >= GRADIENT_THRESHOLD);
    report.isolated_singularity_evidence = evidence;

    if count == 0 {
        reasons.push("the link is empty: the germ is the point 0".to_string());
        report.reasons = reasons;
        return Ok(report);
    }
    let all_closed = link.components.iter().all(|c| c.closed);
    let all_valid = link.components.iter().all(|c| c.applicable);
    reasons.push(format!("{count} link component(s) on x3 = +1 and x3 = -1"));
    if !all_closed {
        reasons.push("some slice component is not closed".to_string());
    }
    if link.components.iter().any(|c| c.degenerate_line.is_some()) {
        reasons.push("a component is a straight line x2 = r and cannot bound a closed surface".to_string());
    }
    match evidence {
        Some(true) => reasons.push(format!(
            "|grad f| >= {GRADIENT_THRESHOLD:e} at sampled link points (numeric evidence, not a proof of an isolated singularity)"
        )),
        _ => reasons.push(format!(
            "|grad f| < {GRADIENT_THRESHOLD:e} at a sampled link point: the singularity may not be isolated"
        )),
    }
    report.beta = if count == 1 {
        reasons.push("connected link: beta = a2/a3".to_string());
        Some(Beta::Single(Rational::new(w[1] as i64, w[2] as i64)))
    } else {
        reasons.push("disconnected link: one beta per component".to_string());
        link.components
            .iter()
            .map(|c| c.exponent.clone())
            .collect::<Option<Vec<_>>>()
            .map(Beta::PerComponent)
    };
    report.applicable = all_valid && evidence == Some(true);
    report.components = link.components;
    report.reasons = reasons;
    Ok(report)
}

/// Canonical Hölder complex: one circle of two parallel edges per link component.
pub fn complex_of_surface(s: &SurfaceGerm, opts: &SliceOptions) -> Result<HolderComplex, SurfaceError> {
    if !origin_slice_trivial(s, opts.probe)? {
        return Err(SurfaceError::OriginSliceNontrivial);
    }
    let link = trace_link(s, opts)?;
    let mut complex = HolderComplex::new();
    for (k, c) in link.components.iter().enumerate() {
        if !c.closed {
            return Err(SurfaceError::OpenComponent { slice: c.slice });
        }
        let beta = match (&c.exponent, c.degenerate_line) {
            (Some(beta), _) => beta.clone(),
            (None, Some(r)) => return Err(SurfaceError::Degenerate { r }),
            (None, None) => return Err(SurfaceError::TooFewPoints),
        };
        let (a, b) = (format!("v{k}a"), format!("v{k}b"));
        complex.add_vertex(a.as_str())?;
        complex.add_vertex(b.as_str())?;
        complex.add_edge(format!("e{k}a"), &a, &b, beta.clone())?;
        complex.add_edge(format!("e{k}b"), &a, &b, beta)?;
    }
    Ok(complex.canonicalize())
}
