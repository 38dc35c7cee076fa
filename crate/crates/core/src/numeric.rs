//! Numerical estimation of contact orders under different norms.
//!
//! Points on arcs are located by bisection in exact dyadic arithmetic, so that the tiny
//! differences between two arcs at high contact orders survive. Only the final
//! logarithms and the least-squares fit use floating point.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arcs::{substitute_power, PuiseuxArc};
use crate::foliation::Point;
use crate::rational::{lcm_denominators, Rational};

/// Minimum coefficient of determination for a profile to be accepted.
pub const R_SQUARED_THRESHOLD: f64 = 0.999;
/// Minimum number of grid points.
pub const MIN_GRID_POINTS: usize = 5;
/// Default absolute tolerance when comparing a fitted exponent with an exact one.
pub const DEFAULT_EXPONENT_TOLERANCE: f64 = 0.05;

const MAX_BRACKET_DOUBLINGS: u32 = 64;
const MONOTONICITY_PROBES: i64 = 8;
const MAX_BISECTION_STEPS: u32 = 20_000;
const MAX_REFINEMENTS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Euclidean,
    Max,
    L1,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Euclidean, NormKind::Max, NormKind::L1];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Euclidean => "euclidean",
            NormKind::Max => "max",
            NormKind::L1 => "l1",
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(NormKind::Euclidean),
            "max" | "linf" => Ok(NormKind::Max),
            "l1" => Ok(NormKind::L1),
            other => Err(format!("unknown norm `{other}` (expected euclidean, max or l1)")),
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn evaluate_norm(v: &[f64], kind: NormKind) -> f64 {
    match kind {
        NormKind::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        NormKind::Max => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        NormKind::L1 => v.iter().map(|x| x.abs()).sum(),
    }
}

/// Natural log of the norm of a nonzero exact vector; never underflows.
pub fn norm_ln(v: &[Rational], kind: NormKind) -> Option<f64> {
    if v.iter().all(Rational::is_zero) {
        return None;
    }
    Some(match kind {
        NormKind::Euclidean => 0.5 * v.iter().map(|x| x * x).sum::<Rational>().ln(),
        NormKind::Max => v.iter().map(Rational::abs).max().unwrap().ln(),
        NormKind::L1 => v.iter().map(Rational::abs).sum::<Rational>().ln(),
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("distance is not monotone on the bracket near the base point")]
    BisectionFailure,
    #[error("distances vanish or cannot be resolved: {0}")]
    DegenerateFit(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("samplers have different dimensions ({0} and {1})")]
    DimensionMismatch(usize, usize),
}

/// Produces, for a target distance `t` from the base point, the displacement of a point
/// on the arc at that distance, accurate to `tol` in every coordinate.
pub trait ArcSampler {
    fn dim(&self) -> usize;
    fn point_at(&self, t: &Rational, norm: NormKind, tol: &Rational) -> Result<Point, NumericError>;
}

/// Sampler for a Puiseux arc, evaluated as a polynomial after clearing exponent
/// denominators.
#[derive(Debug, Clone)]
pub struct PolynomialSampler {
    /// Per coordinate, `(numerator, degree)` pairs over the common denominator.
    coords: Vec<Vec<(BigInt, u32)>>,
    denom: BigInt,
    degree: u32,
}

/// Integer numerators of a polynomial point over the common denominator
/// `denom * 2^(k * degree)`.
struct Scaled {
    nums: Vec<BigInt>,
    k: u32,
}

impl PolynomialSampler {
    pub fn new(arc: &PuiseuxArc) -> Self {
        let exps: Vec<Rational> = arc
            .coordinates()
            .iter()
            .flat_map(|c| c.terms().map(|(e, _)| e.clone()))
            .collect();
        let lcm = Rational::from_bigint(lcm_denominators(&exps));
        let poly = substitute_power(arc, &lcm).expect("lcm of denominators is positive");
        let coeffs: Vec<Rational> = poly
            .coordinates()
            .iter()
            .flat_map(|c| c.terms().map(|(_, a)| a.clone()))
            .collect();
        let denom = lcm_denominators(&coeffs);
        let coords: Vec<Vec<(BigInt, u32)>> = poly
            .coordinates()
            .iter()
            .map(|c| {
                c.terms()
                    .map(|(e, a)| {
                        let num = a.numer() * (&denom / a.denom());
                        let deg = u32::try_from(e.numer()).expect("moderate exponent");
                        (num, deg)
                    })
                    .collect()
            })
            .collect();
        let degree = coords.iter().flatten().map(|&(_, d)| d).max().unwrap_or(0);
        PolynomialSampler {
            coords,
            denom,
            degree,
        }
    }

    /// Point at `u = m / 2^k`.
    fn eval(&self, m: &BigInt, k: u32) -> Scaled {
        let nums = self
            .coords
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|(c, e)| (c * num_traits::pow(m.clone(), *e as usize)) << (k * (self.degree - e)) as usize)
                    .sum()
            })
            .collect();
        Scaled { nums, k }
    }

    fn scale(&self, k: u32) -> BigInt {
        &self.denom << (k * self.degree) as usize
    }

    /// Sign of `||x|| - t` for the point `x`.
    fn compare(&self, x: &Scaled, t: &Rational, norm: NormKind) -> std::cmp::Ordering {
        let scale = self.scale(x.k);
        let (p, r) = (t.numer(), t.denom());
        match norm {
            NormKind::Max => {
                let m = x.nums.iter().map(BigInt::abs).max().unwrap_or_default();
                (m * r).cmp(&(p * scale))
            }
            NormKind::L1 => {
                let s: BigInt = x.nums.iter().map(BigInt::abs).sum();
                (s * r).cmp(&(p * scale))
            }
            NormKind::Euclidean => {
                let s: BigInt = x.nums.iter().map(|n| n * n).sum();
                (s * r * r).cmp(&(p * p * &scale * &scale))
            }
        }
    }

    fn to_point(&self, x: &Scaled) -> Point {
        let scale = self.scale(x.k);
        x.nums
            .iter()
            .map(|n| Rational::from_bigints(n.clone(), scale.clone()))
            .collect()
    }

    /// Whether every coordinate of `a` and `b` (same `k`) differs by at most `tol`.
    fn within(&self, a: &Scaled, b: &Scaled, tol: &Rational) -> bool {
        let bound = tol.numer() * self.scale(a.k);
        a.nums
            .iter()
            .zip(&b.nums)
            .all(|(x, y)| (x - y).abs() * tol.denom() <= bound)
    }
}

impl ArcSampler for PolynomialSampler {
    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn point_at(&self, t: &Rational, norm: NormKind, tol: &Rational) -> Result<Point, NumericError> {
        use std::cmp::Ordering::*;
        assert!(t.is_positive() && tol.is_positive());
        // Bracket [u/2, u] with ||x(u/2)|| < t <= ||x(u)||, u a power of two. First descend
        // into the regime where the distance grows towards u, then ascend to the crossing.
        let at = |e: i64| {
            if e >= 0 {
                self.eval(&(BigInt::one() << e as usize), 0)
            } else {
                self.eval(&BigInt::one(), (-e) as u32)
            }
        };
        let norm_cmp = |a: &Scaled, b: &Scaled| exact_norm_cmp(&self.to_point(a), &self.to_point(b), norm);
        let mut exp: i64 = 0;
        loop {
            let here = at(exp);
            if self.compare(&here, t, norm) == Less && norm_cmp(&at(exp - 1), &here) == Less {
                break;
            }
            exp -= 1;
            if exp < -(MAX_BISECTION_STEPS as i64) {
                return Err(NumericError::BisectionFailure);
            }
        }
        let mut doublings = 0;
        while self.compare(&at(exp), t, norm) == Less {
            exp += 1;
            doublings += 1;
            if doublings > MAX_BRACKET_DOUBLINGS {
                return Err(NumericError::BisectionFailure);
            }
        }
        // Work over 2^k with lo = m_lo / 2^k, hi = m_hi / 2^k.
        let mut k: u32 = if exp < 1 { (1 - exp) as u32 } else { 0 };
        let unit = |e: i64, k: u32| BigInt::one() << (e + k as i64) as usize;
        let mut lo = unit(exp - 1, k);
        let mut hi = unit(exp, k);

        // Distance must increase on [0, hi].
        let probe_k = k + 3;
        let mut previous: Option<Scaled> = None;
        for j in 0..=MONOTONICITY_PROBES {
            let x = self.eval(&(BigInt::from(j) * &hi), probe_k);
            if let Some(p) = &previous {
                if norm_cmp(p, &x) == Greater {
                    return Err(NumericError::BisectionFailure);
                }
            }
            previous = Some(x);
        }

        for _ in 0..MAX_BISECTION_STEPS {
            let (xl, xh) = (self.eval(&lo, k), self.eval(&hi, k));
            if self.within(&xl, &xh, tol) {
                return Ok(self.to_point(&xh));
            }
            k += 1;
            lo <<= 1usize;
            hi <<= 1usize;
            let mid: BigInt = (&lo + &hi) >> 1usize;
            if self.compare(&self.eval(&mid, k), t, norm) == Less {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(NumericError::BisectionFailure)
    }
}

fn exact_norm_cmp(a: &[Rational], b: &[Rational], norm: NormKind) -> std::cmp::Ordering {
    let value = |v: &[Rational]| match norm {
        NormKind::Euclidean => v.iter().map(|x| x * x).sum::<Rational>(),
        NormKind::Max => v.iter().map(Rational::abs).max().unwrap_or_else(Rational::zero),
        NormKind::L1 => v.iter().map(Rational::abs).sum(),
    };
    value(a).cmp(&value(b))
}

/// Synthetic one-dimensional sampler returning `c * t^lambda` for every norm.
#[derive(Debug, Clone)]
pub struct PowerLawSampler {
    pub coefficient: f64,
    pub exponent: f64,
}

impl ArcSampler for PowerLawSampler {
    fn dim(&self) -> usize {
        1
    }

    fn point_at(&self, t: &Rational, _: NormKind, _: &Rational) -> Result<Point, NumericError> {
        let value = self.coefficient * (self.exponent * t.ln()).exp();
        let value = Rational::from_f64_exact(value).ok_or_else(|| {
            NumericError::DegenerateFit(format!("power law overflows at t = {t}"))
        })?;
        Ok(vec![value])
    }
}

/// Grid `t_k = t0 * ratio^k`, `k = 0..count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    t0: Rational,
    ratio: Rational,
    count: usize,
}

impl Grid {
    pub fn new(t0: Rational, ratio: Rational, count: usize) -> Result<Self, NumericError> {
        if !t0.is_positive() {
            return Err(NumericError::InvalidGrid(format!("t0 must be positive, got {t0}")));
        }
        if !ratio.is_positive() || ratio >= 1 {
            return Err(NumericError::InvalidGrid(format!(
                "ratio must lie in (0, 1), got {ratio}"
            )));
        }
        if count < MIN_GRID_POINTS {
            return Err(NumericError::InvalidGrid(format!(
                "at least {MIN_GRID_POINTS} points required, got {count}"
            )));
        }
        Ok(Grid { t0, ratio, count })
    }

    /// Grid from decimal parameters, snapped to nearby simple fractions.
    pub fn from_f64(t0: f64, ratio: f64, count: usize) -> Result<Self, NumericError> {
        let snap = |x: f64, what: &str| {
            Rational::snap(x, 1_000_000_000)
                .filter(|r| !r.is_zero())
                .ok_or_else(|| NumericError::InvalidGrid(format!("{what} = {x} is not usable")))
        };
        Grid::new(snap(t0, "t0")?, snap(ratio, "ratio")?, count)
    }

    pub fn t0(&self) -> &Rational {
        &self.t0
    }

    pub fn ratio(&self) -> &Rational {
        &self.ratio
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn points(&self) -> Vec<Rational> {
        std::iter::successors(Some(self.t0.clone()), |t| Some(t * &self.ratio))
            .take(self.count)
            .collect()
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::new(Rational::new(1, 100), Rational::new(1, 2), 12).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub d: f64,
    pub ln_t: f64,
    pub ln_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub norm: NormKind,
    pub samples: Vec<Sample>,
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `r_squared >= R_SQUARED_THRESHOLD`.
    pub accepted: bool,
}

impl DistanceProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,d\n");
        for s in &self.samples {
            out.push_str(&format!("{:e},{:e}\n", s.t, s.d));
        }
        out
    }

    pub fn agrees_with(&self, exact: &Rational, tolerance: f64) -> bool {
        self.accepted && (self.exponent - exact.to_f64()).abs() <= tolerance
    }
}

/// Ordinary least squares `y = slope * x + intercept`, with `R^2`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, intercept, r_squared))
}

/// Distance between the two arcs at distance `t` from the base point, located
/// precisely enough that the bisection error is negligible against the result.
fn sample_distance(
    a: &dyn ArcSampler,
    b: &dyn ArcSampler,
    t: &Rational,
    norm: NormKind,
) -> Result<(Rational, f64), NumericError> {
    let two = Rational::integer(2);
    let mut tol = t * &two.pow(-64);
    for _ in 0..MAX_REFINEMENTS {
        let pa = a.point_at(t, norm, &tol)?;
        let pb = b.point_at(t, norm, &tol)?;
        let diff: Vec<Rational> = pa.iter().zip(&pb).map(|(x, y)| x - y).collect();
        match norm_ln(&diff, norm) {
            Some(ln_d) => {
                let d_max = diff.iter().map(Rational::abs).max().unwrap();
                if d_max >= &tol * &two.pow(24) {
                    return Ok((d_max, ln_d));
                }
                tol = &d_max * &two.pow(-40);
            }
            None => tol = &tol * &two.pow(-64),
        }
    }
    Err(NumericError::DegenerateFit(format!(
        "distance at t = {} is below the resolution {}",
        t.to_f64(),
        tol.to_f64()
    )))
}

/// Least-squares estimate of the contact order from distances sampled on `grid`.
pub fn numerical_contact_order(
    a: &dyn ArcSampler,
    b: &dyn ArcSampler,
    norm: NormKind,
    grid: &Grid,
) -> Result<DistanceProfile, NumericError> {
    if a.dim() != b.dim() {
        return Err(NumericError::DimensionMismatch(a.dim(), b.dim()));
    }
    let mut samples = Vec::with_capacity(grid.count);
    for t in grid.points() {
        let (_, ln_d) = sample_distance(a, b, &t, norm)?;
        let ln_t = t.ln();
        samples.push(Sample {
            t: t.to_f64(),
            d: ln_d.exp(),
            ln_t,
            ln_d,
        });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.ln_t).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.ln_d).collect();
    let (exponent, intercept, r_squared) = fit_line(&xs, &ys)
        .ok_or_else(|| NumericError::DegenerateFit("grid has a single distinct t".into()))?;
    Ok(DistanceProfile {
        norm,
        samples,
        exponent,
        intercept,
        r_squared,
        accepted: r_squared >= R_SQUARED_THRESHOLD,
    })
}
