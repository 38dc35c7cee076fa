//! Semialgebraic arcs as truncated Puiseux series, their max-norm distance
//! parametrization, and exact orders of contact.
//!
//! Reparametrizing by max-norm distance `t` needs the inverse of the dominating
//! coordinate `d(s) = c s^q (1 + u(s))`. Writing `t = c tau^q`, the inverse
//! `s(tau) = tau (1 + ...)` has rational coefficients, and so do the coordinates
//! `x_i(s(tau))`. Converting back to `t` turns `r tau^g` into `r c^(-g/q) t^(g/q)`, so a
//! reparametrized arc is stored as rational `tau`-series plus the scale `c`, and
//! coefficients are compared exactly without ever forming `c^(-g/q)`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::foliation::{ContactOrder, Leaf, Point};
use crate::rational::Rational;
use crate::series::Series;
use crate::weights::WeightVector;

/// Largest `t`-order tried when comparing exact (untruncated) arcs.
pub const MAX_EXACT_ORDER: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArcError {
    #[error("every coordinate of the arc vanishes identically")]
    ZeroArc,
    #[error("exponent {0} is not positive")]
    NonPositiveExponent(Rational),
    #[error("exponents of coordinate {coord} are not strictly increasing")]
    NotIncreasing { coord: usize },
    #[error("exponent {exp} of coordinate {coord} is not below the truncation order {order}")]
    BeyondTruncation {
        coord: usize,
        exp: Rational,
        order: Rational,
    },
    #[error("arcs have different dimensions ({0} and {1})")]
    DimensionMismatch(usize, usize),
    #[error("arcs start at different base points")]
    BaseMismatch,
    #[error("requested order {requested} exceeds the available order {available}")]
    InsufficientOrder {
        requested: Rational,
        available: Rational,
    },
    #[error("arcs agree up to order {0}; supply deeper truncations")]
    IndistinguishableToOrder(Rational),
    #[error("substitution power must be positive, got {0}")]
    NonPositivePower(Rational),
}

/// An arc `s -> base + (x_1(s), ..., x_n(s))` with Puiseux coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuiseuxArc {
    base: Point,
    coords: Vec<Series>,
    truncation: Option<Rational>,
}

impl PuiseuxArc {
    /// `coords[i]` lists `(coefficient, exponent)` pairs with strictly increasing positive
    /// exponents. `truncation = None` marks the coordinates as exact.
    pub fn new(
        base: Point,
        coords: Vec<Vec<(Rational, Rational)>>,
        truncation: Option<Rational>,
    ) -> Result<Self, ArcError> {
        if base.len() != coords.len() {
            return Err(ArcError::DimensionMismatch(base.len(), coords.len()));
        }
        let mut series = Vec::with_capacity(coords.len());
        for (i, terms) in coords.into_iter().enumerate() {
            for (k, (_, e)) in terms.iter().enumerate() {
                if !e.is_positive() {
                    return Err(ArcError::NonPositiveExponent(e.clone()));
                }
                if k > 0 && terms[k - 1].1 >= *e {
                    return Err(ArcError::NotIncreasing { coord: i });
                }
                if let Some(t) = &truncation {
                    if e >= t {
                        return Err(ArcError::BeyondTruncation {
                            coord: i,
                            exp: e.clone(),
                            order: t.clone(),
                        });
                    }
                }
            }
            series.push(Series::from_terms(
                terms.into_iter().map(|(c, e)| (e, c)),
                truncation.clone(),
            ));
        }
        if series.iter().all(Series::is_zero) {
            return Err(ArcError::ZeroArc);
        }
        Ok(PuiseuxArc {
            base,
            coords: series,
            truncation,
        })
    }

    /// Arc at the origin.
    pub fn at_origin(
        coords: Vec<Vec<(Rational, Rational)>>,
        truncation: Option<Rational>,
    ) -> Result<Self, ArcError> {
        let base = vec![Rational::zero(); coords.len()];
        PuiseuxArc::new(base, coords, truncation)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    /// Displacement series `x_i(s) = gamma_i(s) - base_i`.
    pub fn coordinate(&self, i: usize) -> &Series {
        &self.coords[i]
    }

    pub fn coordinates(&self) -> &[Series] {
        &self.coords
    }

    pub fn truncation(&self) -> Option<&Rational> {
        self.truncation.as_ref()
    }

    pub fn valuation(&self) -> Rational {
        arc_valuation(self)
    }
}

/// Leading exponent of `||gamma(s) - base||_max`.
pub fn arc_valuation(arc: &PuiseuxArc) -> Rational {
    arc.coords
        .iter()
        .filter_map(Series::valuation)
        .min()
        .cloned()
        .expect("arcs have a nonzero coordinate")
}

/// The same arc in the parameter `u` with `s = u^q`.
pub fn substitute_power(arc: &PuiseuxArc, q: &Rational) -> Result<PuiseuxArc, ArcError> {
    if !q.is_positive() {
        return Err(ArcError::NonPositivePower(q.clone()));
    }
    Ok(PuiseuxArc {
        base: arc.base.clone(),
        coords: arc.coords.iter().map(|c| c.substitute_power(q)).collect(),
        truncation: arc.truncation.as_ref().map(|t| t * q),
    })
}

/// An arc parametrized by max-norm distance `t` from its base point.
///
/// Coordinates are kept as rational series in `tau`, with `t = scale * tau^degree`.
#[derive(Debug, Clone)]
pub struct DistanceArc {
    base: Point,
    scale: Rational,
    degree: Rational,
    dominant: usize,
    dominant_sign: i32,
    distance: Series,
    s_of_tau: Series,
    coords_tau: Vec<Series>,
    order: Rational,
}

impl DistanceArc {
    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    /// Leading coefficient `c > 0` of the distance series.
    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    /// Leading exponent `q` of the distance series.
    pub fn degree(&self) -> &Rational {
        &self.degree
    }

    /// Index of the coordinate realizing the max norm near the base point.
    pub fn dominant(&self) -> usize {
        self.dominant
    }

    /// `d(s) = ||gamma(s) - base||_max` as a series in the original parameter.
    pub fn distance_series(&self) -> &Series {
        &self.distance
    }

    /// Original parameter as a function of `tau`: `d(s(tau)) = scale * tau^degree`.
    pub fn parameter_series(&self) -> &Series {
        &self.s_of_tau
    }

    pub fn tau_coordinate(&self, i: usize) -> &Series {
        &self.coords_tau[i]
    }

    pub fn dim(&self) -> usize {
        self.coords_tau.len()
    }

    /// Terms with `t`-exponent below this order are exact.
    pub fn order(&self) -> &Rational {
        &self.order
    }

    /// Raw coefficient `r` of `t^e` in coordinate `i`; the actual coefficient is
    /// `r * scale^(-e)`.
    pub fn raw_coefficient(&self, i: usize, e: &Rational) -> Rational {
        self.coords_tau[i].coefficient(&(e * &self.degree))
    }

    /// `t`-exponents carrying a nonzero coefficient in coordinate `i`, below `order`.
    pub fn exponents(&self, i: usize) -> Vec<Rational> {
        self.coords_tau[i]
            .terms()
            .map(|(g, _)| g / &self.degree)
            .filter(|e| *e < self.order)
            .collect()
    }

    /// The coefficient of `t^e` in coordinate `i`, when it is rational.
    pub fn exact_coefficient(&self, i: usize, e: &Rational) -> Option<Rational> {
        let raw = self.raw_coefficient(i, e);
        if raw.is_zero() {
            return Some(raw);
        }
        let num = i32::try_from(e.numer()).ok()?;
        let den = u32::try_from(e.denom()).ok()?;
        let factor = self.scale.pow(-num).exact_root(den)?;
        Some(raw * factor)
    }

    pub fn coefficient_f64(&self, i: usize, e: &Rational) -> f64 {
        let raw = self.raw_coefficient(i, e);
        if raw.is_zero() {
            return 0.0;
        }
        raw.to_f64() * (-e.to_f64() * self.scale.ln()).exp()
    }

    /// The reparametrized arc with `t` as parameter, when every coefficient is rational.
    pub fn to_rational_arc(&self) -> Option<PuiseuxArc> {
        let coords = (0..self.dim())
            .map(|i| {
                self.exponents(i)
                    .into_iter()
                    .map(|e| Some((self.exact_coefficient(i, &e)?, e)))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        PuiseuxArc::new(self.base.clone(), coords, Some(self.order.clone())).ok()
    }

    /// Whether `t^e` has the same coefficient in coordinate `i` of both arcs.
    fn same_coefficient(&self, other: &DistanceArc, i: usize, e: &Rational) -> bool {
        let ra = self.raw_coefficient(i, e);
        let rb = other.raw_coefficient(i, e);
        if ra.signum() != rb.signum() {
            return false;
        }
        if ra.is_zero() || self.scale == other.scale {
            return ra == rb;
        }
        // ra * ca^(-e) == rb * cb^(-e)  <=>  (ra/rb)^den == (ca/cb)^num
        let num = i32::try_from(e.numer()).expect("moderate exponent");
        let den = i32::try_from(e.denom()).expect("moderate exponent");
        (&ra / &rb).pow(den) == (&self.scale / &other.scale).pow(num)
    }
}

/// Sign of the leading term of `|a| - |b|` for small positive parameter values, or
/// `None` if the two agree as far as they are known.
fn compare_abs(a: &Series, b: &Series) -> Option<std::cmp::Ordering> {
    let sa = a.leading().map_or(0, |(_, c)| c.signum());
    let sb = b.leading().map_or(0, |(_, c)| c.signum());
    let diff = a
        .scale(&Rational::integer(sa as i64))
        .sub(&b.scale(&Rational::integer(sb as i64)));
    diff.leading().map(|(_, c)| c.signum().cmp(&0))
}

/// Reparametrizes `arc` by max-norm distance, exact up to `t`-order `order`.
pub fn distance_reparametrize(arc: &PuiseuxArc, order: &Rational) -> Result<DistanceArc, ArcError> {
    let v = arc_valuation(arc);
    if let Some(t) = &arc.truncation {
        let available = t / &v;
        if *order > available {
            return Err(ArcError::InsufficientOrder {
                requested: order.clone(),
                available,
            });
        }
    }

    let mut dominant = arc
        .coords
        .iter()
        .position(|c| !c.is_zero())
        .expect("arcs have a nonzero coordinate");
    for i in dominant + 1..arc.dim() {
        if arc.coords[i].is_zero() {
            continue;
        }
        if compare_abs(&arc.coords[i], &arc.coords[dominant]) == Some(std::cmp::Ordering::Greater) {
            dominant = i;
        }
    }
    let x = &arc.coords[dominant];
    let (q, lead) = x.leading().map(|(e, c)| (e.clone(), c.clone())).unwrap();
    let sign = lead.signum();
    let distance = x.scale(&Rational::integer(sign as i64));
    let scale = lead.abs();

    // tau-precision needed for the coordinates, and for s(tau) so that its error does
    // not leak into them (x_i' ~ s^(v_i - 1) with v_i >= q).
    let prec_tau = order * &q;
    let prec_s = Rational::max_of(&prec_tau, &(&(&prec_tau - &q) + &Rational::one())).clone();

    // d(s) = c s^q U(s),  h(s) = s U(s)^(1/q),  h(s(tau)) = tau.
    let unit = distance.shift(&-&q, &scale.recip());
    let h = unit
        .unit_pow(&q.recip(), &prec_s)
        .shift(&Rational::one(), &Rational::one());
    let s_of_tau = h.revert(&(&prec_s + &Rational::one()));

    let coords_tau: Vec<Series> = arc
        .coords
        .iter()
        .map(|c| {
            if c.is_zero() {
                c.truncate(&prec_tau)
            } else {
                c.compose(&s_of_tau, &prec_tau)
            }
        })
        .collect();
    let achieved = coords_tau
        .iter()
        .filter_map(|c| c.order())
        .map(|o| o / &q)
        .fold(order.clone(), |acc, o| acc.min(o));

    Ok(DistanceArc {
        base: arc.base.clone(),
        scale,
        degree: q,
        dominant,
        dominant_sign: sign,
        distance,
        s_of_tau,
        coords_tau,
        order: achieved,
    })
}

impl DistanceArc {
    /// `+1` or `-1`: the dominating coordinate equals `sign * t` to leading order.
    pub fn dominant_sign(&self) -> i32 {
        self.dominant_sign
    }
}

fn contact_at_order(a: &DistanceArc, b: &DistanceArc) -> Option<Rational> {
    let order = a.order.clone().min(b.order.clone());
    (0..a.dim())
        .filter_map(|i| {
            let exps: BTreeSet<Rational> = a
                .exponents(i)
                .into_iter()
                .chain(b.exponents(i))
                .filter(|e| *e < order)
                .collect();
            exps.into_iter().find(|e| !a.same_coefficient(b, i, e))
        })
        .min()
}

/// Exact order of contact: both arcs are reparametrized by max-norm distance and the
/// valuation of their max-norm difference is returned.
pub fn symbolic_contact_order(a: &PuiseuxArc, b: &PuiseuxArc) -> Result<ContactOrder, ArcError> {
    if a.dim() != b.dim() {
        return Err(ArcError::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.base != b.base {
        return Err(ArcError::BaseMismatch);
    }
    let limit = |arc: &PuiseuxArc| {
        arc.truncation
            .as_ref()
            .map(|t| t / &arc_valuation(arc))
            .unwrap_or_else(|| Rational::integer(MAX_EXACT_ORDER))
    };
    let max_order = limit(a).min(limit(b));
    let mut order = Rational::integer(2).min(max_order.clone());
    loop {
        let ra = distance_reparametrize(a, &order)?;
        let rb = distance_reparametrize(b, &order)?;
        if let Some(lambda) = contact_at_order(&ra, &rb) {
            return Ok(ContactOrder::new(lambda));
        }
        if order >= max_order {
            return Err(ArcError::IndistinguishableToOrder(order));
        }
        order = (&order * &Rational::integer(2)).min(max_order.clone());
    }
}

/// The leaf through `leaf.seed()` as the monomial arc
/// `(u^(a_1/a_k) x_1, ..., u x_k, 0, ..., 0)`, `k` the last nonzero seed index.
pub fn leaf_as_arc(w: &WeightVector, leaf: &Leaf) -> PuiseuxArc {
    assert_eq!(w, leaf.weights(), "leaf belongs to another foliation");
    let k = leaf.last_nonzero();
    let coords = leaf
        .seed()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if x.is_zero() {
                Vec::new()
            } else {
                vec![(x.clone(), w.ratio(i, k))]
            }
        })
        .collect();
    PuiseuxArc::at_origin(coords, None).expect("leaf seeds are nonzero")
}

/// Whether the minimum of the three pairwise contact orders is attained twice.
pub fn ultrametric_check(a: &PuiseuxArc, b: &PuiseuxArc, c: &PuiseuxArc) -> Result<bool, ArcError> {
    let mut orders = [
        symbolic_contact_order(a, b)?,
        symbolic_contact_order(b, c)?,
        symbolic_contact_order(a, c)?,
    ];
    orders.sort();
    Ok(orders[0] == orders[1])
}
