//! Truncated fractional-power (Puiseux) series in one variable with exact rational
//! coefficients.
//!
//! A series is a finite sparse sum `sum c_e s^e` together with an optional truncation
//! order `T`: the value is only known modulo `O(s^T)`. `None` means the sum is exact.
//! Every operation propagates the truncation order it can guarantee; operations that
//! produce infinite expansions take an explicit working precision `prec` and are exact
//! modulo `O(s^prec)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Series {
    terms: BTreeMap<Rational, Rational>,
    order: Option<Rational>,
}

fn min_order(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

fn below(e: &Rational, order: &Option<Rational>) -> bool {
    order.as_ref().is_none_or(|o| e < o)
}

/// Generalized binomial coefficient `binom(alpha, k)`.
fn binomial(alpha: &Rational, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| {
        acc * (alpha - &Rational::integer(i as i64)) / Rational::integer(i as i64 + 1)
    })
}

impl Series {
    pub fn zero() -> Self {
        Series::default()
    }

    pub fn monomial(coeff: Rational, exp: Rational) -> Self {
        Series::from_terms([(exp, coeff)], None)
    }

    /// Terms at or above `order` are dropped; zero coefficients are dropped; repeated
    /// exponents are summed.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Rational, Rational)>,
        order: Option<Rational>,
    ) -> Self {
        let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (e, c) in terms {
            if below(&e, &order) {
                *map.entry(e).or_default() += &c;
            }
        }
        map.retain(|_, c| !c.is_zero());
        Series { terms: map, order }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exp: &Rational) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn order(&self) -> Option<&Rational> {
        self.order.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    /// No known nonzero term. A truncated series can be zero only up to its order.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<(&Rational, &Rational)> {
        self.terms.iter().next()
    }

    pub fn valuation(&self) -> Option<&Rational> {
        self.terms.keys().next()
    }

    /// Valuation, or the truncation order when no term is known. `None` only for the
    /// exact zero series.
    fn effective_valuation(&self) -> Option<Rational> {
        self.valuation().cloned().or_else(|| self.order.clone())
    }

    pub fn truncate(&self, order: &Rational) -> Series {
        let order = min_order(self.order.clone(), Some(order.clone()));
        Series {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| below(e, &order))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
            order,
        }
    }

    /// Drops the truncation marker; for approximations whose accuracy is tracked elsewhere.
    pub(crate) fn assume_exact(mut self) -> Series {
        self.order = None;
        self
    }

    pub fn add(&self, other: &Series) -> Series {
        let order = min_order(self.order.clone(), other.order.clone());
        Series::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, c)| (e.clone(), c.clone())),
            order,
        )
    }

    pub fn neg(&self) -> Series {
        self.scale(&Rational::integer(-1))
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Series {
        if c.is_zero() {
            return Series {
                terms: BTreeMap::new(),
                order: self.order.clone(),
            };
        }
        Series {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            order: self.order.clone(),
        }
    }

    /// Multiplication by `c * s^shift`.
    pub fn shift(&self, shift: &Rational, c: &Rational) -> Series {
        let scaled = self.scale(c);
        Series {
            terms: scaled
                .terms
                .into_iter()
                .map(|(e, x)| (e + shift, x))
                .collect(),
            order: self.order.as_ref().map(|o| o + shift),
        }
    }

    /// Product, exact modulo `O(s^prec)` (and modulo whatever the operands' orders allow).
    pub fn mul(&self, other: &Series, prec: Option<&Rational>) -> Series {
        let mut order = min_order(
            match (&self.order, other.effective_valuation()) {
                (Some(o), Some(v)) => Some(o + &v),
                _ => None,
            },
            match (&other.order, self.effective_valuation()) {
                (Some(o), Some(v)) => Some(o + &v),
                _ => None,
            },
        );
        if self.order.is_none() && self.terms.is_empty() || other.order.is_none() && other.terms.is_empty() {
            order = None;
        }
        order = min_order(order, prec.cloned());
        let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
        let other_val = other.valuation().cloned();
        for (e1, c1) in &self.terms {
            if other_val.as_ref().is_some_and(|v| !below(&(e1 + v), &order)) {
                break;
            }
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if !below(&e, &order) {
                    break;
                }
                *map.entry(e).or_default() += &(c1 * c2);
            }
        }
        map.retain(|_, c| !c.is_zero());
        Series { terms: map, order }
    }

    /// `self^n` for `n >= 0`, modulo `O(s^prec)`.
    pub fn pow_int(&self, n: u32, prec: Option<&Rational>) -> Series {
        let mut result = Series::monomial(Rational::one(), Rational::zero());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base, prec);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, prec);
            }
        }
        result
    }

    /// `(1 + u)^alpha` by the binomial series, for a series of the form `1 + u` with
    /// `val(u) > 0`. Panics otherwise.
    pub fn unit_pow(&self, alpha: &Rational, prec: &Rational) -> Series {
        let (e0, c0) = self.leading().expect("unit_pow of a zero series");
        assert!(e0.is_zero() && c0.is_one(), "unit_pow needs leading term 1");
        let u = Series::from_terms(
            self.terms.iter().skip(1).map(|(e, c)| (e.clone(), c.clone())),
            self.order.clone(),
        );
        let order = min_order(self.order.clone(), Some(prec.clone()));
        if alpha.is_integer() && !alpha.is_negative() {
            let n: u32 = alpha.numer().try_into().expect("small integer exponent");
            return self.pow_int(n, order.as_ref());
        }
        let mut result = Series::from_terms([(Rational::zero(), Rational::one())], order.clone());
        let Some(vu) = u.effective_valuation() else {
            return result;
        };
        let mut power = Series::monomial(Rational::one(), Rational::zero());
        let mut k = 0u32;
        loop {
            k += 1;
            let reach = &vu * &Rational::integer(k as i64);
            if !below(&reach, &order) {
                break;
            }
            power = power.mul(&u, order.as_ref());
            result = result.add(&power.scale(&binomial(alpha, k)));
        }
        result.truncate_opt(order)
    }

    fn truncate_opt(&self, order: Option<Rational>) -> Series {
        match order {
            Some(o) => self.truncate(&o),
            None => self.clone(),
        }
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Series {
        Series::from_terms(
            self.terms
                .iter()
                .filter(|(e, _)| !e.is_zero())
                .map(|(e, c)| (e - &Rational::one(), c * e)),
            self.order.as_ref().map(|o| o - &Rational::one()),
        )
    }

    /// Substitution `s = u^q`: every exponent and the order are multiplied by `q > 0`.
    pub fn substitute_power(&self, q: &Rational) -> Series {
        assert!(q.is_positive());
        Series {
            terms: self.terms.iter().map(|(e, c)| (e * q, c.clone())).collect(),
            order: self.order.as_ref().map(|o| o * q),
        }
    }

    /// Composition `self(g(tau))` modulo `O(tau^prec)`, for `g` with positive valuation.
    /// Requires `g`'s leading coefficient to be 1 unless every exponent of `self` is an
    /// integer; panics otherwise.
    pub fn compose(&self, g: &Series, prec: &Rational) -> Series {
        let (p, g0) = g.leading().expect("compose with a zero inner series");
        assert!(p.is_positive(), "inner series must vanish at 0");
        let p = p.clone();
        // g = g0 tau^p (1 + w)
        let unit = g.shift(&-&p, &g0.recip());
        let g0 = g0.clone();
        let mut order = Some(prec.clone());
        if let Some(f_order) = &self.order {
            order = min_order(order, Some(f_order * &p));
        }
        if let (Some(g_order), Some(vf)) = (&g.order, self.effective_valuation()) {
            order = min_order(order, Some(&(&p * &vf) + &(g_order - &p)));
        }
        let order = order.expect("bounded by prec");
        let mut result = Series::from_terms([], Some(order.clone()));
        for (e, c) in &self.terms {
            let shift = &p * e;
            if shift >= order {
                break;
            }
            let lead = if g0.is_one() {
                Rational::one()
            } else {
                assert!(e.is_integer(), "non-unit leading coefficient needs integer exponents");
                g0.pow(i32::try_from(e.numer()).expect("small exponent"))
            };
            let rest = &order - &shift;
            let powered = unit.unit_pow(e, &rest);
            result = result.add(&powered.shift(&shift, &(c * &lead)));
        }
        result.truncate(&order)
    }

    /// Series reversion: for `h = s + (higher terms)`, the series `s(tau)` with
    /// `h(s(tau)) = tau`, by Newton iteration. The result is exact modulo
    /// `O(tau^prec)`, or modulo `h`'s own truncation order if that is smaller.
    pub fn revert(&self, prec: &Rational) -> Series {
        let (e0, c0) = self.leading().expect("revert of a zero series");
        assert!(e0.is_one() && c0.is_one(), "revert needs leading term s");
        let order = min_order(self.order.clone(), Some(prec.clone())).expect("bounded");
        let h = self.clone().assume_exact().truncate(&order).assume_exact();
        let dh = h.derivative();
        let tau = Series::monomial(Rational::one(), Rational::one());
        let mut s = tau.clone();
        for _ in 0..128 {
            let residual = h.compose(&s, &order).sub(&tau);
            if residual.is_zero() {
                return s.truncate(&order);
            }
            let slope = dh.compose(&s, &order).unit_pow(&Rational::integer(-1), &order);
            let step = residual.mul(&slope, Some(&order));
            s = s.sub(&step).assume_exact().truncate(&order).assume_exact();
        }
        panic!("series reversion did not converge");
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let c = if c.is_integer() {
                    c.numer().to_string()
                } else {
                    c.to_string()
                };
                if e.is_zero() {
                    c
                } else if e.is_integer() {
                    format!("{c}*s^{}", e.numer())
                } else {
                    format!("{c}*s^({e})")
                }
            })
            .collect();
        if let Some(o) = &self.order {
            parts.push(format!("O(s^({o}))"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn poly(terms: &[(i64, i64, i64)]) -> Series {
        // (coeff, exp numerator, exp denominator)
        Series::from_terms(terms.iter().map(|&(c, n, d)| (q(n, d), q(c, 1))), None)
    }

    #[test]
    fn product_of_exact_polynomials() {
        let a = poly(&[(1, 1, 1), (1, 2, 1)]);
        let b = poly(&[(1, 1, 1), (-1, 2, 1)]);
        assert_eq!(a.mul(&b, None), poly(&[(1, 2, 1), (-1, 4, 1)]));
    }

    #[test]
    fn product_tracks_truncation() {
        let a = Series::from_terms([(q(1, 1), q(1, 1))], Some(q(3, 1)));
        let b = poly(&[(1, 2, 1)]);
        let p = a.mul(&b, None);
        assert_eq!(p.order(), Some(&q(5, 1)));
        assert_eq!(p.coefficient(&q(3, 1)), q(1, 1));
    }

    #[test]
    fn geometric_series() {
        let one_plus_s = poly(&[(1, 0, 1), (1, 1, 1)]);
        let inv = one_plus_s.unit_pow(&q(-1, 1), &q(5, 1));
        let expected = Series::from_terms(
            (0..5).map(|k| (q(k, 1), q(if k % 2 == 0 { 1 } else { -1 }, 1))),
            Some(q(5, 1)),
        );
        assert_eq!(inv, expected);
    }

    #[test]
    fn square_root_squares_back() {
        let u = poly(&[(1, 0, 1), (3, 1, 2), (-2, 3, 2)]);
        let root = u.unit_pow(&q(1, 2), &q(6, 1));
        let back = root.mul(&root, Some(&q(6, 1)));
        assert_eq!(back, u.truncate(&q(6, 1)));
    }

    #[test]
    fn compose_matches_direct_expansion() {
        // (s + s^2) at s = t + t^2 equals t + 2t^2 + 2t^3 + t^4
        let f = poly(&[(1, 1, 1), (1, 2, 1)]);
        let g = poly(&[(1, 1, 1), (1, 2, 1)]);
        let fg = f.compose(&g, &q(10, 1));
        assert_eq!(fg, poly(&[(1, 1, 1), (2, 2, 1), (2, 3, 1), (1, 4, 1)]).truncate(&q(10, 1)));
    }

    #[test]
    fn reversion_of_s_plus_s_squared() {
        // s(t) = t - t^2 + 2t^3 - 5t^4 + 14t^5 - ...  (signed Catalan numbers)
        let h = poly(&[(1, 1, 1), (1, 2, 1)]);
        let s = h.revert(&q(7, 1));
        let catalan = [1, 1, 2, 5, 14, 42];
        for (k, c) in catalan.iter().enumerate() {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(s.coefficient(&q(k as i64 + 1, 1)), q(sign * c, 1));
        }
        let back = h.compose(&s, &q(7, 1));
        assert_eq!(back, Series::from_terms([(q(1, 1), q(1, 1))], Some(q(7, 1))));
    }

    #[test]
    fn reversion_with_fractional_exponents() {
        let h = poly(&[(1, 1, 1), (2, 3, 2), (-1, 7, 3)]);
        let s = h.revert(&q(4, 1));
        let back = h.compose(&s, &q(4, 1));
        assert_eq!(back.terms().count(), 1);
        assert_eq!(back.coefficient(&q(1, 1)), q(1, 1));
    }

    #[test]
    fn reversion_respects_input_truncation() {
        let h = Series::from_terms([(q(1, 1), q(1, 1)), (q(2, 1), q(1, 1))], Some(q(3, 1)));
        let s = h.revert(&q(10, 1));
        assert_eq!(s.order(), Some(&q(3, 1)));
    }

    #[test]
    fn derivative_and_substitution() {
        let f = poly(&[(2, 3, 2), (1, 2, 1)]);
        assert_eq!(
            f.derivative(),
            Series::from_terms([(q(1, 2), q(3, 1)), (q(1, 1), q(2, 1))], None)
        );
        assert_eq!(f.substitute_power(&q(2, 1)), poly(&[(2, 3, 1), (1, 4, 1)]));
    }
}
