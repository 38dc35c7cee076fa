//! Polynomials with rational coefficients and weighted homogeneous surface germs.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;
use crate::weights::WeightVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolynomialError {
    #[error("zero polynomial")]
    Zero,
    #[error("monomial has {found} exponents, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("polynomial in {vars} variables with {weights} weights")]
    WeightCount { vars: usize, weights: usize },
    #[error("not weighted homogeneous: weighted degrees {degrees:?}")]
    NotWeightedHomogeneous { degrees: Vec<u64> },
    #[error("weighted degree must be positive")]
    ConstantPolynomial,
    #[error("surface germs need 3 variables, got {0}")]
    NotASurface(usize),
}

/// A polynomial in `nvars` variables as a canonical list of monomials, sorted by
/// descending exponent vector, with nonzero coefficients and no repeated exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedPolynomial {
    nvars: usize,
    monomials: Vec<(Rational, Vec<u32>)>,
}

impl WeightedPolynomial {
    pub fn new(nvars: usize, monomials: Vec<(Rational, Vec<u32>)>) -> Result<Self, PolynomialError> {
        let mut combined: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (c, alpha) in monomials {
            if alpha.len() != nvars {
                return Err(PolynomialError::Arity {
                    expected: nvars,
                    found: alpha.len(),
                });
            }
            *combined.entry(alpha).or_insert_with(Rational::zero) += &c;
        }
        let monomials: Vec<_> = combined
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| (c, a))
            .collect();
        if monomials.is_empty() {
            return Err(PolynomialError::Zero);
        }
        Ok(WeightedPolynomial { nvars, monomials })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn monomials(&self) -> &[(Rational, Vec<u32>)] {
        &self.monomials
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.monomials
            .iter()
            .map(|(c, _)| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars);
        self.monomials
            .iter()
            .map(|(c, alpha)| {
                alpha
                    .iter()
                    .zip(x)
                    .fold(c.to_f64(), |acc, (&e, &xi)| acc * xi.powi(e as i32))
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars);
        self.monomials
            .iter()
            .map(|(c, alpha)| {
                alpha
                    .iter()
                    .zip(x)
                    .fold(c.clone(), |acc, (&e, xi)| acc * xi.pow(e as i32))
            })
            .sum()
    }

    /// Partial derivative in variable `i`, or `None` if it vanishes.
    pub fn partial(&self, i: usize) -> Option<WeightedPolynomial> {
        let terms = self
            .monomials
            .iter()
            .filter(|(_, a)| a[i] > 0)
            .map(|(c, a)| {
                let mut b = a.clone();
                b[i] -= 1;
                (c * &Rational::from(a[i]), b)
            })
            .collect();
        WeightedPolynomial::new(self.nvars, terms).ok()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nvars)
            .map(|i| self.partial(i).map_or(0.0, |p| p.eval(x)))
            .collect()
    }

    /// Renames variables: variable `i` of the result is variable `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> WeightedPolynomial {
        assert_eq!(perm.len(), self.nvars);
        let monomials = self
            .monomials
            .iter()
            .map(|(c, a)| (c.clone(), perm.iter().map(|&j| a[j]).collect()))
            .collect();
        WeightedPolynomial::new(self.nvars, monomials).expect("permutation keeps the polynomial nonzero")
    }

    /// Restriction to `x_i = value`.
    pub fn substitute(&self, i: usize, value: &Rational) -> Option<WeightedPolynomial> {
        let monomials = self
            .monomials
            .iter()
            .map(|(c, a)| {
                let mut b = a.clone();
                b[i] = 0;
                (c * &value.pow(a[i] as i32), b)
            })
            .collect();
        WeightedPolynomial::new(self.nvars, monomials).ok()
    }

    fn weighted_degrees(&self, w: &WeightVector) -> Vec<u64> {
        self.monomials
            .iter()
            .map(|(_, a)| {
                a.iter()
                    .zip(w.as_slice())
                    .map(|(&e, &wi)| e as u64 * wi as u64)
                    .sum()
            })
            .collect()
    }
}

impl fmt::Display for WeightedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (c, alpha)) in self.monomials.iter().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let c = c.abs();
            let vars: Vec<String> = alpha
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| match e {
                    1 => format!("x{}", i + 1),
                    _ => format!("x{}^{}", i + 1, e),
                })
                .collect();
            let coeff = if c.is_integer() {
                c.numer().to_string()
            } else {
                c.to_string()
            };
            match (c.is_one(), vars.is_empty()) {
                (_, true) => write!(f, "{coeff}")?,
                (true, false) => write!(f, "{}", vars.join("*"))?,
                (false, false) => write!(f, "{coeff}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Common weighted degree `sum_i w_i alpha_i` of all monomials.
pub fn weighted_degree_check(f: &WeightedPolynomial, w: &WeightVector) -> Result<u64, PolynomialError> {
    if f.nvars != w.len() {
        return Err(PolynomialError::WeightCount {
            vars: f.nvars,
            weights: w.len(),
        });
    }
    let mut degrees = f.weighted_degrees(w);
    degrees.sort_unstable();
    degrees.dedup();
    match degrees.as_slice() {
        [d] => Ok(*d),
        _ => Err(PolynomialError::NotWeightedHomogeneous { degrees }),
    }
}

/// The germ at 0 of `{f = 0}` in R^3 for a weighted homogeneous `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceGerm {
    #[serde(serialize_with = "display")]
    f: WeightedPolynomial,
    w: WeightVector,
    degree: u64,
}

fn display<S: serde::Serializer>(f: &WeightedPolynomial, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

impl SurfaceGerm {
    pub fn new(f: WeightedPolynomial, w: WeightVector) -> Result<Self, PolynomialError> {
        if f.nvars != 3 {
            return Err(PolynomialError::NotASurface(f.nvars));
        }
        let degree = weighted_degree_check(&f, &w)?;
        if degree == 0 {
            return Err(PolynomialError::ConstantPolynomial);
        }
        Ok(SurfaceGerm { f, w, degree })
    }

    pub fn polynomial(&self) -> &WeightedPolynomial {
        &self.f
    }

    pub fn weights(&self) -> &WeightVector {
        &self.w
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }
}

/// Checks `f(t^a1 x1, t^a2 x2, t^a3 x3) = t^d f(x)` as an identity of polynomials in
/// `(x, t)`.
pub fn flow_invariance_identity(s: &SurfaceGerm) -> bool {
    let transformed = |extra: &dyn Fn(&[u32]) -> u64| {
        let mut out: BTreeMap<(Vec<u32>, u64), Rational> = BTreeMap::new();
        for (c, alpha) in &s.f.monomials {
            *out.entry((alpha.clone(), extra(alpha)))
                .or_insert_with(Rational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    };
    let lhs = transformed(&|alpha| {
        alpha
            .iter()
            .zip(s.w.as_slice())
            .map(|(&e, &wi)| e as u64 * wi as u64)
            .sum()
    });
    let rhs = transformed(&|_| s.degree);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::validate_weights;

    fn poly(n: usize, terms: &[(i64, &[u32])]) -> WeightedPolynomial {
        WeightedPolynomial::new(n, terms.iter().map(|(c, a)| (q(*c, 1), a.to_vec())).collect()).unwrap()
    }

    #[test]
    fn canonical_form() {
        let f = poly(3, &[(-1, &[0, 0, 4]), (1, &[0, 2, 0]), (1, &[2, 0, 0])]);
        assert_eq!(f.to_string(), "x1^2 + x2^2 - x3^4");
        let g = poly(2, &[(1, &[1, 0]), (2, &[0, 1]), (-1, &[1, 0])]);
        assert_eq!(g.monomials().len(), 1);
        assert_eq!(g.to_string(), "2*x2");
        assert_eq!(
            WeightedPolynomial::new(1, vec![(q(1, 1), vec![1]), (q(-1, 1), vec![1])]),
            Err(PolynomialError::Zero)
        );
        let h = WeightedPolynomial::new(2, vec![(q(-1, 2), vec![1, 1]), (q(3, 1), vec![0, 0])]).unwrap();
        assert_eq!(h.to_string(), "-1/2*x1*x2 + 3");
    }

    #[test]
    fn evaluation_and_gradient() {
        let f = poly(3, &[(1, &[2, 0, 0]), (1, &[0, 2, 0]), (-1, &[0, 0, 4])]);
        assert_eq!(f.eval(&[1.0, 2.0, 1.0]), 4.0);
        assert_eq!(f.eval_exact(&[q(1, 2), q(0, 1), q(1, 1)]), q(-3, 4));
        assert_eq!(f.gradient(&[1.0, 2.0, 1.0]), vec![2.0, 4.0, -4.0]);
        assert_eq!(poly(2, &[(3, &[0, 0])]).partial(0), None);
    }

    #[test]
    fn weighted_degrees() {
        let w221 = validate_weights(&[2, 2, 1]).unwrap();
        let f = poly(3, &[(1, &[2, 0, 0]), (1, &[0, 2, 0]), (-1, &[0, 0, 4])]);
        assert_eq!(weighted_degree_check(&f, &w221), Ok(4));
        let g = poly(2, &[(1, &[2, 0]), (1, &[0, 3])]);
        assert_eq!(weighted_degree_check(&g, &validate_weights(&[3, 2]).unwrap()), Ok(6));
        assert_eq!(
            weighted_degree_check(&g, &validate_weights(&[1, 1]).unwrap()),
            Err(PolynomialError::NotWeightedHomogeneous { degrees: vec![2, 3] })
        );
        assert!(matches!(
            weighted_degree_check(&g, &w221),
            Err(PolynomialError::WeightCount { .. })
        ));
    }

    #[test]
    fn germ_construction() {
        let w221 = validate_weights(&[2, 2, 1]).unwrap();
        let f = poly(3, &[(1, &[2, 0, 0]), (1, &[0, 2, 0]), (-1, &[0, 0, 4])]);
        let s = SurfaceGerm::new(f, w221.clone()).unwrap();
        assert_eq!(s.degree(), 4);
        assert!(flow_invariance_identity(&s));
        assert_eq!(
            SurfaceGerm::new(poly(2, &[(1, &[2, 0])]), w221.clone()),
            Err(PolynomialError::NotASurface(2))
        );
        assert_eq!(
            SurfaceGerm::new(poly(3, &[(1, &[0, 0, 0])]), w221),
            Err(PolynomialError::ConstantPolynomial)
        );
    }

    #[test]
    fn forged_germ_fails_the_identity() {
        let w = validate_weights(&[2, 2, 1]).unwrap();
        let f = poly(3, &[(1, &[2, 0, 0]), (-1, &[0, 0, 4])]);
        let good = SurfaceGerm::new(f.clone(), w.clone()).unwrap();
        assert!(flow_invariance_identity(&good));
        let forged = SurfaceGerm { f, w, degree: 5 };
        assert!(!flow_invariance_identity(&forged));
    }

    #[test]
    fn permutation_and_substitution() {
        let f = poly(3, &[(1, &[0, 0, 2]), (-1, &[0, 4, 0])]);
        let g = f.permute(&[2, 1, 0]);
        assert_eq!(g.to_string(), "x1^2 - x2^4");
        let h = poly(3, &[(1, &[2, 0, 0]), (1, &[0, 2, 0]), (-1, &[0, 0, 4])]).substitute(2, &q(0, 1)).unwrap();
        assert_eq!(h.to_string(), "x1^2 + x2^2");
    }
}
