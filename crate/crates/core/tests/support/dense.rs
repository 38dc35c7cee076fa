//! Dense truncated power series in one variable with rational coefficients, used as an
//! oracle independent of the sparse series code.

#![allow(dead_code)]

use holder_core::Rational;

/// Coefficients of `rho^0 .. rho^(len-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense(pub Vec<Rational>);

impl Dense {
    pub fn zero(len: usize) -> Self {
        Dense(vec![Rational::zero(); len])
    }

    pub fn one(len: usize) -> Self {
        let mut d = Dense::zero(len);
        d.0[0] = Rational::one();
        d
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Dense) -> Dense {
        let n = self.len();
        let mut out = Dense::zero(n);
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate().take(n - i) {
                out.0[i + j] += &(a * b);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Dense {
        (0..k).fold(Dense::one(self.len()), |acc, _| acc.mul(self))
    }

    /// Series `v` with `v(0) = 1` and `v^k = self`, coefficient by coefficient.
    pub fn unit_root(&self, k: u32) -> Dense {
        assert!(self.0[0].is_one());
        let n = self.len();
        let mut v = Dense::one(n);
        for m in 1..n {
            let current = v.pow(k).0[m].clone();
            v.0[m] = (&self.0[m] - &current) / Rational::from(k);
        }
        v
    }

    /// `sum_j p_j * x^j` for a dense `x` with `x(0) = 0`.
    pub fn compose_polynomial(p: &[Rational], x: &Dense) -> Dense {
        let mut out = Dense::zero(x.len());
        let mut power = Dense::one(x.len());
        for c in p {
            for (o, t) in out.0.iter_mut().zip(&power.0) {
                *o += &(c * t);
            }
            power = power.mul(x);
        }
        out
    }
}
