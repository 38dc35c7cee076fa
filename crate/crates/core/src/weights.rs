//! Weight vectors of weighted homogeneous foliations and the directions of the
//! associated Newton simplex.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("weight vector is empty")]
    Empty,
    #[error("weight a{index} = {value} is not positive")]
    NotPositive { index: usize, value: i64 },
    #[error("weights must be nonincreasing but a{index} < a{}; permute coordinates first", index + 1)]
    NotSorted { index: usize },
}

/// Positive integer weights `a1 >= a2 >= ... >= an >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct WeightVector(Vec<u32>);

impl WeightVector {
    pub fn new(raw: &[i64]) -> Result<Self, WeightError> {
        validate_weights(raw)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Weight of coordinate `i` (0-based).
    pub fn weight(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// `a_i / a_j` (0-based indices).
    pub fn ratio(&self, i: usize, j: usize) -> Rational {
        Rational::new(self.0[i] as i64, self.0[j] as i64)
    }

    /// The weights of the first `m` coordinates. Re-validated, although a prefix of a
    /// nonincreasing sequence is nonincreasing.
    pub fn truncated(&self, m: usize) -> Result<Self, WeightError> {
        let raw: Vec<i64> = self.0[..m].iter().map(|&a| a as i64).collect();
        validate_weights(&raw)
    }

    pub fn simplex(&self) -> NewtonSimplex {
        NewtonSimplex::new(self.clone())
    }
}

impl fmt::Debug for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl TryFrom<Vec<i64>> for WeightVector {
    type Error = WeightError;
    fn try_from(raw: Vec<i64>) -> Result<Self, Self::Error> {
        validate_weights(&raw)
    }
}

impl From<WeightVector> for Vec<i64> {
    fn from(w: WeightVector) -> Self {
        w.0.into_iter().map(i64::from).collect()
    }
}

pub fn validate_weights(raw: &[i64]) -> Result<WeightVector, WeightError> {
    if raw.is_empty() {
        return Err(WeightError::Empty);
    }
    for (i, &a) in raw.iter().enumerate() {
        if a <= 0 || a > u32::MAX as i64 {
            return Err(WeightError::NotPositive {
                index: i + 1,
                value: a,
            });
        }
    }
    if let Some(i) = raw.windows(2).position(|p| p[0] < p[1]) {
        return Err(WeightError::NotSorted { index: i + 1 });
    }
    Ok(WeightVector(raw.iter().map(|&a| a as u32).collect()))
}

/// The 1-face directions `a_i / a_j` (`i < j`), reduced, deduplicated and ascending.
/// Empty for `n = 1`.
pub fn simplex_directions(w: &WeightVector) -> Vec<Rational> {
    let n = w.len();
    let set: BTreeSet<Rational> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| w.ratio(i, j))
        .collect();
    set.into_iter().collect()
}

/// The Newton simplex of a weight vector, represented by its 1-face directions only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonSimplex {
    weights: WeightVector,
    directions: Vec<Rational>,
}

impl NewtonSimplex {
    pub fn new(weights: WeightVector) -> Self {
        let directions = simplex_directions(&weights);
        NewtonSimplex {
            weights,
            directions,
        }
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    /// Ascending, so the first entry is the smallest direction.
    pub fn directions(&self) -> &[Rational] {
        &self.directions
    }

    /// Whether `value` is 1 or one of the directions.
    pub fn admits(&self, value: &Rational) -> bool {
        value.is_one() || self.directions.binary_search(value).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    #[test]
    fn validation() {
        assert!(validate_weights(&[3, 2, 1]).is_ok());
        assert_eq!(
            validate_weights(&[1, 2]),
            Err(WeightError::NotSorted { index: 1 })
        );
        assert_eq!(
            validate_weights(&[2, 0]),
            Err(WeightError::NotPositive { index: 2, value: 0 })
        );
        assert_eq!(validate_weights(&[]), Err(WeightError::Empty));
    }

    #[test]
    fn directions_examples() {
        let d = |raw: &[i64]| simplex_directions(&validate_weights(raw).unwrap());
        assert_eq!(d(&[3, 2, 1]), vec![q(3, 2), q(2, 1), q(3, 1)]);
        assert_eq!(d(&[1, 1, 1]), vec![q(1, 1)]);
        assert_eq!(d(&[4, 2, 1]), vec![q(2, 1), q(4, 1)]);
        assert!(d(&[5]).is_empty());
    }

    #[test]
    fn serde_goes_through_validation() {
        let w: WeightVector = serde_json::from_str("[4,2,1]").unwrap();
        assert_eq!(w.as_slice(), &[4, 2, 1]);
        assert!(serde_json::from_str::<WeightVector>("[1,2]").is_err());
    }

    fn weights() -> impl Strategy<Value = WeightVector> {
        prop::collection::vec(1i64..=12, 1..7).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            validate_weights(&v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn direction_set_properties(w in weights()) {
            let n = w.len();
            let dirs = simplex_directions(&w);
            prop_assert!(dirs.len() <= n * (n - 1) / 2);
            prop_assert!(dirs.iter().all(|d| *d >= 1));
            prop_assert!(dirs.windows(2).all(|p| p[0] < p[1]));
            let has_tie = w.as_slice().windows(2).any(|p| p[0] == p[1]);
            prop_assert_eq!(dirs.contains(&Rational::one()), has_tie);
        }
    }
}
