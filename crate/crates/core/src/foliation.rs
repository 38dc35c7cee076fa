//! Leaves of the weighted homogeneous foliation `t -> (t^a1 x1, ..., t^an xn)` and the
//! exact contact order between two leaves.
//!
//! The contact order is computed by recursion on the active dimension `m`:
//! leaves on opposite sides of `{x_m = 0}`, or with exactly one of them inside it, have
//! distinct tangents and contact 1. Leaves on the same side are compared on the slice
//! `x_m = ±1`, where the max-norm distance is `max_i t^(a_i/a_m) |y_i - z_i|`; the
//! smallest exponent with a nonzero coefficient wins.
//!
//! Slice coordinates `x_i |x_m|^(-a_i/a_m)` are generally irrational, so they are never
//! formed. Two of them are compared through the exact signed power
//! `sign(x_i) |x_i|^(a_m) / |x_m|^(a_i)`, which is strictly monotone in the slice
//! coordinate.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;
use crate::weights::{WeightError, WeightVector};

pub type Point = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoliationError {
    #[error("the origin does not lie on a leaf")]
    ZeroPoint,
    #[error("both points lie on the same leaf")]
    SameLeaf,
    #[error("point has {got} coordinates but the weight vector has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("need 1 <= i < j <= {n}, got i = {i}, j = {j}")]
    BadIndices { i: usize, j: usize, n: usize },
    #[error(transparent)]
    Weights(#[from] WeightError),
}

/// An exact order of contact, always `>= 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ContactOrder(Rational);

impl ContactOrder {
    pub(crate) fn new(value: Rational) -> Self {
        debug_assert!(value >= 1);
        ContactOrder(value)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }
}

impl fmt::Display for ContactOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The closure of the leaf through a nonzero point.
///
/// Equality is leaf equality. `seed` is a rational point of the leaf: the normal form
/// (`|seed_k| = 1` at the last nonzero index `k`) whenever that form is rational, and
/// the point the leaf was built from otherwise.
#[derive(Debug, Clone)]
pub struct Leaf {
    weights: WeightVector,
    seed: Point,
    last: usize,
    key: Vec<Rational>,
}

impl PartialEq for Leaf {
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights && self.last == other.last && self.key == other.key
    }
}

impl Eq for Leaf {}

impl Leaf {
    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn seed(&self) -> &[Rational] {
        &self.seed
    }

    /// 0-based index of the last nonzero seed coordinate.
    pub fn last_nonzero(&self) -> usize {
        self.last
    }

    /// The normal-form seed, if all of its coordinates are rational.
    pub fn rational_normal_form(&self) -> Option<Point> {
        let root = self.weights.weight(self.last);
        self.key.iter().map(|s| s.exact_root(root)).collect()
    }
}

fn check_dims(w: &WeightVector, x: &[Rational]) -> Result<(), FoliationError> {
    if x.len() != w.len() {
        return Err(FoliationError::DimensionMismatch {
            expected: w.len(),
            got: x.len(),
        });
    }
    Ok(())
}

fn last_nonzero(x: &[Rational]) -> Option<usize> {
    x.iter().rposition(|c| !c.is_zero())
}

/// `sign(x_i) |x_i|^(a_m) / |x_m|^(a_i)`: the `a_m`-th power of the `i`-th coordinate on
/// the slice `|x_m| = 1`, sign preserved.
fn slice_power(xi: &Rational, xm: &Rational, ai: u32, am: u32) -> Rational {
    if xi.is_zero() {
        return Rational::zero();
    }
    let mag = xi.abs().pow(am as i32) / xm.abs().pow(ai as i32);
    if xi.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Exact flow `(t^a1 x1, ..., t^an xn)`. Panics unless `t > 0` and dimensions match.
pub fn flow(w: &WeightVector, x: &[Rational], t: &Rational) -> Point {
    assert!(t.is_positive(), "flow time must be positive");
    assert_eq!(w.len(), x.len(), "dimension mismatch");
    x.iter()
        .zip(w.as_slice())
        .map(|(xi, &a)| xi * &t.pow(a as i32))
        .collect()
}

pub fn leaf_normal_form(w: &WeightVector, x: &[Rational]) -> Result<Leaf, FoliationError> {
    check_dims(w, x)?;
    let k = last_nonzero(x).ok_or(FoliationError::ZeroPoint)?;
    let ak = w.weight(k);
    let key: Vec<Rational> = x
        .iter()
        .zip(w.as_slice())
        .map(|(xi, &ai)| slice_power(xi, &x[k], ai, ak))
        .collect();
    let mut leaf = Leaf {
        weights: w.clone(),
        seed: x.to_vec(),
        last: k,
        key,
    };
    if let Some(normal) = leaf.rational_normal_form() {
        leaf.seed = normal;
    }
    Ok(leaf)
}

pub fn same_leaf(w: &WeightVector, x: &[Rational], y: &[Rational]) -> Result<bool, FoliationError> {
    Ok(leaf_normal_form(w, x)? == leaf_normal_form(w, y)?)
}

/// Exact order of contact between the leaves through `x` and `y`.
pub fn leaf_contact_order(
    w: &WeightVector,
    x: &[Rational],
    y: &[Rational],
) -> Result<ContactOrder, FoliationError> {
    if same_leaf(w, x, y)? {
        return Err(FoliationError::SameLeaf);
    }
    contact_in_dimension(w, x, y, w.len()).map(ContactOrder::new)
}

fn contact_in_dimension(
    w: &WeightVector,
    x: &[Rational],
    y: &[Rational],
    m: usize,
) -> Result<Rational, FoliationError> {
    // Distinct leaves of a line are its two opposite rays.
    if m == 1 {
        return Ok(Rational::one());
    }
    let (xm, ym) = (&x[m - 1], &y[m - 1]);
    match (xm.is_zero(), ym.is_zero()) {
        (true, true) => {
            let w = w.truncated(m - 1)?;
            return contact_in_dimension(&w, x, y, m - 1);
        }
        (true, false) | (false, true) => return Ok(Rational::one()),
        (false, false) if xm.signum() != ym.signum() => return Ok(Rational::one()),
        _ => {}
    }
    let am = w.weight(m - 1);
    (0..m - 1)
        .filter(|&i| {
            let ai = w.weight(i);
            slice_power(&x[i], xm, ai, am) != slice_power(&y[i], ym, ai, am)
        })
        .map(|i| w.ratio(i, m - 1))
        .min()
        .ok_or(FoliationError::SameLeaf)
}

/// Seeds whose leaves have contact exactly `a_i / a_j` (1-based `i < j`): both have
/// `j`-th coordinate 1, the `i`-th coordinates are 1 and 2, everything else is 0.
pub fn realizing_pair(w: &WeightVector, i: usize, j: usize) -> Result<(Point, Point), FoliationError> {
    let n = w.len();
    if !(1 <= i && i < j && j <= n) {
        return Err(FoliationError::BadIndices { i, j, n });
    }
    let mut x = vec![Rational::zero(); n];
    x[j - 1] = Rational::one();
    let mut y = x.clone();
    x[i - 1] = Rational::one();
    y[i - 1] = Rational::integer(2);
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::weights::{simplex_directions, validate_weights};
    use proptest::prelude::*;

    fn w(raw: &[i64]) -> WeightVector {
        validate_weights(raw).unwrap()
    }

    fn pt(raw: &[i64]) -> Point {
        raw.iter().map(|&c| Rational::integer(c)).collect()
    }

    #[test]
    fn flow_examples() {
        assert_eq!(flow(&w(&[2, 1]), &pt(&[1, 1]), &q(2, 1)), pt(&[4, 2]));
        assert_eq!(flow(&w(&[3, 2, 1]), &pt(&[5, -7, 2]), &q(1, 1)), pt(&[5, -7, 2]));
        assert_eq!(
            flow(&w(&[3, 2, 1]), &pt(&[1, -1, 2]), &q(1, 2)),
            vec![q(1, 8), q(-1, 4), q(1, 1)]
        );
    }

    #[test]
    fn normal_forms() {
        // Flow time t = 1/4: t * 4 = 1 and t^2 * 1 = 1/16.
        let leaf = leaf_normal_form(&w(&[2, 1]), &pt(&[1, 4])).unwrap();
        assert_eq!(leaf.seed(), &[q(1, 16), q(1, 1)]);
        assert_eq!(flow(&w(&[2, 1]), &pt(&[1, 4]), &q(1, 4)), leaf.seed());

        let leaf = leaf_normal_form(&w(&[2, 1]), &pt(&[1, 0])).unwrap();
        assert_eq!(leaf.seed(), &[q(1, 1), q(0, 1)]);
        let leaf = leaf_normal_form(&w(&[1, 1]), &pt(&[-3, 0])).unwrap();
        assert_eq!(leaf.seed(), &[q(-1, 1), q(0, 1)]);

        assert_eq!(
            leaf_normal_form(&w(&[2, 1]), &pt(&[0, 0])),
            Err(FoliationError::ZeroPoint)
        );
    }

    #[test]
    fn irrational_normal_form_keeps_the_input_seed() {
        // |x_2| = 2 with a_2 = 2 needs t = 2^(-1/2).
        let leaf = leaf_normal_form(&w(&[3, 2]), &pt(&[1, 2])).unwrap();
        assert!(leaf.rational_normal_form().is_none());
        assert_eq!(leaf.seed(), &pt(&[1, 2])[..]);
        let moved = flow(&w(&[3, 2]), &pt(&[1, 2]), &q(5, 3));
        assert_eq!(leaf_normal_form(&w(&[3, 2]), &moved).unwrap(), leaf);
    }

    #[test]
    fn same_leaf_examples() {
        let w21 = w(&[2, 1]);
        assert!(same_leaf(&w21, &pt(&[1, 1]), &pt(&[4, 2])).unwrap());
        assert!(!same_leaf(&w21, &pt(&[1, 1]), &pt(&[2, 1])).unwrap());
        assert!(!same_leaf(&w21, &pt(&[0, 1]), &pt(&[0, -1])).unwrap());
    }

    #[test]
    fn contact_order_examples() {
        let order = |ws: &[i64], x: &[i64], y: &[i64]| {
            leaf_contact_order(&w(ws), &pt(x), &pt(y)).unwrap().into_inner()
        };
        assert_eq!(order(&[2, 1], &[1, 1], &[2, 1]), q(2, 1));
        assert_eq!(order(&[2, 1], &[1, 1], &[1, -1]), q(1, 1));
        assert_eq!(order(&[3, 2, 1], &[1, 1, 1], &[1, 2, 1]), q(2, 1));
        assert_eq!(order(&[3, 2, 1], &[1, 1, 1], &[2, 1, 1]), q(3, 1));
        assert_eq!(order(&[3, 2, 1], &[1, 1, 0], &[2, 1, 0]), q(3, 2));
        // one point inside {x_3 = 0}, the other not
        assert_eq!(order(&[3, 2, 1], &[1, 1, 0], &[1, 1, 1]), q(1, 1));
        // opposite rays of the first axis
        assert_eq!(order(&[3, 2, 1], &[1, 0, 0], &[-2, 0, 0]), q(1, 1));
    }

    #[test]
    fn contact_order_errors() {
        let w21 = w(&[2, 1]);
        assert_eq!(
            leaf_contact_order(&w21, &pt(&[1, 1]), &pt(&[4, 2])),
            Err(FoliationError::SameLeaf)
        );
        assert_eq!(
            leaf_contact_order(&w21, &pt(&[0, 0]), &pt(&[4, 2])),
            Err(FoliationError::ZeroPoint)
        );
        assert!(matches!(
            leaf_contact_order(&w21, &pt(&[1]), &pt(&[4, 2])),
            Err(FoliationError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn realizing_pairs() {
        let w321 = w(&[3, 2, 1]);
        let cases = [(1, 3, [1, 0, 1], [2, 0, 1], q(3, 1)), (2, 3, [0, 1, 1], [0, 2, 1], q(2, 1)), (1, 2, [1, 1, 0], [2, 1, 0], q(3, 2))];
        for (i, j, x, y, lambda) in cases {
            let (px, py) = realizing_pair(&w321, i, j).unwrap();
            assert_eq!(px, pt(&x));
            assert_eq!(py, pt(&y));
            assert_eq!(leaf_contact_order(&w321, &px, &py).unwrap().into_inner(), lambda);
        }
        assert!(matches!(
            realizing_pair(&w321, 2, 2),
            Err(FoliationError::BadIndices { .. })
        ));
        assert!(realizing_pair(&w321, 0, 2).is_err());
        assert!(realizing_pair(&w321, 1, 4).is_err());
    }

    fn weights_and_points(count: usize) -> impl Strategy<Value = (WeightVector, Vec<Point>)> {
        (2usize..=5).prop_flat_map(move |n| {
            let ws = prop::collection::vec(1i64..=9, n).prop_map(|mut v| {
                v.sort_unstable_by(|a, b| b.cmp(a));
                validate_weights(&v).unwrap()
            });
            let point = prop::collection::vec((-3i64..=3, 1i64..=2), n)
                .prop_map(|c| c.into_iter().map(|(a, b)| q(a, b)).collect::<Point>())
                .prop_filter("nonzero", |p| p.iter().any(|c| !c.is_zero()));
            (ws, prop::collection::vec(point, count))
        })
    }

    proptest! {
        #[test]
        fn closure_and_symmetry((ws, pts) in weights_and_points(2)) {
            prop_assume!(!same_leaf(&ws, &pts[0], &pts[1]).unwrap());
            let a = leaf_contact_order(&ws, &pts[0], &pts[1]).unwrap();
            let b = leaf_contact_order(&ws, &pts[1], &pts[0]).unwrap();
            prop_assert_eq!(&a, &b);
            let dirs = simplex_directions(&ws);
            prop_assert!(a.value().is_one() || dirs.contains(a.value()));
        }

        #[test]
        fn flow_invariance((ws, pts) in weights_and_points(2), s in 1i64..=7, u in 1i64..=7) {
            prop_assume!(!same_leaf(&ws, &pts[0], &pts[1]).unwrap());
            let base = leaf_contact_order(&ws, &pts[0], &pts[1]).unwrap();
            let x = flow(&ws, &pts[0], &q(s, 3));
            let y = flow(&ws, &pts[1], &q(2, u));
            prop_assert_eq!(leaf_contact_order(&ws, &x, &y).unwrap(), base);
            prop_assert_eq!(leaf_normal_form(&ws, &x).unwrap(), leaf_normal_form(&ws, &pts[0]).unwrap());
        }

        #[test]
        fn ultrametric((ws, pts) in weights_and_points(3)) {
            let leaves: Vec<Leaf> = pts.iter().map(|p| leaf_normal_form(&ws, p).unwrap()).collect();
            prop_assume!(leaves[0] != leaves[1] && leaves[1] != leaves[2] && leaves[0] != leaves[2]);
            let mut orders = [
                leaf_contact_order(&ws, &pts[0], &pts[1]).unwrap(),
                leaf_contact_order(&ws, &pts[1], &pts[2]).unwrap(),
                leaf_contact_order(&ws, &pts[0], &pts[2]).unwrap(),
            ];
            orders.sort();
            prop_assert_eq!(&orders[0], &orders[1]);
        }
    }
}
