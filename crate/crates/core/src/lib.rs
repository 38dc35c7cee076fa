//! Bi-Lipschitz invariants of weighted homogeneous surface germs.
//!
//! * [`rational`] and [`weights`]: exact exponents, weight vectors and Newton simplex
//!   directions.
//! * [`complex`]: abstract Hölder complexes, canonicalization and isomorphism.
//! * [`foliation`]: leaves of weighted homogeneous foliations and their exact contact
//!   orders.
//! * [`series`] and [`arcs`]: Puiseux arcs, max-norm distance reparametrization and
//!   symbolic contact orders.
//! * [`numeric`]: log-log estimation of contact orders under several norms.
//! * [`polynomial`], [`marching`] and [`surface`]: weighted homogeneous surfaces in
//!   R^3, their links and horn exponents.

#![allow(clippy::result_large_err)]

pub mod arcs;
pub mod complex;
pub mod foliation;
pub mod marching;
pub mod numeric;
pub mod polynomial;
pub mod rational;
pub mod series;
pub mod surface;
pub mod weights;

pub use rational::Rational;
pub use weights::{simplex_directions, validate_weights, NewtonSimplex, WeightVector};
