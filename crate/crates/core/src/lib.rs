#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical verification of Jensen and Slater type reverses and refinements
//! for states on Hermitian matrix algebras.
//!
//! The algebra is the set of `n x n` complex matrices with the spectral
//! order. Functions of an element are computed through its eigendecomposition
//! and, independently, through a Cauchy contour integral. Every inequality
//! chain is evaluated as a [`bounds::BoundChain`], a named ordered list of
//! reals whose ordering is checked in floating point.
//!
//! Modules, bottom-up:
//!
//! - [`matrix`]: dense complex square matrices.
//! - [`algebra`]: Hermitian elements, Jacobi eigendecomposition, functional
//!   calculus, real powers, spectral order.
//! - [`functional`]: positive normalized linear functionals (states).
//! - [`registry`]: the catalog of convex functions and the secant-slope
//!   machinery built on them.
//! - [`bounds`]: one evaluator per inequality chain.
//! - [`harness`]: seeded instance generation, campaigns, replay.

pub mod algebra;
pub mod bounds;
pub mod error;
pub mod functional;
pub mod harness;
pub mod matrix;
pub mod registry;
pub mod tol;

pub use error::{Error, Result};
