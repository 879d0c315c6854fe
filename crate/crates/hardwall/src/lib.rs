//! Disk counting statistics of a two-dimensional hard-wall ensemble.
//!
//! The model is a rotation-invariant Coulomb gas (determinantal at beta = 2)
//! with weight `|z|^(2 alpha) exp(-n |z|^(2b))` conditioned to avoid the
//! annulus `rho1 < |z| < rho2`. The crate computes the joint moment
//! generating function of the disk counting functions `N(r)` two ways:
//!
//! * exactly at finite `n`, through products of regularized incomplete
//!   gamma functions ([`exact`]), and
//! * through an explicit large-`n` expansion
//!   `C1 n + C2 ln n + C3 + F_n + C4/sqrt(n)` whose order-one oscillation
//!   `F_n` is a ratio of Jacobi theta values ([`asymptotic`]).
//!
//! Supporting pieces: high-accuracy scalar special functions ([`specfn`]),
//! the equilibrium/balayage description of the model ([`model`]), and an
//! exact Monte Carlo sampler ([`sampler`]).
//!
//! Note on scale: theta arguments contain `sigma_star * n` reduced mod 1 in
//! double precision, which is accurate to ~1e-10 for n up to about 1e6;
//! desk-scale use caps n there.

// negated comparisons like `!(x > 0.0)` deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic;
mod error;
pub mod exact;
pub mod kahan;
pub mod model;
pub mod quad;
pub mod sampler;
pub mod specfn;

pub use error::{Error, Result};
