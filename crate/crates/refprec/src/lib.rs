//! Double-double ("dd") reference arithmetic and a slow, extended-precision
//! evaluator of the regularized incomplete gamma function.
//!
//! This crate exists to certify fast f64 special-function paths in tests.
//! It is a dev-dependency only and is never called by production code.

mod dd;
mod gamma;

pub use dd::Dd;
pub use gamma::{ln_gamma_dd, reg_inc_gamma_p, reg_inc_gamma_pq};
