//! High-accuracy scalar special functions: error functions, regularized
//! incomplete gamma (series, continued fraction, and uniform large-`a`
//! expansion), Jacobi theta with log-derivatives, Weierstrass P via theta,
//! and the regularized erfc-integral constants.

pub mod erf;
pub mod gamma;
pub mod integrals;
pub mod theta;
pub mod wp;

pub use erf::{erf, erfc, erfcx, ln_erfc};
pub use gamma::{reg_inc_gamma, reg_inc_gamma_pair, reg_inc_gamma_temme, GammaRegime, TemmeEval};
pub use integrals::{erfc_integral_constants, ErfcIntegrals};
pub use theta::{
    jacobi_theta, jacobi_theta_complex, jacobi_theta_direct, jacobi_theta_modular,
    jacobi_theta_triple_product, log_theta_d1, log_theta_d2, ThetaParams,
};
pub use wp::{weierstrass_p, weierstrass_p_tau_half, wp_lattice_constant};
