//! Complex special functions: gamma, Riemann and Hurwitz zeta, Dirichlet
//! L-functions of real characters, incomplete gamma, Gauss hypergeometric
//! series and the first-derivative bound for oscillatory integrals.

pub mod central;
mod gamma;
mod hyp2f1;
mod incgamma;
mod lfunc;
mod oscillatory;
mod zeta;

pub use gamma::{complex_gamma, digamma, ln_gamma, EULER_GAMMA};
pub use hyp2f1::{gauss_2f1, hyp_asymptotic, hyp_asymptotic_printed, Hyp2F1Value};
pub use incgamma::{exp_integral_e1, upper_incomplete_gamma};
pub use lfunc::{dirichlet_l, dirichlet_l_route, LRoute};
pub use oscillatory::{oscillatory_bound_check, OscillatoryCheck};
pub use zeta::{hurwitz_zeta, riemann_zeta, zeta_derivative};
