//! Special functions and quadrature with controlled accuracy.

mod erfc;
mod gamma;
mod hurwitz;
mod quad;

pub use erfc::{erfc, erfc_gaussian_bound, erfc_integral_from};
pub use gamma::gamma_half;
pub use hurwitz::{hurwitz_zeta, hurwitz_zeta_with_error, HurwitzValue};
pub use quad::{quad_adaptive, quad_with_tail, Quadrature, Tolerance};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("{function} has a pole at {argument}")]
    Pole { function: &'static str, argument: f64 },
    #[error("{function} overflows at {argument}")]
    Overflow { function: &'static str, argument: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite input or integrand value")]
    NonFinite,
    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    NotConverged { estimate: f64, error: f64 },
}
