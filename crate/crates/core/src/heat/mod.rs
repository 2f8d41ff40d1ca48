//! Heat traces, the cylinder function `K(t)`, supertraces, small-time
//! expansion fits and the index-formula check.

mod aps;
mod fit;
mod traces;

pub use aps::{aps_consistency, ApsData};
pub use fit::{fit_expansion, ExpansionFit, FitTerm, HeatSamples, CONDITION_LIMIT, NEGLIGIBLE_RATIO};
pub use traces::{alpha_trace, heat_trace, k_of_t, k_prime_identity_residual, mckean_singer, mckean_singer_isotypic};

use crate::spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeatError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid samples: {0}")]
    InvalidSamples(String),
    #[error("design matrix is rank deficient (condition {condition:e})")]
    RankDeficient { condition: f64 },
    #[error("samples CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
