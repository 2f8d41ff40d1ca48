//! Truncated spectra of model operators, their isotypic projections and
//! eigenvalue counting.

mod builders;
mod graded;
mod model;
mod weyl;

pub use builders::{ap_isotypic, build_circle_dirac, build_circle_laplacian, build_torus_laplacian, project_isotypic};
pub use graded::{GradedSpectralModel, PairedLine};
pub use model::{
    ArithmeticProgression, IsotypeMap, IsotypicFamily, Kernel, ModelKind, ModelParts, SpectralLine, SpectralModel, Tail,
};
pub use weyl::{counting_function, weyl_fit, WeylFit};

use crate::exact::ExactError;
use thiserror::Error;

/// A truncated sum together with a bound on what the truncation omitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceValue {
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("expected a {expected:?} model, found {found:?}")]
    WrongKind { expected: ModelKind, found: ModelKind },
    #[error("counting threshold {threshold} exceeds the truncation limit {limit}")]
    BeyondCutoff { threshold: f64, limit: f64 },
    #[error("insufficient data: {found} usable points, need {needed}")]
    InsufficientData { found: usize, needed: usize },
    #[error("model document: {0}")]
    Json(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
