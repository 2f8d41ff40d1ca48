//! The eta invariant `eta_D(0)` and its isotypic parts, by three independent
//! routes: Hurwitz closed forms on progression spectra, the Mellin integral of
//! `alpha(t)`, and the small-time limit of the cylinder function `K(t)`.

mod routes;

pub use crate::heat::alpha_trace;
pub use routes::{eta_hurwitz, eta_isotypic_zero, eta_series, eta_zero_kroute, eta_zero_mellin, RoutePreference};

use crate::heat::HeatError;
use crate::specfun::SpecfunError;
use crate::spectral::SpectralError;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Hurwitz,
    Mellin,
    Kroute,
    Series,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Route::Hurwitz => "hurwitz",
            Route::Mellin => "mellin",
            Route::Kroute => "kroute",
            Route::Series => "series",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaResult {
    /// `eta(z)`; at `z = 0` this is the eta invariant.
    pub value: f64,
    pub z: f64,
    pub route: Route,
    pub estimated_error: f64,
    /// Truncation, quadrature and extrapolation details, keyed by name.
    pub diagnostics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EtaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("direct summation diverges at z = {z}; need z > {needed} (use the hurwitz or mellin route)")]
    SeriesDivergent { z: f64, needed: f64 },
    #[error("no small-time decay certificate: {0}")]
    NoDecayCertificate(String),
    #[error("K(t) extrapolation did not converge; raw sequence (t, K): {sequence:?}")]
    NotConverged { sequence: Vec<(f64, f64)> },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Heat(#[from] HeatError),
}
