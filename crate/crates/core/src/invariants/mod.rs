//! Closed-form equivariant invariants: eta invariants of lens spaces as exact
//! rationals, isotypic Euler characteristics from a cohomology action, and the
//! sphere and `CP^n` tables.

mod euler;
mod lens;

pub use euler::{
    dolbeault_index_cpn, euler_from_action, euler_sphere, euler_table, sphere_antipodal_action, torus_z4_action,
    CohomologyAction, SphereAction, SphereCharacter,
};
pub use lens::{
    lens_eta_exact, lens_eta_exact_all, lens_eta_numeric, lens_reality_residual, lens_sweep, LensInput,
    RealityResidual, SweepEntry,
};

use crate::exact::ExactError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("rotation {rotation} shares a factor with {m}; the action is not free")]
    NonFree { rotation: i64, m: u64 },
    #[error("inconsistent action: {0}")]
    InconsistentAction(String),
    #[error("not an integer: {0}")]
    NonIntegral(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
