//! Experiments built on the solver and the symmetric-function layer.
//!
//! - Pogorelov quantities `max (−u)^α |D²u|` and the auxiliary function
//!   `P = α log(−u) + log max(Δu, 1) + ½|x|²` on Dirichlet solutions.
//! - The rescaling experiment `u_R(y) = (u(Ry) − R²)/R²` on closed-form
//!   entire candidates.
//! - Warren's entire solution, which is 2-convex but has no quadratic
//!   growth, and generic growth checks.
//! - The special Lagrangian phase identity `Σ arctan λᵢ = π/2` on
//!   `{σ₂ = 1}` in three dimensions.
//! - Residuals of the once- and twice-differentiated equation.
//!
//! The rescaling probe only gathers evidence about the mechanism behind
//! rigidity of entire solutions; it cannot decide rigidity itself.

mod candidate;
mod diffeq;
mod growth;
mod phase;
mod pogorelov;
mod rescale;
mod warren;

pub use candidate::{fd_hessian, BumpCandidate, EntireCandidate, QuadraticCandidate, Warren};
pub use diffeq::{differentiated_equation_residual, DiffEqRegion, DiffEqStats};
pub use growth::{growth_check, growth_points, GrowthCheck, GrowthFit};
pub use phase::{phase_identity_check, phase_product, phase_sample, sl_phase, PhaseReport, PhaseSample, PHASE_TOL};
pub use pogorelov::{
    aux_function_field, pogorelov_quantity, AuxCertificate, NodeMax, PogorelovConfig, PogorelovReport,
    PogorelovVariant,
};
pub use rescale::{rescale_family, RescaleReport, RescaleRow, RescaleSpec};
pub use warren::{default_growth_family, warren_validate, WarrenReport};

use thiserror::Error;

use crate::ineq::IneqError;
use crate::solver::SolverError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbeError {
    #[error("field is positive at interior node {node:?} (u = {value})")]
    PositiveValue { node: Vec<usize>, value: f64 },
    #[error("grid has {m} nodes per axis, need at least {need}")]
    GridTooSmall { m: usize, need: usize },
    #[error("sublevel set is empty at R = {r}")]
    EmptyRegion { r: f64 },
    #[error("sublevel set reaches the sampling box at R = {r} (point {witness:?})")]
    UnboundedRegion { r: f64, witness: Vec<f64> },
    #[error("invalid probe configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Sampling(#[from] IneqError),
}
