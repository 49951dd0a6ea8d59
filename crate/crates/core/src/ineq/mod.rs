//! Margins and seeded brute-force verification for the inequalities that
//! drive the interior estimates.
//!
//! [`lemmas`] evaluates each inequality at a single input and reports both
//! sides plus hypothesis flags. [`sample_verify`] draws inputs on the
//! relevant constraint surface and reduces the margins to a
//! [`SampleReport`]; [`epsilon_frontier`] sweeps `ε` for the `n = 3`
//! quadratic-form inequality.

mod frontier;
pub mod lemmas;
mod report;
mod sampler;

pub use frontier::{epsilon_frontier, epsilon_frontier_with_reports, FrontierRow, FrontierTable};
pub use lemmas::{
    check_corollary_a, check_corollary_third_derivative, check_lemma_cq, check_lemma_shift,
    check_quadratic_form_epsilon, on_sigma2_surface,
};
pub use report::{MarginPart, MarginReport, SampleConfig, SampleReport, ScaleLaw};
pub use sampler::{sample_verify, Inequality, SurfaceSampler};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IneqError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("sampler starvation on constraint '{constraint}': {accepted} accepted out of {attempts} attempts")]
    Starvation {
        constraint: String,
        attempts: usize,
        accepted: usize,
    },
    #[error("invalid sampling configuration: {0}")]
    Config(String),
    #[error("epsilon {0} outside [0, 0.5]")]
    EpsilonRange(f64),
    #[error("unknown inequality '{0}'")]
    Unknown(String),
}
