//! Numerical laboratory for the 2-Hessian equation `σ₂(D²u) = 1`.
//!
//! The crate is organised around four pieces:
//!
//! - [`symfun`]: elementary symmetric functions, Gårding cones and the
//!   linearisation `σ₂^{ij}` on symmetric matrices.
//! - [`ineq`]: margin evaluation and seeded brute-force sampling for the
//!   algebraic inequalities behind the interior estimates.
//! - [`solver`]: a damped Newton finite-difference solver for the Dirichlet
//!   problem on boxes that keeps every iterate discretely 2-convex.
//! - [`probe`]: experiments built on top of the above (Pogorelov quantities,
//!   the rescaling experiment, Warren's entire solution, the special
//!   Lagrangian phase identity, differentiated-equation diagnostics).
//!
//! The [`cli`] module backs the `sigma2lab` binary; [`io`] holds the on-disk
//! formats shared by the CLI and the library.
//!
//! ```
//! use sigma2lab::symfun::{sigma_k, Spectrum};
//!
//! let warren_origin = Spectrum::new(vec![2.0, 2.0, -0.75]).unwrap();
//! assert_eq!(sigma_k(&warren_origin, 2).unwrap(), 1.0);
//! ```

// `!(x <= tol)` rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod ineq;
pub mod io;
pub mod probe;
pub mod solver;
pub mod symfun;

/// Version string recorded in run manifests.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Schema version stamped on every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;
