//! Damped Newton finite-difference solver for `σ₂(D²u) = 1` on boxes with
//! Dirichlet data.
//!
//! Second derivatives use the standard central stencils (3-point diagonal,
//! 4-point cross), which are exact on quadratics. Each Newton step solves
//! the linearised equation `σ₂^{ij}(D²u)∂ᵢⱼδ = 1 − σ₂(D²u)` with
//! Jacobi-preconditioned BiCGSTAB and is halved until every interior
//! Hessian stays in `Γ₂` and the max-norm residual drops.
//!
//! ```
//! use sigma2lab::solver::{newton_solve, DirichletData, GridDomain, SolveConfig, StartStrategy};
//!
//! let dom = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
//! let cfg = SolveConfig { start: StartStrategy::Barrier, ..SolveConfig::default() };
//! let rep = newton_solve(&dom, &DirichletData::unit_quadratic(2), &cfg).unwrap();
//! assert!(rep.gamma2_certified);
//! assert!(rep.final_residual() <= 1e-10);
//! ```

mod grid;
mod krylov;
mod newton;
mod stencil;

pub use grid::{GridDomain, ScalarField};
pub use newton::{
    ellipticity_margin, initial_guess, newton_solve, newton_solve_from, DirichletData, SolveConfig, SolveReport,
    StartStrategy,
};
pub use stencil::{
    barrier_coefficient, barrier_initial_guess, barrier_shift, discrete_hessian, gamma2_scan, residual,
    residual_norm, Gamma2Scan,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("node {node:?} is not an interior node")]
    Index { node: Vec<usize> },
    #[error("non-finite value at node {node:?}")]
    NonFinite { node: Vec<usize> },
    #[error("ellipticity loss at node {node:?} (iteration {iteration}): sigma1 = {sigma1}, sigma2 = {sigma2}")]
    EllipticityLoss {
        node: Vec<usize>,
        iteration: usize,
        sigma1: f64,
        sigma2: f64,
    },
    #[error("Newton did not converge after {iterations} iterations ({reason}); residuals {history:?}")]
    NonConvergence {
        iterations: usize,
        history: Vec<f64>,
        reason: String,
    },
    #[error("linear solve failed in Newton iteration {iteration}: relative residual {relative_residual} after {krylov_iterations} iterations")]
    LinearSolve {
        iteration: usize,
        krylov_iterations: usize,
        relative_residual: f64,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfun::SymTensor;

    fn barrier_cfg() -> SolveConfig {
        SolveConfig {
            start: StartStrategy::Barrier,
            ..SolveConfig::default()
        }
    }

    #[test]
    fn quadratic_data_is_reproduced() {
        let cases = [
            (3, DirichletData::unit_quadratic(3)),
            (2, DirichletData::quadratic(SymTensor::diag(&[2.0, 0.5]).unwrap())),
            (3, DirichletData::quadratic(SymTensor::diag(&[2.0, 0.3, 0.4 / 2.3]).unwrap())),
        ];
        for (n, g) in cases {
            for m in [9, 17, 33] {
                let dom = GridDomain::cube(n, -1.0, 1.0, m).unwrap();
                let exact = ScalarField::from_fn(&dom, |x| g.eval(x));
                for cfg in [SolveConfig::default(), barrier_cfg()] {
                    let rep = newton_solve(&dom, &g, &cfg).unwrap();
                    let err = rep.field.max_abs_diff(&exact);
                    assert!(err <= 1e-9, "n={n} m={m} {:?}: err {err}", cfg.start);
                    assert!(rep.gamma2_certified);
                    assert!(rep.residual_history.windows(2).all(|w| w[1] < w[0]));
                }
            }
        }
    }

    #[test]
    fn zero_data_sandwich() {
        let dom = GridDomain::cube(3, -1.0, 1.0, 9).unwrap();
        let rep = newton_solve(&dom, &DirichletData::Zero, &SolveConfig::default()).unwrap();
        let w = barrier_initial_guess(&dom, barrier_shift(&dom));
        for (p, (&u, &wv)) in rep.field.values.iter().zip(&w.values).enumerate() {
            assert!(wv <= u + 1e-12 && u <= 1e-12, "node {p}: w={wv} u={u}");
        }
        assert!(rep.gamma2_certified);
        assert!(rep.min_ellipticity > 0.0);
        // Symmetry under the reflection x₀ → −x₀ and the swap x₀ ↔ x₁.
        for p in 0..dom.len() {
            let k = dom.multi_index(p);
            let refl = dom.linear_index(&[dom.m - 1 - k[0], k[1], k[2]]);
            let swap = dom.linear_index(&[k[1], k[0], k[2]]);
            assert!((rep.field.values[p] - rep.field.values[refl]).abs() < 1e-9);
            assert!((rep.field.values[p] - rep.field.values[swap]).abs() < 1e-9);
        }
        assert!(rep.continuation.is_empty());
    }

    #[test]
    fn corner_dominated_start_uses_continuation() {
        // The barrier start is not 2-convex next to the corners here.
        let dom = GridDomain::cube(2, -1.0, 1.0, 33).unwrap();
        let g = DirichletData::Zero;
        let start = initial_guess(&dom, &g, StartStrategy::Auto);
        assert!(!gamma2_scan(&start).inside);
        let rep = newton_solve(&dom, &g, &SolveConfig::default()).unwrap();
        assert_eq!(rep.continuation.last(), Some(&1.0));
        assert!(rep.continuation.windows(2).all(|w| w[0] < w[1]));
        assert!(rep.final_residual() <= 1e-10);
        assert!(rep.gamma2_certified);
        let w = barrier_initial_guess(&dom, barrier_shift(&dom));
        for p in 0..dom.len() {
            if dom.is_boundary(p) {
                assert_eq!(rep.field.values[p], 0.0);
            }
            assert!(w.values[p] <= rep.field.values[p] + 1e-12 && rep.field.values[p] <= 1e-12);
        }
    }

    #[test]
    fn concave_start_is_an_ellipticity_loss() {
        let dom = GridDomain::cube(2, -1.0, 1.0, 7).unwrap();
        let start = ScalarField::from_fn(&dom, |x| -(x[0] * x[0] + x[1] * x[1]));
        let err = newton_solve_from(start, &SolveConfig::default()).unwrap_err();
        assert!(matches!(err, SolverError::EllipticityLoss { iteration: 0, .. }), "{err}");
    }

    #[test]
    fn iteration_cap_is_nonconvergence() {
        let dom = GridDomain::cube(3, -1.0, 1.0, 9).unwrap();
        let cfg = SolveConfig {
            max_newton: 1,
            ..SolveConfig::default()
        };
        let err = newton_solve(&dom, &DirichletData::Zero, &cfg).unwrap_err();
        match err {
            SolverError::NonConvergence { history, .. } => assert_eq!(history.len(), 2),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let dom = GridDomain::cube(2, -1.0, 1.0, 7).unwrap();
        assert!(newton_solve(&dom, &DirichletData::unit_quadratic(3), &SolveConfig::default()).is_err());
        let bad = SolveConfig {
            tol_residual: 0.0,
            ..SolveConfig::default()
        };
        assert!(newton_solve(&dom, &DirichletData::Zero, &bad).is_err());
    }
}
