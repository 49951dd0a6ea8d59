use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::symfun::{eigenvalues_sym, SymTensor};

use super::grid::{GridDomain, ScalarField};
use super::krylov::{bicgstab, Csr};
use super::stencil::{barrier_coefficient, gamma2_scan, hessian_raw, residual_norm, sigma12};
use super::SolverError;

/// Boundary values `u = g` on the box boundary.
#[derive(Clone)]
pub enum DirichletData {
    Zero,
    /// `g(x) = ½xᵀMx + b·x + c`.
    Quadratic {
        hessian: SymTensor,
        linear: Vec<f64>,
        constant: f64,
    },
    Function(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl fmt::Debug for DirichletData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirichletData::Zero => write!(f, "Zero"),
            DirichletData::Quadratic {
                hessian,
                linear,
                constant,
            } => f
                .debug_struct("Quadratic")
                .field("hessian", hessian)
                .field("linear", linear)
                .field("constant", constant)
                .finish(),
            DirichletData::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl DirichletData {
    pub fn quadratic(hessian: SymTensor) -> Self {
        let n = hessian.n();
        DirichletData::Quadratic {
            hessian,
            linear: vec![0.0; n],
            constant: 0.0,
        }
    }

    /// `c(|x|² − 1)/2` with `c = √(2/(n(n−1)))`, so `σ₂(D²g) = 1`.
    pub fn unit_quadratic(n: usize) -> Self {
        let c = (2.0 / (n * (n - 1)) as f64).sqrt();
        DirichletData::Quadratic {
            hessian: SymTensor::identity(n).expect("supported dimension").scaled(c),
            linear: vec![0.0; n],
            constant: -c / 2.0,
        }
    }

    pub fn function(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        DirichletData::Function(Arc::new(f))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            DirichletData::Zero => 0.0,
            DirichletData::Quadratic {
                hessian,
                linear,
                constant,
            } => {
                let n = hessian.n();
                let mut s = *constant;
                for i in 0..n {
                    s += linear[i] * x[i];
                    for j in 0..n {
                        s += 0.5 * hessian.get(i, j) * x[i] * x[j];
                    }
                }
                s
            }
            DirichletData::Function(f) => f(x),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            DirichletData::Quadratic { hessian, .. } => Some(hessian.n()),
            _ => None,
        }
    }
}

/// Where Newton starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartStrategy {
    /// The data itself for quadratic `g`, the barrier otherwise.
    #[default]
    Auto,
    /// Barrier `|x|²/√(2n(n−1)) − a` in the interior with the smallest `a`
    /// that keeps it below `g` on the boundary; boundary nodes carry `g`.
    Barrier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub tol_residual: f64,
    pub max_newton: usize,
    pub max_halvings: usize,
    pub krylov_tol: f64,
    pub krylov_max_iter: usize,
    pub start: StartStrategy,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol_residual: 1e-10,
            max_newton: 50,
            max_halvings: 30,
            krylov_tol: 1e-12,
            krylov_max_iter: 20_000,
            start: StartStrategy::Auto,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<(), SolverError> {
        let ok = self.tol_residual > 0.0
            && self.max_newton > 0
            && self.max_halvings > 0
            && self.krylov_tol > 0.0
            && self.krylov_max_iter > 0;
        if ok {
            Ok(())
        } else {
            Err(SolverError::Config("all solver parameters must be positive".into()))
        }
    }
}

/// Krylov solves that stop above `krylov_tol` are still used as inexact
/// Newton directions when they reach this relative residual.
const INEXACT_ACCEPT: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub schema_version: u32,
    #[serde(skip)]
    pub field: ScalarField,
    pub domain: GridDomain,
    /// Max-norm residual of the start and of every accepted iterate.
    pub residual_history: Vec<f64>,
    /// Damping factor of every accepted step.
    pub step_sizes: Vec<f64>,
    pub krylov_iterations: Vec<usize>,
    pub gamma2_certified: bool,
    /// Smallest eigenvalue of `σ₂^{ij}(D²u)` over interior nodes.
    pub min_ellipticity: f64,
    pub min_sigma2: f64,
    /// Accepted Newton steps, summed over continuation stages.
    pub iterations: usize,
    /// Boundary-data homotopy parameters `t` of each stage when the start
    /// was not 2-convex; empty for a direct solve. The histories above
    /// concatenate the stages.
    pub continuation: Vec<f64>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history starts with the initial residual")
    }
}

/// Initial field for `newton_solve` under `strategy`.
pub fn initial_guess(dom: &GridDomain, g: &DirichletData, strategy: StartStrategy) -> ScalarField {
    let use_data = matches!(strategy, StartStrategy::Auto) && matches!(g, DirichletData::Quadratic { .. });
    if use_data {
        return ScalarField::from_fn(dom, |x| g.eval(x));
    }
    let c = barrier_coefficient(dom.n);
    let w0 = |x: &[f64]| c * x.iter().map(|t| t * t).sum::<f64>();
    let a = dom
        .boundary()
        .into_iter()
        .map(|p| {
            let x = dom.coords(p);
            w0(&x) - g.eval(&x)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    ScalarField::from_fn(dom, |x| {
        let on_boundary = x
            .iter()
            .zip(dom.lo.iter().zip(&dom.hi))
            .any(|(t, (lo, hi))| (t - lo).abs() < 0.5 * dom.h || (hi - t).abs() < 0.5 * dom.h);
        if on_boundary {
            g.eval(x)
        } else {
            w0(x) - a
        }
    })
}

/// Smallest eigenvalue of `σ₁I − D²u` over interior nodes.
pub fn ellipticity_margin(f: &ScalarField) -> f64 {
    let dom = &f.domain;
    dom.interior()
        .par_iter()
        .map(|&p| {
            let hraw = hessian_raw(dom, &f.values, p);
            let hess = SymTensor::new(dom.n, hraw).expect("symmetric stencil");
            let s1 = hess.trace();
            let lam = eigenvalues_sym(&hess);
            lam.values().iter().map(|l| s1 - l).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Jacobian `σ₂^{ij}(D²u)∂ᵢⱼ` on interior unknowns and the right-hand side
/// `1 − σ₂(D²u)`.
fn assemble(f: &ScalarField, interior: &[usize], row_of: &[usize]) -> (Csr, Vec<f64>) {
    let dom = &f.domain;
    let n = dom.n;
    let h2 = dom.h * dom.h;
    let rows: Vec<(Vec<(usize, f64)>, f64)> = interior
        .par_iter()
        .map(|&p| {
            let hess = hessian_raw(dom, &f.values, p);
            let (s1, s2) = sigma12(n, &hess);
            let coef = |i: usize, j: usize| if i == j { s1 - hess[i * n + i] } else { -hess[i * n + j] };
            let mut entries: Vec<(usize, f64)> = Vec::with_capacity(1 + 2 * n + 2 * n * (n - 1));
            let mut push = |node: usize, v: f64| {
                let r = row_of[node];
                if r != usize::MAX {
                    entries.push((r, v));
                }
            };
            let mut centre = 0.0;
            for i in 0..n {
                let si = dom.stride(i);
                let d = coef(i, i) / h2;
                centre -= 2.0 * d;
                push(p + si, d);
                push(p - si, d);
                for j in (i + 1)..n {
                    let sj = dom.stride(j);
                    // Both (i,j) and (j,i) terms of the contraction.
                    let c = coef(i, j) / (2.0 * h2);
                    push(p + si + sj, c);
                    push(p + si - sj, -c);
                    push(p - si + sj, -c);
                    push(p - si - sj, c);
                }
            }
            push(p, centre);
            entries.sort_by_key(|e| e.0);
            (entries, 1.0 - s2)
        })
        .collect();
    let mut csr = Csr {
        row_ptr: Vec::with_capacity(rows.len() + 1),
        ..Default::default()
    };
    csr.row_ptr.push(0);
    let mut rhs = Vec::with_capacity(rows.len());
    for (entries, b) in rows {
        for (c, v) in entries {
            csr.cols.push(c);
            csr.vals.push(v);
        }
        csr.row_ptr.push(csr.cols.len());
        rhs.push(b);
    }
    (csr, rhs)
}

/// Solve `σ₂(D²u) = 1` in the box with `u = g` on its boundary.
pub fn newton_solve(dom: &GridDomain, g: &DirichletData, cfg: &SolveConfig) -> Result<SolveReport, SolverError> {
    if let Some(k) = g.dim() {
        if k != dom.n {
            return Err(SolverError::Config(format!("data is {k}-dimensional, grid is {}-dimensional", dom.n)));
        }
    }
    let start = initial_guess(dom, g, cfg.start);
    if gamma2_scan(&start).first_violation.is_none() {
        return newton_solve_from(start, cfg);
    }
    continuation(dom, g, cfg)
}

/// Smallest homotopy step before giving up.
const MIN_CONTINUATION_STEP: f64 = 1.0 / 1024.0;

/// Move the boundary values from the barrier to `g` in stages, each solved
/// by Newton from the previous stage. The barrier with its own boundary
/// values is an exact discrete solution, so stage 0 is free.
fn continuation(dom: &GridDomain, g: &DirichletData, cfg: &SolveConfig) -> Result<SolveReport, SolverError> {
    cfg.validate()?;
    let c = barrier_coefficient(dom.n);
    let w0 = |x: &[f64]| c * x.iter().map(|t| t * t).sum::<f64>();
    let boundary = dom.boundary();
    let target: Vec<f64> = boundary.iter().map(|&p| g.eval(&dom.coords(p))).collect();
    let a = boundary
        .iter()
        .zip(&target)
        .map(|(&p, gv)| w0(&dom.coords(p)) - gv)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut u = ScalarField::from_fn(dom, |x| w0(x) - a);
    let w_b: Vec<f64> = boundary.iter().map(|&p| u.values[p]).collect();

    let mut history = vec![residual_norm(&u)];
    let mut step_sizes = Vec::new();
    let mut krylov_iterations = Vec::new();
    let mut stages = Vec::new();
    let (mut t, mut dt) = (0.0_f64, 1.0_f64);
    let mut last = None;
    while t < 1.0 {
        let s = (t + dt).min(1.0);
        let mut trial = u.clone();
        for (k, &p) in boundary.iter().enumerate() {
            trial.values[p] = w_b[k] + s * (target[k] - w_b[k]);
        }
        match newton_solve_from(trial, cfg) {
            Ok(rep) => {
                history.extend_from_slice(&rep.residual_history);
                step_sizes.extend_from_slice(&rep.step_sizes);
                krylov_iterations.extend_from_slice(&rep.krylov_iterations);
                stages.push(s);
                t = s;
                dt *= 2.0;
                u = rep.field.clone();
                last = Some(rep);
            }
            Err(
                e @ (SolverError::EllipticityLoss { .. }
                | SolverError::NonConvergence { .. }
                | SolverError::LinearSolve { .. }),
            ) => {
                dt *= 0.5;
                if dt < MIN_CONTINUATION_STEP {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
    let rep = last.expect("at least one stage ran");
    Ok(SolveReport {
        residual_history: history,
        iterations: step_sizes.len(),
        step_sizes,
        krylov_iterations,
        continuation: stages,
        ..rep
    })
}


/// Newton from an explicit start whose boundary values are the data.
pub fn newton_solve_from(start: ScalarField, cfg: &SolveConfig) -> Result<SolveReport, SolverError> {
    cfg.validate()?;
    let dom = start.domain.clone();
    if let Some(p) = start.values.iter().position(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite { node: dom.multi_index(p) });
    }
    let interior = dom.interior();
    let mut row_of = vec![usize::MAX; dom.len()];
    for (r, &p) in interior.iter().enumerate() {
        row_of[p] = r;
    }

    let mut u = start;
    let scan = gamma2_scan(&u);
    if let Some(p) = scan.first_violation {
        return Err(ellipticity_loss(&u, p, 0));
    }
    let mut res = residual_norm(&u);
    let mut history = vec![res];
    let mut step_sizes = Vec::new();
    let mut krylov_iterations = Vec::new();

    while res > cfg.tol_residual {
        let iteration = step_sizes.len() + 1;
        if iteration > cfg.max_newton {
            return Err(SolverError::NonConvergence {
                iterations: cfg.max_newton,
                history,
                reason: "max_newton exceeded".into(),
            });
        }
        let (jac, rhs) = assemble(&u, &interior, &row_of);
        let (delta, out) = bicgstab(&jac, &rhs, cfg.krylov_tol, cfg.krylov_max_iter);
        if !out.converged && !(out.relative_residual <= INEXACT_ACCEPT) {
            return Err(SolverError::LinearSolve {
                iteration,
                krylov_iterations: out.iterations,
                relative_residual: out.relative_residual,
            });
        }
        krylov_iterations.push(out.iterations);

        let mut t = 1.0;
        let mut accepted = None;
        let mut lost_at = None;
        for _ in 0..=cfg.max_halvings {
            let mut trial = u.clone();
            for (&p, d) in interior.iter().zip(&delta) {
                trial.values[p] += t * d;
            }
            let scan = gamma2_scan(&trial);
            match scan.first_violation {
                Some(p) => lost_at = Some((trial, p)),
                None => {
                    lost_at = None;
                    let r = residual_norm(&trial);
                    if r < res {
                        accepted = Some((trial, r));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((next, r)) => {
                u = next;
                res = r;
                history.push(r);
                step_sizes.push(t);
            }
            None => {
                if let Some((trial, p)) = lost_at {
                    return Err(ellipticity_loss(&trial, p, iteration));
                }
                return Err(SolverError::NonConvergence {
                    iterations: iteration - 1,
                    history,
                    reason: "damping could not reduce the residual".into(),
                });
            }
        }
    }

    let scan = gamma2_scan(&u);
    Ok(SolveReport {
        schema_version: crate::SCHEMA_VERSION,
        domain: dom,
        residual_history: history,
        iterations: step_sizes.len(),
        step_sizes,
        krylov_iterations,
        continuation: Vec::new(),
        gamma2_certified: scan.inside,
        min_ellipticity: ellipticity_margin(&u),
        min_sigma2: scan.min_sigma2,
        field: u,
    })
}

fn ellipticity_loss(f: &ScalarField, p: usize, iteration: usize) -> SolverError {
    let (s1, s2) = sigma12(f.domain.n, &hessian_raw(&f.domain, &f.values, p));
    SolverError::EllipticityLoss {
        node: f.domain.multi_index(p),
        iteration,
        sigma1: s1,
        sigma2: s2,
    }
}
