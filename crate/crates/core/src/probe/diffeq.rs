use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::solver::ScalarField;

use super::ProbeError;

/// Smallest grid for which depth-2 nodes exist with room to spare.
pub const MIN_NODES: usize = 9;

/// Residuals of the once- and twice-differentiated equation over a node set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffEqRegion {
    pub nodes: usize,
    /// `max |σ₂^{ij}u_{ijk}|` per direction `k`.
    pub first: Vec<f64>,
    /// `max |σ₂^{ij}u_{ijkk} + (tr X_k)² − tr(X_k²)|` per `k`, with
    /// `X_k = (u_{ijk})`.
    pub second: Vec<f64>,
}

impl DiffEqRegion {
    pub fn max_first(&self) -> f64 {
        self.first.iter().copied().fold(0.0, f64::max)
    }
    pub fn max_second(&self) -> f64 {
        self.second.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffEqStats {
    pub schema_version: u32,
    pub m: usize,
    pub h: f64,
    /// Nodes at depth ≥ 2.
    pub deep: DiffEqRegion,
    /// Nodes whose offset from the centre is at most `inner_fraction` of the
    /// half-width on every axis.
    pub inner: DiffEqRegion,
    pub inner_fraction: f64,
}

/// Differentiate `σ₂(D²u) = 1` once and twice along each axis using
/// differences of the discrete Hessian.
pub fn differentiated_equation_residual(f: &ScalarField, inner_fraction: f64) -> Result<DiffEqStats, ProbeError> {
    let dom = &f.domain;
    if dom.m < MIN_NODES {
        return Err(ProbeError::GridTooSmall {
            m: dom.m,
            need: MIN_NODES,
        });
    }
    if !(inner_fraction > 0.0 && inner_fraction <= 1.0) {
        return Err(ProbeError::Config(format!("inner fraction must be in (0, 1], got {inner_fraction}")));
    }
    let n = dom.n;
    let h = dom.h;
    let hess: Vec<Option<Vec<f64>>> = (0..dom.len())
        .into_par_iter()
        .map(|p| (!dom.is_boundary(p)).then(|| crate::solver::discrete_hessian(f, p).expect("interior").entries().to_vec()))
        .collect();

    let deep_nodes: Vec<usize> = (0..dom.len()).filter(|&p| dom.depth(p) >= 2).collect();
    let per_node: Vec<(usize, Vec<f64>, Vec<f64>)> = deep_nodes
        .par_iter()
        .map(|&p| {
            let hp = hess[p].as_ref().expect("deep node");
            let tr: f64 = (0..n).map(|i| hp[i * n + i]).sum();
            let coef = |i: usize, j: usize| if i == j { tr - hp[i * n + i] } else { -hp[i * n + j] };
            let mut first = Vec::with_capacity(n);
            let mut second = Vec::with_capacity(n);
            for k in 0..n {
                let s = dom.stride(k);
                let hpl = hess[p + s].as_ref().expect("interior neighbour");
                let hmi = hess[p - s].as_ref().expect("interior neighbour");
                let x: Vec<f64> = (0..n * n).map(|e| (hpl[e] - hmi[e]) / (2.0 * h)).collect();
                let xx: Vec<f64> = (0..n * n).map(|e| (hpl[e] - 2.0 * hp[e] + hmi[e]) / (h * h)).collect();
                let mut lin1 = 0.0;
                let mut lin2 = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        lin1 += coef(i, j) * x[i * n + j];
                        lin2 += coef(i, j) * xx[i * n + j];
                    }
                }
                let tr_x: f64 = (0..n).map(|i| x[i * n + i]).sum();
                let tr_x2: f64 = x.iter().map(|v| v * v).sum();
                first.push(lin1.abs());
                second.push((lin2 + tr_x * tr_x - tr_x2).abs());
            }
            (p, first, second)
        })
        .collect();

    let region = |keep: &dyn Fn(usize) -> bool| {
        let mut r = DiffEqRegion {
            nodes: 0,
            first: vec![0.0; n],
            second: vec![0.0; n],
        };
        for (p, a, b) in &per_node {
            if !keep(*p) {
                continue;
            }
            r.nodes += 1;
            for k in 0..n {
                r.first[k] = r.first[k].max(a[k]);
                r.second[k] = r.second[k].max(b[k]);
            }
        }
        r
    };
    let half = 0.5 * (dom.hi[0] - dom.lo[0]);
    let centre: Vec<f64> = dom.lo.iter().zip(&dom.hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let deep = region(&|_| true);
    let inner = region(&|p| {
        dom.coords(p)
            .iter()
            .zip(&centre)
            .all(|(x, c)| (x - c).abs() <= inner_fraction * half + 1e-12 * half)
    });
    Ok(DiffEqStats {
        schema_version: crate::SCHEMA_VERSION,
        m: dom.m,
        h,
        deep,
        inner,
        inner_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{barrier_initial_guess, barrier_shift, newton_solve, DirichletData, GridDomain, SolveConfig};

    #[test]
    fn quadratics_have_no_third_derivatives() {
        let dom = GridDomain::cube(3, -1.0, 1.0, 9).unwrap();
        let w = barrier_initial_guess(&dom, barrier_shift(&dom));
        let s = differentiated_equation_residual(&w, 0.5).unwrap();
        assert!(s.deep.max_first() < 1e-10 && s.deep.max_second() < 1e-8, "{s:?}");
        assert_eq!(s.deep.nodes, 125);
        assert_eq!(s.inner.nodes, 125);
        let s = differentiated_equation_residual(&w, 0.25).unwrap();
        assert_eq!(s.inner.nodes, 27);
    }

    #[test]
    fn small_grid_is_rejected() {
        let dom = GridDomain::cube(2, -1.0, 1.0, 7).unwrap();
        assert!(matches!(
            differentiated_equation_residual(&ScalarField::zeros(&dom), 0.5),
            Err(ProbeError::GridTooSmall { m: 7, need: 9 })
        ));
    }

    #[test]
    fn residual_shrinks_under_refinement() {
        let run = |m| {
            let dom = GridDomain::cube(3, -1.0, 1.0, m).unwrap();
            let rep = newton_solve(&dom, &DirichletData::Zero, &SolveConfig::default()).unwrap();
            differentiated_equation_residual(&rep.field, 0.5).unwrap()
        };
        let (coarse, fine) = (run(17), run(33));
        assert!(fine.inner.max_first() < coarse.inner.max_first());
        assert!(fine.inner.max_second() < coarse.inner.max_second());
    }
}
