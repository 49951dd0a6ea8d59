use rayon::prelude::*;

use crate::symfun::SymTensor;

use super::grid::{GridDomain, ScalarField};
use super::SolverError;

/// Row-major `n×n` central-difference Hessian at an interior node.
pub(crate) fn hessian_raw(dom: &GridDomain, v: &[f64], p: usize) -> Vec<f64> {
    let n = dom.n;
    let h2 = dom.h * dom.h;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        let si = dom.stride(i);
        out[i * n + i] = (v[p + si] - 2.0 * v[p] + v[p - si]) / h2;
        for j in (i + 1)..n {
            let sj = dom.stride(j);
            let c = (v[p + si + sj] - v[p + si - sj] - v[p - si + sj] + v[p - si - sj]) / (4.0 * h2);
            out[i * n + j] = c;
            out[j * n + i] = c;
        }
    }
    out
}

/// `(σ₁, σ₂)` of a row-major symmetric matrix from its invariants.
pub(crate) fn sigma12(n: usize, a: &[f64]) -> (f64, f64) {
    let tr: f64 = (0..n).map(|i| a[i * n + i]).sum();
    let tr_sq: f64 = a.iter().map(|x| x * x).sum();
    (tr, 0.5 * (tr * tr - tr_sq))
}

/// Central-difference Hessian `D²f` at `node`; exact on quadratics.
pub fn discrete_hessian(f: &ScalarField, node: usize) -> Result<SymTensor, SolverError> {
    let dom = &f.domain;
    if node >= dom.len() || dom.is_boundary(node) {
        return Err(SolverError::Index {
            node: if node < dom.len() { dom.multi_index(node) } else { vec![node] },
        });
    }
    Ok(SymTensor::new(dom.n, hessian_raw(dom, &f.values, node)).expect("stencil output is symmetric"))
}

/// `σ₂(D²f) − 1` at interior nodes, zero on the boundary.
pub fn residual(f: &ScalarField) -> ScalarField {
    let dom = &f.domain;
    let values = (0..dom.len())
        .into_par_iter()
        .map(|p| {
            if dom.is_boundary(p) {
                0.0
            } else {
                sigma12(dom.n, &hessian_raw(dom, &f.values, p)).1 - 1.0
            }
        })
        .collect();
    ScalarField {
        domain: dom.clone(),
        values,
    }
}

/// Max-norm of [`residual`].
pub fn residual_norm(f: &ScalarField) -> f64 {
    residual(f).max_abs()
}

/// Smallest `(σ₁, σ₂)` pair violation over interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamma2Scan {
    /// Whether every interior discrete Hessian has `σ₁ > 0` and `σ₂ > 0`.
    pub inside: bool,
    pub min_sigma1: f64,
    pub min_sigma2: f64,
    /// First interior node (in index order) outside `Γ₂`.
    pub first_violation: Option<usize>,
}

pub fn gamma2_scan(f: &ScalarField) -> Gamma2Scan {
    let dom = &f.domain;
    let interior = dom.interior();
    let sig: Vec<(f64, f64)> = interior
        .par_iter()
        .map(|&p| sigma12(dom.n, &hessian_raw(dom, &f.values, p)))
        .collect();
    let first_violation = interior
        .iter()
        .zip(&sig)
        .find(|(_, (s1, s2))| !(*s1 > 0.0 && *s2 > 0.0))
        .map(|(&p, _)| p);
    Gamma2Scan {
        inside: first_violation.is_none(),
        min_sigma1: sig.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
        min_sigma2: sig.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        first_violation,
    }
}

/// Coefficient of the barrier `|x|²/√(2n(n−1)) − a`.
pub fn barrier_coefficient(n: usize) -> f64 {
    1.0 / ((2 * n * (n - 1)) as f64).sqrt()
}

/// Smallest `a` that makes the barrier non-positive on the boundary of `dom`.
pub fn barrier_shift(dom: &GridDomain) -> f64 {
    let c = barrier_coefficient(dom.n);
    dom.boundary()
        .into_iter()
        .map(|p| c * dom.coords(p).iter().map(|x| x * x).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The barrier `w = |x|²/√(2n(n−1)) − a` sampled at every node. Its
/// Hessian is `2/√(2n(n−1))·I`, which has `σ₂ = 1`.
pub fn barrier_initial_guess(dom: &GridDomain, a: f64) -> ScalarField {
    let c = barrier_coefficient(dom.n);
    ScalarField::from_fn(dom, |x| c * x.iter().map(|t| t * t).sum::<f64>() - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(m: &[f64], dom: &GridDomain) -> ScalarField {
        let n = dom.n;
        ScalarField::from_fn(dom, |x| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += 0.5 * m[i * n + j] * x[i] * x[j];
                }
            }
            s + 0.3 * x[0] - 1.25
        })
    }

    #[test]
    fn quadratic_hessian_is_exact() {
        let dom = GridDomain::new(vec![-1.0, 0.5, 2.0], vec![0.5, 2.0, 3.5], 9).unwrap();
        let m = [2.0, 0.3, -0.1, 0.3, 1.0, 0.25, -0.1, 0.25, 0.5];
        let f = quad(&m, &dom);
        for p in dom.interior() {
            let hess = discrete_hessian(&f, p).unwrap();
            for (a, b) in hess.entries().iter().zip(&m) {
                assert!((a - b).abs() < 1e-11, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn constant_has_zero_hessian() {
        let dom = GridDomain::cube(2, 0.0, 1.0, 6).unwrap();
        let f = ScalarField::from_fn(&dom, |_| 3.5);
        assert_eq!(discrete_hessian(&f, dom.interior()[3]).unwrap(), SymTensor::zeros(2).unwrap());
    }

    #[test]
    fn boundary_node_is_an_index_error() {
        let dom = GridDomain::cube(3, -1.0, 1.0, 5).unwrap();
        let f = ScalarField::zeros(&dom);
        assert!(matches!(discrete_hessian(&f, 0), Err(SolverError::Index { .. })));
        assert!(discrete_hessian(&f, dom.len()).is_err());
    }

    #[test]
    fn unit_sigma2_quadratic_in_3d() {
        let dom = GridDomain::cube(3, -1.0, 1.0, 9).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let f = ScalarField::from_fn(&dom, |x| (x.iter().map(|t| t * t).sum::<f64>() - 1.0) * s / 2.0);
        let hess = discrete_hessian(&f, dom.linear_index(&[4, 4, 4])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s } else { 0.0 };
                assert!((hess.get(i, j) - want).abs() < 1e-12);
            }
        }
        assert!(residual_norm(&f) < 1e-12);
    }

    #[test]
    fn barrier_solves_the_equation() {
        for n in [2, 3] {
            let dom = GridDomain::cube(n, -1.0, 1.0, 9).unwrap();
            let a = barrier_shift(&dom);
            assert!((a - n as f64 * barrier_coefficient(n)).abs() < 1e-15);
            let w = barrier_initial_guess(&dom, a);
            assert!(residual_norm(&w) < 1e-12, "n={n}");
            assert!(gamma2_scan(&w).inside);
            assert!(w.values.iter().all(|&v| v <= 1e-15));
            let hess = discrete_hessian(&w, dom.interior()[0]).unwrap();
            assert!((hess.get(0, 0) - 2.0 * barrier_coefficient(n)).abs() < 1e-12);
        }
        // a = 0: w vanishes at the origin.
        let dom = GridDomain::cube(3, -1.0, 1.0, 9).unwrap();
        let w = barrier_initial_guess(&dom, 0.0);
        assert_eq!(w.values[dom.linear_index(&[4, 4, 4])], 0.0);
    }

    #[test]
    fn residual_is_linear_in_small_perturbations() {
        let dom = GridDomain::cube(3, -1.0, 1.0, 9).unwrap();
        let w = barrier_initial_guess(&dom, barrier_shift(&dom));
        let bump = |x: &[f64]| x.iter().map(|t| 1.0 - t * t).product::<f64>();
        let norms: Vec<f64> = [1e-4, 2e-4]
            .iter()
            .map(|&d| {
                let f = ScalarField::from_fn(&dom, |x| w.values[dom.linear_index(&x_to_k(&dom, x))] + d * bump(x));
                residual_norm(&f)
            })
            .collect();
        assert!(norms[0] > 0.0);
        assert!((norms[1] / norms[0] - 2.0).abs() < 1e-3, "{norms:?}");
    }

    fn x_to_k(dom: &GridDomain, x: &[f64]) -> Vec<usize> {
        x.iter()
            .zip(&dom.lo)
            .map(|(t, lo)| ((t - lo) / dom.h).round() as usize)
            .collect()
    }

    #[test]
    fn gamma2_scan_finds_violations() {
        let dom = GridDomain::cube(2, -1.0, 1.0, 7).unwrap();
        let f = ScalarField::from_fn(&dom, |x| -(x[0] * x[0] + x[1] * x[1]));
        let s = gamma2_scan(&f);
        assert!(!s.inside);
        assert_eq!(s.first_violation, Some(dom.interior()[0]));
        assert!(s.min_sigma1 < 0.0);
    }
}
