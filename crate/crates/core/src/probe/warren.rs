use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::symfun::{in_gamma_k, SymTensor};

use super::candidate::{fd_hessian, EntireCandidate, Warren};
use super::growth::{growth_check, growth_points, GrowthCheck, GrowthFit};
use super::ProbeError;

/// Points checked against finite differences of the closed-form value.
const FD_POINTS: usize = 10;
const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarrenReport {
    pub schema_version: u32,
    pub count: usize,
    pub seed: u64,
    /// Samples are uniform in `[−half_width, half_width]³`.
    pub half_width: f64,
    pub max_abs_residual: f64,
    /// Sample attaining `max_abs_residual`.
    pub worst_point: Vec<f64>,
    pub gamma2_all: bool,
    pub min_sigma1: f64,
    pub min_sigma2: f64,
    /// Largest relative gap between the closed-form Hessian and central
    /// differences of `u` over the first few samples.
    pub fd_max_rel_error: f64,
    pub fd_points: usize,
    /// Every fit of the family is violated.
    pub growth_violated: bool,
    pub growth: Vec<GrowthCheck>,
}

/// `σ₂` as the sum of principal 2×2 minors.
fn sigma2_minors(h: &SymTensor) -> f64 {
    let n = h.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += h.get(i, i) * h.get(j, j) - h.get(i, j) * h.get(i, j);
        }
    }
    s
}

/// Fits `b ∈ {10⁻³, 10⁻², …, 10}` × `c ∈ {0, 1, 10, 100}`, `R = 1`.
pub fn default_growth_family() -> Vec<GrowthFit> {
    let mut fits = Vec::new();
    for e in -3..=1 {
        for c in [0.0, 1.0, 10.0, 100.0] {
            fits.push(GrowthFit::new(10f64.powi(e), c, 1.0).expect("valid constants"));
        }
    }
    fits
}

/// Check Warren's solution at `count` seeded points of `[−half_width, half_width]³`.
pub fn warren_validate(count: usize, seed: u64, half_width: f64) -> Result<WarrenReport, ProbeError> {
    if count == 0 || !(half_width > 0.0) || !half_width.is_finite() {
        return Err(ProbeError::Config("warren needs count >= 1 and a positive box".into()));
    }
    let w = Warren;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_res: f64 = 0.0;
    let mut worst_point = Vec::new();
    let mut gamma2_all = true;
    let mut min_s1 = f64::INFINITY;
    let mut min_s2 = f64::INFINITY;
    let mut fd_err: f64 = 0.0;
    for k in 0..count {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-half_width..=half_width)).collect();
        let hess = w.hessian(&x).expect("closed form");
        let s2 = sigma2_minors(&hess);
        let res = (s2 - 1.0).abs();
        if res > max_res || worst_point.is_empty() {
            max_res = max_res.max(res);
            worst_point = x.clone();
        }
        let cone = in_gamma_k(&hess, 2).expect("n = 3");
        gamma2_all &= cone.inside;
        min_s1 = min_s1.min(cone.sigmas[0]);
        min_s2 = min_s2.min(cone.sigmas[1]);
        if k < FD_POINTS {
            let fd = fd_hessian(&w, &x, FD_STEP);
            let scale = 1.0 + hess.frobenius_norm();
            let gap = hess.entries().iter().zip(fd.entries()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            fd_err = fd_err.max(gap / scale);
        }
    }

    let pts = growth_points(3, 1.0, 30.0, 59, 32, seed);
    let u = |x: &[f64]| w.value(x);
    let growth: Vec<GrowthCheck> = default_growth_family()
        .into_iter()
        .map(|fit| growth_check(&u, fit, &pts))
        .collect();

    Ok(WarrenReport {
        schema_version: crate::SCHEMA_VERSION,
        count,
        seed,
        half_width,
        max_abs_residual: max_res,
        worst_point,
        gamma2_all,
        min_sigma1: min_s1,
        min_sigma2: min_s2,
        fd_max_rel_error: fd_err,
        fd_points: FD_POINTS.min(count),
        growth_violated: growth.iter().all(|g| !g.holds),
        growth,
    })
}
