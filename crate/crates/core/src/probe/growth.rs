use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ProbeError;

/// Quadratic growth `u(x) ≥ b|x|² − c` for `|x| ≥ R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub b: f64,
    pub c: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl GrowthFit {
    pub fn new(b: f64, c: f64, r: f64) -> Result<Self, ProbeError> {
        if !(b > 0.0) || !c.is_finite() || !(r >= 0.0) {
            return Err(ProbeError::Config(format!("growth fit needs b > 0, finite c, R >= 0; got b={b}, c={c}, R={r}")));
        }
        Ok(GrowthFit { b, c, r })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub fit: GrowthFit,
    pub holds: bool,
    /// Smallest `u(x) − (b|x|² − c)` over the checked points.
    pub worst_gap: f64,
    /// Point attaining `worst_gap` (first in point order on ties).
    pub witness: Option<Vec<f64>>,
    pub checked: usize,
}

/// Points on rays `±eᵢ` and on `extra_dirs` seeded random directions, at
/// `steps` radii evenly spaced in `[r_min, r_max]`.
pub fn growth_points(n: usize, r_min: f64, r_max: f64, steps: usize, extra_dirs: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[i] = s;
            dirs.push(d);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < 2 * n + extra_dirs {
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = d.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            dirs.push(d.into_iter().map(|t| t / norm).collect());
        }
    }
    let steps = steps.max(1);
    let mut pts = Vec::with_capacity(dirs.len() * steps);
    for d in &dirs {
        for k in 0..steps {
            let r = if steps == 1 {
                r_min
            } else {
                r_min + (r_max - r_min) * k as f64 / (steps - 1) as f64
            };
            pts.push(d.iter().map(|t| t * r).collect());
        }
    }
    pts
}

/// Whether `u(x) ≥ b|x|² − c` at every `x` in `points` with `|x| ≥ R`.
pub fn growth_check(u: &dyn Fn(&[f64]) -> f64, fit: GrowthFit, points: &[Vec<f64>]) -> GrowthCheck {
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut checked = 0;
    for x in points {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        if r2.sqrt() < fit.r {
            continue;
        }
        checked += 1;
        let gap = u(x) - (fit.b * r2 - fit.c);
        if gap < worst || (gap.is_nan() && witness.is_none()) {
            worst = gap;
            witness = Some(x.clone());
        }
    }
    GrowthCheck {
        fit,
        holds: worst >= 0.0,
        worst_gap: worst,
        witness: if worst < 0.0 || worst.is_nan() { witness } else { None },
        checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::{EntireCandidate, Warren};
    use crate::solver::{barrier_coefficient, barrier_shift, GridDomain};

    #[test]
    fn square_norm_grows() {
        let pts = growth_points(3, 0.5, 20.0, 40, 16, 1);
        let u = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>();
        let c = growth_check(&u, GrowthFit::new(0.5, 0.0, 1.0).unwrap(), &pts);
        assert!(c.holds);
        assert!(c.witness.is_none());
        assert!(c.checked < pts.len());
    }

    #[test]
    fn warren_fails_on_the_t_axis() {
        let pts = growth_points(3, 1.0, 30.0, 59, 32, 1);
        let u = |x: &[f64]| Warren.value(x);
        for b in [1e-3, 1e-1, 10.0] {
            let c = growth_check(&u, GrowthFit::new(b, 100.0, 1.0).unwrap(), &pts);
            assert!(!c.holds);
            let w = c.witness.unwrap();
            assert_eq!(&w[..2], &[0.0, 0.0]);
            assert!(w[2] > 0.0);
        }
    }

    #[test]
    fn barrier_grows() {
        for n in [2, 3] {
            let dom = GridDomain::cube(n, -1.0, 1.0, 9).unwrap();
            let a = barrier_shift(&dom);
            let c0 = barrier_coefficient(n);
            let w = move |x: &[f64]| c0 * x.iter().map(|t| t * t).sum::<f64>() - a;
            let fit = GrowthFit::new(c0 / 2.0, a + 1.0, 1.0).unwrap();
            assert!(growth_check(&w, fit, &growth_points(n, 0.0, 50.0, 100, 8, 3)).holds);
        }
    }

    #[test]
    fn fit_validation() {
        assert!(GrowthFit::new(0.0, 1.0, 1.0).is_err());
        assert!(GrowthFit::new(1.0, f64::NAN, 1.0).is_err());
    }
}
