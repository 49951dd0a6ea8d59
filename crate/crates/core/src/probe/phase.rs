use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ineq::{IneqError, ScaleLaw, SurfaceSampler};
use crate::symfun::{sigma_all, Spectrum};

use super::ProbeError;

/// Phase tolerance `|Σ arctan λᵢ − π/2|`.
pub const PHASE_TOL: f64 = 1e-10;
/// Relative tolerance for the complex-product expansion.
pub const PRODUCT_TOL: f64 = 1e-12;

/// Special Lagrangian phase `Σ arctan λᵢ`.
pub fn sl_phase(lambda: &Spectrum) -> f64 {
    lambda.values().iter().map(|l| l.atan()).sum()
}

/// `∏(1 + iλₖ)`, whose real part is `1 − σ₂ + σ₄ − …` and imaginary part
/// `σ₁ − σ₃ + …`.
pub fn phase_product(lambda: &Spectrum) -> Complex64 {
    lambda
        .values()
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &l| acc * Complex64::new(1.0, l))
}

/// Per-sample comparison of the phase and the product expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    pub lambda: Vec<f64>,
    pub phase: f64,
    pub phase_error: f64,
    pub re: f64,
    pub im: f64,
    /// `|Re − (1 − σ₂)| / ∏(1 + |λₖ|)`.
    pub re_rel_error: f64,
    /// `|Im − (σ₁ − σ₃)| / ∏(1 + |λₖ|)`.
    pub im_rel_error: f64,
    pub sigma2: f64,
}

/// Evaluate phase and product identities at one `n = 3` spectrum.
pub fn phase_sample(lambda: &Spectrum) -> PhaseSample {
    let s = sigma_all(lambda);
    let p = phase_product(lambda);
    let scale: f64 = lambda.values().iter().map(|l| 1.0 + l.abs()).product();
    let s3 = s.get(3).copied().unwrap_or(0.0);
    let phase = sl_phase(lambda);
    PhaseSample {
        lambda: lambda.values().to_vec(),
        phase,
        phase_error: (phase - FRAC_PI_2).abs(),
        re: p.re,
        im: p.im,
        re_rel_error: (p.re - (1.0 - s[2])).abs() / scale,
        im_rel_error: (p.im - (s[1] - s3)).abs() / scale,
        sigma2: s[2],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub schema_version: u32,
    pub count: usize,
    pub seed: u64,
    pub max_phase_error: f64,
    pub max_re_rel_error: f64,
    pub max_im_rel_error: f64,
    pub min_im: f64,
    /// Samples with phase error above the tolerance, `Im ≤ 0`, or a
    /// product-expansion mismatch.
    pub violations: usize,
    pub worst: Option<PhaseSample>,
    pub rejected: usize,
    /// `λ = (1, 1, 1/2)` with `σ₂ = 2`: its phase must miss `π/2`.
    pub control: PhaseSample,
    pub control_excluded: bool,
}

impl PhaseReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.control_excluded
    }
}

/// Sample `count` spectra in `Γ₂ ∩ {σ₂ = 1}` (`n = 3`) and check that their
/// phase is `π/2`.
pub fn phase_identity_check(count: usize, seed: u64) -> Result<PhaseReport, ProbeError> {
    if count == 0 {
        return Err(ProbeError::Config("count must be at least 1".into()));
    }
    let mut sampler = SurfaceSampler::new(seed, 0, ScaleLaw::default());
    let max_attempts = 1000 * count + 1000;
    let mut attempts = 0;
    let mut rejected = 0;
    let mut done = 0;
    let mut report = PhaseReport {
        schema_version: crate::SCHEMA_VERSION,
        count,
        seed,
        max_phase_error: 0.0,
        max_re_rel_error: 0.0,
        max_im_rel_error: 0.0,
        min_im: f64::INFINITY,
        violations: 0,
        worst: None,
        rejected: 0,
        control: phase_sample(&Spectrum::new(vec![1.0, 1.0, 0.5]).expect("finite")),
        control_excluded: false,
    };
    while done < count {
        if attempts >= max_attempts {
            return Err(IneqError::Starvation {
                constraint: "sigma2_one_n3".into(),
                attempts,
                accepted: done,
            }
            .into());
        }
        attempts += 1;
        let Some(l) = sampler.sigma2_one_sorted(3) else {
            rejected += 1;
            continue;
        };
        done += 1;
        let s = phase_sample(&Spectrum::new(l).expect("finite"));
        let bad = !(s.phase_error <= PHASE_TOL)
            || !(s.im > 0.0)
            || !(s.re_rel_error <= PRODUCT_TOL)
            || !(s.im_rel_error <= PRODUCT_TOL);
        if bad {
            report.violations += 1;
        }
        report.max_re_rel_error = report.max_re_rel_error.max(s.re_rel_error);
        report.max_im_rel_error = report.max_im_rel_error.max(s.im_rel_error);
        report.min_im = report.min_im.min(s.im);
        if s.phase_error > report.max_phase_error || report.worst.is_none() {
            report.max_phase_error = report.max_phase_error.max(s.phase_error);
            report.worst = Some(s);
        }
    }
    report.rejected = rejected;
    report.control_excluded = report.control.phase_error > PHASE_TOL;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn phase_examples() {
        assert_eq!(sl_phase(&spec(&[1.0, 1.0, 0.0])), PI / 2.0);
        let t = 3f64.sqrt() / 3.0;
        assert!((sl_phase(&spec(&[t, t, t])) - PI / 2.0).abs() < 1e-15);
        assert!((sl_phase(&spec(&[2.0, 2.0, -0.75])) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_expansion_matches_sigmas() {
        let s = phase_sample(&spec(&[2.0, 2.0, -0.75]));
        assert!(s.re.abs() < 1e-12);
        assert!((s.im - (3.25 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn surface_samples_have_phase_half_pi() {
        let r = phase_identity_check(10_000, 7).unwrap();
        assert_eq!(r.violations, 0, "{:?}", r.worst);
        assert!(r.max_phase_error <= PHASE_TOL);
        assert!(r.min_im > 0.0);
        assert!(r.control_excluded);
        assert!((r.control.sigma2 - 2.0).abs() < 1e-15);
        assert!(r.passed());
    }
}
