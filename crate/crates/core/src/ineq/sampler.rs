use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::symfun::{sigma_all, Spectrum, SymTensor};

use super::lemmas::{
    check_corollary_a, check_corollary_third_derivative, check_lemma_cq, check_lemma_shift,
    check_quadratic_form_epsilon, on_sigma2_surface, sigma2_of,
};
use super::report::{MarginReport, SampleConfig, SampleReport, ScaleLaw};
use super::IneqError;

/// Checked samples per independently seeded chunk. Chunk `c` draws from
/// ChaCha stream `c` of the run seed, so the sample stream does not depend
/// on how chunks are spread over threads.
const CHUNK: usize = 2048;

/// Maximum tolerated rejection ratio before declaring starvation (99.9 %).
const MAX_REJECTION_RATIO: usize = 1000;

/// Inequalities that [`sample_verify`] knows how to sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Inequality {
    LemmaCq,
    CorollaryThirdDerivative,
    LemmaShift,
    CorollaryA,
    QuadraticForm { eps: f64 },
}

impl Inequality {
    pub fn name(&self) -> &'static str {
        match self {
            Inequality::LemmaCq => "lemma_CQ",
            Inequality::CorollaryThirdDerivative => "corollary_third_derivative",
            Inequality::LemmaShift => "lemma_shift",
            Inequality::CorollaryA => "corollary_A",
            Inequality::QuadraticForm { .. } => "quadratic_form_eps",
        }
    }

    /// Short identifier used by the CLI suites.
    pub fn suite_id(&self) -> &'static str {
        match self {
            Inequality::LemmaCq => "lemma21",
            Inequality::CorollaryThirdDerivative => "cor22",
            Inequality::LemmaShift => "lemma23",
            Inequality::CorollaryA => "cor24",
            Inequality::QuadraticForm { .. } => "eps",
        }
    }

    pub fn constraint(&self) -> &'static str {
        match self {
            Inequality::LemmaCq | Inequality::LemmaShift => "gamma2_sorted",
            Inequality::CorollaryThirdDerivative | Inequality::CorollaryA => "sigma2_one_sorted",
            Inequality::QuadraticForm { .. } => "sigma2_one_n3",
        }
    }
}

impl FromStr for Inequality {
    type Err = IneqError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lemma21" | "lemma_CQ" | "lemma_cq" => Ok(Inequality::LemmaCq),
            "cor22" | "corollary_third_derivative" => Ok(Inequality::CorollaryThirdDerivative),
            "lemma23" | "lemma_shift" => Ok(Inequality::LemmaShift),
            "cor24" | "corollary_A" | "corollary_a" => Ok(Inequality::CorollaryA),
            "eps" | "quadratic_form_eps" => Ok(Inequality::QuadraticForm { eps: 1.0 / 25.0 }),
            other => Err(IneqError::Unknown(other.to_string())),
        }
    }
}

/// Seeded draws on the constraint surfaces used by the lemma checks.
pub struct SurfaceSampler {
    rng: ChaCha8Rng,
    law: ScaleLaw,
}

impl SurfaceSampler {
    pub fn new(seed: u64, stream: u64, law: ScaleLaw) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SurfaceSampler { rng, law }
    }

    /// Signed value with log-uniform magnitude.
    pub fn signed(&mut self) -> f64 {
        let m = self.magnitude();
        if self.rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    }

    pub fn magnitude(&mut self) -> f64 {
        match self.law {
            ScaleLaw::LogUniform { lo, hi } => 10f64.powf(self.rng.gen_range(lo.log10()..=hi.log10())),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.signed()).collect()
    }

    /// Non-increasing `λ ∈ Γ₂`, or `None` when the draw misses the cone.
    pub fn gamma2_sorted(&mut self, n: usize) -> Option<Vec<f64>> {
        let mut v = self.vector(n);
        v.sort_by(|a, b| b.total_cmp(a));
        let s1: f64 = v.iter().sum();
        (s1 > 0.0 && sigma2_of(&v) > 0.0).then_some(v)
    }

    /// Non-increasing `λ ∈ Γ₂` with `σ₂(λ) = 1`.
    ///
    /// For `n = 3`: draw `λ₂ ≥ λ₃`, solve `λ₁ = (1 − λ₂λ₃)/(λ₂ + λ₃)` and
    /// reject unless `λ₁ ≥ λ₂` and `σ₁ > 0`. Other dimensions rescale a
    /// `Γ₂` draw by `σ₂^{-1/2}`.
    pub fn sigma2_one_sorted(&mut self, n: usize) -> Option<Vec<f64>> {
        let v = if n == 3 {
            let (x, y) = (self.signed(), self.signed());
            let (l2, l3) = if x >= y { (x, y) } else { (y, x) };
            let s = l2 + l3;
            if s <= 0.0 {
                return None;
            }
            let l1 = (1.0 - l2 * l3) / s;
            if !(l1 >= l2) || l1 + l2 + l3 <= 0.0 {
                return None;
            }
            vec![l1, l2, l3]
        } else {
            let v = self.gamma2_sorted(n)?;
            let k = sigma2_of(&v).sqrt();
            v.into_iter().map(|x| x / k).collect()
        };
        (v.iter().all(|x| x.is_finite()) && on_sigma2_surface(&v)).then_some(v)
    }
}

fn diag(v: &[f64]) -> SymTensor {
    SymTensor::diag(v).expect("sampled dimension is supported")
}

/// One draw for `which`; `None` means the draw missed the constraint.
fn draw(which: Inequality, n: usize, s: &mut SurfaceSampler) -> Option<MarginReport> {
    let report = match which {
        Inequality::LemmaCq => {
            let w = s.gamma2_sorted(n)?;
            let xi = s.vector(n);
            check_lemma_cq(&diag(&w), &diag(&xi))
        }
        Inequality::CorollaryThirdDerivative => {
            let w = s.sigma2_one_sorted(n)?;
            let mut xi = s.vector(n);
            // Project onto η = Σ σ₂^{ii} ξᵢ = 0.
            let s1: f64 = w.iter().sum();
            let g: Vec<f64> = w.iter().map(|x| s1 - x).collect();
            let gg: f64 = g.iter().map(|x| x * x).sum();
            let eta: f64 = g.iter().zip(&xi).map(|(a, b)| a * b).sum();
            for (x, gi) in xi.iter_mut().zip(&g) {
                *x -= eta / gg * gi;
            }
            check_corollary_third_derivative(&diag(&w), &diag(&xi))
        }
        Inequality::LemmaShift => {
            let w = s.gamma2_sorted(n)?;
            let a = if n == 2 {
                s.magnitude()
            } else {
                let nf = n as f64;
                s.uniform() * (sigma2_of(&w) / (3.0 * (nf - 1.0) * (nf - 2.0))).sqrt()
            };
            check_lemma_shift(&diag(&w), a)
        }
        Inequality::CorollaryA => {
            let w = s.sigma2_one_sorted(n)?;
            let s3 = if n >= 3 {
                sigma_all(&Spectrum::new(w.clone()).expect("finite"))[3]
            } else {
                0.0
            };
            let big_a = if s3 < 0.0 && s.coin() {
                -s3 * (1.0 + s.uniform())
            } else {
                s.magnitude()
            };
            check_corollary_a(&diag(&w), big_a)
        }
        Inequality::QuadraticForm { eps } => {
            let l = s.sigma2_one_sorted(3)?;
            // Each eigenvalue takes a turn as the distinguished one.
            let rotations = [[l[0], l[1], l[2]], [l[1], l[2], l[0]], [l[2], l[0], l[1]]];
            let mut worst: Option<MarginReport> = None;
            for r in rotations {
                let rep = check_quadratic_form_epsilon(&Spectrum::new(r.to_vec()).expect("finite"), eps)
                    .expect("n = 3");
                let replace = match &worst {
                    None => true,
                    Some(w) => rep.relative_margin() < w.relative_margin(),
                };
                if replace {
                    worst = Some(rep);
                }
            }
            return worst;
        }
    };
    Some(report.expect("sampled dimensions agree"))
}

#[derive(Default)]
struct ChunkStats {
    evaluated: usize,
    vacuous: usize,
    rejected: usize,
    attempts: usize,
    violations: usize,
    argmin: Option<(f64, MarginReport)>,
}

fn run_chunk(which: Inequality, cfg: &SampleConfig, chunk: usize, target: usize) -> Result<ChunkStats, IneqError> {
    let mut sampler = SurfaceSampler::new(cfg.seed, chunk as u64, cfg.scale_law);
    let mut st = ChunkStats::default();
    let max_attempts = MAX_REJECTION_RATIO * target + MAX_REJECTION_RATIO;
    while st.evaluated < target {
        if st.attempts >= max_attempts {
            return Err(IneqError::Starvation {
                constraint: which.constraint().to_string(),
                attempts: st.attempts,
                accepted: st.evaluated,
            });
        }
        st.attempts += 1;
        let Some(report) = draw(which, cfg.n, &mut sampler) else {
            st.rejected += 1;
            continue;
        };
        if report.vacuous {
            st.vacuous += 1;
            continue;
        }
        st.evaluated += 1;
        let rel = report.relative_margin();
        if report.violates(cfg.tol) {
            st.violations += 1;
        }
        // NaN margins count as the worst possible outcome.
        let rel_key = if rel.is_nan() { f64::NEG_INFINITY } else { rel };
        if st.argmin.as_ref().map_or(true, |(m, _)| rel_key < *m) {
            st.argmin = Some((rel_key, report));
        }
    }
    Ok(st)
}

/// Draw `cfg.count` hypothesis-satisfying inputs for `which` and reduce
/// their margins.
///
/// Deterministic in `cfg` (including across worker counts). Reports the
/// smallest relative margin with the input that attains it; ties keep the
/// earliest sample.
pub fn sample_verify(which: Inequality, cfg: &SampleConfig) -> Result<SampleReport, IneqError> {
    if cfg.count == 0 {
        return Err(IneqError::Config("count must be at least 1".into()));
    }
    if !(crate::symfun::MIN_DIM..=crate::symfun::MAX_DIM).contains(&cfg.n) {
        return Err(IneqError::Config(format!("dimension {} unsupported", cfg.n)));
    }
    if matches!(which, Inequality::QuadraticForm { .. }) && cfg.n != 3 {
        return Err(IneqError::Dimension { expected: 3, got: cfg.n });
    }
    if let Inequality::QuadraticForm { eps } = which {
        if !(0.0..=0.5).contains(&eps) {
            return Err(IneqError::EpsilonRange(eps));
        }
    }
    let chunks = cfg.count.div_ceil(CHUNK);
    let job = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let target = CHUNK.min(cfg.count - c * CHUNK);
                run_chunk(which, cfg, c, target)
            })
            .collect::<Vec<_>>()
    };
    let results = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| IneqError::Config(e.to_string()))?
            .install(job),
        None => job(),
    };

    let mut total = ChunkStats::default();
    for r in results {
        let st = r?;
        total.evaluated += st.evaluated;
        total.vacuous += st.vacuous;
        total.rejected += st.rejected;
        total.attempts += st.attempts;
        total.violations += st.violations;
        if let Some((m, rep)) = st.argmin {
            if total.argmin.as_ref().map_or(true, |(best, _)| m < *best) {
                total.argmin = Some((m, rep));
            }
        }
    }
    let (min_margin, argmin_witness) = match total.argmin {
        Some((m, rep)) => (m, Some(rep)),
        None => (f64::INFINITY, None),
    };
    Ok(SampleReport {
        schema_version: crate::SCHEMA_VERSION,
        name: which.name().to_string(),
        constraint: which.constraint().to_string(),
        n: cfg.n,
        seed: cfg.seed,
        count: cfg.count,
        tol: cfg.tol,
        min_margin,
        argmin_witness,
        violations: total.violations,
        evaluated: total.evaluated,
        vacuous: total.vacuous,
        rejected: total.rejected,
        attempts: total.attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(which: Inequality, n: usize, count: usize, seed: u64) -> SampleReport {
        sample_verify(which, &SampleConfig::new(n, count, seed)).unwrap()
    }

    #[test]
    fn accounting_sums_to_attempts() {
        for which in [
            Inequality::LemmaCq,
            Inequality::CorollaryThirdDerivative,
            Inequality::LemmaShift,
            Inequality::CorollaryA,
            Inequality::QuadraticForm { eps: 0.04 },
        ] {
            let r = run(which, 3, 5000, 9);
            assert_eq!(r.evaluated, 5000);
            assert_eq!(r.evaluated + r.vacuous + r.rejected, r.attempts, "{which:?}");
            assert_eq!(r.violations == 0, r.min_margin >= -r.tol);
        }
    }

    #[test]
    fn lemmas_hold_across_dimensions() {
        for n in 2..=6 {
            for which in [
                Inequality::LemmaCq,
                Inequality::CorollaryThirdDerivative,
                Inequality::LemmaShift,
                Inequality::CorollaryA,
            ] {
                let r = run(which, n, 20_000, 100 + n as u64);
                assert_eq!(r.violations, 0, "n={n} {which:?}: {:?}", r.argmin_witness);
            }
        }
    }

    #[test]
    fn large_epsilon_is_violated() {
        let r = run(Inequality::QuadraticForm { eps: 0.40 }, 3, 100_000, 42);
        assert!(r.violations > 0);
        let w = r.argmin_witness.unwrap();
        assert!(w.margin < 0.0);
        assert_eq!(w.witness["eps"], vec![0.40]);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = SampleConfig::new(3, 10_000, 5);
        let a = sample_verify(Inequality::LemmaCq, &cfg.clone().with_workers(1)).unwrap();
        let b = sample_verify(Inequality::LemmaCq, &cfg.with_workers(4)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn sigma2_one_sampler_stays_on_surface() {
        let mut s = SurfaceSampler::new(1, 0, ScaleLaw::default());
        for n in [2, 3, 4, 7] {
            let mut got = 0;
            while got < 500 {
                if let Some(v) = s.sigma2_one_sorted(n) {
                    assert!(on_sigma2_surface(&v));
                    assert!(v.windows(2).all(|w| w[0] >= w[1]));
                    got += 1;
                }
            }
        }
    }

    #[test]
    fn starvation_is_reported() {
        // |λ| = 10 only: mixed signs give λ₂ + λ₃ = 0 and two positive draws
        // give λ₁ < 0, so the σ₂ = 1 surface is never hit.
        let mut cfg = SampleConfig::new(3, 10, 1);
        cfg.scale_law = ScaleLaw::LogUniform { lo: 10.0, hi: 10.0 };
        let err = sample_verify(Inequality::CorollaryA, &cfg).unwrap_err();
        assert!(matches!(err, IneqError::Starvation { .. }), "{err:?}");
    }

    #[test]
    fn bad_configs() {
        assert!(sample_verify(Inequality::LemmaCq, &SampleConfig::new(3, 0, 1)).is_err());
        assert!(sample_verify(Inequality::QuadraticForm { eps: 0.1 }, &SampleConfig::new(4, 10, 1)).is_err());
        assert!(sample_verify(Inequality::QuadraticForm { eps: 0.7 }, &SampleConfig::new(3, 10, 1)).is_err());
        assert!("nope".parse::<Inequality>().is_err());
        assert_eq!("cor24".parse::<Inequality>().unwrap(), Inequality::CorollaryA);
    }
}
