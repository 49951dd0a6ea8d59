use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One side-by-side comparison `lhs ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginPart {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Magnitude used to turn `margin` into a relative margin.
    pub scale: f64,
}

impl MarginPart {
    pub fn new(label: &str, lhs: f64, rhs: f64) -> Self {
        Self::with_scale(label, lhs, rhs, 1.0 + lhs.abs() + rhs.abs())
    }

    pub fn with_scale(label: &str, lhs: f64, rhs: f64, scale: f64) -> Self {
        MarginPart {
            label: label.to_string(),
            lhs,
            rhs,
            margin: lhs - rhs,
            scale,
        }
    }

    pub fn relative(&self) -> f64 {
        self.margin / self.scale
    }
}

/// Outcome of checking one inequality at one input.
///
/// The top-level `lhs`/`rhs`/`margin` mirror the part with the smallest
/// relative margin, so `margin == lhs - rhs` always holds. When any
/// hypothesis fails the report is `vacuous` and says nothing about the
/// inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub name: String,
    pub hypotheses: BTreeMap<String, bool>,
    /// Non-gating observations (e.g. sufficient conditions from a proof).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, bool>,
    pub vacuous: bool,
    /// Whether the diagonal input had to be reordered to be non-increasing.
    pub sorted: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub scale: f64,
    pub parts: Vec<MarginPart>,
    pub witness: BTreeMap<String, Vec<f64>>,
}

impl MarginReport {
    pub(crate) fn build(
        name: &str,
        hypotheses: Vec<(&str, bool)>,
        parts: Vec<MarginPart>,
        witness: Vec<(&str, Vec<f64>)>,
    ) -> Self {
        let vacuous = hypotheses.iter().any(|(_, ok)| !ok);
        let worst = parts
            .iter()
            .min_by(|a, b| a.relative().total_cmp(&b.relative()))
            .cloned()
            .unwrap_or_else(|| MarginPart::new("none", f64::NAN, f64::NAN));
        MarginReport {
            name: name.to_string(),
            hypotheses: hypotheses.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            diagnostics: BTreeMap::new(),
            vacuous,
            sorted: false,
            lhs: worst.lhs,
            rhs: worst.rhs,
            margin: worst.margin,
            scale: worst.scale,
            parts,
            witness: witness.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub(crate) fn with_diagnostic(mut self, key: &str, value: bool) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    pub(crate) fn with_sorted(mut self, sorted: bool) -> Self {
        self.sorted = sorted;
        self
    }

    /// `margin / scale`; NaN for vacuous reports whose sides are undefined.
    pub fn relative_margin(&self) -> f64 {
        self.margin / self.scale
    }

    pub fn part(&self, label: &str) -> Option<&MarginPart> {
        self.parts.iter().find(|p| p.label == label)
    }

    /// A checked (non-vacuous) report whose relative margin is below `-tol`.
    pub fn violates(&self, tol: f64) -> bool {
        !self.vacuous && !(self.relative_margin() >= -tol)
    }
}

/// Magnitude distribution for sampled eigenvalues and tensors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScaleLaw {
    /// `|x| = 10^U(log10 lo, log10 hi)` with an independent random sign.
    LogUniform { lo: f64, hi: f64 },
}

impl Default for ScaleLaw {
    fn default() -> Self {
        ScaleLaw::LogUniform { lo: 1e-2, hi: 1e2 }
    }
}

/// Parameters of a seeded sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: usize,
    /// Number of hypothesis-satisfying samples to evaluate.
    pub count: usize,
    pub seed: u64,
    pub scale_law: ScaleLaw,
    /// Relative tolerance: a sample violates when `margin < -tol·scale`.
    pub tol: f64,
    /// Worker threads; `None` uses the global pool. Never changes results.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl SampleConfig {
    pub fn new(n: usize, count: usize, seed: u64) -> Self {
        SampleConfig {
            n,
            count,
            seed,
            scale_law: ScaleLaw::default(),
            tol: 1e-9,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

/// Aggregate of a sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub schema_version: u32,
    pub name: String,
    pub constraint: String,
    pub n: usize,
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    /// Smallest relative margin over checked samples.
    pub min_margin: f64,
    pub argmin_witness: Option<MarginReport>,
    pub violations: usize,
    /// Samples whose margin was evaluated (all hypotheses met).
    pub evaluated: usize,
    /// Samples drawn on the constraint surface whose lemma hypotheses failed.
    pub vacuous: usize,
    /// Draws that missed the constraint surface.
    pub rejected: usize,
    pub attempts: usize,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}
