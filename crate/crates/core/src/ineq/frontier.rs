use std::io::Write;

use serde::{Deserialize, Serialize};

use super::report::{SampleConfig, SampleReport};
use super::sampler::{sample_verify, Inequality};
use super::IneqError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub eps: f64,
    pub min_margin: f64,
    pub violations: usize,
    pub evaluated: usize,
}

/// Sampled minimum margin of the `n = 3` quadratic-form inequality as a
/// function of `ε`, one row per grid point in ascending `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierTable {
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    pub rows: Vec<FrontierRow>,
}

impl FrontierTable {
    /// Largest grid `ε` with no violations, if any.
    pub fn largest_nonnegative_eps(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.violations == 0)
            .map(|r| r.eps)
            .fold(None, |acc, e| Some(acc.map_or(e, |a: f64| a.max(e))))
    }

    /// Whether `min_margin` is non-increasing in `ε` up to `tol`.
    ///
    /// Inside the valid range the sampled minimum sits at the verifier's
    /// resolution (order `1e-9` relative), so `tol` should be at least the
    /// run tolerance.
    pub fn monotone(&self, tol: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].min_margin <= w[0].min_margin + tol)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(out);
        for r in &self.rows {
            wtr.serialize(r)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Run [`sample_verify`] for the quadratic-form inequality at every `ε` in
/// `grid`. Every grid point uses the same seed, hence the same `λ` draws.
pub fn epsilon_frontier(cfg: &SampleConfig, grid: &[f64]) -> Result<FrontierTable, IneqError> {
    epsilon_frontier_with_reports(cfg, grid).map(|(t, _)| t)
}

/// [`epsilon_frontier`] plus the full report (with witness) of each row.
pub fn epsilon_frontier_with_reports(
    cfg: &SampleConfig,
    grid: &[f64],
) -> Result<(FrontierTable, Vec<SampleReport>), IneqError> {
    if grid.is_empty() {
        return Err(IneqError::Config("empty epsilon grid".into()));
    }
    if let Some(&bad) = grid.iter().find(|e| !(0.0..=0.5).contains(*e)) {
        return Err(IneqError::EpsilonRange(bad));
    }
    let mut eps: Vec<f64> = grid.to_vec();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let mut rows = Vec::with_capacity(eps.len());
    let mut reports = Vec::with_capacity(eps.len());
    for e in eps {
        let r = sample_verify(Inequality::QuadraticForm { eps: e }, cfg)?;
        rows.push(FrontierRow {
            eps: e,
            min_margin: r.min_margin,
            violations: r.violations,
            evaluated: r.evaluated,
        });
        reports.push(r);
    }
    let table = FrontierTable {
        seed: cfg.seed,
        count: cfg.count,
        tol: cfg.tol,
        rows,
    };
    Ok((table, reports))
}
