use std::fs;
use std::path::Path;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::ineq::{epsilon_frontier_with_reports, sample_verify, IneqError, Inequality, SampleConfig, SampleReport};
use crate::io::{write_dat, write_json};

use super::manifest::{CliFailure, Outcome};

pub const DEFAULT_EPS_GRID: [f64; 6] = [0.0, 0.01, 0.02, 0.03, 0.04, 0.049];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma21,
    Cor22,
    Lemma23,
    Cor24,
    Eps,
    All,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Checked samples per inequality.
    #[arg(long, default_value_t = 100_000)]
    pub count: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Relative violation tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// ε for the quadratic-form check.
    #[arg(long, default_value_t = 0.04)]
    pub eps: f64,
    /// ε values for the frontier table.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EPS_GRID.to_vec())]
    pub eps_grid: Vec<f64>,
}

fn map_ineq(e: IneqError) -> CliFailure {
    CliFailure::usage(e.to_string())
}

fn report_violation(r: &SampleReport) {
    if r.violations > 0 {
        eprintln!(
            "{}: {} violations out of {}, min relative margin {:e}",
            r.name, r.violations, r.evaluated, r.min_margin
        );
        if let Some(w) = &r.argmin_witness {
            eprintln!("  witness: {}", serde_json::to_string(&w.witness).unwrap_or_default());
        }
    }
}

pub fn run(args: &VerifyArgs, workers: Option<usize>, out: &Path) -> Result<Outcome, CliFailure> {
    let mut cfg = SampleConfig::new(args.n, args.count, args.seed);
    cfg.tol = args.tol;
    cfg.workers = workers;

    let lemmas = [
        (Suite::Lemma21, Inequality::LemmaCq),
        (Suite::Cor22, Inequality::CorollaryThirdDerivative),
        (Suite::Lemma23, Inequality::LemmaShift),
        (Suite::Cor24, Inequality::CorollaryA),
    ];
    let run_eps = matches!(args.suite, Suite::Eps) || (matches!(args.suite, Suite::All) && args.n == 3);
    if matches!(args.suite, Suite::Eps) && args.n != 3 {
        return Err(CliFailure::usage("the eps suite is defined for n = 3 only"));
    }

    let mut artifacts = Vec::new();
    let mut violations = 0;
    for (suite, which) in lemmas {
        if args.suite != suite && args.suite != Suite::All {
            continue;
        }
        let r = sample_verify(which, &cfg).map_err(map_ineq)?;
        report_violation(&r);
        violations += r.violations;
        let name = format!("{}.json", which.suite_id());
        write_json(&out.join(&name), &r)?;
        artifacts.push(name);
    }

    if run_eps {
        let r = sample_verify(Inequality::QuadraticForm { eps: args.eps }, &cfg).map_err(map_ineq)?;
        report_violation(&r);
        violations += r.violations;
        write_json(&out.join("eps.json"), &r)?;
        artifacts.push("eps.json".into());

        let (table, reports) = epsilon_frontier_with_reports(&cfg, &args.eps_grid).map_err(map_ineq)?;
        for r in &reports {
            report_violation(r);
            violations += r.violations;
        }
        let csv_path = out.join("eps_frontier.csv");
        let file = fs::File::create(&csv_path).map_err(|e| CliFailure::usage(format!("{}: {e}", csv_path.display())))?;
        table
            .write_csv(file)
            .map_err(|e| CliFailure::usage(format!("{}: {e}", csv_path.display())))?;
        write_json(&out.join("eps_frontier.json"), &reports)?;
        let series: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.eps, r.min_margin)).collect();
        write_dat(&out.join("eps_frontier.dat"), ("eps", "min_margin"), &series)?;
        artifacts.extend(["eps_frontier.csv", "eps_frontier.json", "eps_frontier.dat"].map(String::from));
        if let Some(e) = table.largest_nonnegative_eps() {
            eprintln!("largest grid eps without violations: {e}");
        }
    }

    let code = if violations == 0 { 0 } else { 1 };
    let out = Outcome::new(code, artifacts);
    Ok(if violations > 0 {
        out.with_message(format!("{violations} violations"))
    } else {
        out
    })
}
