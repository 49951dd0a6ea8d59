use std::path::Path;

use clap::Args;
use serde::Serialize;

use crate::io::{write_dat, write_field, write_json, FieldFormat};
use crate::solver::{
    barrier_initial_guess, barrier_shift, newton_solve, DirichletData, GridDomain, ScalarField, SolveConfig,
    SolveReport, SolverError, StartStrategy,
};
use crate::symfun::SymTensor;

use super::manifest::{CliFailure, Outcome};

/// Max-norm error allowed against exact quadratic data.
pub const QUADRATIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Nodes per axis (at least 5).
    #[arg(long, default_value_t = 17)]
    pub m: usize,
    /// Box `[lo, hi]ⁿ` as `lo,hi`.
    #[arg(long = "box", default_value = "-1,1", allow_hyphen_values = true)]
    pub box_: String,
    /// `zero`, `quadratic` (unit Hessian) or `quadratic:d1,...,dn`
    /// (diagonal Hessian, rescaled to `σ₂ = 1`).
    #[arg(long, default_value = "zero")]
    pub data: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub start: StartArg,
    /// Residual max-norm at which Newton stops.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_newton: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StartArg {
    Auto,
    Barrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    F64,
}

#[derive(Debug, Clone, Serialize)]
struct SolveSummary<'a> {
    data: &'a str,
    #[serde(flatten)]
    report: &'a SolveReport,
    /// Max-norm distance to the data for quadratic `g`.
    exact_max_error: Option<f64>,
    /// `w ≤ u ≤ 0` for `g = 0`, with `w` the barrier.
    sandwich: Option<Sandwich>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sandwich {
    pub holds: bool,
    /// Largest of `w − u` and `u`, over all nodes.
    pub max_violation: f64,
}

#[derive(Debug, Clone, Serialize)]
struct SolveFailure {
    schema_version: u32,
    kind: &'static str,
    message: String,
    error: serde_json::Value,
}

pub fn parse_box(s: &str) -> Result<(f64, f64), CliFailure> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || CliFailure::usage(format!("--box expects lo,hi with lo < hi, got '{s}'"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn parse_data(s: &str, n: usize) -> Result<DirichletData, CliFailure> {
    match s {
        "zero" => Ok(DirichletData::Zero),
        "quadratic" => Ok(DirichletData::unit_quadratic(n)),
        _ => {
            let spec = s
                .strip_prefix("quadratic:")
                .ok_or_else(|| CliFailure::usage(format!("unknown data '{s}'")))?;
            let d: Vec<f64> = spec
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliFailure::usage(format!("bad diagonal '{spec}'")))?;
            if d.len() != n {
                return Err(CliFailure::usage(format!("diagonal has {} entries, n = {n}", d.len())));
            }
            let s1: f64 = d.iter().sum();
            let mut s2 = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    s2 += d[i] * d[j];
                }
            }
            if !(s1 > 0.0 && s2 > 0.0) {
                return Err(CliFailure::usage(format!("diagonal {d:?} is not in the 2-convex cone")));
            }
            let k = s2.sqrt();
            let scaled: Vec<f64> = d.iter().map(|x| x / k).collect();
            Ok(DirichletData::quadratic(
                SymTensor::diag(&scaled).map_err(|e| CliFailure::usage(e.to_string()))?,
            ))
        }
    }
}

fn sandwich(u: &ScalarField) -> Sandwich {
    let w = barrier_initial_guess(&u.domain, barrier_shift(&u.domain));
    let max_violation = u
        .values
        .iter()
        .zip(&w.values)
        .fold(f64::NEG_INFINITY, |m, (uv, wv)| m.max(wv - uv).max(*uv));
    Sandwich {
        holds: max_violation <= 1e-12,
        max_violation,
    }
}

pub fn run(args: &SolveArgs, out: &Path) -> Result<Outcome, CliFailure> {
    if !(2..=3).contains(&args.n) {
        return Err(CliFailure::usage(format!("--n must be 2 or 3, got {}", args.n)));
    }
    let (lo, hi) = parse_box(&args.box_)?;
    let dom = GridDomain::cube(args.n, lo, hi, args.m).map_err(|e| CliFailure::usage(e.to_string()))?;
    let g = parse_data(&args.data, args.n)?;
    let cfg = SolveConfig {
        tol_residual: args.tol,
        max_newton: args.max_newton,
        start: match args.start {
            StartArg::Auto => StartStrategy::Auto,
            StartArg::Barrier => StartStrategy::Barrier,
        },
        ..SolveConfig::default()
    };
    let format = match args.format {
        FormatArg::Csv => FieldFormat::Csv,
        FormatArg::F64 => FieldFormat::F64,
    };

    let rep = match newton_solve(&dom, &g, &cfg) {
        Ok(rep) => rep,
        Err(e) => {
            let (code, kind) = failure_kind(&e);
            let failure = SolveFailure {
                schema_version: crate::SCHEMA_VERSION,
                kind,
                message: e.to_string(),
                error: error_json(&e),
            };
            write_json(&out.join("solve_error.json"), &failure)?;
            eprintln!("{e}");
            return Ok(Outcome::new(code, vec!["solve_error.json".into()]).with_message(e.to_string()));
        }
    };

    let mut artifacts = write_field(out, "field", &rep.field, format)?;
    let exact_max_error = matches!(g, DirichletData::Quadratic { .. })
        .then(|| rep.field.max_abs_diff(&ScalarField::from_fn(&dom, |x| g.eval(x))));
    let sand = matches!(g, DirichletData::Zero).then(|| sandwich(&rep.field));
    let summary = SolveSummary {
        data: &args.data,
        report: &rep,
        exact_max_error,
        sandwich: sand.clone(),
    };
    write_json(&out.join("solve.json"), &summary)?;
    let series: Vec<(f64, f64)> = rep
        .residual_history
        .iter()
        .enumerate()
        .map(|(i, r)| (i as f64, *r))
        .collect();
    write_dat(&out.join("residual_history.dat"), ("iteration", "residual"), &series)?;
    artifacts.extend(["solve.json".to_string(), "residual_history.dat".to_string()]);

    let mut problems = Vec::new();
    if !rep.gamma2_certified {
        problems.push("converged field is not certified in the 2-convex cone".to_string());
    }
    if let Some(e) = exact_max_error {
        if !(e <= QUADRATIC_TOL) {
            problems.push(format!("max error {e:e} against quadratic data exceeds {QUADRATIC_TOL:e}"));
        }
    }
    if let Some(s) = &sand {
        if !s.holds {
            problems.push(format!("barrier sandwich violated by {:e}", s.max_violation));
        }
    }
    eprintln!(
        "converged in {} iterations, residual {:e}",
        rep.iterations,
        rep.final_residual()
    );
    if problems.is_empty() {
        Ok(Outcome::new(0, artifacts))
    } else {
        for p in &problems {
            eprintln!("{p}");
        }
        Ok(Outcome::new(1, artifacts).with_message(problems.join("; ")))
    }
}

/// Exit code and `kind` tag for a failed solve.
pub fn failure_kind(e: &SolverError) -> (i32, &'static str) {
    match e {
        SolverError::EllipticityLoss { .. } => (4, "ellipticity_loss"),
        SolverError::NonConvergence { .. } | SolverError::LinearSolve { .. } => (3, "nonconvergence"),
        _ => (2, "invalid_input"),
    }
}

fn error_json(e: &SolverError) -> serde_json::Value {
    use serde_json::json;
    match e {
        SolverError::EllipticityLoss {
            node,
            iteration,
            sigma1,
            sigma2,
        } => json!({"node": node, "iteration": iteration, "sigma1": sigma1, "sigma2": sigma2}),
        SolverError::NonConvergence {
            iterations,
            history,
            reason,
        } => json!({"iterations": iterations, "residual_history": history, "reason": reason}),
        SolverError::LinearSolve {
            iteration,
            krylov_iterations,
            relative_residual,
        } => json!({"iteration": iteration, "krylov_iterations": krylov_iterations, "relative_residual": relative_residual}),
        other => json!({"message": other.to_string()}),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_codes() {
        let loss = SolverError::EllipticityLoss {
            node: vec![1, 1],
            iteration: 2,
            sigma1: 1.0,
            sigma2: -1.0,
        };
        let slow = SolverError::NonConvergence {
            iterations: 1,
            history: vec![1.0, 0.5],
            reason: "max_newton exceeded".into(),
        };
        let krylov = SolverError::LinearSolve {
            iteration: 1,
            krylov_iterations: 10,
            relative_residual: 0.1,
        };
        assert_eq!(failure_kind(&loss), (4, "ellipticity_loss"));
        assert_eq!(failure_kind(&slow).0, 3);
        assert_eq!(failure_kind(&krylov).0, 3);
        assert_eq!(failure_kind(&SolverError::Config("x".into())).0, 2);
    }

    #[test]
    fn data_and_box_parsing() {
        assert_eq!(parse_box("-2,3").unwrap(), (-2.0, 3.0));
        assert!(parse_box("1,1").is_err());
        assert!(parse_box("1").is_err());
        assert!(matches!(parse_data("zero", 3).unwrap(), DirichletData::Zero));
        // Rescaled so that σ₂ = 1.
        match parse_data("quadratic:2,2,2", 3).unwrap() {
            DirichletData::Quadratic { hessian, .. } => {
                let s2 = crate::symfun::sigma_k_mat(&hessian, 2).unwrap();
                assert!((s2 - 1.0).abs() < 1e-14);
            }
            _ => panic!("expected quadratic data"),
        }
        assert!(parse_data("quadratic:1,-1,-1", 3).is_err());
        assert!(parse_data("quadratic:1,1", 3).is_err());
        assert!(parse_data("cubic", 3).is_err());
    }
}
