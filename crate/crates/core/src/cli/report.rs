use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use serde_json::Value;

use crate::io::{read_json, write_json};

use super::manifest::{CliFailure, Outcome, RunManifest, MANIFEST_FILE};

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// Run directories or manifest files.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub index: usize,
    pub source: String,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub exit_code: i32,
    pub pass: bool,
    pub metrics: Vec<Metric>,
    /// Plot series copied into the report directory.
    pub series: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub sections: Vec<Section>,
    pub all_pass: bool,
}

fn manifest_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(MANIFEST_FILE)
    } else {
        p.to_path_buf()
    }
}

fn num(v: &Value, key: &str) -> Option<f64> {
    v.get(key).and_then(Value::as_f64)
}

fn push(metrics: &mut Vec<Metric>, name: impl Into<String>, value: Option<f64>) {
    if let Some(value) = value {
        metrics.push(Metric {
            name: name.into(),
            value,
        });
    }
}

/// Headline numbers pulled out of one artifact.
fn metrics_of(command: &str, name: &str, v: &Value) -> Vec<Metric> {
    let mut out = Vec::new();
    let stem = name.trim_end_matches(".json");
    match (command, stem) {
        ("verify", "eps_frontier") => {
            for (i, r) in v.as_array().into_iter().flatten().enumerate() {
                let eps = r.pointer("/argmin_witness/witness/eps/0").and_then(Value::as_f64);
                let label = eps.map_or(format!("eps_frontier[{i}]"), |e| format!("eps_frontier[eps={e}]"));
                push(&mut out, format!("{label}.min_margin"), num(r, "min_margin"));
            }
        }
        ("verify", _) => {
            push(&mut out, format!("{stem}.min_margin"), num(v, "min_margin"));
            push(&mut out, format!("{stem}.violations"), num(v, "violations"));
        }
        ("solve", "solve") => {
            push(&mut out, "iterations", num(v, "iterations"));
            let last = v
                .get("residual_history")
                .and_then(Value::as_array)
                .and_then(|h| h.last())
                .and_then(Value::as_f64);
            push(&mut out, "final_residual", last);
            push(&mut out, "exact_max_error", num(v, "exact_max_error"));
            push(&mut out, "min_sigma2", num(v, "min_sigma2"));
        }
        ("solve", "solve_error") => {
            push(&mut out, "failed", Some(1.0));
        }
        ("probe", "warren") => {
            push(&mut out, "warren.max_abs_residual", num(v, "max_abs_residual"));
            push(&mut out, "warren.fd_max_rel_error", num(v, "fd_max_rel_error"));
        }
        ("probe", "phase") => {
            push(&mut out, "phase.max_phase_error", num(v, "max_phase_error"));
            push(&mut out, "phase.violations", num(v, "violations"));
        }
        ("probe", "pogorelov") => {
            for (i, r) in v.as_array().into_iter().flatten().enumerate() {
                push(&mut out, format!("pogorelov[{i}].max"), r.get("max").and_then(|m| num(m, "value")));
            }
        }
        ("probe", "rescale") => {
            for r in v.get("rows").and_then(Value::as_array).into_iter().flatten() {
                let rr = num(r, "R").unwrap_or(f64::NAN);
                push(&mut out, format!("rescale.osc[R={rr}]"), num(r, "osc"));
            }
        }
        ("probe", "diffeq") => {
            for s in v.as_array().into_iter().flatten() {
                let m = num(s, "m").unwrap_or(f64::NAN);
                let inner = s.get("inner");
                let first = inner.and_then(|r| r.get("first")).and_then(Value::as_array);
                let mx = first.map(|a| a.iter().filter_map(Value::as_f64).fold(0.0, f64::max));
                push(&mut out, format!("diffeq.inner_first[m={m}]"), mx);
            }
        }
        _ => {}
    }
    out
}

pub fn run(args: &ReportArgs, out: &Path) -> Result<Outcome, CliFailure> {
    if args.inputs.is_empty() {
        return Err(CliFailure::usage("report needs at least one --inputs entry"));
    }
    // Check every input before writing anything.
    let mut loaded = Vec::new();
    for input in &args.inputs {
        let mpath = manifest_path(input);
        if !mpath.exists() {
            return Err(CliFailure::usage(format!("missing manifest {}", mpath.display())));
        }
        let m: RunManifest = read_json(&mpath)?;
        let dir = mpath.parent().unwrap_or(Path::new(".")).to_path_buf();
        if let Some(a) = m.artifacts.iter().find(|a| !dir.join(a).exists()) {
            return Err(CliFailure::usage(format!("missing artifact {}", dir.join(a).display())));
        }
        loaded.push((input, m, dir));
    }

    let mut sections = Vec::new();
    let mut artifacts = Vec::new();
    for (index, (input, m, dir)) in loaded.into_iter().enumerate() {
        let mut metrics = Vec::new();
        let mut series = Vec::new();
        for a in &m.artifacts {
            let p = dir.join(a);
            if a.ends_with(".json") {
                let v: Value = read_json(&p)?;
                metrics.extend(metrics_of(&m.command, a, &v));
            } else if a.ends_with(".dat") {
                let name = format!("s{index}_{a}");
                let dst = out.join(&name);
                fs::copy(&p, &dst).map_err(|e| CliFailure::usage(format!("{}: {e}", dst.display())))?;
                series.push(name.clone());
                artifacts.push(name);
            }
        }
        sections.push(Section {
            index,
            source: input.display().to_string(),
            command: m.command,
            config: m.config,
            seed: m.seed,
            exit_code: m.exit_code,
            pass: m.exit_code == 0,
            metrics,
            series,
        });
    }
    let all_pass = sections.iter().all(|s| s.pass);
    let summary = Summary {
        schema_version: crate::SCHEMA_VERSION,
        sections,
        all_pass,
    };
    write_json(&out.join("summary.json"), &summary)?;
    write_summary_csv(&out.join("summary.csv"), &summary)?;
    artifacts.extend(["summary.json".to_string(), "summary.csv".to_string()]);

    let failed: Vec<String> = summary
        .sections
        .iter()
        .filter(|s| !s.pass)
        .map(|s| format!("{} ({}) exited {}", s.source, s.command, s.exit_code))
        .collect();
    if failed.is_empty() {
        Ok(Outcome::new(0, artifacts))
    } else {
        Ok(Outcome::new(1, artifacts).with_message(failed.join("; ")))
    }
}

/// One row per metric; sections without metrics get a single blank row.
fn write_summary_csv(path: &Path, s: &Summary) -> Result<(), CliFailure> {
    let err = |e: csv::Error| CliFailure::usage(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(["section", "command", "exit_code", "pass", "metric", "value"])
        .map_err(err)?;
    for sec in &s.sections {
        let base = [
            sec.index.to_string(),
            sec.command.clone(),
            sec.exit_code.to_string(),
            sec.pass.to_string(),
        ];
        if sec.metrics.is_empty() {
            let row: Vec<String> = base.iter().cloned().chain([String::new(), String::new()]).collect();
            w.write_record(&row).map_err(err)?;
        }
        for m in &sec.metrics {
            let row: Vec<String> = base
                .iter()
                .cloned()
                .chain([m.name.clone(), format!("{:e}", m.value)])
                .collect();
            w.write_record(&row).map_err(err)?;
        }
    }
    w.flush()
        .map_err(|e| CliFailure::usage(format!("{}: {e}", path.display())))
}
