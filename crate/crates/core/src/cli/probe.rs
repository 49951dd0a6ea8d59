use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::io::{read_field, write_dat, write_json};
use crate::probe::{
    aux_function_field, differentiated_equation_residual, phase_identity_check, pogorelov_quantity, rescale_family,
    warren_validate, BumpCandidate, DiffEqStats, EntireCandidate, PogorelovConfig, PogorelovVariant, ProbeError,
    QuadraticCandidate, RescaleSpec, Warren, PHASE_TOL,
};
use crate::solver::ScalarField;

use super::manifest::{CliFailure, Outcome};

/// Relative slack on the oscillation decay across radii.
pub const OSC_SLACK: f64 = 0.10;
/// Spread allowed in `sup |D²u_R|` for a quadratic base.
pub const QUADRATIC_SUP_TOL: f64 = 1e-9;
/// Closed-form vs finite-difference Warren Hessian, relative.
pub const WARREN_FD_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeKind {
    Pogorelov,
    Rescale,
    Warren,
    Phase,
    Diffeq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    #[value(alias = "quadratic")]
    Quad,
    #[value(name = "quad_bump", alias = "quad-bump")]
    QuadBump,
    Warren,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    LargestEigenvalue,
    Laplacian,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(long, value_enum)]
    pub kind: ProbeKind,
    /// Solve output directories (pogorelov, diffeq).
    #[arg(long, value_delimiter = ',')]
    pub solve: Vec<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Residual tolerance for the Warren and phase identities.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 50.0)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "largest-eigenvalue")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "quad_bump")]
    pub base: BaseKind,
    /// Dimension of quadratic bases.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long = "R", value_delimiter = ',', default_values_t = vec![1.0, 2.0, 4.0])]
    pub radii: Vec<f64>,
    /// Carried into the rescaling report.
    #[arg(long = "A", default_value_t = 0.0)]
    pub big_a: f64,
    #[arg(long, default_value_t = 0.5)]
    pub bump_amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    pub bump_radius: f64,
    /// Half-width of the Warren sampling box.
    #[arg(long, default_value_t = 3.0)]
    pub half_width: f64,
    /// Inner region for differentiated-equation statistics.
    #[arg(long, default_value_t = 0.5)]
    pub inner_fraction: f64,
}

impl ProbeArgs {
    /// Only the options that affect `kind`, for the manifest.
    pub fn config_json(&self) -> serde_json::Value {
        use serde_json::json;
        let solves: Vec<String> = self.solve.iter().map(|p| p.display().to_string()).collect();
        match self.kind {
            ProbeKind::Pogorelov => json!({"kind": self.kind, "solve": solves, "alpha": self.alpha, "variant": self.variant}),
            ProbeKind::Rescale => json!({
                "kind": self.kind, "base": self.base, "n": self.n, "R": self.radii, "A": self.big_a,
                "alpha": self.alpha, "bump_amplitude": self.bump_amplitude, "bump_radius": self.bump_radius,
            }),
            ProbeKind::Warren => json!({"kind": self.kind, "count": self.count, "seed": self.seed, "tol": self.tol, "half_width": self.half_width}),
            ProbeKind::Phase => json!({"kind": self.kind, "count": self.count, "seed": self.seed, "tol": self.tol}),
            ProbeKind::Diffeq => json!({"kind": self.kind, "solve": solves, "inner_fraction": self.inner_fraction}),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        matches!(self.kind, ProbeKind::Warren | ProbeKind::Phase).then_some(self.seed)
    }
}

fn probe_err(e: ProbeError) -> CliFailure {
    CliFailure::usage(e.to_string())
}

fn load_solves(dirs: &[PathBuf]) -> Result<Vec<ScalarField>, CliFailure> {
    if dirs.is_empty() {
        return Err(CliFailure::usage("this probe needs --solve DIR from a previous solve run"));
    }
    dirs.iter()
        .map(|d| {
            let header = d.join("field.json");
            if !header.exists() {
                return Err(CliFailure::usage(format!("missing solve artifact {}", header.display())));
            }
            read_field(&header).map_err(CliFailure::from)
        })
        .collect()
}

fn finish(pass: bool, artifacts: Vec<String>, why: Vec<String>) -> Outcome {
    if pass {
        Outcome::new(0, artifacts)
    } else {
        for w in &why {
            eprintln!("{w}");
        }
        Outcome::new(1, artifacts).with_message(why.join("; "))
    }
}

pub fn run(args: &ProbeArgs, out: &Path) -> Result<Outcome, CliFailure> {
    match args.kind {
        ProbeKind::Pogorelov => pogorelov(args, out),
        ProbeKind::Rescale => rescale(args, out),
        ProbeKind::Warren => warren(args, out),
        ProbeKind::Phase => phase(args, out),
        ProbeKind::Diffeq => diffeq(args, out),
    }
}

fn pogorelov(args: &ProbeArgs, out: &Path) -> Result<Outcome, CliFailure> {
    let fields = load_solves(&args.solve)?;
    let cfg = PogorelovConfig {
        alpha: args.alpha,
        variant: match args.variant {
            VariantArg::LargestEigenvalue => PogorelovVariant::LargestEigenvalue,
            VariantArg::Laplacian => PogorelovVariant::Laplacian,
        },
    };
    let mut reports = Vec::new();
    let mut certs = Vec::new();
    let mut why = Vec::new();
    for (i, f) in fields.iter().enumerate() {
        let r = pogorelov_quantity(f, &cfg).map_err(probe_err)?;
        let (_, c) = aux_function_field(f, &cfg).map_err(probe_err)?;
        if !(r.max.value.is_finite() && r.clamped.value.is_finite() && r.strictly_interior) {
            why.push(format!("input {i}: maximum is not finite and strictly interior"));
        }
        if !(c.interior_max && c.gradient_bounded) {
            why.push(format!("input {i}: auxiliary function fails its interior-maximum certificate"));
        }
        reports.push(r);
        certs.push(c);
    }
    write_json(&out.join("pogorelov.json"), &reports)?;
    write_json(&out.join("aux_certificate.json"), &certs)?;
    let series: Vec<(f64, f64)> = reports.iter().map(|r| (r.diameter, r.clamped.value)).collect();
    write_dat(&out.join("pogorelov_diameter.dat"), ("diameter", "clamped_value"), &series)?;
    let artifacts = ["pogorelov.json", "aux_certificate.json", "pogorelov_diameter.dat"].map(String::from).to_vec();
    Ok(finish(why.is_empty(), artifacts, why))
}

fn rescale(args: &ProbeArgs, out: &Path) -> Result<Outcome, CliFailure> {
    if !(2..=crate::symfun::MAX_DIM).contains(&args.n) {
        return Err(CliFailure::usage(format!("--n must be in 2..={}", crate::symfun::MAX_DIM)));
    }
    let base: Arc<dyn EntireCandidate> = match args.base {
        BaseKind::Quad => Arc::new(QuadraticCandidate::unit(args.n)),
        BaseKind::QuadBump => Arc::new(BumpCandidate::new(
            QuadraticCandidate::unit(args.n),
            args.bump_amplitude,
            args.bump_radius,
        )),
        BaseKind::Warren => Arc::new(Warren),
    };
    let mut spec = RescaleSpec::new(base, args.radii.clone());
    spec.big_a = args.big_a;
    spec.alpha = args.alpha;
    match rescale_family(&spec) {
        Ok(rep) => {
            write_json(&out.join("rescale.json"), &rep)?;
            let csv_path = out.join("rescale.csv");
            let file =
                fs::File::create(&csv_path).map_err(|e| CliFailure::usage(format!("{}: {e}", csv_path.display())))?;
            rep.write_csv(file)
                .map_err(|e| CliFailure::usage(format!("{}: {e}", csv_path.display())))?;
            let osc: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.r, r.osc)).collect();
            let sup: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.r, r.sup_hess)).collect();
            write_dat(&out.join("rescale_osc.dat"), ("R", "osc"), &osc)?;
            write_dat(&out.join("rescale_sup_hess.dat"), ("R", "sup_hess"), &sup)?;
            let mut why = Vec::new();
            if !rep.osc_non_increasing(OSC_SLACK) {
                why.push("Hessian oscillation grows with R".to_string());
            }
            if args.base == BaseKind::Quad && !(rep.sup_hess_spread() <= QUADRATIC_SUP_TOL) {
                why.push(format!("sup |D²u_R| varies by {:e} across R", rep.sup_hess_spread()));
            }
            let artifacts = ["rescale.json", "rescale.csv", "rescale_osc.dat", "rescale_sup_hess.dat"]
                .map(String::from)
                .to_vec();
            Ok(finish(why.is_empty(), artifacts, why))
        }
        Err(e @ (ProbeError::UnboundedRegion { .. } | ProbeError::EmptyRegion { .. })) => {
            // The base fails the growth precondition of the experiment.
            let body = serde_json::json!({
                "schema_version": crate::SCHEMA_VERSION,
                "base": spec.base.name(),
                "error": e.to_string(),
            });
            write_json(&out.join("rescale_error.json"), &body)?;
            Ok(finish(false, vec!["rescale_error.json".into()], vec![e.to_string()]))
        }
        Err(e) => Err(probe_err(e)),
    }
}

fn warren(args: &ProbeArgs, out: &Path) -> Result<Outcome, CliFailure> {
    let r = warren_validate(args.count, args.seed, args.half_width).map_err(probe_err)?;
    write_json(&out.join("warren.json"), &r)?;
    let mut why = Vec::new();
    if !(r.max_abs_residual <= args.tol) {
        why.push(format!("|σ₂ − 1| reaches {:e} at {:?}", r.max_abs_residual, r.worst_point));
    }
    if !r.gamma2_all {
        why.push("a sample left the 2-convex cone".into());
    }
    if !(r.fd_max_rel_error <= WARREN_FD_TOL) {
        why.push(format!("closed-form Hessian disagrees with differences by {:e}", r.fd_max_rel_error));
    }
    if !r.growth_violated {
        why.push("some quadratic-growth fit was satisfied".into());
    }
    Ok(finish(why.is_empty(), vec!["warren.json".into()], why))
}

fn phase(args: &ProbeArgs, out: &Path) -> Result<Outcome, CliFailure> {
    let r = phase_identity_check(args.count, args.seed).map_err(|e| match e {
        ProbeError::Sampling(inner) => CliFailure::usage(inner.to_string()),
        other => probe_err(other),
    })?;
    write_json(&out.join("phase.json"), &r)?;
    let tol = args.tol.min(PHASE_TOL);
    let mut why = Vec::new();
    if !r.passed() || !(r.max_phase_error <= tol) {
        why.push(format!(
            "{} phase violations, max phase error {:e}",
            r.violations, r.max_phase_error
        ));
    }
    Ok(finish(why.is_empty(), vec!["phase.json".into()], why))
}

fn diffeq(args: &ProbeArgs, out: &Path) -> Result<Outcome, CliFailure> {
    let fields = load_solves(&args.solve)?;
    let mut stats: Vec<DiffEqStats> = fields
        .iter()
        .map(|f| differentiated_equation_residual(f, args.inner_fraction))
        .collect::<Result<_, _>>()
        .map_err(probe_err)?;
    stats.sort_by(|a, b| a.m.cmp(&b.m));
    write_json(&out.join("diffeq.json"), &stats)?;
    let series: Vec<(f64, f64)> = stats.iter().map(|s| (s.h, s.inner.max_first())).collect();
    write_dat(&out.join("diffeq_refinement.dat"), ("h", "inner_max_first"), &series)?;
    let mut why = Vec::new();
    for s in &stats {
        if !(s.inner.max_first().is_finite() && s.inner.max_second().is_finite()) {
            why.push(format!("non-finite residual at m = {}", s.m));
        }
    }
    for w in stats.windows(2) {
        if !(w[1].inner.max_first() < w[0].inner.max_first() && w[1].inner.max_second() < w[0].inner.max_second()) {
            why.push(format!("inner residual does not decrease from m = {} to m = {}", w[0].m, w[1].m));
        }
    }
    let artifacts = vec!["diffeq.json".to_string(), "diffeq_refinement.dat".to_string()];
    Ok(finish(why.is_empty(), artifacts, why))
}
