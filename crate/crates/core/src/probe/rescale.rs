use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::solver::{discrete_hessian, GridDomain, ScalarField};
use crate::symfun::{eigenvalues_sym, sigma_k_mat, SymTensor};

use super::candidate::EntireCandidate;
use super::ProbeError;

/// Base candidate, radii and sampling resolution of a rescaling run.
#[derive(Clone)]
pub struct RescaleSpec {
    pub base: Arc<dyn EntireCandidate>,
    /// Strictly increasing, all `≥ 1`.
    pub radii: Vec<f64>,
    /// Lower-bound parameter `σ₃(D²u) ≥ −A`, carried for reporting.
    pub big_a: f64,
    /// `Ω_R` is located on `[−half_width, half_width]ⁿ`.
    pub sample_half_width: f64,
    /// Nodes per axis of the locating grid.
    pub sample_m: usize,
    /// Nodes per axis of the grid over the bounding cube of `Ω_R`.
    pub grid_m: usize,
    /// Exponent of the Pogorelov column.
    pub alpha: f64,
}

impl RescaleSpec {
    pub fn new(base: Arc<dyn EntireCandidate>, radii: Vec<f64>) -> Self {
        let n = base.dim();
        RescaleSpec {
            base,
            radii,
            big_a: 0.0,
            sample_half_width: 4.0,
            sample_m: if n == 2 { 81 } else { 33 },
            grid_m: if n == 2 { 65 } else { 33 },
            alpha: 50.0,
        }
    }

    fn validate(&self) -> Result<(), ProbeError> {
        if self.radii.is_empty() || self.radii[0] < 1.0 || self.radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ProbeError::Config(format!(
                "radii must be strictly increasing and >= 1, got {:?}",
                self.radii
            )));
        }
        if self.sample_m < 5 || self.grid_m < 9 || !(self.sample_half_width > 0.0) || !(self.alpha > 0.0) {
            return Err(ProbeError::Config("invalid rescaling resolution".into()));
        }
        Ok(())
    }
}

/// One radius of a rescaling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleRow {
    #[serde(rename = "R")]
    pub r: f64,
    /// `sup |D²u_R|` (spectral norm) over `Ω′_R = {u_R ≤ −½}`.
    pub sup_hess: f64,
    /// Largest pairwise Frobenius distance of `D²u_R` over the inner
    /// half-box.
    pub osc: f64,
    /// `max (−u_R)^α max(|D²u_R|, 1)` over `Ω_R`.
    pub pog_quantity: f64,
    /// Interior nodes in `Ω′_R`.
    pub nodes_in_mask: usize,
    /// Interior nodes in `Ω_R = {u_R < 0}`.
    pub nodes_in_omega: usize,
    /// Smallest `σ₃(D²u_R)` over `Ω′_R` (`n ≥ 3`).
    pub min_sigma3: Option<f64>,
    /// `max |D²u_R(y) − D²u(Ry)|` with both sides differenced on matching
    /// grids (spacing `h` in `y`, `Rh` in `x`), relative to `1 + |D²u|`.
    pub identity_max_error: f64,
    /// `max |D²u_R(y) − D²u(Ry)|` against the closed-form Hessian, when the
    /// base has one. Includes discretisation error for non-quadratic bases.
    pub closed_form_max_error: Option<f64>,
    pub cube_lo: Vec<f64>,
    pub cube_hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleReport {
    pub schema_version: u32,
    pub base: String,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub alpha: f64,
    pub rows: Vec<RescaleRow>,
}

impl RescaleReport {
    /// `osc` never grows by more than the relative `slack` from one radius
    /// to the next.
    pub fn osc_non_increasing(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].osc <= w[0].osc * (1.0 + slack) + 1e-12)
    }

    /// Spread `max − min` of `sup_hess` across radii.
    pub fn sup_hess_spread(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.sup_hess), hi.max(r.sup_hess)));
        hi - lo
    }

    /// Per-radius table with columns `R,sup_hess,osc,pog_quantity,nodes_in_mask`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        #[derive(Serialize)]
        struct Row {
            #[serde(rename = "R")]
            r: f64,
            sup_hess: f64,
            osc: f64,
            pog_quantity: f64,
            nodes_in_mask: usize,
        }
        let mut wtr = csv::Writer::from_writer(out);
        for r in &self.rows {
            wtr.serialize(Row {
                r: r.r,
                sup_hess: r.sup_hess,
                osc: r.osc,
                pog_quantity: r.pog_quantity,
                nodes_in_mask: r.nodes_in_mask,
            })?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn spectral_norm(h: &SymTensor) -> f64 {
    eigenvalues_sym(h).values().iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Bounding cube `[c − r, c + r]ⁿ` of `{u_R < 0}` located on the sampling
/// grid, padded by one sampling spacing.
fn locate(spec: &RescaleSpec, u_r: &(dyn Fn(&[f64]) -> f64 + Sync), r: f64) -> Result<(Vec<f64>, f64), ProbeError> {
    let n = spec.base.dim();
    let probe = GridDomain::cube(n, -spec.sample_half_width, spec.sample_half_width, spec.sample_m)?;
    let inside: Vec<usize> = (0..probe.len())
        .into_par_iter()
        .filter(|&p| u_r(&probe.coords(p)) < 0.0)
        .collect();
    if inside.is_empty() {
        return Err(ProbeError::EmptyRegion { r });
    }
    if let Some(&p) = inside.iter().find(|&&p| probe.is_boundary(p)) {
        return Err(ProbeError::UnboundedRegion {
            r,
            witness: probe.coords(p),
        });
    }
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for &p in &inside {
        for (i, x) in probe.coords(p).into_iter().enumerate() {
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
        }
    }
    let centre: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let half = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| 0.5 * (b - a))
        .fold(0.0, f64::max)
        + probe.h;
    Ok((centre, half))
}

fn frobenius_distance(a: &SymTensor, b: &SymTensor) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn rescale_one(spec: &RescaleSpec, r: f64) -> Result<RescaleRow, ProbeError> {
    let base = spec.base.clone();
    let n = base.dim();
    let r2 = r * r;
    let u_r = move |y: &[f64]| {
        let x: Vec<f64> = y.iter().map(|t| r * t).collect();
        (base.value(&x) - r2) / r2
    };
    let (centre, half) = locate(spec, &u_r, r)?;
    let lo: Vec<f64> = centre.iter().map(|c| c - half).collect();
    let hi: Vec<f64> = centre.iter().map(|c| c + half).collect();
    let dom = GridDomain::new(lo.clone(), hi.clone(), spec.grid_m)?;
    let field = ScalarField::from_fn(&dom, &u_r);

    // Same nodes in x = Ry, spacing Rh.
    let xdom = GridDomain::new(
        lo.iter().map(|t| r * t).collect(),
        hi.iter().map(|t| r * t).collect(),
        spec.grid_m,
    )?;
    let xfield = ScalarField::from_fn(&xdom, |x| spec.base.value(x));

    struct NodeStats {
        node: usize,
        hess: SymTensor,
        u: f64,
        norm: f64,
        identity: f64,
        closed: Option<f64>,
    }
    let stats: Vec<NodeStats> = dom
        .interior()
        .par_iter()
        .map(|&p| {
            let hess = discrete_hessian(&field, p).expect("interior");
            let hx = discrete_hessian(&xfield, p).expect("interior");
            let scale = 1.0 + hx.frobenius_norm();
            let identity = hess
                .entries()
                .iter()
                .zip(hx.entries())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
                / scale;
            let x: Vec<f64> = dom.coords(p).iter().map(|t| r * t).collect();
            let closed = spec.base.hessian(&x).map(|hc| {
                hess.entries()
                    .iter()
                    .zip(hc.entries())
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            });
            NodeStats {
                node: p,
                norm: spectral_norm(&hess),
                u: field.values[p],
                hess,
                identity,
                closed,
            }
        })
        .collect();

    let in_omega: Vec<&NodeStats> = stats.iter().filter(|s| s.u < 0.0).collect();
    let in_mask: Vec<&NodeStats> = stats.iter().filter(|s| s.u <= -0.5).collect();
    if in_mask.is_empty() {
        return Err(ProbeError::EmptyRegion { r });
    }
    let sup_hess = in_mask.iter().map(|s| s.norm).fold(0.0, f64::max);
    let pog_quantity = in_omega
        .iter()
        .map(|s| (-s.u).powf(spec.alpha) * s.norm.max(1.0))
        .fold(0.0, f64::max);
    let min_sigma3 = (n >= 3).then(|| {
        in_mask
            .iter()
            .map(|s| sigma_k_mat(&s.hess, 3).expect("n >= 3"))
            .fold(f64::INFINITY, f64::min)
    });

    let inner: Vec<&SymTensor> = stats
        .iter()
        .filter(|s| {
            dom.coords(s.node)
                .iter()
                .zip(&centre)
                .all(|(y, c)| (y - c).abs() <= 0.5 * half + 1e-12)
        })
        .map(|s| &s.hess)
        .collect();
    let osc = (0..inner.len())
        .into_par_iter()
        .map(|i| {
            inner[i + 1..]
                .iter()
                .map(|b| frobenius_distance(inner[i], b))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);

    let identity_max_error = stats.iter().map(|s| s.identity).fold(0.0, f64::max);
    let closed_form_max_error = stats
        .iter()
        .map(|s| s.closed)
        .try_fold(0.0f64, |m, c| c.map(|c| m.max(c)));

    Ok(RescaleRow {
        r,
        sup_hess,
        osc,
        pog_quantity,
        nodes_in_mask: in_mask.len(),
        nodes_in_omega: in_omega.len(),
        min_sigma3,
        identity_max_error,
        closed_form_max_error,
        cube_lo: lo,
        cube_hi: hi,
    })
}

/// Rescale the base as `u_R(y) = (u(Ry) − R²)/R²` for each radius and
/// collect Hessian statistics on `Ω_R = {u_R < 0}` and `Ω′_R = {u_R ≤ −½}`.
pub fn rescale_family(spec: &RescaleSpec) -> Result<RescaleReport, ProbeError> {
    spec.validate()?;
    let rows = spec
        .radii
        .iter()
        .map(|&r| rescale_one(spec, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RescaleReport {
        schema_version: crate::SCHEMA_VERSION,
        base: spec.base.name(),
        big_a: spec.big_a,
        alpha: spec.alpha,
        rows,
    })
}
