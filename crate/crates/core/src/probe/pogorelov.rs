use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::solver::{discrete_hessian, GridDomain, ScalarField};
use crate::symfun::eigenvalues_sym;

use super::ProbeError;

/// Which second-derivative quantity multiplies `(−u)^α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PogorelovVariant {
    /// Spectral norm `|D²u|`.
    #[default]
    LargestEigenvalue,
    /// `max(Δu, 1)`.
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PogorelovConfig {
    pub alpha: f64,
    pub variant: PogorelovVariant,
}

impl Default for PogorelovConfig {
    fn default() -> Self {
        PogorelovConfig {
            alpha: 50.0,
            variant: PogorelovVariant::LargestEigenvalue,
        }
    }
}

impl PogorelovConfig {
    pub fn validate(&self) -> Result<(), ProbeError> {
        if self.alpha > 0.0 && self.alpha.is_finite() {
            Ok(())
        } else {
            Err(ProbeError::Config(format!("alpha must be positive, got {}", self.alpha)))
        }
    }
}

/// Maximum of a nodal quantity with the node that attains it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMax {
    pub value: f64,
    pub node: Vec<usize>,
    pub coords: Vec<f64>,
    /// Distance in nodes to the boundary.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PogorelovReport {
    pub schema_version: u32,
    pub config: PogorelovConfig,
    /// `max (−u)^α q` for the configured variant.
    pub max: NodeMax,
    /// `max (−u)^α max(|D²u|, 1)`.
    pub clamped: NodeMax,
    /// `max (−u)^α λ_max(D²u)`.
    pub largest_eigenvalue: NodeMax,
    pub diameter: f64,
    /// The maximum sits away from the boundary layer (depth ≥ 2) and is
    /// finite.
    pub strictly_interior: bool,
}

/// Reject fields that are positive somewhere in the interior.
fn check_nonpositive(f: &ScalarField) -> Result<(), ProbeError> {
    let dom = &f.domain;
    for p in dom.interior() {
        if f.values[p] > 0.0 {
            return Err(ProbeError::PositiveValue {
                node: dom.multi_index(p),
                value: f.values[p],
            });
        }
    }
    Ok(())
}

struct NodeQuantities {
    node: usize,
    neg_u: f64,
    spectral: f64,
    lambda_max: f64,
    laplacian: f64,
}

fn node_quantities(f: &ScalarField) -> Vec<NodeQuantities> {
    f.domain
        .interior()
        .par_iter()
        .map(|&p| {
            let hess = discrete_hessian(f, p).expect("interior node");
            let lam = eigenvalues_sym(&hess);
            let v = lam.values();
            NodeQuantities {
                node: p,
                neg_u: -f.values[p],
                spectral: v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
                lambda_max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                laplacian: hess.trace(),
            }
        })
        .collect()
}

/// Argmax with ties resolved to the lowest node index (`nodes` ascending).
fn node_max(dom: &GridDomain, nodes: &[NodeQuantities], q: impl Fn(&NodeQuantities) -> f64) -> NodeMax {
    let mut best = (f64::NEG_INFINITY, nodes[0].node);
    for nq in nodes {
        let v = q(nq);
        if v > best.0 {
            best = (v, nq.node);
        }
    }
    NodeMax {
        value: best.0,
        node: dom.multi_index(best.1),
        coords: dom.coords(best.1),
        depth: dom.depth(best.1),
    }
}

/// Pogorelov quantity `max (−u)^α q` over interior nodes of a non-positive
/// field.
pub fn pogorelov_quantity(f: &ScalarField, cfg: &PogorelovConfig) -> Result<PogorelovReport, ProbeError> {
    cfg.validate()?;
    check_nonpositive(f)?;
    let dom = &f.domain;
    let nodes = node_quantities(f);
    let a = cfg.alpha;
    let weight = |nq: &NodeQuantities| nq.neg_u.powf(a);
    let max = match cfg.variant {
        PogorelovVariant::LargestEigenvalue => node_max(dom, &nodes, |nq| weight(nq) * nq.spectral),
        PogorelovVariant::Laplacian => node_max(dom, &nodes, |nq| weight(nq) * nq.laplacian.max(1.0)),
    };
    let clamped = node_max(dom, &nodes, |nq| weight(nq) * nq.spectral.max(1.0));
    let largest_eigenvalue = node_max(dom, &nodes, |nq| weight(nq) * nq.lambda_max);
    let strictly_interior = max.depth >= 2 && max.value.is_finite();
    Ok(PogorelovReport {
        schema_version: crate::SCHEMA_VERSION,
        config: *cfg,
        max,
        clamped,
        largest_eigenvalue,
        diameter: dom.diameter(),
        strictly_interior,
    })
}

/// Interior-maximum certificate for the auxiliary function
/// `P = α log(−u) + log max(Δu, 1) + ½|x|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxCertificate {
    pub schema_version: u32,
    pub config: PogorelovConfig,
    pub max: NodeMax,
    /// Largest `P` on the first interior layer (depth 1).
    pub max_first_layer: f64,
    /// `P` at the argmax beats every first-layer value.
    pub interior_max: bool,
    /// Centred differences `∂ᵢP` at the argmax.
    pub gradient: Vec<f64>,
    /// At a discrete maximum `|∂ᵢP| ≤ (h/2)|∂ᵢᵢP|` for every axis.
    pub gradient_bounded: bool,
    /// Nodes where `Δu < 1` and the logarithm is clamped to 0.
    pub clamped_nodes: usize,
}

/// `P` on every node (`−∞` on the boundary, where `u = 0`) plus its
/// interior-maximum certificate.
pub fn aux_function_field(f: &ScalarField, cfg: &PogorelovConfig) -> Result<(ScalarField, AuxCertificate), ProbeError> {
    cfg.validate()?;
    check_nonpositive(f)?;
    let dom = &f.domain;
    let nodes = node_quantities(f);
    let mut values = vec![f64::NEG_INFINITY; dom.len()];
    let mut clamped_nodes = 0;
    for nq in &nodes {
        if nq.laplacian < 1.0 {
            clamped_nodes += 1;
        }
        let x2: f64 = dom.coords(nq.node).iter().map(|t| t * t).sum();
        values[nq.node] = cfg.alpha * nq.neg_u.ln() + nq.laplacian.max(1.0).ln() + 0.5 * x2;
    }
    let p_field = ScalarField::new(dom.clone(), values).expect("same grid");
    let max = node_max(dom, &nodes, |nq| p_field.values[nq.node]);
    let max_first_layer = nodes
        .iter()
        .filter(|nq| dom.depth(nq.node) == 1)
        .map(|nq| p_field.values[nq.node])
        .fold(f64::NEG_INFINITY, f64::max);
    let interior_max = max.value.is_finite() && max.depth >= 2 && max.value > max_first_layer;

    let p = dom.linear_index(&max.node);
    let (mut gradient, mut gradient_bounded) = (Vec::new(), false);
    if max.depth >= 2 {
        gradient_bounded = true;
        for i in 0..dom.n {
            let s = dom.stride(i);
            let (fp, f0, fm) = (p_field.values[p + s], p_field.values[p], p_field.values[p - s]);
            let d1 = (fp - fm) / (2.0 * dom.h);
            let d2 = (fp - 2.0 * f0 + fm) / (dom.h * dom.h);
            gradient.push(d1);
            gradient_bounded &= d1.abs() <= 0.5 * dom.h * d2.abs() * (1.0 + 1e-12) + 1e-12;
        }
    }
    let cert = AuxCertificate {
        schema_version: crate::SCHEMA_VERSION,
        config: *cfg,
        max,
        max_first_layer,
        interior_max,
        gradient,
        gradient_bounded,
        clamped_nodes,
    };
    Ok((p_field, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{barrier_initial_guess, barrier_shift, newton_solve, DirichletData, SolveConfig};

    fn solve_zero(half: f64, m: usize) -> ScalarField {
        let dom = GridDomain::cube(3, -half, half, m).unwrap();
        newton_solve(&dom, &DirichletData::Zero, &SolveConfig::default()).unwrap().field
    }

    #[test]
    fn zero_field_gives_zero() {
        let dom = GridDomain::cube(3, -1.0, 1.0, 7).unwrap();
        let r = pogorelov_quantity(&ScalarField::zeros(&dom), &PogorelovConfig::default()).unwrap();
        assert_eq!(r.max.value, 0.0);
    }

    #[test]
    fn positive_field_is_rejected() {
        let dom = GridDomain::cube(2, -1.0, 1.0, 7).unwrap();
        let f = ScalarField::from_fn(&dom, |_| 0.1);
        assert!(matches!(
            pogorelov_quantity(&f, &PogorelovConfig::default()),
            Err(ProbeError::PositiveValue { .. })
        ));
        let bad = PogorelovConfig {
            alpha: 0.0,
            ..Default::default()
        };
        assert!(pogorelov_quantity(&ScalarField::zeros(&dom), &bad).is_err());
    }

    #[test]
    fn solved_fields_have_interior_maxima() {
        let u = solve_zero(1.0, 17);
        for alpha in [2.0, 50.0] {
            for variant in [PogorelovVariant::LargestEigenvalue, PogorelovVariant::Laplacian] {
                let cfg = PogorelovConfig { alpha, variant };
                let r = pogorelov_quantity(&u, &cfg).unwrap();
                assert!(r.max.value.is_finite() && r.max.value > 0.0);
                assert!(r.strictly_interior, "{cfg:?}: {:?}", r.max);
                assert!(r.clamped.value >= r.max.value || variant == PogorelovVariant::Laplacian);
            }
        }
    }

    #[test]
    fn larger_box_gives_larger_value() {
        let cfg = PogorelovConfig::default();
        let small = pogorelov_quantity(&solve_zero(1.0, 17), &cfg).unwrap();
        let large = pogorelov_quantity(&solve_zero(2.0, 17), &cfg).unwrap();
        assert!((large.diameter / small.diameter - 2.0).abs() < 1e-12);
        assert!(large.clamped.value.is_finite() && small.clamped.value.is_finite());
        assert!(large.clamped.value > small.clamped.value);
    }

    #[test]
    fn aux_function_on_barrier() {
        let dom = GridDomain::cube(3, -1.0, 1.0, 13).unwrap();
        let w = barrier_initial_guess(&dom, barrier_shift(&dom) + 5.0);
        let (p, cert) = aux_function_field(&w, &PogorelovConfig::default()).unwrap();
        assert!(cert.interior_max);
        assert!(cert.gradient_bounded);
        assert!(p.values[0] == f64::NEG_INFINITY);
        // Δw = 3/√3 = √3 > 1: no clamping.
        assert_eq!(cert.clamped_nodes, 0);
    }

    #[test]
    fn aux_function_clamps_small_laplacian() {
        let dom = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let f = ScalarField::from_fn(&dom, |x| 0.1 * (x[0] * x[0] + x[1] * x[1]) - 1.0);
        let cfg = PogorelovConfig::default();
        let (p, cert) = aux_function_field(&f, &cfg).unwrap();
        assert_eq!(cert.clamped_nodes, dom.interior().len());
        let q = dom.interior()[5];
        let x = dom.coords(q);
        let x2 = x[0] * x[0] + x[1] * x[1];
        let want = cfg.alpha * (-f.values[q]).ln() + 0.5 * x2;
        assert!((p.values[q] - want).abs() < 1e-12);
    }

    #[test]
    fn aux_function_on_solution() {
        let u = solve_zero(1.0, 17);
        for alpha in [50.0, 100.0] {
            let cfg = PogorelovConfig {
                alpha,
                variant: PogorelovVariant::Laplacian,
            };
            let (_, cert) = aux_function_field(&u, &cfg).unwrap();
            assert!(cert.interior_max, "{alpha}: {cert:?}");
            assert!(cert.gradient_bounded, "{alpha}: {cert:?}");
        }
    }
}
