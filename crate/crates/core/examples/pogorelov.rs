//! Pogorelov quantities on g = 0 solves over boxes of diameter d and 2d.

use sigma2lab::probe::{aux_function_field, pogorelov_quantity, PogorelovConfig, PogorelovVariant};
use sigma2lab::solver::{newton_solve, DirichletData, GridDomain, SolveConfig};

fn main() {
    for half in [1.0, 2.0] {
        let dom = GridDomain::cube(3, -half, half, 17).unwrap();
        let rep = newton_solve(&dom, &DirichletData::Zero, &SolveConfig::default()).unwrap();
        for variant in [PogorelovVariant::LargestEigenvalue, PogorelovVariant::Laplacian] {
            let cfg = PogorelovConfig { alpha: 50.0, variant };
            let q = pogorelov_quantity(&rep.field, &cfg).unwrap();
            println!(
                "diam {:.3} {variant:?}: max {:.4e} at {:?} (depth {}), clamped {:.4e}",
                q.diameter, q.max.value, q.max.node, q.max.depth, q.clamped.value
            );
        }
        let (_, cert) = aux_function_field(&rep.field, &PogorelovConfig::default()).unwrap();
        println!(
            "  aux P: interior max {} at {:?}, gradient {:?}",
            cert.interior_max, cert.max.node, cert.gradient
        );
    }
}
