//! Rescalings u_R(y) = (u(Ry) − R²)/R² of closed-form entire candidates.

use std::sync::Arc;

use sigma2lab::probe::{rescale_family, BumpCandidate, EntireCandidate, QuadraticCandidate, RescaleSpec, Warren};

fn main() {
    let bases: Vec<Arc<dyn EntireCandidate>> = vec![
        Arc::new(QuadraticCandidate::unit(3)),
        Arc::new(BumpCandidate::new(QuadraticCandidate::unit(3), 0.5, 1.0)),
        Arc::new(Warren),
    ];
    for base in bases {
        let name = base.name();
        let spec = RescaleSpec::new(base, vec![1.0, 2.0, 4.0]);
        match rescale_family(&spec) {
            Ok(rep) => {
                println!("{name}");
                rep.write_csv(std::io::stdout()).unwrap();
                println!("osc non-increasing within 10%: {}", rep.osc_non_increasing(0.1));
            }
            // Warren's solution is not quadratic-growth, so its sublevel sets are unbounded.
            Err(e) => println!("{name}: {e}"),
        }
    }
}
