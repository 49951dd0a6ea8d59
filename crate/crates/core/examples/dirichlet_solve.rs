//! Newton solves of σ₂(D²u) = 1 with exact quadratic data and with g = 0.

use sigma2lab::solver::{
    barrier_initial_guess, barrier_shift, newton_solve, DirichletData, GridDomain, ScalarField, SolveConfig,
    StartStrategy,
};
use sigma2lab::symfun::SymTensor;

fn main() {
    // diag(2, 0.3, 0.4/2.3) has σ₂ = 1.
    let g = DirichletData::quadratic(SymTensor::diag(&[2.0, 0.3, 0.4 / 2.3]).unwrap());
    for m in [9, 17, 33] {
        let dom = GridDomain::cube(3, -1.0, 1.0, m).unwrap();
        let exact = ScalarField::from_fn(&dom, |x| g.eval(x));
        for start in [StartStrategy::Auto, StartStrategy::Barrier] {
            let cfg = SolveConfig {
                start,
                ..SolveConfig::default()
            };
            let rep = newton_solve(&dom, &g, &cfg).unwrap();
            println!(
                "m={m:>2} {start:?}: {:>2} iterations, residual {:.2e}, error {:.2e}",
                rep.iterations,
                rep.final_residual(),
                rep.field.max_abs_diff(&exact)
            );
        }
    }

    let dom = GridDomain::cube(3, -1.0, 1.0, 17).unwrap();
    let rep = newton_solve(&dom, &DirichletData::Zero, &SolveConfig::default()).unwrap();
    let w = barrier_initial_guess(&dom, barrier_shift(&dom));
    let gap = rep
        .field
        .values
        .iter()
        .zip(&w.values)
        .map(|(u, w)| u - w)
        .fold(f64::INFINITY, f64::min);
    println!("g = 0: residual history {:?}", rep.residual_history);
    println!("min(u - w) = {gap:.3e}, max u = {:.3e}", rep.field.values.iter().cloned().fold(f64::MIN, f64::max));
    println!("certified: {}, min sigma_2 {:.6}", rep.gamma2_certified, rep.min_sigma2);
}
