//! Residuals of the once- and twice-differentiated equation on refined grids.

use sigma2lab::probe::differentiated_equation_residual;
use sigma2lab::solver::{newton_solve, DirichletData, GridDomain, SolveConfig};

fn main() {
    println!("{:>3} {:>10} {:>12} {:>12} {:>12} {:>12}", "m", "h", "deep 1st", "deep 2nd", "inner 1st", "inner 2nd");
    for m in [9, 17, 33] {
        let dom = GridDomain::cube(3, -1.0, 1.0, m).unwrap();
        let rep = newton_solve(&dom, &DirichletData::Zero, &SolveConfig::default()).unwrap();
        let s = differentiated_equation_residual(&rep.field, 0.5).unwrap();
        println!(
            "{m:>3} {:>10.4} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
            s.h,
            s.deep.max_first(),
            s.deep.max_second(),
            s.inner.max_first(),
            s.inner.max_second()
        );
    }
}
