//! Warren's entire 2-convex solution: equation, cone and growth checks.

use sigma2lab::probe::{fd_hessian, warren_validate, EntireCandidate, Warren};
use sigma2lab::symfun::sigma_k_mat;

fn main() {
    let x = [0.3, -1.1, 2.0];
    let h = Warren.hessian(&x).unwrap();
    let fd = fd_hessian(&Warren, &x, 1e-4);
    println!("u({x:?}) = {}", Warren.value(&x));
    println!("sigma_2 closed form {:.15}", sigma_k_mat(&h, 2).unwrap());
    println!("sigma_2 differences {:.9}", sigma_k_mat(&fd, 2).unwrap());

    let r = warren_validate(1000, 7, 3.0).unwrap();
    println!("max |sigma_2 - 1| = {:.3e} at {:?}", r.max_abs_residual, r.worst_point);
    println!("Gamma_2 everywhere: {}, min sigma_1 {:.3e}", r.gamma2_all, r.min_sigma1);
    for g in &r.growth {
        println!(
            "growth b={} c={} R={}: holds={} worst gap {:.3e} at {:?}",
            g.fit.b, g.fit.c, g.fit.r, g.holds, g.worst_gap, g.witness
        );
    }
}
