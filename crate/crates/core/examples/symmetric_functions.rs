//! Elementary symmetric functions of a spectrum and of a symmetric matrix,
//! and Gårding cone membership.

use sigma2lab::symfun::{
    eigenvalues_sym, in_gamma_k, shift_spectrum, sigma2_gradient, sigma_all, sigma_k, sigma_k_mat, Spectrum,
    SymTensor,
};

fn main() {
    let lambda = Spectrum::new(vec![3.0, 1.0, -0.5]).unwrap();
    println!("lambda = {:?}", lambda.values());
    println!("sigma_1..3 = {:?}", sigma_all(&lambda));

    // λ + a: σ₂ grows like (n−1)σ₁a + C(n,2)a².
    for a in [0.0, 0.5, 1.0] {
        let s = shift_spectrum(&lambda, a);
        println!("a = {a}: sigma_2 = {}", sigma_k(&s, 2).unwrap());
    }

    let w = SymTensor::from_rows(&[
        vec![2.0, 0.3, -0.1],
        vec![0.3, 1.0, 0.25],
        vec![-0.1, 0.25, 0.5],
    ])
    .unwrap();
    let spec = eigenvalues_sym(&w);
    for k in 1..=3 {
        let m = sigma_k_mat(&w, k).unwrap();
        let s = sigma_k(&spec, k).unwrap();
        println!("sigma_{k}: invariants {m:.12}, eigenvalues {s:.12}");
    }

    for k in 1..=3 {
        let c = in_gamma_k(&lambda, k).unwrap();
        println!("Gamma_{k}: {} (sigmas {:?})", c.inside, c.sigmas);
    }

    // ∂σ₂/∂W = σ₁I − W
    println!("sigma_2 gradient = {:?}", sigma2_gradient(&w).entries());
}
