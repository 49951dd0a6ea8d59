//! Single evaluations of the pointwise inequalities with their margins.

use sigma2lab::ineq::{
    check_corollary_a, check_corollary_third_derivative, check_lemma_cq, check_lemma_shift,
    check_quadratic_form_epsilon, MarginReport,
};
use sigma2lab::symfun::{Spectrum, SymTensor};

fn show(r: &MarginReport) {
    println!(
        "{:<28} vacuous={} lhs={:.6e} rhs={:.6e} rel_margin={:.3e}",
        r.name,
        r.vacuous,
        r.lhs,
        r.rhs,
        r.relative_margin()
    );
    for p in &r.parts {
        println!("    {:<14} {:.6e} >= {:.6e}", p.label, p.lhs, p.rhs);
    }
}

fn main() {
    // Sorted diagonal Hessian with σ₂ = 1 and a large leading entry.
    let w1 = 20.0;
    let w2 = 0.1;
    let w3 = (1.0 - w1 * w2) / (w1 + w2);
    let w = SymTensor::diag(&[w1, w2, w3]).unwrap();
    let xi = SymTensor::diag(&[0.4, -1.2, 0.7]).unwrap();

    show(&check_lemma_cq(&w, &xi).unwrap());
    show(&check_corollary_third_derivative(&w, &xi).unwrap());
    show(&check_lemma_shift(&w, 0.05).unwrap());
    show(&check_corollary_a(&w, 2.0).unwrap());

    let lambda = Spectrum::new(vec![w1, w2, w3]).unwrap();
    for eps in [0.0, 0.04, 0.4] {
        show(&check_quadratic_form_epsilon(&lambda, eps).unwrap());
    }

    // Outside Γ₂ the checks are vacuous rather than failing.
    let outside = SymTensor::diag(&[1.0, -2.0, -3.0]).unwrap();
    show(&check_lemma_cq(&outside, &xi).unwrap());
}
