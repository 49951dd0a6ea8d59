//! Σ arctan λᵢ = π/2 on Γ₂ ∩ {σ₂ = 1} in three dimensions.

use sigma2lab::probe::{phase_identity_check, phase_sample};
use sigma2lab::symfun::Spectrum;

fn main() {
    let r = phase_identity_check(10_000, 7).unwrap();
    println!("samples {} rejected {}", r.count, r.rejected);
    println!("max phase error {:.3e}", r.max_phase_error);
    println!("violations {}", r.violations);

    // (1, 1, 0.5) has σ₂ = 2, so its phase is off π/2.
    let c = phase_sample(&Spectrum::new(vec![1.0, 1.0, 0.5]).unwrap());
    println!("control: phase {:.6} sigma_2 {} error {:.3e}", c.phase, c.sigma2, c.phase_error);
}
