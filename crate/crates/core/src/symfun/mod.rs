//! Elementary symmetric functions, Gårding cones and the σ₂ linearisation.
//!
//! Everything here is a pure function of its inputs. Matrix quantities are
//! computed from invariants (traces of powers, determinants) and never from
//! an eigendecomposition; the eigenvalue routines exist for the spectral
//! side of the oracle checks and for callers that need `λ[W]` explicitly.

mod eigen;
mod spectrum;
mod tensor;

pub use eigen::{eigenvalues_sym, jacobi_eigen, EigenDecomposition};
pub use spectrum::{shift_spectrum, sigma_all, sigma_k, Spectrum};
pub use tensor::{sigma2_gradient, sigma_k_mat, SymTensor};

use thiserror::Error;

/// Smallest supported dimension.
pub const MIN_DIM: usize = 2;
/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymfunError {
    #[error("dimension {0} outside supported range {MIN_DIM}..={MAX_DIM}")]
    Dimension(usize),
    #[error("degree k = {k} out of range 0..={n}")]
    Degree { k: usize, n: usize },
    #[error("cone index k = {k} out of range 1..={n}")]
    ConeIndex { k: usize, n: usize },
    #[error("matrix is not symmetric: entry ({i},{j}) = {a} but ({j},{i}) = {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("expected {expected} entries for an {n}x{n} matrix, got {got}")]
    Shape { n: usize, expected: usize, got: usize },
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    Mismatch(usize, usize),
}

pub(crate) fn check_dim(n: usize) -> Result<(), SymfunError> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(SymfunError::Dimension(n))
    }
}

/// Result of a Gårding cone membership test.
///
/// `sigmas[j - 1]` holds `σ_j` for `j = 1..=k`. Membership is strict
/// (`σ_j > 0`) with no slack; callers that need a tolerance apply it to
/// `sigmas` themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeCheck {
    pub k: usize,
    pub inside: bool,
    pub sigmas: Vec<f64>,
}

impl ConeCheck {
    /// Smallest of the reported `σ_j`.
    pub fn min_margin(&self) -> f64 {
        self.sigmas.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn cone_from_sigmas(k: usize, sigmas: Vec<f64>) -> ConeCheck {
    let inside = sigmas.iter().all(|&s| s > 0.0);
    ConeCheck { k, inside, sigmas }
}

/// Anything that has a well-defined set of elementary symmetric functions.
pub trait SymmetricInvariants {
    fn dim(&self) -> usize;
    fn sigma(&self, k: usize) -> Result<f64, SymfunError>;
}

impl SymmetricInvariants for Spectrum {
    fn dim(&self) -> usize {
        self.n()
    }
    fn sigma(&self, k: usize) -> Result<f64, SymfunError> {
        sigma_k(self, k)
    }
}

impl SymmetricInvariants for SymTensor {
    fn dim(&self) -> usize {
        self.n()
    }
    fn sigma(&self, k: usize) -> Result<f64, SymfunError> {
        sigma_k_mat(self, k)
    }
}

/// `Γ_k` membership for a spectrum or a symmetric matrix.
pub fn in_gamma_k<T: SymmetricInvariants + ?Sized>(x: &T, k: usize) -> Result<ConeCheck, SymfunError> {
    let n = x.dim();
    if k == 0 || k > n {
        return Err(SymfunError::ConeIndex { k, n });
    }
    let sigmas = (1..=k).map(|j| x.sigma(j)).collect::<Result<Vec<_>, _>>()?;
    Ok(cone_from_sigmas(k, sigmas))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cone_examples() {
        assert!(in_gamma_k(&spec(&[1.0, 1.0, 1.0]), 3).unwrap().inside);

        let w = spec(&[2.0, 2.0, -0.75]);
        let c2 = in_gamma_k(&w, 2).unwrap();
        assert!(c2.inside);
        assert_eq!(c2.sigmas, vec![3.25, 1.0]);

        let c3 = in_gamma_k(&w, 3).unwrap();
        assert!(!c3.inside);
        assert_eq!(c3.sigmas[2], -3.0);
    }

    #[test]
    fn cone_on_matrix_matches_spectrum() {
        let m = SymTensor::diag(&[2.0, 2.0, -0.75]).unwrap();
        assert_eq!(in_gamma_k(&m, 2).unwrap().sigmas, vec![3.25, 1.0]);
    }

    #[test]
    fn cone_boundary_is_excluded() {
        // σ₃ = 0 exactly: strict membership fails.
        let c = in_gamma_k(&spec(&[1.7, 1.2, 0.0]), 3).unwrap();
        assert!(!c.inside);
        assert_eq!(c.min_margin(), 0.0);
    }

    #[test]
    fn cone_index_range() {
        let s = spec(&[1.0, 1.0]);
        assert!(in_gamma_k(&s, 0).is_err());
        assert!(in_gamma_k(&s, 3).is_err());
    }
}
