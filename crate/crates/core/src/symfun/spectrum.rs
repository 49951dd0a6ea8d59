use serde::{Deserialize, Serialize};

use super::{check_dim, SymfunError};

/// Eigenvalue vector `λ = (λ₁, …, λₙ)`.
///
/// Order is whatever the caller supplied; [`Spectrum::sorted`] produces the
/// non-increasing arrangement used by the lemma checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self, SymfunError> {
        check_dim(values.len())?;
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(SymfunError::NonFinite(bad));
        }
        Ok(Spectrum { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Non-increasing copy. The sort is stable, so equal values keep their
    /// relative input order.
    pub fn sorted(&self) -> Spectrum {
        let mut values = self.values.clone();
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum { values }
    }

    pub fn is_sorted(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// Componentwise absolute values; `σ_k(|λ|)` is the natural scale for
    /// rounding error in `σ_k(λ)`.
    pub fn abs(&self) -> Spectrum {
        Spectrum {
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }
}

impl TryFrom<Vec<f64>> for Spectrum {
    type Error = SymfunError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Spectrum::new(v)
    }
}

impl From<Spectrum> for Vec<f64> {
    fn from(s: Spectrum) -> Self {
        s.values
    }
}

/// All elementary symmetric functions `σ₀ = 1, σ₁, …, σₙ` of `values`.
///
/// Subset-sum recurrence: after absorbing `λ_m`, `e_j ← e_j + λ_m e_{j-1}`
/// (descending `j`). Works for any length, including the truncated spectra
/// that appear in the lemma proofs.
pub(crate) fn elementary(values: &[f64], kmax: usize) -> Vec<f64> {
    let mut e = vec![0.0; kmax + 1];
    e[0] = 1.0;
    for (m, &v) in values.iter().enumerate() {
        let top = kmax.min(m + 1);
        for j in (1..=top).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e
}

/// `σ_k(λ)`, with `σ₀ = 1`.
pub fn sigma_k(s: &Spectrum, k: usize) -> Result<f64, SymfunError> {
    let n = s.n();
    if k > n {
        return Err(SymfunError::Degree { k, n });
    }
    Ok(elementary(&s.values, k)[k])
}

/// `[σ₀, σ₁, …, σₙ]`.
pub fn sigma_all(s: &Spectrum) -> Vec<f64> {
    elementary(&s.values, s.n())
}

/// `λ + a·(1, …, 1)`.
pub fn shift_spectrum(s: &Spectrum, a: f64) -> Spectrum {
    Spectrum {
        values: s.values.iter().map(|v| v + a).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct sum over all k-subsets.
    fn sigma_enum(v: &[f64], k: usize) -> f64 {
        let n = v.len();
        (0u32..(1 << n))
            .filter(|mask| mask.count_ones() as usize == k)
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| v[i]).product::<f64>())
            .sum()
    }

    fn sp(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_k(&sp(&[1.0, 1.0, 1.0]), 2).unwrap(), 3.0);
        assert_eq!(sigma_k(&sp(&[2.0, 2.0, -0.75]), 2).unwrap(), 1.0);
        assert!((sigma_k(&sp(&[1.5, 1.0, -0.2]), 3).unwrap() + 0.3).abs() < 1e-15);
        assert_eq!(sigma_k(&sp(&[4.0, -3.0]), 0).unwrap(), 1.0);
    }

    #[test]
    fn degree_out_of_range() {
        assert_eq!(
            sigma_k(&sp(&[1.0, 2.0]), 3),
            Err(SymfunError::Degree { k: 3, n: 2 })
        );
    }

    #[test]
    fn dimension_and_finiteness() {
        assert!(Spectrum::new(vec![1.0]).is_err());
        assert!(Spectrum::new(vec![0.0; 9]).is_err());
        assert!(Spectrum::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn shift_examples() {
        let s = shift_spectrum(&sp(&[1.5, 1.0, -0.2]), 0.2);
        assert_eq!(s.values(), &[1.7, 1.2, 0.0]);
        assert_eq!(sigma_k(&s, 3).unwrap(), 0.0);
        let base = sp(&[1.5, 1.0, -0.2]);
        assert_eq!(shift_spectrum(&base, 0.0), base);
    }

    #[test]
    fn sorted_is_stable_and_non_increasing() {
        let s = sp(&[3.0, 1.0, 2.0]).sorted();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
        assert!(s.is_sorted());
        let z = sp(&[0.0, -0.0, 1.0]).sorted();
        assert_eq!(z.values()[0], 1.0);
        // total_cmp orders +0 above -0; both are "equal" for the lemma checks.
        assert!(z.is_sorted());
    }

    proptest! {
        #[test]
        fn recurrence_matches_enumeration(v in prop::collection::vec(-10.0f64..10.0, 2..=8)) {
            let s = Spectrum::new(v.clone()).unwrap();
            let all = sigma_all(&s);
            let abs = sigma_all(&s.abs());
            for k in 0..=v.len() {
                let oracle = sigma_enum(&v, k);
                prop_assert!((all[k] - oracle).abs() <= 1e-12 * (1.0 + abs[k]));
            }
        }

        #[test]
        fn shift_identity(v in prop::collection::vec(-5.0f64..5.0, 2..=8), a in -3.0f64..3.0) {
            // σ_k(λ + a·1) = Σ_j C(n-j, k-j) a^{k-j} σ_j(λ)
            let s = Spectrum::new(v.clone()).unwrap();
            let n = v.len();
            let shifted = sigma_all(&shift_spectrum(&s, a));
            let base = sigma_all(&s);
            let scale = sigma_all(&shift_spectrum(&s.abs(), a.abs()));
            for k in 0..=n {
                let mut expect = 0.0;
                for j in 0..=k {
                    expect += binom(n - j, k - j) * a.powi((k - j) as i32) * base[j];
                }
                prop_assert!((shifted[k] - expect).abs() <= 1e-11 * (1.0 + scale[k]));
            }
        }

        #[test]
        fn gamma_nesting(v in prop::collection::vec(-5.0f64..5.0, 2..=8)) {
            let s = Spectrum::new(v).unwrap();
            let n = s.n();
            for k in 1..=n {
                if crate::symfun::in_gamma_k(&s, k).unwrap().inside {
                    for j in 1..k {
                        prop_assert!(crate::symfun::in_gamma_k(&s, j).unwrap().inside);
                    }
                }
            }
        }
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }
}
