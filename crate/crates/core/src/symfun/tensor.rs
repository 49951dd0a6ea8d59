use serde::{Deserialize, Serialize};

use super::{check_dim, SymfunError};

/// Symmetric `n×n` real matrix, row-major.
///
/// Symmetry is exact: [`SymTensor::new`] rejects any pair with
/// `W_ij != W_ji`. Use [`SymTensor::symmetrized`] to build from data that is
/// only symmetric up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTensor {
    n: usize,
    entries: Vec<f64>,
}

impl SymTensor {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self, SymfunError> {
        check_dim(n)?;
        if entries.len() != n * n {
            return Err(SymfunError::Shape {
                n,
                expected: n * n,
                got: entries.len(),
            });
        }
        if let Some(&bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(SymfunError::NonFinite(bad));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (entries[i * n + j], entries[j * n + i]);
                if a != b {
                    return Err(SymfunError::Asymmetric { i, j, a, b });
                }
            }
        }
        Ok(SymTensor { n, entries })
    }

    /// `(A + Aᵀ)/2` of a square row-major matrix.
    pub fn symmetrized(n: usize, mut entries: Vec<f64>) -> Result<Self, SymfunError> {
        if entries.len() != n * n {
            return Err(SymfunError::Shape {
                n,
                expected: n * n,
                got: entries.len(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (entries[i * n + j] + entries[j * n + i]);
                entries[i * n + j] = avg;
                entries[j * n + i] = avg;
            }
        }
        SymTensor::new(n, entries)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SymfunError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(SymfunError::Shape {
                    n,
                    expected: n,
                    got: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        SymTensor::new(n, entries)
    }

    pub fn diag(d: &[f64]) -> Result<Self, SymfunError> {
        let n = d.len();
        check_dim(n)?;
        let mut entries = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            entries[i * n + i] = v;
        }
        SymTensor::new(n, entries)
    }

    pub fn identity(n: usize) -> Result<Self, SymfunError> {
        SymTensor::diag(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Result<Self, SymfunError> {
        check_dim(n)?;
        Ok(SymTensor {
            n,
            entries: vec![0.0; n * n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `tr(W²) = Σ_ij W_ij²` for symmetric `W`.
    pub fn trace_of_square(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    pub fn scaled(&self, c: f64) -> SymTensor {
        SymTensor {
            n: self.n,
            entries: self.entries.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &SymTensor) -> Result<SymTensor, SymfunError> {
        if self.n != other.n {
            return Err(SymfunError::Mismatch(self.n, other.n));
        }
        Ok(SymTensor {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    /// `W + a·I`.
    pub fn shifted(&self, a: f64) -> SymTensor {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] += a;
        }
        out
    }

    /// Frobenius inner product `Σ_ij A_ij B_ij`.
    pub fn contract(&self, other: &SymTensor) -> Result<f64, SymfunError> {
        if self.n != other.n {
            return Err(SymfunError::Mismatch(self.n, other.n));
        }
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum())
    }

    /// `Qᵀ W Q` for a row-major `n×n` matrix `Q`, symmetrised to absorb
    /// rounding.
    pub fn conjugated_by(&self, q: &[f64]) -> Result<SymTensor, SymfunError> {
        let n = self.n;
        if q.len() != n * n {
            return Err(SymfunError::Shape {
                n,
                expected: n * n,
                got: q.len(),
            });
        }
        let wq = matmul(n, &self.entries, q);
        let qt = transpose(n, q);
        SymTensor::symmetrized(n, matmul(n, &qt, &wq))
    }
}

pub(crate) fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

pub(crate) fn transpose(n: usize, a: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

fn det3(m: &[f64]) -> f64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6])
}

/// `σ_k(W)` from matrix invariants.
///
/// `k ≤ 2` use `tr W` and `½[(tr W)² − tr W²]`; `k = n ≤ 3` uses the
/// determinant; everything else uses Newton's identities on the power
/// traces `p_j = tr(W^j)`, i.e. the characteristic polynomial coefficients.
pub fn sigma_k_mat(w: &SymTensor, k: usize) -> Result<f64, SymfunError> {
    let n = w.n;
    if k > n {
        return Err(SymfunError::Degree { k, n });
    }
    match k {
        0 => return Ok(1.0),
        1 => return Ok(w.trace()),
        2 => {
            let t = w.trace();
            return Ok(0.5 * (t * t - w.trace_of_square()));
        }
        _ => {}
    }
    if k == n && n == 3 {
        return Ok(det3(&w.entries));
    }
    let mut power = w.entries.clone();
    let mut p = Vec::with_capacity(k);
    p.push(w.trace());
    for _ in 1..k {
        power = matmul(n, &power, &w.entries);
        p.push((0..n).map(|i| power[i * n + i]).sum());
    }
    // k e_k = Σ_{i=1}^{k} (-1)^{i-1} e_{k-i} p_i
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for j in 1..=k {
        let mut acc = 0.0;
        for i in 1..=j {
            let term = e[j - i] * p[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e[j] = acc / j as f64;
    }
    Ok(e[k])
}

/// `σ₂^{ij}(W) = ∂σ₂/∂W_ij = σ₁(W) δ_ij − W_ij`.
pub fn sigma2_gradient(w: &SymTensor) -> SymTensor {
    let s1 = w.trace();
    let n = w.n;
    let mut entries: Vec<f64> = w.entries.iter().map(|v| -v).collect();
    for i in 0..n {
        entries[i * n + i] += s1;
    }
    SymTensor { n, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfun::{eigenvalues_sym, sigma_all, Spectrum};
    use proptest::prelude::*;
    use crate::symfun::testutil::{random_orthogonal, random_sym};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Sum of all k×k principal minors, each by Laplace expansion.
    fn principal_minor_sum(w: &SymTensor, k: usize) -> f64 {
        let n = w.n();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sub: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| w.get(i, j)).collect()).collect();
            total += laplace_det(&sub);
        }
        total
    }

    fn laplace_det(m: &[Vec<f64>]) -> f64 {
        match m.len() {
            0 => 1.0,
            1 => m[0][0],
            k => (0..k)
                .map(|c| {
                    let minor: Vec<Vec<f64>> = m[1..]
                        .iter()
                        .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
                        .collect();
                    let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                    sign * m[0][c] * laplace_det(&minor)
                })
                .sum(),
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let err = SymTensor::new(2, vec![1.0, 2.0, 2.0 + 1e-15, 1.0]).unwrap_err();
        assert!(matches!(err, SymfunError::Asymmetric { i: 0, j: 1, .. }));
        assert!(SymTensor::new(2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn sigma_k_mat_examples() {
        let id = SymTensor::identity(3).unwrap();
        assert_eq!(sigma_k_mat(&id, 2).unwrap(), 3.0);

        let w = SymTensor::diag(&[2.0, 2.0, -0.75]).unwrap();
        assert_eq!(principal_minor_sum(&w, 2), 1.0);
        assert_eq!(sigma_k_mat(&w, 2).unwrap(), 1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_orthogonal(3, &mut rng);
        let base = SymTensor::diag(&[1.5, 1.0, -0.2]).unwrap();
        let rotated = base.conjugated_by(&q).unwrap();
        assert!(!rotated.is_diagonal());
        assert!((sigma_k_mat(&rotated, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((sigma_k_mat(&rotated, 3).unwrap() + 0.3).abs() < 1e-12);
    }

    #[test]
    fn gradient_examples() {
        let w = SymTensor::diag(&[2.0, 2.0, -0.75]).unwrap();
        assert_eq!(sigma2_gradient(&w), SymTensor::diag(&[1.25, 1.25, 4.0]).unwrap());

        let z = SymTensor::zeros(3).unwrap();
        assert_eq!(sigma2_gradient(&z), z);

        let w = SymTensor::diag(&[1.5, 1.0, -0.2]).unwrap();
        let c = sigma2_gradient(&w).contract(&w).unwrap();
        assert!((c - 2.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_sigma_matches_minors_and_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let n = rng.gen_range(2..=8);
            let w = random_sym(n, &mut rng);
            let spec = eigenvalues_sym(&w);
            let from_eigs = sigma_all(&spec);
            let scale = sigma_all(&spec.abs());
            // A perturbation δλ ~ ε‖W‖ moves σ_k by about ‖W‖·σ_{k−1}(|λ|).
            let norm = w.frobenius_norm();
            for k in 0..=n {
                let inv = sigma_k_mat(&w, k).unwrap();
                let cond = if k == 0 { 0.0 } else { norm * scale[k - 1] };
                let tol = 1e-10 * (scale[k] + cond);
                assert!(
                    (inv - from_eigs[k]).abs() <= tol,
                    "n={n} k={k}: invariants {inv} vs eigen {}",
                    from_eigs[k]
                );
            }
            if n <= 5 {
                for k in 1..=n {
                    let minors = principal_minor_sum(&w, k);
                    let tol = 1e-10 * (scale[k] + norm * scale[k - 1]);
                    assert!((sigma_k_mat(&w, k).unwrap() - minors).abs() <= tol);
                }
            }
        }
    }

    #[test]
    fn gradient_positive_definite_on_gamma2() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut checked = 0;
        while checked < 10_000 {
            let n = rng.gen_range(2..=8);
            let w = random_sym(n, &mut rng);
            if !crate::symfun::in_gamma_k(&w, 2).unwrap().inside {
                continue;
            }
            checked += 1;
            let g = eigenvalues_sym(&sigma2_gradient(&w));
            assert!(g.values()[n - 1] > 0.0, "min eigenvalue {:?}", g);
        }
    }

    proptest! {
        #[test]
        fn orthogonal_invariance(seed in any::<u64>(), n in 2usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = random_sym(n, &mut rng);
            let q = random_orthogonal(n, &mut rng);
            let r = w.conjugated_by(&q).unwrap();
            let scale = sigma_all(&eigenvalues_sym(&w).abs());
            for k in 0..=n {
                let a = sigma_k_mat(&w, k).unwrap();
                let b = sigma_k_mat(&r, k).unwrap();
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + scale[k]));
            }
        }

        #[test]
        fn euler_contraction(seed in any::<u64>(), n in 2usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = random_sym(n, &mut rng);
            let c = sigma2_gradient(&w).contract(&w).unwrap();
            let s2 = sigma_k_mat(&w, 2).unwrap();
            let scale = w.trace().powi(2) + w.trace_of_square();
            prop_assert!((c - 2.0 * s2).abs() <= 1e-12 * (1.0 + scale));
        }
    }

    #[test]
    fn spectrum_dimension_check() {
        assert!(Spectrum::new(vec![0.0; 3]).is_ok());
    }
}
