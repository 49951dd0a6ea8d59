use super::tensor::SymTensor;
use super::Spectrum;

/// `W = Q Λ Qᵀ` with eigenvectors in the columns of row-major `q`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub spectrum: Spectrum,
    pub q: Vec<f64>,
}

impl EigenDecomposition {
    /// `‖W − QΛQᵀ‖_F`.
    pub fn reconstruction_error(&self, w: &SymTensor) -> f64 {
        let n = w.n();
        let lam = self.spectrum.values();
        let mut err = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for k in 0..n {
                    v += self.q[i * n + k] * lam[k] * self.q[j * n + k];
                }
                err += (w.get(i, j) - v).powi(2);
            }
        }
        err.sqrt()
    }
}

/// Eigenvalues of `W`, sorted non-increasing.
///
/// `n = 2` and `n = 3` use the closed-form roots of the characteristic
/// polynomial; larger `n` use cyclic Jacobi rotations.
pub fn eigenvalues_sym(w: &SymTensor) -> Spectrum {
    let values = match w.n() {
        2 => eig2(w),
        3 => eig3(w),
        _ => return jacobi_eigen(w).spectrum,
    };
    Spectrum::new(values).expect("finite symmetric input").sorted()
}

fn eig2(w: &SymTensor) -> Vec<f64> {
    let (a, b, d) = (w.get(0, 0), w.get(0, 1), w.get(1, 1));
    let mean = 0.5 * (a + d);
    let r = (0.5 * (a - d)).hypot(b);
    vec![mean + r, mean - r]
}

fn eig3(w: &SymTensor) -> Vec<f64> {
    let a = |i, j| w.get(i, j);
    let off = a(0, 1).powi(2) + a(0, 2).powi(2) + a(1, 2).powi(2);
    if off == 0.0 {
        return vec![a(0, 0), a(1, 1), a(2, 2)];
    }
    let q = w.trace() / 3.0;
    let d = [a(0, 0) - q, a(1, 1) - q, a(2, 2) - q];
    let p2 = d.iter().map(|x| x * x).sum::<f64>() + 2.0 * off;
    let p = (p2 / 6.0).sqrt();
    // B = (W − qI)/p, r = det(B)/2 ∈ [−1, 1]
    let b = [
        d[0] / p,
        a(0, 1) / p,
        a(0, 2) / p,
        d[1] / p,
        a(1, 2) / p,
        d[2] / p,
    ];
    let det_b = b[0] * (b[3] * b[5] - b[4] * b[4]) - b[1] * (b[1] * b[5] - b[4] * b[2])
        + b[2] * (b[1] * b[4] - b[3] * b[2]);
    let r = (0.5 * det_b).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let l2 = 3.0 * q - l1 - l3;
    vec![l1, l2, l3]
}

/// Cyclic Jacobi eigendecomposition for any supported `n`.
///
/// Sweeps until the off-diagonal mass drops below `1e-30 · ‖W‖²` (or 100
/// sweeps). Eigenpairs come back sorted non-increasing with ties kept in
/// column order.
pub fn jacobi_eigen(w: &SymTensor) -> EigenDecomposition {
    let n = w.n();
    let mut a = w.entries().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut q = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            q[r * n + new_col] = v[r * n + old_col];
        }
    }
    EigenDecomposition {
        spectrum: Spectrum::new(values).expect("finite symmetric input"),
        q,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfun::testutil::{random_orthogonal, random_sym};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_examples() {
        let w = SymTensor::diag(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(eigenvalues_sym(&w).values(), &[3.0, 2.0, 1.0]);

        let refl = SymTensor::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(eigenvalues_sym(&refl).values(), &[1.0, -1.0]);
    }

    #[test]
    fn rotated_diagonal_recovers_spectrum() {
        let base = SymTensor::diag(&[1.5, 1.0, -0.2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let q = random_orthogonal(3, &mut rng);
            let w = base.conjugated_by(&q).unwrap();
            let got = eigenvalues_sym(&w);
            for (g, e) in got.values().iter().zip([1.5, 1.0, -0.2]) {
                assert!((g - e).abs() < 1e-12, "{got:?}");
            }
        }
    }

    #[test]
    fn jacobi_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let n = rng.gen_range(2..=8);
            let w = random_sym(n, &mut rng);
            let dec = jacobi_eigen(&w);
            assert!(dec.spectrum.is_sorted());
            let err = dec.reconstruction_error(&w);
            assert!(err <= 1e-12 * (1.0 + w.frobenius_norm()), "n={n} err={err}");
        }
    }

    #[test]
    fn closed_form_agrees_with_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..2000 {
            let n = rng.gen_range(2..=3);
            let w = random_sym(n, &mut rng);
            let a = eigenvalues_sym(&w);
            let b = jacobi_eigen(&w).spectrum;
            let scale = 1.0 + w.frobenius_norm();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let q = random_orthogonal(3, &mut rng);
        let w = SymTensor::diag(&[2.0, 2.0, -1.0]).unwrap().conjugated_by(&q).unwrap();
        let s = eigenvalues_sym(&w);
        for (g, e) in s.values().iter().zip([2.0, 2.0, -1.0]) {
            assert!((g - e).abs() < 1e-7, "{s:?}");
        }
    }
}
