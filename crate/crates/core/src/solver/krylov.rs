use rayon::prelude::*;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, Default)]
pub(crate) struct Csr {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows())
            .map(|r| {
                let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
                self.cols[a..b]
                    .iter()
                    .zip(&self.vals[a..b])
                    .find(|(&c, _)| c == r)
                    .map_or(0.0, |(_, &v)| v)
            })
            .collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, yr)| {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            *yr = self.cols[a..b].iter().zip(&self.vals[a..b]).map(|(&c, &v)| v * x[c]).sum();
        });
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct KrylovOutcome {
    pub iterations: usize,
    /// `‖b − Ax‖₂ / ‖b‖₂` at exit.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Jacobi-preconditioned BiCGSTAB for `Ax = b`, starting from `x = 0`.
///
/// Dot products are sequential so the result is independent of the thread
/// count.
pub(crate) fn bicgstab(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, KrylovOutcome) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return (
            x,
            KrylovOutcome {
                iterations: 0,
                relative_residual: 0.0,
                converged: true,
            },
        );
    }
    let dinv: Vec<f64> = a.diagonal().iter().map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let precond = |v: &[f64], out: &mut [f64]| {
        for ((o, vi), di) in out.iter_mut().zip(v).zip(&dinv) {
            *o = vi * di;
        }
    };

    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut rel = 1.0;

    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            return (x, outcome(it - 1, rel, false));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precond(&p, &mut y);
        a.matvec(&y, &mut v);
        alpha = rho / dot(&r_hat, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        rel = norm(&s) / bnorm;
        if rel <= tol {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return (x, outcome(it, rel, true));
        }
        precond(&s, &mut z);
        a.matvec(&z, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        rel = norm(&r) / bnorm;
        if rel <= tol {
            return (x, outcome(it, rel, true));
        }
        if omega == 0.0 || !rel.is_finite() {
            return (x, outcome(it, rel, false));
        }
    }
    (x, outcome(max_iter, rel, false))
}

fn outcome(iterations: usize, relative_residual: f64, converged: bool) -> KrylovOutcome {
    KrylovOutcome {
        iterations,
        relative_residual,
        converged,
    }
}
