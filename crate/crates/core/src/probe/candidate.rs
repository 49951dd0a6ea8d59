use crate::symfun::SymTensor;

/// A closed-form function on all of `ℝⁿ` that the probes can sample.
pub trait EntireCandidate: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Exact Hessian, when known.
    fn hessian(&self, _x: &[f64]) -> Option<SymTensor> {
        None
    }
}

/// `½xᵀMx`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCandidate {
    pub hessian: SymTensor,
}

impl QuadraticCandidate {
    pub fn new(hessian: SymTensor) -> Self {
        QuadraticCandidate { hessian }
    }

    /// `M = √(2/(n(n−1)))·I`, the rotation-invariant quadratic with
    /// `σ₂(M) = 1`.
    pub fn unit(n: usize) -> Self {
        let c = (2.0 / (n * (n - 1)) as f64).sqrt();
        QuadraticCandidate {
            hessian: SymTensor::identity(n).expect("supported dimension").scaled(c),
        }
    }
}

impl EntireCandidate for QuadraticCandidate {
    fn name(&self) -> String {
        "quadratic".into()
    }
    fn dim(&self) -> usize {
        self.hessian.n()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.hessian.get(i, j) * x[i] * x[j];
            }
        }
        0.5 * s
    }
    fn hessian(&self, _x: &[f64]) -> Option<SymTensor> {
        Some(self.hessian.clone())
    }
}

/// Quadratic plus `amplitude·exp(−1/(1 − |x|²/radius²))` supported in the
/// ball of the given radius.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpCandidate {
    pub base: QuadraticCandidate,
    pub amplitude: f64,
    pub radius: f64,
}

impl BumpCandidate {
    pub fn new(base: QuadraticCandidate, amplitude: f64, radius: f64) -> Self {
        BumpCandidate {
            base,
            amplitude,
            radius,
        }
    }

    fn s(&self, x: &[f64]) -> f64 {
        x.iter().map(|t| t * t).sum::<f64>() / (self.radius * self.radius)
    }
}

impl EntireCandidate for BumpCandidate {
    fn name(&self) -> String {
        "quadratic_bump".into()
    }
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let s = self.s(x);
        let bump = if s < 1.0 { (-1.0 / (1.0 - s)).exp() } else { 0.0 };
        self.base.value(x) + self.amplitude * bump
    }
    fn hessian(&self, x: &[f64]) -> Option<SymTensor> {
        let n = self.dim();
        let s = self.s(x);
        let mut e = self.base.hessian.entries().to_vec();
        if s < 1.0 {
            // φ(s) = exp(−1/(1−s)); ∂ᵢⱼφ = 4φ''xᵢxⱼ/r⁴ + 2φ'δᵢⱼ/r².
            let q = 1.0 / (1.0 - s);
            let phi = (-q).exp();
            let d1 = -phi * q * q;
            let d2 = phi * (q.powi(4) - 2.0 * q.powi(3));
            let r2 = self.radius * self.radius;
            for i in 0..n {
                for j in 0..n {
                    let mut v = 4.0 * d2 * x[i] * x[j] / (r2 * r2);
                    if i == j {
                        v += 2.0 * d1 / r2;
                    }
                    e[i * n + j] += self.amplitude * v;
                }
            }
        }
        Some(SymTensor::symmetrized(n, e).expect("finite"))
    }
}

/// Warren's entire 2-convex solution of `σ₂ = 1` in `ℝ³`,
/// `u(x, y, t) = (x² + y²)eᵗ + ¼e⁻ᵗ − eᵗ`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Warren;

impl EntireCandidate for Warren {
    fn name(&self) -> String {
        "warren".into()
    }
    fn dim(&self) -> usize {
        3
    }
    fn value(&self, p: &[f64]) -> f64 {
        let (x, y, t) = (p[0], p[1], p[2]);
        (x * x + y * y) * t.exp() + 0.25 * (-t).exp() - t.exp()
    }
    fn hessian(&self, p: &[f64]) -> Option<SymTensor> {
        let (x, y, t) = (p[0], p[1], p[2]);
        let et = t.exp();
        let xx = 2.0 * et;
        let xt = 2.0 * x * et;
        let yt = 2.0 * y * et;
        let tt = (x * x + y * y) * et + 0.25 * (-t).exp() - et;
        Some(SymTensor::new(3, vec![xx, 0.0, xt, 0.0, xx, yt, xt, yt, tt]).expect("symmetric by construction"))
    }
}

/// Central-difference Hessian of `f` at `x` with spacing `h`.
pub fn fd_hessian(f: &dyn EntireCandidate, x: &[f64], h: f64) -> SymTensor {
    let n = f.dim();
    let mut e = vec![0.0; n * n];
    let at = |di: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, d) in di {
            y[i] += d;
        }
        f.value(&y)
    };
    let f0 = f.value(x);
    for i in 0..n {
        e[i * n + i] = (at(&[(i, h)]) - 2.0 * f0 + at(&[(i, -h)])) / (h * h);
        for j in (i + 1)..n {
            let v = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            e[i * n + j] = v;
            e[j * n + i] = v;
        }
    }
    SymTensor::new(n, e).expect("symmetric by construction")
}
