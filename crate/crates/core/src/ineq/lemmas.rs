//! Margin evaluation for the individual inequalities.
//!
//! Every check takes diagonal data (as [`SymTensor`]s or a [`Spectrum`]),
//! records which hypotheses hold and evaluates both sides exactly as the
//! inequality is written. Inputs that are not in non-increasing order are
//! sorted first (with companion tensors permuted alongside) and the report's
//! `sorted` flag is set.

use crate::symfun::{sigma_all, Spectrum, SymTensor};

use super::report::{MarginPart, MarginReport};
use super::IneqError;

/// Tolerance for "σ₂ = 1" and "η = 0" constraints, relative to the size of
/// the terms that cancel.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Rounding slack for `≥ 0` hypotheses on computed quantities.
pub const HYPOTHESIS_SLACK: f64 = 1e-12;

pub(crate) fn sigma2_of(v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            acc += v[i] * v[j];
        }
    }
    acc
}

fn sigma2_abs(v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            acc += (v[i] * v[j]).abs();
        }
    }
    acc
}

/// `|σ₂(λ) − 1| ≤ tol · (1 + Σ_{i<j} |λᵢλⱼ|)`.
pub fn on_sigma2_surface(v: &[f64]) -> bool {
    (sigma2_of(v) - 1.0).abs() <= CONSTRAINT_TOL * (1.0 + sigma2_abs(v))
}

/// `σ₃(v) ≥ 0` up to rounding; vacuously true below dimension 3.
fn sigma3_nonneg(v: &[f64], lower: f64) -> (bool, f64) {
    if v.len() < 3 {
        return (0.0 >= lower, 0.0);
    }
    let s3 = sigma_all(&Spectrum::new(v.to_vec()).expect("finite"))[3];
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let scale = sigma_all(&Spectrum::new(abs).expect("finite"))[3] + lower.abs();
    (s3 >= lower - HYPOTHESIS_SLACK * scale, s3)
}

/// `−Σ_{i≠j} ξᵢξⱼ` over ordered pairs.
fn neg_cross_sum(xi: &[f64]) -> f64 {
    -2.0 * sigma2_of(xi)
}

struct DiagInput {
    w: Vec<f64>,
    companions: Vec<Vec<f64>>,
    diagonal: bool,
    sorted: bool,
}

fn diag_input(w: &SymTensor, companions: &[&SymTensor]) -> Result<DiagInput, IneqError> {
    let n = w.n();
    for c in companions {
        if c.n() != n {
            return Err(IneqError::Dimension { expected: n, got: c.n() });
        }
    }
    let diagonal = w.is_diagonal();
    let d = w.diagonal();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let sorted = order.iter().enumerate().any(|(k, &i)| k != i);
    let permute = |v: Vec<f64>| order.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    Ok(DiagInput {
        w: permute(d),
        companions: companions.iter().map(|c| permute(c.diagonal())).collect(),
        diagonal,
        sorted,
    })
}

fn gamma2(w: &[f64]) -> (bool, f64, f64) {
    let s1: f64 = w.iter().sum();
    let s2 = sigma2_of(w);
    (s1 > 0.0 && s2 > 0.0, s1, s2)
}

/// Lower bound for `−Σ_{i≠j} ξᵢᵢξⱼⱼ` on `Γ₂`, with
/// `η = Σᵢ σ₂^{ii} ξᵢᵢ`.
pub fn check_lemma_cq(w: &SymTensor, xi: &SymTensor) -> Result<MarginReport, IneqError> {
    let input = diag_input(w, &[xi])?;
    let (w, xi) = (&input.w, &input.companions[0]);
    let n = w.len() as f64;
    let (in_cone, s1, s2) = gamma2(w);
    let eta: f64 = w.iter().zip(xi).map(|(wi, x)| (s1 - wi) * x).sum();

    let lhs = neg_cross_sum(xi);
    let num = 2.0 * s2 * xi[0] - w[0] * eta;
    let term1 = (n - 1.0) / (2.0 * s2) * num * num / ((n - 1.0) * w[0] * w[0] + 2.0 * (n - 2.0) * s2);
    let term2 = eta * eta / (2.0 * s2);
    let rhs = term1 - term2;
    let scale = 1.0 + lhs.abs() + term1.abs() + term2.abs();

    Ok(MarginReport::build(
        "lemma_CQ",
        vec![("diagonal", input.diagonal), ("gamma2", in_cone)],
        vec![MarginPart::with_scale("main", lhs, rhs, scale)],
        vec![("w", w.clone()), ("xi", xi.clone()), ("eta", vec![eta])],
    )
    .with_sorted(input.sorted))
}

/// The `σ₂ = 1`, `η = 0` specialisation used for third derivatives
/// `ξᵢⱼ = u_{ij1}`.
pub fn check_corollary_third_derivative(w: &SymTensor, xi: &SymTensor) -> Result<MarginReport, IneqError> {
    let input = diag_input(w, &[xi])?;
    let (w, xi) = (&input.w, &input.companions[0]);
    let n = w.len() as f64;
    let (in_cone, s1, _) = gamma2(w);
    let eta: f64 = w.iter().zip(xi).map(|(wi, x)| (s1 - wi) * x).sum();
    let eta_scale: f64 = w.iter().zip(xi).map(|(wi, x)| ((s1 - wi) * x).abs()).sum();

    let lhs = neg_cross_sum(xi);
    let rhs = 2.0 * (n - 1.0) * xi[0] * xi[0] / ((n - 1.0) * w[0] * w[0] + 2.0 * (n - 2.0));

    Ok(MarginReport::build(
        "corollary_third_derivative",
        vec![
            ("diagonal", input.diagonal),
            ("gamma2", in_cone),
            ("sigma2_one", on_sigma2_surface(w)),
            ("eta_zero", eta.abs() <= CONSTRAINT_TOL * (1.0 + eta_scale)),
        ],
        vec![MarginPart::new("main", lhs, rhs)],
        vec![("w", w.clone()), ("xi", xi.clone()), ("eta", vec![eta])],
    )
    .with_sorted(input.sorted))
}

struct ShiftHypotheses {
    a_bound: bool,
    sigma3_shift: bool,
    sigma3_shift_value: f64,
    w11_large: bool,
}

fn shift_hypotheses(w: &[f64], s2: f64, a: f64) -> ShiftHypotheses {
    let n = w.len() as f64;
    // n = 2: any a > 0 is allowed.
    let a_bound = w.len() == 2 || a <= (s2 / (3.0 * (n - 1.0) * (n - 2.0))).sqrt();
    let shifted: Vec<f64> = w.iter().map(|x| x + a).collect();
    let (sigma3_shift, sigma3_shift_value) = sigma3_nonneg(&shifted, 0.0);
    ShiftHypotheses {
        a_bound,
        sigma3_shift,
        sigma3_shift_value,
        w11_large: w[0] > 6.0 * (n - 2.0) * a,
    }
}

fn max_abs_tail(w: &[f64]) -> f64 {
    w[1..].iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Consequences of `σ₃(W + aI) ≥ 0` for small shifts `a`: the chain
/// `(7/6)σ₂ ≥ σ₂ + ((n−1)(n−2)/2)a² ≥ (5/6)σ₂^{11}W₁₁` and the bound on
/// `|W_jj|`, `j ≥ 2`.
///
/// `σ₃(W + aI)` is evaluated directly from the shifted spectrum.
pub fn check_lemma_shift(w: &SymTensor, a: f64) -> Result<MarginReport, IneqError> {
    let input = diag_input(w, &[])?;
    let w = &input.w;
    let n = w.len() as f64;
    let (in_cone, s1, s2) = gamma2(w);
    let h = shift_hypotheses(w, s2, a);

    let mid = s2 + 0.5 * (n - 1.0) * (n - 2.0) * a * a;
    let parts = vec![
        MarginPart::new("chain_upper", 7.0 / 6.0 * s2, mid),
        MarginPart::new("chain_lower", mid, 5.0 / 6.0 * (s1 - w[0]) * w[0]),
        MarginPart::new(
            "diagonal_bound",
            (n - 1.0).powi(2) * a + 7.0 * (n - 1.0) * s2 / (5.0 * w[0]),
            max_abs_tail(w),
        ),
    ];
    Ok(MarginReport::build(
        "lemma_shift",
        vec![
            ("diagonal", input.diagonal),
            ("gamma2", in_cone),
            ("a_nonnegative", a >= 0.0),
            ("a_bound", h.a_bound),
            ("sigma3_shift_nonnegative", h.sigma3_shift),
            ("w11_large", h.w11_large),
        ],
        parts,
        vec![("w", w.clone()), ("a", vec![a]), ("sigma3_shift", vec![h.sigma3_shift_value])],
    )
    .with_sorted(input.sorted))
}

/// Lemma-shift consequences for solutions (`σ₂ = 1`) with `σ₃ ≥ −A`, using
/// the shift `a = √(2A / (n(n−1)σ₁))`.
///
/// The derived `a` is checked against every shift hypothesis directly. The
/// largeness condition `W₁₁^{3/2} ≥ 6(n−2)√(2A/(n(n−1)))`, which is only a
/// sufficient route to `W₁₁ > 6(n−2)a`, is recorded as a diagnostic.
pub fn check_corollary_a(w: &SymTensor, big_a: f64) -> Result<MarginReport, IneqError> {
    let input = diag_input(w, &[])?;
    let w = &input.w;
    let n = w.len() as f64;
    let (in_cone, s1, s2) = gamma2(w);
    let (sigma3_lower, sigma3) = sigma3_nonneg(w, -big_a);
    let a = (2.0 * big_a / (n * (n - 1.0) * s1)).sqrt();
    let h = shift_hypotheses(w, s2, a);
    let largeness = w[0].powf(1.5) >= 6.0 * (n - 2.0) * (2.0 * big_a / (n * (n - 1.0))).sqrt();

    let tail = max_abs_tail(w);
    let parts = vec![
        MarginPart::new("sigma2_bound", s2, 5.0 / 7.0 * (s1 - w[0]) * w[0]),
        MarginPart::new(
            "diagonal_bound",
            (n - 1.0).powi(2) * a + 7.0 * (n - 1.0) / (5.0 * w[0]),
            tail,
        ),
        MarginPart::new(
            "diagonal_bound_u11",
            (n - 1.0).powi(2) * (2.0 * big_a / (n * (n - 1.0) * w[0])).sqrt() + 7.0 * (n - 1.0) / (5.0 * w[0]),
            tail,
        ),
    ];
    Ok(MarginReport::build(
        "corollary_A",
        vec![
            ("diagonal", input.diagonal),
            ("gamma2", in_cone),
            ("sigma2_one", on_sigma2_surface(w)),
            ("A_nonnegative", big_a >= 0.0),
            ("sigma3_lower_bound", sigma3_lower),
            ("u11_bound", w[0] >= 6.0 * (n - 2.0) * big_a / n),
            ("a_bound", h.a_bound),
            ("sigma3_shift_nonnegative", h.sigma3_shift),
            ("w11_large", h.w11_large),
        ],
        parts,
        vec![
            ("w", w.clone()),
            ("A", vec![big_a]),
            ("a", vec![a]),
            ("sigma3", vec![sigma3]),
            ("sigma3_shift", vec![h.sigma3_shift_value]),
        ],
    )
    .with_diagnostic("largeness", largeness)
    .with_sorted(input.sorted))
}

/// Coefficients of `σ₁²σ₂^{11}Λ₁` as a quadratic form in `(u₂₂₁, u₃₃₁)`:
/// returns `(A, C, B)` for `A x² + C y² + 2B xy`.
pub fn quadratic_form_coefficients(l: &[f64; 3], eps: f64) -> (f64, f64, f64) {
    let [l1, l2, l3] = *l;
    let s1 = l1 + l2 + l3;
    let a = 2.0 * s1 * (s1 + l3) - (1.0 + eps) * (l1 - l2).powi(2);
    let c = 2.0 * s1 * (s1 + l2) - (1.0 + eps) * (l1 - l3).powi(2);
    let b = 2.0 * s1 * l1 - (1.0 + eps) * (l2 - l1) * (l3 - l1);
    (a, c, b)
}

fn inequality_la(l: &[f64; 3], e: f64) -> (f64, f64) {
    let [l1, l2, l3] = *l;
    let (q1, q2, q3) = (l1 * l1, l2 * l2, l3 * l3);
    let p2 = (1.0 - e) * q2 + 4.0 * q3 + 3.0 - e;
    let p3 = (1.0 - e) * q3 + 4.0 * q2 + 3.0 - e;
    let lhs = ((1.0 - e) * q1 + 3.0 + e) * ((5.0 - e) * q2 + (5.0 - e) * q3 + 2.0 * (4.0 + e) * l2 * l3 + 6.0)
        + p2 * p3
        + 2.0 * e * l1 * l2 * p3
        + 2.0 * e * l1 * l3 * p2;
    let rhs = 4.0 * (2.0 + e).powi(2) * q2 * q3 - 4.0 * e * e * q1 * l2 * l3;
    (lhs, rhs)
}

/// The `n = 3` quadratic-form inequality behind the `log Δu` estimate, at
/// a given `ε`: the discriminant condition `AC ≥ B²` and its expanded form
/// (la). The first entry of `lambda` is the distinguished eigenvalue.
pub fn check_quadratic_form_epsilon(lambda: &Spectrum, eps: f64) -> Result<MarginReport, IneqError> {
    if lambda.n() != 3 {
        return Err(IneqError::Dimension { expected: 3, got: lambda.n() });
    }
    let v = lambda.values();
    let l = [v[0], v[1], v[2]];
    let (in_cone, _, _) = gamma2(v);
    let (a, c, b) = quadratic_form_coefficients(&l, eps);
    let (la_lhs, la_rhs) = inequality_la(&l, eps);
    Ok(MarginReport::build(
        "quadratic_form_eps",
        vec![("gamma2", in_cone), ("sigma2_one", on_sigma2_surface(v))],
        vec![
            MarginPart::new("discriminant", a * c, b * b),
            MarginPart::new("la", la_lhs, la_rhs),
        ],
        vec![("lambda", v.to_vec()), ("eps", vec![eps])],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> SymTensor {
        SymTensor::diag(v).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn lemma_cq_examples() {
        let w = diag(&[2.0, 2.0, -0.75]);
        let r = check_lemma_cq(&w, &SymTensor::identity(3).unwrap()).unwrap();
        assert!(!r.vacuous);
        assert_eq!(r.witness["eta"], vec![6.5]);
        assert!(close(r.lhs, -6.0, 1e-14));
        assert!(close(r.rhs, -9.025, 1e-12));
        assert!(close(r.margin, 3.025, 1e-12));

        let r = check_lemma_cq(&w, &SymTensor::zeros(3).unwrap()).unwrap();
        assert_eq!((r.lhs, r.rhs, r.margin), (0.0, 0.0, 0.0));

        let r = check_lemma_cq(&diag(&[2.0, 0.5]), &SymTensor::identity(2).unwrap()).unwrap();
        assert!(!r.vacuous);
        assert!(r.relative_margin() >= -1e-12);
    }

    #[test]
    fn lemma_cq_homogeneity() {
        let w = diag(&[3.0, 1.0, -0.5, 0.25]);
        let xi = diag(&[0.7, -1.3, 2.1, 0.4]);
        let base = check_lemma_cq(&w, &xi).unwrap();
        for c in [2.0, 10.0] {
            let r = check_lemma_cq(&w, &xi.scaled(c)).unwrap();
            let c2 = c * c;
            assert!(close(r.lhs, c2 * base.lhs, 1e-12 * c2 * base.lhs.abs()));
            assert!(close(r.rhs, c2 * base.rhs, 1e-12 * c2 * base.rhs.abs()));
            assert!(close(r.margin, c2 * base.margin, 1e-11 * c2 * (base.lhs.abs() + base.rhs.abs())));
        }
    }

    #[test]
    fn lemma_cq_sorts_and_flags() {
        let w = diag(&[-0.75, 2.0, 2.0]);
        let xi = diag(&[1.0, 0.0, 0.0]);
        let r = check_lemma_cq(&w, &xi).unwrap();
        assert!(r.sorted);
        assert_eq!(r.witness["w"], vec![2.0, 2.0, -0.75]);
        assert_eq!(r.witness["xi"], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn lemma_cq_outside_cone_is_vacuous() {
        let r = check_lemma_cq(&diag(&[1.0, -2.0, -2.0]), &SymTensor::identity(3).unwrap()).unwrap();
        assert!(r.vacuous);
        assert!(!r.hypotheses["gamma2"]);
        assert!(!r.violates(1e-9));

        let mut e = vec![0.0; 9];
        e[0] = 2.0;
        e[4] = 2.0;
        e[8] = -0.75;
        e[1] = 0.1;
        e[3] = 0.1;
        let off = SymTensor::new(3, e).unwrap();
        assert!(check_lemma_cq(&off, &SymTensor::identity(3).unwrap()).unwrap().vacuous);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let err = check_lemma_cq(&diag(&[2.0, 0.5]), &SymTensor::identity(3).unwrap()).unwrap_err();
        assert_eq!(err, IneqError::Dimension { expected: 2, got: 3 });
    }

    #[test]
    fn corollary_third_derivative_examples() {
        let w = diag(&[2.0, 2.0, -0.75]);
        let r = check_corollary_third_derivative(&w, &diag(&[0.0, 4.0, -1.25])).unwrap();
        assert!(!r.vacuous, "{r:?}");
        assert_eq!((r.lhs, r.rhs, r.margin), (10.0, 0.0, 10.0));

        let r = check_corollary_third_derivative(&w, &SymTensor::zeros(3).unwrap()).unwrap();
        assert_eq!(r.margin, 0.0);

        // η = 1.25·1 + 1.25·t + 4·s = 0 with t = 1 gives s = −0.625.
        let r = check_corollary_third_derivative(&w, &diag(&[1.0, 1.0, -0.625])).unwrap();
        assert!(!r.vacuous);
        assert!(close(r.lhs, 0.5, 1e-14));
        assert!(close(r.rhs, 0.4, 1e-14));
        assert!(r.margin >= -1e-12);
    }

    #[test]
    fn corollary_third_derivative_constraints() {
        let w = diag(&[2.0, 2.0, -0.75]);
        let r = check_corollary_third_derivative(&w, &SymTensor::identity(3).unwrap()).unwrap();
        assert!(r.vacuous);
        assert!(!r.hypotheses["eta_zero"]);

        let r = check_corollary_third_derivative(&diag(&[3.0, 2.0, 1.0]), &SymTensor::zeros(3).unwrap()).unwrap();
        assert!(!r.hypotheses["sigma2_one"]);
    }

    #[test]
    fn lemma_shift_examples() {
        let w = diag(&[1.5, 1.0, -0.2]);
        let r = check_lemma_shift(&w, 0.2).unwrap();
        assert!(!r.vacuous, "{:?}", r.hypotheses);
        assert_eq!(r.witness["sigma3_shift"], vec![0.0]);
        let up = r.part("chain_upper").unwrap();
        let lo = r.part("chain_lower").unwrap();
        assert!(close(up.lhs, 7.0 / 6.0, 1e-14));
        assert!(close(up.rhs, 1.04, 1e-14));
        assert!(close(lo.rhs, 1.0, 1e-14));
        let d = r.part("diagonal_bound").unwrap();
        assert!(close(d.lhs, 0.8 + 14.0 / 7.5, 1e-14));
        assert!(close(d.rhs, 1.0, 0.0));
        assert!(close(d.margin, 1.6667, 1e-4));
        assert!(r.parts.iter().all(|p| p.margin >= 0.0));
    }

    #[test]
    fn lemma_shift_zero_shift_on_gamma3() {
        let c = 1.0 / 3f64.sqrt();
        let r = check_lemma_shift(&diag(&[c, c, c]), 0.0).unwrap();
        assert!(!r.vacuous);
        let up = r.part("chain_upper").unwrap();
        assert!(close(up.lhs, 7.0 / 6.0, 1e-12));
        assert!(close(up.rhs, 1.0, 1e-12));
        assert!(r.parts.iter().all(|p| p.margin >= 0.0));
    }

    #[test]
    fn lemma_shift_vacuous_when_shift_leaves_gamma3() {
        let r = check_lemma_shift(&diag(&[2.0, 2.0, -0.75]), 0.1).unwrap();
        assert!(r.vacuous);
        assert!(!r.hypotheses["sigma3_shift_nonnegative"]);
        assert!(close(r.witness["sigma3_shift"][0], -2.8665, 1e-12));
    }

    #[test]
    fn lemma_shift_n2_skips_a_bound() {
        let r = check_lemma_shift(&diag(&[2.0, 0.5]), 50.0).unwrap();
        assert!(r.hypotheses["a_bound"]);
        assert!(r.hypotheses["sigma3_shift_nonnegative"]);
    }

    #[test]
    fn corollary_a_examples() {
        let w = diag(&[1.5, 1.0, -0.2]);
        let r = check_corollary_a(&w, 0.3).unwrap();
        assert!(!r.vacuous, "{:?}", r.hypotheses);
        let a = r.witness["a"][0];
        assert!(close(a, (0.6f64 / 13.8).sqrt(), 1e-15));
        assert!(close(a, 0.2085, 1e-4));
        assert!(r.parts.iter().all(|p| p.margin >= 0.0), "{:?}", r.parts);
        // The sufficient largeness route fails here even though W₁₁ > 6(n−2)a.
        assert!(!r.diagnostics["largeness"]);

        let c = 1.0 / 3f64.sqrt();
        let r = check_corollary_a(&diag(&[c, c, c]), 0.0).unwrap();
        assert!(!r.vacuous);
        assert_eq!(r.witness["a"], vec![0.0]);
    }

    #[test]
    fn corollary_a_rejects_violated_sigma3_bound() {
        let r = check_corollary_a(&diag(&[1.5, 1.0, -0.2]), 0.1).unwrap();
        assert!(r.vacuous);
        assert!(!r.hypotheses["sigma3_lower_bound"]);
    }

    #[test]
    fn quadratic_form_examples() {
        let cases: [([f64; 3], f64); 3] = [
            ([1.0, 1.0, 0.0], 1.0 / 25.0),
            ([3f64.sqrt() / 3.0; 3], 0.0),
            ([2.0, 2.0, -0.75], 1.0 / 25.0),
        ];
        for (l, eps) in cases {
            let r = check_quadratic_form_epsilon(&Spectrum::new(l.to_vec()).unwrap(), eps).unwrap();
            assert!(!r.vacuous, "{l:?}");
            for p in &r.parts {
                assert!(p.margin >= 0.0, "{l:?} {p:?}");
            }
        }
    }

    #[test]
    fn discriminant_equals_expanded_form_on_surface() {
        let l = [2.0, 2.0, -0.75];
        for eps in [0.0, 0.04, 0.2, 0.4] {
            let r = check_quadratic_form_epsilon(&Spectrum::new(l.to_vec()).unwrap(), eps).unwrap();
            let d = r.part("discriminant").unwrap().margin;
            let la = r.part("la").unwrap().margin;
            assert!(close(d, la, 1e-10 * (1.0 + d.abs())), "eps={eps}: {d} vs {la}");
        }
    }

    #[test]
    fn quadratic_form_requires_n3() {
        assert!(check_quadratic_form_epsilon(&Spectrum::new(vec![1.0, 1.0]).unwrap(), 0.0).is_err());
    }
}
