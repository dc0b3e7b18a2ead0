//! One checker per inequality. Each returns the sampled `(quantity, bound)`
//! pairs; a sample passes when `quantity ≤ bound + tol`.

use crate::matmodel::{MatError, MatrixOperator};
use crate::stepfn::{boundaries_in, check_points_in, psi_at, psi_transform, GridFn, GridPoint, MonotoneStepFn, PointwiseMap};

use super::VerifyError;

/// Tolerances. `rel` scales with the bound: `rel·(1 + |bound|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    /// Majorization: `majorization·(1 + ‖T‖ + ‖S‖)`.
    pub majorization: f64,
    /// Absolute tolerance for quantities that must vanish.
    pub vanishing: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-8, majorization: 1e-10, vanishing: 1e-10 }
    }
}

impl Tolerance {
    /// One value for every check.
    pub fn uniform(x: f64) -> Self {
        Tolerance { rel: x, majorization: x, vanishing: x }
    }

    fn scaled(&self, bound: f64) -> f64 {
        self.rel * (1.0 + bound.abs())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    /// Which side or form of the inequality, e.g. `upper`.
    pub part: &'static str,
    /// Where it was sampled, e.g. `3/64` or `s=1/8;t=3/64`.
    pub point: String,
    pub quantity: f64,
    pub bound: f64,
    pub tol: f64,
}

impl Sample {
    pub fn margin(&self) -> f64 {
        self.bound - self.quantity
    }

    pub fn pass(&self) -> bool {
        self.quantity <= self.bound + self.tol
    }
}

/// The samples of one check on one input.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckOutcome {
    pub samples: Vec<Sample>,
}

impl CheckOutcome {
    pub fn violations(&self) -> usize {
        self.samples.iter().filter(|s| !s.pass()).count()
    }

    pub fn worst_margin(&self) -> Option<f64> {
        self.samples.iter().map(Sample::margin).reduce(f64::min)
    }

    fn push(&mut self, part: &'static str, point: impl ToString, quantity: f64, bound: f64, tol: f64) {
        self.samples.push(Sample { part, point: point.to_string(), quantity, bound, tol });
    }
}

fn require_self_adjoint(a: &MatrixOperator, what: &str) -> Result<(), VerifyError> {
    if a.is_self_adjoint() {
        Ok(())
    } else {
        Err(VerifyError::Input(format!("{what} must be self-adjoint")))
    }
}

fn require_positive(a: &MatrixOperator, what: &str) -> Result<(), VerifyError> {
    require_self_adjoint(a, what)?;
    let min = a.eigenvalues().and_then(|v| v.last().copied()).unwrap_or(0.0);
    if min < -1e-12 * a.norm() {
        return Err(VerifyError::Input(format!("{what} has eigenvalue {min} < 0")));
    }
    Ok(())
}

fn same_dimension(a: &MatrixOperator, b: &MatrixOperator) -> Result<usize, VerifyError> {
    if a.n() != b.n() {
        return Err(MatError::DimensionMismatch { left: a.n(), right: b.n() }.into());
    }
    Ok(a.n())
}

fn log_mu_exp_product(t: &MatrixOperator, s: &MatrixOperator) -> Result<MonotoneStepFn, VerifyError> {
    let product = t.exp()?.product(&s.exp()?)?;
    Ok(MonotoneStepFn::from_grid(product.mu().map(PointwiseMap::Log)?)?)
}

/// `|∫_{2t}^{1-2t} (log μ(e^T e^S) - λ(T) - λ(S))| ≤ 8t(μ(t,T) + μ(t,S))` for
/// boundaries `t ∈ (0, 1/4)`.
pub fn check_main_product_lemma(t: &MatrixOperator, s: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    require_self_adjoint(t, "T")?;
    require_self_adjoint(s, "S")?;
    let n = same_dimension(t, s)?;
    let log_mu = log_mu_exp_product(t, s)?;
    let integrand = log_mu.sub(t.lambda()?.as_grid())?.sub(s.lambda()?.as_grid())?;
    let (mu_t, mu_s) = (t.mu(), s.mu());
    let mut out = CheckOutcome::default();
    for p in boundaries_in(n, 0.0, 0.25) {
        let x = p.value();
        let lhs = integrand.integrate(2.0 * x, 1.0 - 2.0 * x)?.abs();
        let rhs = 8.0 * x * (mu_t.eval_at(p) + mu_s.eval_at(p));
        out.push("integral", p, lhs, rhs, tol.scaled(rhs));
    }
    Ok(out)
}

/// `-μ̃((1-u)/2,T) - μ̃((1-u)/2,S) ≤ log μ(u, e^T e^S) ≤ μ(u/2,T) + μ(u/2,S)`.
///
/// Midpoints are sampled once. At a cell boundary `u` the right-hand values are
/// compared (label `u`), and so are the left limits (label `u-`), where every
/// function switches to the opposite one-sided convention.
pub fn check_pointwise_product_bounds(t: &MatrixOperator, s: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    require_self_adjoint(t, "T")?;
    require_self_adjoint(s, "S")?;
    let n = same_dimension(t, s)?;
    let log_mu = log_mu_exp_product(t, s)?;
    let log_mu_left = log_mu.left_continuous_version();
    let (mu_t, mu_s) = (t.mu(), s.mu());
    let (mu_t_left, mu_s_left) = (mu_t.left_continuous_version(), mu_s.left_continuous_version());
    let mut out = CheckOutcome::default();
    for u in check_points_in(n, 0.0, 1.0) {
        let half = u.half();
        let mirror = u.complement().half();
        // right side of u
        let mid = log_mu.eval_at(u);
        let upper = mu_t.eval_at(half) + mu_s.eval_at(half);
        let lower = -mu_t_left.eval_at(mirror) - mu_s_left.eval_at(mirror);
        out.push("upper", u, mid, upper, tol.scaled(upper));
        out.push("lower", u, lower, mid, tol.scaled(mid));
        if (u.num * n as u64).is_multiple_of(u.den) {
            let mid = log_mu_left.eval_at(u);
            let upper = mu_t_left.eval_at(half) + mu_s_left.eval_at(half);
            let lower = -mu_t.eval_at(mirror) - mu_s.eval_at(mirror);
            out.push("upper", format!("{u}-"), mid, upper, tol.scaled(upper));
            out.push("lower", format!("{u}-"), lower, mid, tol.scaled(mid));
        }
    }
    Ok(out)
}

/// `∫₀ᵗ μ(T+S) ≤ ∫₀ᵗ (μ(T) + μ(S)) ≤ ∫₀^{2t} μ(T+S)` for boundaries `t ≤ 1/2`.
pub fn check_majorization(t: &MatrixOperator, s: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    require_positive(t, "T")?;
    require_positive(s, "S")?;
    let n = same_dimension(t, s)?;
    let sum = t.sum(s)?.mu();
    let (mu_t, mu_s) = (t.mu(), s.mu());
    let abs_tol = tol.majorization * (1.0 + t.norm() + s.norm());
    let mut out = CheckOutcome::default();
    for k in 1..=n / 2 {
        let p = GridPoint::new(k as u64, n as u64);
        let x = p.value();
        let left = sum.integrate(0.0, x)?;
        let middle = mu_t.integrate(0.0, x)? + mu_s.integrate(0.0, x)?;
        let right = sum.integrate(0.0, (2.0 * x).min(1.0))?;
        out.push("lower", p, left, middle, abs_tol);
        out.push("upper", p, middle, right, abs_tol);
    }
    Ok(out)
}

/// `|Ψ(μ(T+S) - μ(T) - μ(S))(t)| ≤ 4μ(t, T+S)` for positive `T, S`.
pub fn check_sum_pos_bound(t: &MatrixOperator, s: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    require_positive(t, "T")?;
    require_positive(s, "S")?;
    let n = same_dimension(t, s)?;
    let sum = t.sum(s)?.mu();
    let h = sum.sub(&t.mu())?.sub(&s.mu())?;
    let psi = psi_transform(&h);
    let mut out = CheckOutcome::default();
    for p in check_points_in(n, 0.0, 0.5) {
        let q = psi.eval_at(p).abs();
        let b = 4.0 * sum.eval_at(p);
        out.push("psi", p, q, b, tol.scaled(b));
    }
    Ok(out)
}

/// `λ(T) - μ(T₊) + μ(T₋)`, with `μ(T±)` read off the operators `T±`.
pub fn tpm_defect(t: &MatrixOperator) -> Result<GridFn, VerifyError> {
    require_self_adjoint(t, "T")?;
    let plus = t.positive_part()?.mu();
    let minus = t.negative_part()?.mu();
    Ok(t.lambda()?.sub(&plus)?.add(&minus)?)
}

/// `t* = min(s₊, 1 - s₊, 1 - s₋)` with `s± = τ(supp T±)`, or `None` when
/// `T₊ = 0` or `T₋ = 0`.
///
/// For `t ≤ s₊` the first `t` of `λ(T)` is `μ(T₊)`, and for `1 - t ≥ max(s₊, s₋)`
/// the last `t` of `λ(T)` integrates to `-∫₀ᵗ μ(T₋)` while `μ(T±)` vanish there.
/// Since the defect integrates to zero over `(0,1)`, `∫_t^{1-t}` of it vanishes.
pub fn tpm_threshold(t: &MatrixOperator) -> Result<Option<f64>, VerifyError> {
    let lambda = t.eigenvalues().ok_or_else(|| VerifyError::Input("T must be self-adjoint".into()))?;
    let n = lambda.len() as f64;
    let cut = 1e-12 * t.norm();
    let s_plus = lambda.iter().filter(|v| **v > cut).count() as f64 / n;
    let s_minus = lambda.iter().filter(|v| **v < -cut).count() as f64 / n;
    if s_plus == 0.0 || s_minus == 0.0 {
        return Ok(None);
    }
    Ok(Some(s_plus.min(1.0 - s_plus).min(1.0 - s_minus)))
}

/// `Ψ(λ(T) - μ(T₊) + μ(T₋))` vanishes for `t ≤ t*` and is at most
/// `2‖T‖(1-2t)/t` above it. Without both signs it vanishes identically.
pub fn check_tpm_vanishing(t: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    let defect = tpm_defect(t)?;
    let psi = psi_transform(&defect);
    let threshold = tpm_threshold(t)?;
    let norm = t.norm();
    let mut out = CheckOutcome::default();
    for p in check_points_in(t.n(), 0.0, 0.5) {
        let x = p.value();
        let q = psi.eval_at(p).abs();
        match threshold {
            Some(ts) if x > ts => {
                let b = 2.0 * norm * (1.0 - 2.0 * x) / x;
                out.push("bounded", p, q, b, tol.scaled(b));
            }
            _ => out.push("zero", p, q, 0.0, tol.vanishing),
        }
    }
    Ok(out)
}

/// `|Ψ(λ(T) + λ(S) - λ(T+S))(t)| ≤ 12μ(t, A) + C` for `t < 1/2`, where
/// `A = (T+S)₊ + T₋ + S₋ = (T+S)₋ + T₊ + S₊` and `C` sums `sup|Ψ(λ(X) - μ(X₊) + μ(X₋))|`
/// over `X ∈ {T, S, T+S}`.
///
/// Writing `λ(X) = μ(X₊) - μ(X₋) + g_X`, the quantity splits into the three
/// `g` terms (giving `C`) and `(Σ₂ - μ(A)) - (Σ₁ - μ(A))`, with `Σ₁, Σ₂` the sums
/// of `μ` over the three summands of each form of `A`. For three positive
/// summands, `|∫₀ᵗ (μ(A) - Σ)| ≤ ∫_t^{3t} μ(A) ≤ 2tμ(t,A)` and the tail over
/// `(1-t,1)` is at most `tμ(t,A) + 3tμ(t,A)`; as the integral over `(0,1)`
/// vanishes, each bracket is at most `6μ(t,A)` after division by `t`.
pub fn check_sum_lemma_composite(t: &MatrixOperator, s: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    require_self_adjoint(t, "T")?;
    require_self_adjoint(s, "S")?;
    let n = same_dimension(t, s)?;
    let ts = t.sum(s)?;
    let h = t.lambda()?.add(s.lambda()?.as_grid())?.sub(ts.lambda()?.as_grid())?;
    let psi = psi_transform(&h);
    let a = ts.positive_part()?.sum(&t.negative_part()?)?.sum(&s.negative_part()?)?;
    let mu_a = a.mu();
    let mut constant = 0.0;
    for x in [t, s, &ts] {
        constant += psi_transform(&tpm_defect(x)?).sup_abs();
    }
    let mut out = CheckOutcome::default();
    for p in check_points_in(n, 0.0, 0.5) {
        let q = psi.eval_at(p).abs();
        let b = 12.0 * mu_a.eval_at(p) + constant;
        out.push("psi", p, q, b, tol.scaled(b));
    }
    Ok(out)
}

/// `|(1/r)τ(1_{[0,μ(r,T)]}(|T|)·T) - (Ψλ(T))(r)| ≤ 2μ(r,T)` for `r < 1/2`.
pub fn check_commutator_criterion(t: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    require_self_adjoint(t, "T")?;
    let n = t.n();
    let abs = t.polar_abs()?;
    let lambda = t.lambda()?;
    let mu = t.mu();
    let entries = t.entries();
    let mut out = CheckOutcome::default();
    for p in check_points_in(n, 0.0, 0.5) {
        let r = p.value();
        let level = mu.eval_at(p);
        // ties with eigenvalues of |T| at the level belong to the closed interval
        let top = level * (1.0 + 1e-9) + 1e-300;
        let proj = abs.functional_calculus_entries(|x| if x <= top { 1.0 } else { 0.0 })?;
        let mut tr = 0.0;
        for i in 0..n {
            for j in 0..n {
                tr += (proj[(i, j)] * entries[(j, i)]).re;
            }
        }
        let lhs = tr / n as f64 / r;
        let q = (lhs - psi_at(&lambda, r)).abs();
        let b = 2.0 * level;
        out.push("discrepancy", p, q, b, tol.scaled(b));
    }
    Ok(out)
}

/// `μ(s+t, A+B) ≤ μ(s,A) + μ(t,B)` and `μ(s+t, AB) ≤ μ(s,A)μ(t,B)` over all
/// boundary pairs with `s + t < 1`; for each `s` the worst `t` is kept.
pub fn check_standard_inequalities(a: &MatrixOperator, b: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    let n = same_dimension(a, b)?;
    let sum = a.sum(b)?;
    let prod = a.product(b)?;
    let (sa, sb) = (a.singular_values(), b.singular_values());
    let (ss, sp) = (sum.singular_values(), prod.singular_values());
    let mut out = CheckOutcome::default();
    for i in 0..n {
        let mut worst_sum: Option<(usize, f64, f64)> = None;
        let mut worst_prod: Option<(usize, f64, f64)> = None;
        for j in 0..n - i {
            let (q, bd) = (ss[i + j], sa[i] + sb[j]);
            if worst_sum.is_none_or(|(_, wq, wb)| bd - q < wb - wq) {
                worst_sum = Some((j, q, bd));
            }
            let (q, bd) = (sp[i + j], sa[i] * sb[j]);
            if worst_prod.is_none_or(|(_, wq, wb)| bd - q < wb - wq) {
                worst_prod = Some((j, q, bd));
            }
        }
        for (part, worst) in [("sum", worst_sum), ("product", worst_prod)] {
            if let Some((j, q, bd)) = worst {
                out.push(part, format!("s={i}/{n};t={j}/{n}"), q, bd, tol.scaled(bd));
            }
        }
    }
    Ok(out)
}

/// `log(1 + μ(A+B)) ≤ log((1 + D₂μ(A))(1 + D₂μ(B)))`, and the same for `AB`.
pub fn check_log_closure(a: &MatrixOperator, b: &MatrixOperator, tol: &Tolerance) -> Result<CheckOutcome, VerifyError> {
    let n = same_dimension(a, b)?;
    let sum = a.sum(b)?.mu();
    let prod = a.product(b)?.mu();
    let (mu_a, mu_b) = (a.mu(), b.mu());
    let mut out = CheckOutcome::default();
    for u in check_points_in(n, 0.0, 1.0) {
        let half = u.half();
        let bound = mu_a.eval_at(half).ln_1p() + mu_b.eval_at(half).ln_1p();
        out.push("sum", u, sum.eval_at(u).ln_1p(), bound, tol.scaled(bound));
        out.push("product", u, prod.eval_at(u).ln_1p(), bound, tol.scaled(bound));
    }
    Ok(out)
}

/// Relative gap between `det_τ(AB)` and `det_τ(A)det_τ(B)`, against `1e-9`.
pub fn check_det_multiplicativity(a: &MatrixOperator, b: &MatrixOperator) -> Result<CheckOutcome, VerifyError> {
    same_dimension(a, b)?;
    let phi = crate::traces::TraceFunctional::Integral { c: 1.0 };
    let r = crate::dets::det_multiplicativity_check(a, b, &phi)?;
    let mut out = CheckOutcome::default();
    out.push("relative", "pair", r.relative_discrepancy, 1e-9, 0.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> MatrixOperator {
        MatrixOperator::from_real_diagonal(v).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn zero_inputs_give_zero_quantities() {
        let z = MatrixOperator::zeros(4);
        let o = check_main_product_lemma(&z, &z, &tol()).unwrap();
        assert!(o.samples.iter().all(|s| s.quantity == 0.0 && s.bound == 0.0));
        assert_eq!(o.violations(), 0);
        let o = check_pointwise_product_bounds(&z, &z, &tol()).unwrap();
        assert!(o.samples.iter().all(|s| s.quantity == 0.0 && s.bound == 0.0));
        let o = check_commutator_criterion(&z, &tol()).unwrap();
        assert!(o.samples.iter().all(|s| s.quantity == 0.0));
        let o = check_log_closure(&z, &z, &tol()).unwrap();
        assert!(o.samples.iter().all(|s| s.quantity == 0.0 && s.bound == 0.0));
    }

    #[test]
    fn opposite_exponents_give_identity_product() {
        let t = diag(&[1.5, -0.5, 0.25, 2.0]);
        let s = t.scaled(-1.0).unwrap();
        let o = check_pointwise_product_bounds(&t, &s, &tol()).unwrap();
        assert_eq!(o.violations(), 0);
        assert!(o.samples.iter().filter(|s| s.part == "upper").all(|s| s.quantity.abs() < 1e-15));
    }

    #[test]
    fn aligned_diagonal_pairs() {
        let t = diag(&[2.0, 1.0, -0.5, -1.0]);
        let s = diag(&[1.0, 0.5, 0.0, -2.0]);
        for o in [
            check_main_product_lemma(&t, &s, &tol()).unwrap(),
            check_pointwise_product_bounds(&t, &s, &tol()).unwrap(),
            check_commutator_criterion(&t, &tol()).unwrap(),
        ] {
            assert_eq!(o.violations(), 0);
        }
        // simultaneously diagonal with matching order: λ(T)+λ(S) = λ(T+S)
        let o = check_sum_lemma_composite(&t, &s, &tol()).unwrap();
        assert!(o.samples.iter().all(|s| s.quantity < 1e-15));
    }

    #[test]
    fn majorization_two_by_two() {
        let t = diag(&[2.0, 0.0]);
        let s = diag(&[0.0, 2.0]);
        let o = check_majorization(&t, &s, &tol()).unwrap();
        // t = 1/2: ∫₀^{1/2} μ(T+S) = 1, middle = 1 + 1 = 2, ∫₀¹ μ(T+S) = 2
        let q: Vec<(f64, f64)> = o.samples.iter().map(|s| (s.quantity, s.bound)).collect();
        assert_eq!(q, vec![(1.0, 2.0), (2.0, 2.0)]);
        let z = MatrixOperator::zeros(2);
        let o = check_majorization(&t, &z, &tol()).unwrap();
        assert!(o.samples.iter().filter(|s| s.part == "lower").all(|s| s.quantity == s.bound));
        assert!(check_majorization(&diag(&[1.0, -1.0]), &z, &tol()).is_err());
    }

    #[test]
    fn sum_pos_degenerate_cases() {
        let one = MatrixOperator::identity(3);
        let o = check_sum_pos_bound(&one, &one, &tol()).unwrap();
        assert!(o.samples.iter().all(|s| s.quantity == 0.0));
        let t = diag(&[3.0, 1.0, 0.5]);
        let o = check_sum_pos_bound(&t, &MatrixOperator::zeros(3), &tol()).unwrap();
        assert!(o.samples.iter().all(|s| s.quantity == 0.0));
    }

    #[test]
    fn tpm_two_by_two() {
        let t = diag(&[1.0, -1.0]);
        assert_eq!(tpm_threshold(&t).unwrap(), Some(0.5));
        let d = tpm_defect(&t).unwrap();
        // λ = [1,-1], μ(T₊) = [1,0], μ(T₋) = [1,0]
        assert_eq!(d.values(), &[1.0, -1.0]);
        let o = check_tpm_vanishing(&t, &tol()).unwrap();
        assert!(o.samples.iter().all(|s| s.part == "zero" && s.quantity == 0.0));
        let pos = diag(&[2.0, 1.0, 0.0]);
        assert_eq!(tpm_threshold(&pos).unwrap(), None);
        let o = check_tpm_vanishing(&pos, &tol()).unwrap();
        assert!(o.samples.iter().all(|s| s.quantity == 0.0));
    }

    #[test]
    fn tpm_defect_is_odd_for_matrices() {
        // two positive and one negative eigenvalue: s₊ = 2/3, s₋ = 1/3
        let t = diag(&[3.0, 1.0, -2.0]);
        assert!((tpm_threshold(&t).unwrap().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // λ(u) = μ(u,T₊) - μ(1-u,T₋), so the defect is μ(u,T₋) - μ(1-u,T₋)
        assert_eq!(tpm_defect(&t).unwrap().values(), &[2.0, 0.0, -2.0]);
        // doubled multiplicities put check points above t* = 1/3
        let o = check_tpm_vanishing(&diag(&[3.0, 3.0, 1.0, 1.0, -2.0, -2.0]), &tol()).unwrap();
        assert_eq!(o.violations(), 0);
        assert!(o.samples.iter().any(|s| s.part == "bounded"));
        // eigenvalues carry solver rounding
        assert!(o.samples.iter().all(|s| s.quantity < 1e-13), "{:?}", o.samples);
        let k = diag(&[1.0, 0.0, -1.0, -1.0]);
        assert_eq!(tpm_defect(&k).unwrap().values(), &[1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn commutator_two_by_two() {
        let t = diag(&[1.0, -1.0]);
        let o = check_commutator_criterion(&t, &tol()).unwrap();
        assert!(!o.samples.is_empty());
        for s in &o.samples {
            assert!(s.quantity.abs() < 1e-15);
            assert_eq!(s.margin(), 2.0);
        }
    }

    #[test]
    fn standard_inequalities_trivial_cases() {
        let a = diag(&[3.0, 2.0, 1.0]);
        let o = check_standard_inequalities(&a, &MatrixOperator::zeros(3), &tol()).unwrap();
        assert_eq!(o.violations(), 0);
        let one = MatrixOperator::identity(3);
        let o = check_standard_inequalities(&one, &one, &tol()).unwrap();
        assert!(o.samples.iter().filter(|s| s.part == "product").all(|s| s.quantity == 1.0 && s.bound == 1.0));
    }

    #[test]
    fn log_closure_with_identity() {
        let a = diag(&[4.0, 1.0, 0.25]);
        let one = MatrixOperator::identity(3);
        let o = check_log_closure(&a, &one, &tol()).unwrap();
        assert_eq!(o.violations(), 0);
        for s in o.samples.iter().filter(|s| s.part == "product") {
            // log(1+μ(u,A)) against log 2 + log(1+μ(u/2,A))
            assert!(s.margin() >= 2f64.ln() - 1e-15);
        }
    }

    #[test]
    fn det_multiplicativity_diagonal() {
        let o = check_det_multiplicativity(&diag(&[1.0, 4.0]), &diag(&[9.0, 1.0])).unwrap();
        assert_eq!(o.violations(), 0);
        assert!(o.samples[0].quantity < 1e-15);
    }

    #[test]
    fn non_self_adjoint_input_rejected() {
        let a = MatrixOperator::from_fn(2, |i, j| num_complex::Complex64::new((i + 2 * j) as f64, 0.0)).unwrap();
        assert!(check_main_product_lemma(&a, &a, &tol()).is_err());
        assert!(check_commutator_criterion(&a, &tol()).is_err());
    }
}
