//! Closed-form singular value functions of (possibly unbounded) positive
//! operators, carrying the tail metadata that membership decisions rely on.

use std::fmt;
use std::sync::Arc;

use crate::quad;
use crate::stepfn::MonotoneStepFn;

use super::{Psi, SpaceError};

/// Behaviour of a profile as `t → 0`, up to constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    Bounded,
    /// `f(t) ~ C·t^{-a}·log(e/t)^b`.
    PowerLog { a: f64, b: f64 },
    /// `f(t) ~ exp(scale·t^{-a}·log(e/t)^b)` with `scale > 0` and `(a, b) ≠ (0, 1)`.
    ExpPowerLog { scale: f64, a: f64, b: f64 },
    Unknown,
}

impl Tail {
    /// Normal form of a power-log tail: `a = 0, b ≤ 0` is bounded.
    pub fn power_log(a: f64, b: f64) -> Tail {
        if a == 0.0 && b <= 0.0 {
            Tail::Bounded
        } else {
            Tail::PowerLog { a, b }
        }
    }

    /// Tail of `exp(g)` where `g ~ scale·t^{-a}·log(e/t)^b`.
    pub fn exp_of(scale: f64, a: f64, b: f64) -> Tail {
        if scale <= 0.0 || (a == 0.0 && b <= 0.0) {
            Tail::Bounded
        } else if a == 0.0 && b == 1.0 {
            // exp(s·log(e/t)) = e^s·t^{-s}
            Tail::PowerLog { a: scale, b: 0.0 }
        } else {
            Tail::ExpPowerLog { scale, a, b }
        }
    }

    /// Tail of `log₊ f` (equivalently of `log(1+f)`) for `f` with this tail.
    pub fn log_of(self) -> Tail {
        match self {
            Tail::Bounded => Tail::Bounded,
            Tail::PowerLog { .. } => Tail::PowerLog { a: 0.0, b: 1.0 },
            Tail::ExpPowerLog { a, b, .. } => Tail::power_log(a, b),
            Tail::Unknown => Tail::Unknown,
        }
    }

    /// Growth rank for picking the dominant term of a sum.
    fn growth(self) -> (u8, f64, f64) {
        match self {
            Tail::Bounded => (0, 0.0, 0.0),
            Tail::PowerLog { a, b } => (1, a, b),
            Tail::ExpPowerLog { a, b, .. } => (2, a, b),
            Tail::Unknown => (3, 0.0, 0.0),
        }
    }

    fn dominant(self, other: Tail) -> Tail {
        use std::cmp::Ordering;
        let (g1, a1, b1) = self.growth();
        let (g2, a2, b2) = other.growth();
        match g1.cmp(&g2).then(a1.total_cmp(&a2)).then(b1.total_cmp(&b2)) {
            Ordering::Greater => self,
            Ordering::Less => other,
            Ordering::Equal => match (self, other) {
                (Tail::ExpPowerLog { scale: s1, .. }, Tail::ExpPowerLog { scale: s2, .. }) if s2 > s1 => other,
                _ => self,
            },
        }
    }
}

/// Behaviour of a profile as `t → 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailAtOne {
    PositiveLimit,
    /// `f(1-s) = exp(-g(s))` with `g` having the given tail at `0`.
    DecaysToZero(Tail),
    /// `f = 0` on `(1-κ, 1)`.
    VanishesOnInterval(f64),
    Unknown,
}

/// Which logarithm a [`ProfileForm::LogOf`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogView {
    /// `log₊ f`
    Plus,
    /// `log(1 + f)`
    OnePlus,
}

/// A user-supplied evaluator. Its tail is unknown to the oracle.
#[derive(Clone)]
pub struct CustomFn {
    pub label: String,
    pub eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomFn({})", self.label)
    }
}

impl PartialEq for CustomFn {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && Arc::ptr_eq(&self.eval, &other.eval)
    }
}

/// Registered closed forms of nonincreasing, nonnegative functions on `(0,1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileForm {
    Constant(f64),
    /// `scale·t^{-a}·log(e/t)^b`
    PowerLog { scale: f64, a: f64, b: f64 },
    /// `scale·ψ'(t)` for `ψ(t) = 1/(2 - log t)`.
    PsiPrime { scale: f64 },
    /// `exp(-g(1-t))`
    ExpNegFlip(Box<ProfileForm>),
    /// `exp(g(t))`
    Exp(Box<ProfileForm>),
    Sum(Vec<ProfileForm>),
    /// `f + ε`, the singular value function of `|T| + ε`.
    Shift { base: Box<SpectralProfile>, eps: f64 },
    /// `g(t/2)`
    Dilated(Box<ProfileForm>),
    Grid(MonotoneStepFn),
    LogOf { base: Box<SpectralProfile>, view: LogView },
    /// Decreasing rearrangement of `log₋ f`, i.e. `t ↦ log₋ f(1-t)`.
    LogMinusFlip(Box<SpectralProfile>),
    Custom(CustomFn),
}

fn log_e_over(t: f64) -> f64 {
    1.0 - t.ln()
}

fn log_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

fn log_minus(x: f64) -> f64 {
    if x < 1.0 {
        -x.ln()
    } else {
        0.0
    }
}

impl ProfileForm {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ProfileForm::Constant(c) => *c,
            ProfileForm::PowerLog { scale, a, b } => {
                let mut v = *scale;
                if *a != 0.0 {
                    v *= t.powf(-a);
                }
                if *b != 0.0 {
                    v *= log_e_over(t).powf(*b);
                }
                v
            }
            ProfileForm::PsiPrime { scale } => scale * Psi::Log.derivative(t),
            ProfileForm::ExpNegFlip(g) => (-g.eval(1.0 - t)).exp(),
            ProfileForm::Exp(g) => g.eval(t).exp(),
            ProfileForm::Sum(parts) => parts.iter().map(|p| p.eval(t)).sum(),
            ProfileForm::Shift { base, eps } => base.eval(t) + eps,
            ProfileForm::Dilated(g) => g.eval(0.5 * t),
            ProfileForm::Grid(m) => m.eval(t),
            ProfileForm::LogOf { base, view } => {
                let x = base.eval(t);
                match view {
                    LogView::Plus => log_plus(x),
                    LogView::OnePlus => x.ln_1p(),
                }
            }
            ProfileForm::LogMinusFlip(base) => log_minus(base.eval(1.0 - t)),
            ProfileForm::Custom(c) => (c.eval)(t),
        }
    }

    pub fn tail_at_0(&self) -> Tail {
        match self {
            ProfileForm::Constant(_) | ProfileForm::ExpNegFlip(_) | ProfileForm::Grid(_) => Tail::Bounded,
            ProfileForm::PowerLog { a, b, .. } => Tail::power_log(*a, *b),
            ProfileForm::PsiPrime { .. } => Tail::PowerLog { a: 1.0, b: -2.0 },
            ProfileForm::Exp(g) => match (g.tail_at_0(), g.as_ref()) {
                (Tail::Bounded, _) => Tail::Bounded,
                (Tail::PowerLog { a, b }, ProfileForm::PowerLog { scale, .. }) => Tail::exp_of(*scale, a, b),
                // the leading constant matters only on the (0, 1) boundary class
                (Tail::PowerLog { a, b }, _) if !(a == 0.0 && b == 1.0) => Tail::exp_of(1.0, a, b),
                _ => Tail::Unknown,
            },
            ProfileForm::Sum(parts) => parts.iter().map(|p| p.tail_at_0()).fold(Tail::Bounded, Tail::dominant),
            ProfileForm::Shift { base, .. } => base.tail_at_0(),
            ProfileForm::Dilated(g) => g.tail_at_0(),
            ProfileForm::LogOf { base, .. } => base.tail_at_0().log_of(),
            ProfileForm::LogMinusFlip(base) => match base.tail_at_1() {
                TailAtOne::PositiveLimit => Tail::Bounded,
                TailAtOne::DecaysToZero(g) => g,
                TailAtOne::VanishesOnInterval(_) | TailAtOne::Unknown => Tail::Unknown,
            },
            ProfileForm::Custom(_) => Tail::Unknown,
        }
    }

    pub fn tail_at_1(&self) -> TailAtOne {
        match self {
            ProfileForm::Constant(c) if *c > 0.0 => TailAtOne::PositiveLimit,
            ProfileForm::Constant(_) => TailAtOne::Unknown,
            ProfileForm::PowerLog { scale, .. } | ProfileForm::PsiPrime { scale } => {
                if *scale > 0.0 {
                    TailAtOne::PositiveLimit
                } else {
                    TailAtOne::Unknown
                }
            }
            ProfileForm::ExpNegFlip(g) => match g.tail_at_0() {
                Tail::Bounded => TailAtOne::PositiveLimit,
                other => TailAtOne::DecaysToZero(other),
            },
            ProfileForm::Exp(_) => TailAtOne::PositiveLimit,
            ProfileForm::Sum(parts) => {
                if parts.iter().any(|p| p.tail_at_1() == TailAtOne::PositiveLimit) {
                    TailAtOne::PositiveLimit
                } else {
                    TailAtOne::Unknown
                }
            }
            ProfileForm::Shift { eps, .. } if *eps > 0.0 => TailAtOne::PositiveLimit,
            ProfileForm::Shift { base, .. } => base.tail_at_1(),
            ProfileForm::Dilated(g) => {
                if g.eval(0.5) > 0.0 {
                    TailAtOne::PositiveLimit
                } else {
                    TailAtOne::Unknown
                }
            }
            ProfileForm::Grid(m) => {
                if m.values().last().is_some_and(|v| *v > 0.0) {
                    TailAtOne::PositiveLimit
                } else {
                    TailAtOne::Unknown
                }
            }
            ProfileForm::LogOf { .. } | ProfileForm::LogMinusFlip(_) | ProfileForm::Custom(_) => TailAtOne::Unknown,
        }
    }

    /// `∫₀ᵗ f` from a registered antiderivative, if one exists.
    pub fn primitive(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        match self {
            ProfileForm::Constant(c) => Some(c * t),
            ProfileForm::PowerLog { scale, a, b } => {
                if *b == 0.0 && *a < 1.0 {
                    Some(scale * t.powf(1.0 - a) / (1.0 - a))
                } else if *a == 1.0 && *b < -1.0 {
                    Some(scale * log_e_over(t).powf(b + 1.0) / (-b - 1.0))
                } else if *a == 0.0 && *b == 1.0 {
                    Some(scale * t * (log_e_over(t) + 1.0))
                } else {
                    None
                }
            }
            ProfileForm::PsiPrime { scale } => Some(scale * Psi::Log.eval(t)),
            ProfileForm::Sum(parts) => parts.iter().map(|p| p.primitive(t)).sum(),
            ProfileForm::Shift { base, eps } => base.primitive(t).map(|v| v + eps * t),
            ProfileForm::Dilated(g) => g.primitive(0.5 * t).map(|v| 2.0 * v),
            ProfileForm::Grid(m) => m.integrate(0.0, t.min(1.0)).ok(),
            _ => None,
        }
    }

    /// The registered inverse form `t ↦ 1/f̃(1-t)`, when one exists.
    pub fn inverse(&self) -> Option<ProfileForm> {
        match self {
            ProfileForm::Constant(c) if *c > 0.0 => Some(ProfileForm::Constant(1.0 / c)),
            ProfileForm::ExpNegFlip(g) => Some(ProfileForm::Exp(g.clone())),
            ProfileForm::Exp(g) => Some(ProfileForm::ExpNegFlip(g.clone())),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ProfileForm::Constant(c) => format!("{c}"),
            ProfileForm::PowerLog { scale, a, b } => format!("{scale}*t^-{a}*log(e/t)^{b}"),
            ProfileForm::PsiPrime { scale } => format!("{scale}*psi'(t)"),
            ProfileForm::ExpNegFlip(g) => format!("exp(-[{}](1-t))", g.label()),
            ProfileForm::Exp(g) => format!("exp({})", g.label()),
            ProfileForm::Sum(parts) => parts.iter().map(|p| p.label()).collect::<Vec<_>>().join(" + "),
            ProfileForm::Shift { base, eps } => format!("({}) + {eps}", base.name()),
            ProfileForm::Dilated(g) => format!("D2[{}]", g.label()),
            ProfileForm::Grid(m) => format!("grid[{}]", m.n_cells()),
            ProfileForm::LogOf { base, view: LogView::Plus } => format!("log+({})", base.name()),
            ProfileForm::LogOf { base, view: LogView::OnePlus } => format!("log(1+{})", base.name()),
            ProfileForm::LogMinusFlip(base) => format!("log-({})*", base.name()),
            ProfileForm::Custom(c) => c.label.clone(),
        }
    }
}

/// The audit grid: 32 log-spaced points in `[1e-12, 1/2)` and their mirrors about `1/2`.
pub fn audit_grid() -> Vec<f64> {
    let lo = 1e-12_f64.ln();
    let hi = 0.5_f64.ln();
    let left: Vec<f64> = (0..32).map(|i| (lo + (hi - lo) * i as f64 / 32.0).exp()).collect();
    let mut grid = left.clone();
    grid.extend(left.iter().rev().map(|t| 1.0 - t));
    grid
}

/// `μ(T)` of a positive operator, known through a registered closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralProfile {
    name: String,
    form: ProfileForm,
    kernel_mass: f64,
}

/// Relative tolerance of profile quadrature.
pub const PROFILE_QUAD_TOL: f64 = 1e-10;

impl SpectralProfile {
    /// Validates `κ ∈ [0,1)` and audits monotonicity and sign on [`audit_grid`].
    pub fn new(name: impl Into<String>, form: ProfileForm, kernel_mass: f64) -> Result<Self, SpaceError> {
        let name = name.into();
        if !(0.0..1.0).contains(&kernel_mass) {
            return Err(SpaceError::InvalidProfile(format!("{name}: kernel mass {kernel_mass} outside [0,1)")));
        }
        let p = SpectralProfile { name, form, kernel_mass };
        let mut prev = f64::INFINITY;
        for t in audit_grid() {
            let v = p.eval(t);
            if v.is_nan() || v < 0.0 {
                return Err(SpaceError::InvalidProfile(format!("{}: value {v} at t = {t}", p.name)));
            }
            if v > prev * (1.0 + 1e-12) + 1e-300 {
                return Err(SpaceError::InvalidProfile(format!("{}: increases at t = {t}", p.name)));
            }
            prev = v;
        }
        Ok(p)
    }

    /// A step function as a profile; trailing zero cells become kernel mass.
    pub fn from_grid(name: impl Into<String>, m: MonotoneStepFn) -> Result<Self, SpaceError> {
        let n = m.n_cells();
        let zeros = m.values().iter().rev().take_while(|v| **v == 0.0).count();
        if zeros == n {
            return Err(SpaceError::InvalidProfile("zero function".into()));
        }
        Self::new(name, ProfileForm::Grid(m), zeros as f64 / n as f64)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn form(&self) -> &ProfileForm {
        &self.form
    }

    pub fn kernel_mass(&self) -> f64 {
        self.kernel_mass
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.kernel_mass > 0.0 && t >= 1.0 - self.kernel_mass {
            0.0
        } else {
            self.form.eval(t)
        }
    }

    pub fn tail_at_0(&self) -> Tail {
        self.form.tail_at_0()
    }

    pub fn tail_at_1(&self) -> TailAtOne {
        if self.kernel_mass > 0.0 {
            TailAtOne::VanishesOnInterval(self.kernel_mass)
        } else {
            self.form.tail_at_1()
        }
    }

    /// `∫₀ᵗ f` through the registered antiderivative, if any.
    pub fn primitive(&self, t: f64) -> Option<f64> {
        self.form.primitive(t.min(1.0 - self.kernel_mass))
    }

    /// `∫₀ᵗ f`; requires the tail at `0` to be certified integrable.
    pub fn integral_to(&self, t: f64) -> Result<f64, SpaceError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(SpaceError::InvalidArgument(format!("integration limit {t} outside [0,1]")));
        }
        match super::tail_membership(super::SymmetricSpace::Lp(1.0), self.tail_at_0()) {
            super::Membership::Member => {}
            super::Membership::NotMember => {
                return Err(SpaceError::Divergent(format!("{} is not integrable near 0", self.name)))
            }
            super::Membership::Undecidable => {
                return Err(SpaceError::NotCertified(format!(
                    "{}: integrability near 0 is not certified by its tail",
                    self.name
                )))
            }
        }
        if let Some(v) = self.primitive(t) {
            return Ok(v);
        }
        let upper = t.min(1.0 - self.kernel_mass);
        let f = |s: f64| self.form.eval(s);
        Ok(quad::integrate_from_zero(&f, upper, PROFILE_QUAD_TOL)?)
    }

    /// `(log₊ f, (log₋ f)*)`; the second part is `None` when the kernel is nontrivial.
    pub fn log_parts(&self) -> Result<(SpectralProfile, Option<SpectralProfile>), SpaceError> {
        let plus_name = format!("log+({})", self.name);
        let minus_name = format!("log-({})*", self.name);
        let (plus, minus) = match &self.form {
            ProfileForm::Constant(c) if *c > 0.0 => (ProfileForm::Constant(log_plus(*c)), ProfileForm::Constant(log_minus(*c))),
            ProfileForm::ExpNegFlip(g) => (ProfileForm::Constant(0.0), g.as_ref().clone()),
            ProfileForm::Exp(g) => (g.as_ref().clone(), ProfileForm::Constant(0.0)),
            _ => (
                ProfileForm::LogOf { base: Box::new(self.clone()), view: LogView::Plus },
                ProfileForm::LogMinusFlip(Box::new(self.clone())),
            ),
        };
        let plus = SpectralProfile::new(plus_name, plus, self.kernel_mass)?;
        if self.kernel_mass > 0.0 {
            return Ok((plus, None));
        }
        Ok((plus, Some(SpectralProfile::new(minus_name, minus, 0.0)?)))
    }

    /// `log(1 + f)`, the alternative test function for `E_log` membership.
    pub fn log_one_plus(&self) -> Result<SpectralProfile, SpaceError> {
        SpectralProfile::new(
            format!("log(1+{})", self.name),
            ProfileForm::LogOf { base: Box::new(self.clone()), view: LogView::OnePlus },
            self.kernel_mass,
        )
    }

    /// `(D₂f)(t) = f(t/2)`.
    pub fn dilate2(&self) -> Result<SpectralProfile, SpaceError> {
        let kernel = (2.0 * self.kernel_mass - 1.0).max(0.0);
        SpectralProfile::new(format!("D2({})", self.name), ProfileForm::Dilated(Box::new(self.form.clone())), kernel)
    }

    /// `μ(|X| + ε)` for `μ(X) = f`.
    pub fn shifted(&self, eps: f64) -> Result<SpectralProfile, SpaceError> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(SpaceError::InvalidArgument(format!("shift {eps} must be positive")));
        }
        SpectralProfile::new(format!("{}+{eps:e}", self.name), ProfileForm::Shift { base: Box::new(self.clone()), eps }, 0.0)
    }

    /// `μ(X⁻¹)` for invertible `X` with a registered inverse form.
    pub fn inverse(&self) -> Result<SpectralProfile, SpaceError> {
        if self.kernel_mass > 0.0 {
            return Err(SpaceError::InvalidArgument(format!("{} has a nontrivial kernel", self.name)));
        }
        let form = self
            .form
            .inverse()
            .ok_or_else(|| SpaceError::Unsupported(format!("no registered inverse for {}", self.form.label())))?;
        SpectralProfile::new(format!("inv({})", self.name), form, 0.0)
    }

    // Library of registered profiles.

    pub fn constant(c: f64) -> Result<SpectralProfile, SpaceError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(SpaceError::InvalidProfile(format!("constant {c} must be positive and finite")));
        }
        SpectralProfile::new(format!("const({c})"), ProfileForm::Constant(c), 0.0)
    }

    /// `t^{-a}`.
    pub fn power(a: f64) -> Result<SpectralProfile, SpaceError> {
        SpectralProfile::new(format!("t^-{a}"), ProfileForm::PowerLog { scale: 1.0, a, b: 0.0 }, 0.0)
    }

    /// `ψ'(t) = 1/(t(2 - log t)²)`.
    pub fn psi_prime() -> SpectralProfile {
        SpectralProfile { name: "psi-prime".into(), form: ProfileForm::PsiPrime { scale: 1.0 }, kernel_mass: 0.0 }
    }

    /// `exp(-ψ'(1-t))`: a bounded invertible operator whose inverse has `μ = exp(ψ')`.
    pub fn exp_neg_psi_prime_flip() -> SpectralProfile {
        SpectralProfile {
            name: "exp-neg-psi-prime-flip".into(),
            form: ProfileForm::ExpNegFlip(Box::new(ProfileForm::PsiPrime { scale: 1.0 })),
            kernel_mass: 0.0,
        }
    }

    /// A projection of trace `1 - κ`.
    pub fn projection(kernel_mass: f64) -> Result<SpectralProfile, SpaceError> {
        SpectralProfile::new(format!("projection(1-{kernel_mass})"), ProfileForm::Constant(1.0), kernel_mass)
    }

    /// `exp(-T(1-t))`, the singular value function of `e^{-T}` for `μ(T) = T`.
    pub fn exp_neg_flip_of(t: &SpectralProfile) -> Result<SpectralProfile, SpaceError> {
        if t.kernel_mass > 0.0 {
            return Err(SpaceError::Unsupported("exp(-T) of a profile with kernel".into()));
        }
        SpectralProfile::new(format!("exp(-{})", t.name), ProfileForm::ExpNegFlip(Box::new(t.form.clone())), 0.0)
    }

    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        kernel_mass: f64,
    ) -> Result<SpectralProfile, SpaceError> {
        let name = name.into();
        let form = ProfileForm::Custom(CustomFn { label: name.clone(), eval: Arc::new(eval) });
        SpectralProfile::new(name, form, kernel_mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_grid_shape() {
        let g = audit_grid();
        assert_eq!(g.len(), 64);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[0] - 1e-12).abs() < 1e-24);
        assert!(g[63] < 1.0);
    }

    #[test]
    fn rejects_increasing_or_negative() {
        assert!(SpectralProfile::custom("up", |t| t, 0.0).is_err());
        assert!(SpectralProfile::custom("neg", |_| -1.0, 0.0).is_err());
        assert!(SpectralProfile::new("k", ProfileForm::Constant(1.0), 1.0).is_err());
    }

    #[test]
    fn kernel_truncates() {
        let p = SpectralProfile::projection(0.5).unwrap();
        assert_eq!(p.eval(0.25), 1.0);
        assert_eq!(p.eval(0.5), 0.0);
        assert_eq!(p.eval(0.75), 0.0);
        assert!((p.integral_to(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(p.tail_at_1(), TailAtOne::VanishesOnInterval(0.5));
    }

    #[test]
    fn antiderivatives_differentiate_back() {
        let cases = [
            ProfileForm::PowerLog { scale: 2.0, a: 0.75, b: 0.0 },
            ProfileForm::PowerLog { scale: 1.0, a: 1.0, b: -3.0 },
            ProfileForm::PowerLog { scale: 0.5, a: 0.0, b: 1.0 },
            ProfileForm::PsiPrime { scale: 1.0 },
            ProfileForm::Dilated(Box::new(ProfileForm::PsiPrime { scale: 1.0 })),
        ];
        for form in cases {
            for t in [1e-6, 0.01, 0.3, 0.9] {
                let h = 1e-5 * t;
                let slope = (form.primitive(t + h).unwrap() - form.primitive(t - h).unwrap()) / (2.0 * h);
                let f = form.eval(t);
                assert!((slope - f).abs() <= 1e-7 * f, "{} at {t}: {slope} vs {f}", form.label());
            }
        }
    }

    #[test]
    fn antiderivatives_match_quadrature() {
        // forms whose dyadic pieces decay geometrically
        let cases = [
            ProfileForm::PowerLog { scale: 2.0, a: 0.75, b: 0.0 },
            ProfileForm::PowerLog { scale: 0.5, a: 0.0, b: 1.0 },
            ProfileForm::Sum(vec![ProfileForm::Constant(1.0), ProfileForm::PowerLog { scale: 1.0, a: 0.5, b: 0.0 }]),
        ];
        for form in cases {
            for t in [1e-6, 0.01, 0.3, 0.9] {
                let exact = form.primitive(t).unwrap();
                let f = |s: f64| form.eval(s);
                let numeric = quad::integrate_from_zero(&f, t, 1e-11).unwrap();
                assert!((exact - numeric).abs() <= 1e-9 * exact.abs(), "{} at {t}: {exact} vs {numeric}", form.label());
            }
        }
    }

    #[test]
    fn psi_prime_integrates_to_psi() {
        let p = SpectralProfile::psi_prime();
        for t in [1e-9, 0.1, 0.5, 1.0] {
            assert_eq!(p.integral_to(t).unwrap(), Psi::Log.eval(t));
        }
        assert_eq!(p.integral_to(1.0).unwrap(), 0.5);
    }

    #[test]
    fn log_parts_of_registered_exponentials() {
        let x = SpectralProfile::exp_neg_psi_prime_flip();
        let (plus, minus) = x.log_parts().unwrap();
        assert_eq!(plus.form(), &ProfileForm::Constant(0.0));
        let minus = minus.unwrap();
        assert_eq!(minus.form(), &ProfileForm::PsiPrime { scale: 1.0 });
        // the closed form agrees with the generic rearranged log
        let generic = ProfileForm::LogMinusFlip(Box::new(x.clone()));
        for t in [1e-3, 0.2, 0.6] {
            assert!((generic.eval(t) - minus.eval(t)).abs() < 1e-9 * minus.eval(t));
        }
    }

    #[test]
    fn log_parts_generic_path() {
        let p = SpectralProfile::power(0.5).unwrap();
        let (plus, minus) = p.log_parts().unwrap();
        assert_eq!(plus.tail_at_0(), Tail::PowerLog { a: 0.0, b: 1.0 });
        assert!((plus.eval(0.01) - 0.5 * 100f64.ln()).abs() < 1e-12);
        let minus = minus.unwrap();
        assert_eq!(minus.tail_at_0(), Tail::Bounded);
        assert_eq!(minus.eval(0.3), 0.0);
    }

    #[test]
    fn exp_tails() {
        let e = ProfileForm::Exp(Box::new(ProfileForm::PowerLog { scale: 1.0, a: 0.5, b: 0.0 }));
        assert_eq!(e.tail_at_0(), Tail::ExpPowerLog { scale: 1.0, a: 0.5, b: 0.0 });
        assert_eq!(e.tail_at_0().log_of(), Tail::PowerLog { a: 0.5, b: 0.0 });
        let e = ProfileForm::Exp(Box::new(ProfileForm::PowerLog { scale: 0.5, a: 0.0, b: 1.0 }));
        assert_eq!(e.tail_at_0(), Tail::PowerLog { a: 0.5, b: 0.0 });
    }

    #[test]
    fn sum_tail_is_dominant_term() {
        let s = ProfileForm::Sum(vec![
            ProfileForm::PsiPrime { scale: 1.0 },
            ProfileForm::PowerLog { scale: 1.0, a: 0.5, b: 3.0 },
            ProfileForm::Constant(2.0),
        ]);
        assert_eq!(s.tail_at_0(), Tail::PowerLog { a: 1.0, b: -2.0 });
    }

    #[test]
    fn dilation_kernel() {
        let p = SpectralProfile::projection(0.75).unwrap();
        let d = p.dilate2().unwrap();
        assert!((d.kernel_mass() - 0.5).abs() < 1e-15);
        assert_eq!(d.eval(0.4), 1.0);
        assert_eq!(d.eval(0.6), 0.0);
        assert_eq!(SpectralProfile::projection(0.25).unwrap().dilate2().unwrap().kernel_mass(), 0.0);
    }
}
