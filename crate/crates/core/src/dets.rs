//! The determinant `det_φ` associated with a trace `φ` on a space `E`.
//!
//! For `T ∈ E_log`:
//! 1. trivial kernel and `log₋μ(T) ∈ E`: `exp(φ(log₊μ(T)) - φ((log₋μ(T))*))`;
//! 2. trivial kernel and `log₋μ(T) ∉ E`: `0`;
//! 3. nontrivial kernel: `0`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matmodel::{MatError, MatrixOperator};
use crate::spaces::{
    elog_membership, membership, Function, Membership, ProfileForm, SpaceError, SpectralProfile, SymmetricSpace,
};
use crate::stepfn::{MonotoneStepFn, PointwiseMap, StepError};
use crate::traces::{eval_functional, TraceError, TraceFunctional};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetError {
    #[error("input is not in E_log for {space}: {reason}")]
    NotInElog { space: String, reason: String },
    #[error("undecidable membership: {0}")]
    Undecidable(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// A positive operator known through its singular value function, or a matrix
/// (reduced to `|A|`, whose singular values are those of `A`).
#[derive(Clone, Debug)]
pub enum DetInput {
    Matrix(MatrixOperator),
    Grid(MonotoneStepFn),
    Profile(SpectralProfile),
}

impl DetInput {
    pub fn describe(&self) -> String {
        match self {
            DetInput::Matrix(a) => format!("matrix[{}x{}]", a.n(), a.n()),
            DetInput::Grid(m) => format!("grid[{}]", m.n_cells()),
            DetInput::Profile(p) => p.name().to_string(),
        }
    }

    /// `μ(|X| + ε)`.
    pub fn shifted(&self, eps: f64) -> Result<DetInput, DetError> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(DetError::Precondition(format!("shift {eps} must be positive")));
        }
        Ok(match self {
            DetInput::Matrix(a) => DetInput::Grid(MonotoneStepFn::from_grid(a.mu().map(PointwiseMap::AddConst(eps))?)?),
            DetInput::Grid(m) => DetInput::Grid(MonotoneStepFn::from_grid(m.map(PointwiseMap::AddConst(eps))?)?),
            DetInput::Profile(p) => DetInput::Profile(p.shifted(eps)?),
        })
    }
}

/// Which case of the definition produced the value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Branch {
    LogTrace,
    LogMinusOutside,
    Kernel,
}

impl From<Branch> for u8 {
    fn from(b: Branch) -> u8 {
        match b {
            Branch::LogTrace => 1,
            Branch::LogMinusOutside => 2,
            Branch::Kernel => 3,
        }
    }
}

impl TryFrom<u8> for Branch {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Branch::LogTrace),
            2 => Ok(Branch::LogMinusOutside),
            3 => Ok(Branch::Kernel),
            _ => Err(format!("branch {v} is not 1, 2 or 3")),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetEvaluation {
    pub value: f64,
    pub branch: Branch,
}

fn grid_det(m: &MonotoneStepFn, phi: &TraceFunctional) -> Result<DetEvaluation, DetError> {
    if m.values().iter().any(|v| *v <= 0.0) {
        return Ok(DetEvaluation { value: 0.0, branch: Branch::Kernel });
    }
    let log = m.map(PointwiseMap::Log)?;
    let exponent = eval_functional(phi, Function::Grid(&log), true)?;
    Ok(DetEvaluation { value: exponent.exp(), branch: Branch::LogTrace })
}

fn require(m: Membership, what: impl FnOnce() -> String) -> Result<bool, DetError> {
    match m {
        Membership::Member => Ok(true),
        Membership::NotMember => Ok(false),
        Membership::Undecidable => Err(DetError::Undecidable(what())),
    }
}

/// `det_φ(X)` relative to the space `E` carrying `φ`.
pub fn det_phi(x: &DetInput, phi: &TraceFunctional, space: SymmetricSpace) -> Result<DetEvaluation, DetError> {
    match x {
        DetInput::Matrix(a) => {
            if a.is_singular() {
                return Ok(DetEvaluation { value: 0.0, branch: Branch::Kernel });
            }
            grid_det(&a.mu(), phi)
        }
        DetInput::Grid(m) => grid_det(m, phi),
        DetInput::Profile(p) => {
            let in_elog = require(elog_membership(space, Function::Profile(p)), || {
                format!("log+ of {} against {space}", p.name())
            })?;
            if !in_elog {
                return Err(DetError::NotInElog {
                    space: space.to_string(),
                    reason: format!("log+ of {} is not in {space}", p.name()),
                });
            }
            if p.kernel_mass() > 0.0 {
                return Ok(DetEvaluation { value: 0.0, branch: Branch::Kernel });
            }
            let (plus, minus) = p.log_parts()?;
            let minus = minus.ok_or_else(|| DetError::Precondition("log- of a profile with kernel".into()))?;
            let minus_in = require(membership(space, Function::Profile(&minus)), || {
                format!("log- of {} against {space}", p.name())
            })?;
            if !minus_in {
                return Ok(DetEvaluation { value: 0.0, branch: Branch::LogMinusOutside });
            }
            let exponent = eval_functional(phi, Function::Profile(&plus), false)?
                - eval_functional(phi, Function::Profile(&minus), false)?;
            Ok(DetEvaluation { value: exponent.exp(), branch: Branch::LogTrace })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativityReport {
    pub det_product: f64,
    pub product_of_dets: f64,
    pub relative_discrepancy: f64,
}

/// Compares `det_φ(AB)` with `det_φ(A)·det_φ(B)` for `φ = c·τ`.
pub fn det_multiplicativity_check(
    a: &MatrixOperator,
    b: &MatrixOperator,
    phi: &TraceFunctional,
) -> Result<MultiplicativityReport, DetError> {
    if !matches!(phi, TraceFunctional::Integral { .. }) {
        return Err(DetError::Precondition("multiplicativity check needs an integral trace".into()));
    }
    let space = SymmetricSpace::Lp(1.0);
    let ab = a.product(b)?;
    let lhs = det_phi(&DetInput::Matrix(ab), phi, space)?.value;
    let rhs = det_phi(&DetInput::Matrix(a.clone()), phi, space)?.value * det_phi(&DetInput::Matrix(b.clone()), phi, space)?.value;
    let relative_discrepancy = if rhs == 0.0 && lhs == 0.0 { 0.0 } else { (lhs - rhs).abs() / rhs.abs().max(lhs.abs()) };
    Ok(MultiplicativityReport { det_product: lhs, product_of_dets: rhs, relative_discrepancy })
}

fn merge_exponents(g: &ProfileForm, h: &ProfileForm) -> ProfileForm {
    match (g, h) {
        (ProfileForm::Constant(x), ProfileForm::Constant(y)) => ProfileForm::Constant(x + y),
        (ProfileForm::PsiPrime { scale: s }, ProfileForm::PsiPrime { scale: t }) => ProfileForm::PsiPrime { scale: s + t },
        (ProfileForm::PowerLog { scale: s, a, b }, ProfileForm::PowerLog { scale: t, a: a2, b: b2 })
            if a == a2 && b == b2 =>
        {
            ProfileForm::PowerLog { scale: s + t, a: *a, b: *b }
        }
        _ => {
            let mut parts = Vec::new();
            for f in [g, h] {
                match f {
                    ProfileForm::Sum(inner) => parts.extend(inner.iter().cloned()),
                    other => parts.push(other.clone()),
                }
            }
            ProfileForm::Sum(parts)
        }
    }
}

/// `μ(XY)` for commuting positive `X`, `Y` over one diffuse abelian algebra.
///
/// A pair registered as mutual inverses is realized as `(X, X⁻¹)` and
/// multiplies to `1`; every other registered pair is realized with both
/// functions nonincreasing in the same variable.
pub fn commuting_profile_product(f: &SpectralProfile, g: &SpectralProfile) -> Result<SpectralProfile, DetError> {
    let name = format!("{}*{}", f.name(), g.name());
    let (ff, gf) = (f.form(), g.form());
    if let (ProfileForm::Constant(x), ProfileForm::Constant(y)) = (ff, gf) {
        let kernel = f.kernel_mass().max(g.kernel_mass());
        return Ok(SpectralProfile::new(name, ProfileForm::Constant(x * y), kernel)?);
    }
    if f.kernel_mass() > 0.0 || g.kernel_mass() > 0.0 {
        return Err(DetError::Unsupported(format!("product {name} with a nontrivial kernel")));
    }
    if ff.inverse().as_ref() == Some(gf) {
        return Ok(SpectralProfile::new(name, ProfileForm::Constant(1.0), 0.0)?);
    }
    let form = match (ff, gf) {
        (ProfileForm::Constant(c), other) | (other, ProfileForm::Constant(c)) if *c == 1.0 => other.clone(),
        (ProfileForm::ExpNegFlip(a), ProfileForm::ExpNegFlip(b)) => ProfileForm::ExpNegFlip(Box::new(merge_exponents(a, b))),
        (ProfileForm::Exp(a), ProfileForm::Exp(b)) => ProfileForm::Exp(Box::new(merge_exponents(a, b))),
        _ => {
            return Err(DetError::Unsupported(format!(
                "no registered product for {} and {}",
                ff.label(),
                gf.label()
            )))
        }
    };
    Ok(SpectralProfile::new(name, form, 0.0)?)
}

/// Outcome of the `ε ↓ 0` diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsLimit {
    Converged(f64),
    Diverges,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsComparison {
    pub det: DetEvaluation,
    pub eps_limit: EpsLimit,
    /// `(k, det_φ(|X| + 2^{-k}))`
    pub sequence: Vec<(u32, f64)>,
}

pub const EPS_K_MIN: u32 = 4;
pub const EPS_K_MAX: u32 = 30;
const EPS_WINDOW: usize = 5;
const EPS_TOL: f64 = 1e-6;

/// `det_φ(X)` next to `lim det_φ(|X| + ε)` along `ε = 2^{-k}`.
pub fn eps_limit_comparison(
    x: &DetInput,
    phi: &TraceFunctional,
    space: SymmetricSpace,
) -> Result<EpsComparison, DetError> {
    let det = det_phi(x, phi, space)?;
    let mut sequence = Vec::new();
    for k in EPS_K_MIN..=EPS_K_MAX {
        let shifted = x.shifted(0.5f64.powi(k as i32))?;
        sequence.push((k, det_phi(&shifted, phi, space)?.value));
    }
    let tail: Vec<f64> = sequence[sequence.len() - EPS_WINDOW..].iter().map(|(_, v)| *v).collect();
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let eps_limit = if hi - lo <= EPS_TOL && hi.is_finite() {
        EpsLimit::Converged(*tail.last().unwrap_or(&f64::NAN))
    } else {
        EpsLimit::Diverges
    };
    Ok(EpsComparison { det, eps_limit, sequence })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioValues {
    /// `det_ψ(X)` for the trace on the larger space `F`.
    pub det_psi: DetEvaluation,
    /// `det_φ(X)` for the trace on the smaller space `E`.
    pub det_phi: DetEvaluation,
}

/// For `T ∈ F \ E`, evaluates both determinants of `X = e^{-T}`: `det_ψ(X) = e^{-ψ(T)}`
/// while `det_φ(X) = 0` because `log₋μ(X) = μ(T) ∉ E`.
pub fn proposition_ene_f_scenario(
    e: SymmetricSpace,
    f: SymmetricSpace,
    t: &SpectralProfile,
    psi_trace: &TraceFunctional,
    phi_trace: &TraceFunctional,
) -> Result<ScenarioValues, DetError> {
    let in_f = require(membership(f, Function::Profile(t)), || format!("{} against {f}", t.name()))?;
    let in_e = require(membership(e, Function::Profile(t)), || format!("{} against {e}", t.name()))?;
    if !in_f || in_e {
        return Err(DetError::Precondition(format!(
            "{} must lie in {f} but not in {e} (in F: {in_f}, in E: {in_e})",
            t.name()
        )));
    }
    let x = DetInput::Profile(SpectralProfile::exp_neg_flip_of(t)?);
    Ok(ScenarioValues { det_psi: det_phi(&x, psi_trace, f)?, det_phi: det_phi(&x, phi_trace, e)? })
}

/// The JSON record printed by the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetReport {
    pub input: String,
    pub trace: String,
    pub space: String,
    pub branch_taken: Branch,
    pub value: f64,
    pub eps_limit: Option<EpsLimit>,
}

pub fn det_report(
    x: &DetInput,
    phi: &TraceFunctional,
    space: SymmetricSpace,
    eps_compare: bool,
) -> Result<DetReport, DetError> {
    let (det, eps_limit) = if eps_compare {
        let c = eps_limit_comparison(x, phi, space)?;
        (c.det, Some(c.eps_limit))
    } else {
        (det_phi(x, phi, space)?, None)
    };
    Ok(DetReport {
        input: x.describe(),
        trace: phi.to_string(),
        space: space.to_string(),
        branch_taken: det.branch,
        value: det.value,
        eps_limit,
    })
}
