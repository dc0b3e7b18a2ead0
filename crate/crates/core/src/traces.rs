//! Positive rearrangement-invariant functionals and their evaluation on step
//! functions, spectral profiles and self-adjoint matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matmodel::{MatError, MatrixOperator};
use crate::spaces::{marcinkiewicz_functional, tail_membership, Function, Membership, Psi, SpaceError, SymmetricSpace, Tail};
use crate::stepfn::{decreasing_rearrangement, GridFn, PointwiseMap, StepError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("dyadic sequence did not settle: last values spread {spread:e} > {tol:e}; the value depends on the extended limit")]
    NonConvergent { spread: f64, tol: f64, last: Vec<f64> },
    #[error("input outside the domain of {trace}: {reason}")]
    NotInDomain { trace: String, reason: String },
    #[error("unsigned evaluation of a function with negative values")]
    NegativeInput,
    #[error("operator is not self-adjoint")]
    NotSelfAdjoint,
    #[error("invalid trace: {0}")]
    Invalid(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Dyadic points `t_k = 2^{-k}`, `k = k_min..=k_max`; the limit is accepted
/// once the last `window` values agree within `tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicScheme {
    pub k_min: u32,
    pub k_max: u32,
    pub tol: f64,
    pub window: usize,
}

impl Default for DyadicScheme {
    fn default() -> Self {
        DyadicScheme { k_min: 8, k_max: 40, tol: 1e-6, window: 5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TraceFunctional {
    /// `f ↦ c·∫₀¹ f`
    Integral { c: f64 },
    /// `f ↦ lim (1/ψ(t))∫₀ᵗ f*` along the dyadic scheme; vanishes on bounded functions.
    Singular { psi: Psi, scheme: DyadicScheme },
}

impl TraceFunctional {
    pub fn integral(c: f64) -> Result<TraceFunctional, TraceError> {
        if c >= 0.0 && c.is_finite() {
            Ok(TraceFunctional::Integral { c })
        } else {
            Err(TraceError::Invalid(format!("integral coefficient {c} must be finite and nonnegative")))
        }
    }

    pub fn singular(psi: Psi) -> TraceFunctional {
        TraceFunctional::Singular { psi, scheme: DyadicScheme::default() }
    }
}

impl fmt::Display for TraceFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceFunctional::Integral { c } => write!(f, "integral:{c}"),
            TraceFunctional::Singular { psi, .. } => write!(f, "singular:{}", psi.name()),
        }
    }
}

impl FromStr for TraceFunctional {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(c) = s.strip_prefix("integral:") {
            let c: f64 = c.parse().map_err(|_| TraceError::Invalid(format!("bad coefficient in `{s}`")))?;
            TraceFunctional::integral(c)
        } else if let Some(psi) = s.strip_prefix("singular:") {
            Ok(TraceFunctional::singular(psi.parse()?))
        } else {
            Err(TraceError::Invalid(format!("unknown trace `{s}` (expected integral:<c> or singular:psi-log)")))
        }
    }
}

/// `g(t_k) = (1/ψ(t_k))∫₀^{t_k} f*` along the scheme.
pub fn dyadic_sequence(psi: Psi, scheme: &DyadicScheme, f: Function<'_>) -> Result<Vec<f64>, TraceError> {
    (scheme.k_min..=scheme.k_max)
        .map(|k| Ok(marcinkiewicz_functional(psi, f, 0.5f64.powi(k as i32))?))
        .collect()
}

fn settle(values: &[f64], scheme: &DyadicScheme) -> Result<f64, TraceError> {
    let tail = &values[values.len().saturating_sub(scheme.window)..];
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = hi - lo;
    if spread <= scheme.tol && hi.is_finite() {
        Ok(*tail.last().unwrap_or(&0.0))
    } else {
        Err(TraceError::NonConvergent { spread, tol: scheme.tol, last: tail.to_vec() })
    }
}

/// `φ(f)` for a nonnegative rearranged step function.
fn eval_nonneg_grid(phi: &TraceFunctional, f: &GridFn) -> f64 {
    match phi {
        TraceFunctional::Integral { c } => c * decreasing_rearrangement(f).integral(),
        // bounded: a singular functional vanishes on L∞
        TraceFunctional::Singular { .. } => 0.0,
    }
}

/// Evaluates `φ` on a function. With `signed`, the value is `φ(f₊*) - φ(f₋*)`;
/// otherwise `f` must be nonnegative. Profiles are nonnegative by construction.
pub fn eval_functional(phi: &TraceFunctional, f: Function<'_>, signed: bool) -> Result<f64, TraceError> {
    match f {
        Function::Grid(g) => {
            if signed {
                let pos = g.map(PointwiseMap::PositivePart)?;
                let neg = g.map(PointwiseMap::NegativePart)?;
                Ok(eval_nonneg_grid(phi, &pos) - eval_nonneg_grid(phi, &neg))
            } else if g.values().iter().any(|v| *v < 0.0) {
                Err(TraceError::NegativeInput)
            } else {
                Ok(eval_nonneg_grid(phi, g))
            }
        }
        Function::Profile(p) => match phi {
            TraceFunctional::Integral { c } => {
                if *c == 0.0 {
                    return Ok(0.0);
                }
                match tail_membership(SymmetricSpace::Lp(1.0), p.tail_at_0()) {
                    Membership::Member => Ok(c * p.integral_to(1.0)?),
                    Membership::NotMember => Err(TraceError::NotInDomain {
                        trace: phi.to_string(),
                        reason: format!("{} is not integrable", p.name()),
                    }),
                    Membership::Undecidable => Err(SpaceError::NotCertified(format!(
                        "integrability of {} is not certified by its tail",
                        p.name()
                    ))
                    .into()),
                }
            }
            TraceFunctional::Singular { psi, scheme } => {
                match tail_membership(SymmetricSpace::Marcinkiewicz(*psi), p.tail_at_0()) {
                    Membership::Member => {}
                    Membership::NotMember => {
                        return Err(TraceError::NotInDomain {
                            trace: phi.to_string(),
                            reason: format!("{} is outside the Marcinkiewicz space", p.name()),
                        })
                    }
                    Membership::Undecidable => {
                        return Err(SpaceError::NotCertified(format!(
                            "Marcinkiewicz membership of {} is not certified by its tail",
                            p.name()
                        ))
                        .into())
                    }
                }
                if p.tail_at_0() == Tail::Bounded {
                    return Ok(0.0);
                }
                let values = dyadic_sequence(*psi, scheme, f)?;
                settle(&values, scheme)
            }
        },
    }
}

/// `φ(μ(A₊)) - φ(μ(A₋))` for self-adjoint `A`.
pub fn eval_on_operator(phi: &TraceFunctional, a: &MatrixOperator) -> Result<f64, TraceError> {
    let lambda = a.eigenvalues().ok_or(TraceError::NotSelfAdjoint)?;
    let mut pos: Vec<f64> = lambda.iter().map(|v| v.max(0.0)).collect();
    let mut neg: Vec<f64> = lambda.iter().map(|v| (-v).max(0.0)).collect();
    pos.sort_by(|x, y| y.total_cmp(x));
    neg.sort_by(|x, y| y.total_cmp(x));
    let pos = GridFn::new(pos)?;
    let neg = GridFn::new(neg)?;
    Ok(eval_functional(phi, Function::Grid(&pos), false)? - eval_functional(phi, Function::Grid(&neg), false)?)
}
