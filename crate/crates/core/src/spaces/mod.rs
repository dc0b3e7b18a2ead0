//! Symmetric (Calkin) function spaces on `(0,1)` and membership oracles.
//!
//! Step functions are bounded and belong to every space. Profiles are decided
//! from their declared tail at `0`; when the tail does not match a rule the
//! answer is [`Membership::Undecidable`].

mod profile;
mod spec;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::QuadError;
use crate::stepfn::{decreasing_rearrangement, GridFn};

pub use profile::{audit_grid, CustomFn, LogView, ProfileForm, SpectralProfile, Tail, TailAtOne, PROFILE_QUAD_TOL};
pub use spec::{ProfileKind, ProfileSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("not certified: {0}")]
    NotCertified(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Concave increasing functions defining Marcinkiewicz spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Psi {
    /// `ψ(t) = 1/(2 - log t)`
    Log,
}

impl Psi {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Psi::Log => {
                if t <= 0.0 {
                    0.0
                } else {
                    1.0 / (2.0 - t.ln())
                }
            }
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        match self {
            Psi::Log => {
                let l = 2.0 - t.ln();
                1.0 / (t * l * l)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Psi::Log => "psi-log",
        }
    }

    /// Checks `ψ(0⁺) = 0`, monotonicity, concavity and `ψ(2t)/ψ(t) → 1`
    /// numerically.
    pub fn audit(self) -> Result<(), SpaceError> {
        // log-spaced toward 0, uniform on [1/2, 1] where the slopes flatten
        let mut pts: Vec<f64> = audit_grid().into_iter().filter(|t| *t < 0.5).collect();
        pts.extend((0..=32).map(|k| 0.5 + k as f64 / 64.0));
        let vals: Vec<f64> = pts.iter().map(|t| self.eval(*t)).collect();
        if vals.iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(SpaceError::InvalidArgument(format!("{}: not positive on (0,1]", self.name())));
        }
        if vals.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SpaceError::InvalidArgument(format!("{}: not increasing", self.name())));
        }
        let slopes: Vec<f64> = (1..pts.len()).map(|i| (vals[i] - vals[i - 1]) / (pts[i] - pts[i - 1])).collect();
        if slopes.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-9)) {
            return Err(SpaceError::InvalidArgument(format!("{}: not concave", self.name())));
        }
        // along t = 10^{-k} the values fall toward 0 and the doubling ratio toward 1
        let mut prev_val = f64::INFINITY;
        let mut prev_gap = f64::INFINITY;
        for k in 1..=300 {
            let t = 10f64.powi(-k);
            let v = self.eval(t);
            let gap = self.eval(2.0 * t) / v - 1.0;
            if v >= prev_val || gap >= prev_gap || gap < 0.0 {
                return Err(SpaceError::InvalidArgument(format!("{}: limit behaviour fails at t = {t:e}", self.name())));
            }
            prev_val = v;
            prev_gap = gap;
        }
        if prev_val > 2e-3 || prev_gap > 2e-3 {
            return Err(SpaceError::InvalidArgument(format!("{}: limits at 0 not approached", self.name())));
        }
        Ok(())
    }
}

impl FromStr for Psi {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "psi-log" => Ok(Psi::Log),
            _ => Err(SpaceError::Parse(format!("unknown psi `{s}` (expected psi-log)"))),
        }
    }
}

/// Calkin function spaces on `(0,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SymmetricSpace {
    Lp(f64),
    Linf,
    /// `{f : log₊|f| ∈ L₁}`
    Llog,
    Marcinkiewicz(Psi),
}

impl SymmetricSpace {
    pub fn lp(p: f64) -> Result<SymmetricSpace, SpaceError> {
        if p > 0.0 && p.is_finite() {
            Ok(SymmetricSpace::Lp(p))
        } else {
            Err(SpaceError::InvalidArgument(format!("exponent {p} must lie in (0, ∞)")))
        }
    }
}

impl fmt::Display for SymmetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetricSpace::Lp(p) if *p == 1.0 => write!(f, "l1"),
            SymmetricSpace::Lp(p) if *p == 2.0 => write!(f, "l2"),
            SymmetricSpace::Lp(p) => write!(f, "lp:{p}"),
            SymmetricSpace::Linf => write!(f, "linf"),
            SymmetricSpace::Llog => write!(f, "llog"),
            SymmetricSpace::Marcinkiewicz(psi) => write!(f, "marcinkiewicz:{}", psi.name()),
        }
    }
}

impl FromStr for SymmetricSpace {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "l1" => Ok(SymmetricSpace::Lp(1.0)),
            "l2" => Ok(SymmetricSpace::Lp(2.0)),
            "linf" => Ok(SymmetricSpace::Linf),
            "llog" => Ok(SymmetricSpace::Llog),
            "marcinkiewicz" => Ok(SymmetricSpace::Marcinkiewicz(Psi::Log)),
            _ => {
                if let Some(p) = s.strip_prefix("lp:") {
                    let p: f64 = p.parse().map_err(|_| SpaceError::Parse(format!("bad exponent in `{s}`")))?;
                    SymmetricSpace::lp(p)
                } else if let Some(psi) = s.strip_prefix("marcinkiewicz:") {
                    Ok(SymmetricSpace::Marcinkiewicz(psi.parse()?))
                } else {
                    Err(SpaceError::Parse(format!(
                        "unknown space `{s}` (expected l1, l2, lp:<p>, linf, llog, marcinkiewicz[:psi-log])"
                    )))
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Member,
    NotMember,
    Undecidable,
}

/// A function on `(0,1)` presented to an oracle.
#[derive(Clone, Copy, Debug)]
pub enum Function<'a> {
    Grid(&'a GridFn),
    Profile(&'a SpectralProfile),
}

const EXPONENT_TOL: f64 = 1e-12;

fn lp_rule(p: f64, tail: Tail) -> Membership {
    match tail {
        Tail::Bounded => Membership::Member,
        Tail::PowerLog { a, b } => {
            let pa = p * a;
            let critical = (pa - 1.0).abs() <= EXPONENT_TOL;
            if pa < 1.0 - EXPONENT_TOL || (critical && p * b < -1.0) {
                Membership::Member
            } else {
                Membership::NotMember
            }
        }
        // exp(s·log(e/t)^b) with b < 1 grows slower than every power
        Tail::ExpPowerLog { a, b, .. } if a == 0.0 && b < 1.0 => Membership::Member,
        Tail::ExpPowerLog { .. } => Membership::NotMember,
        Tail::Unknown => Membership::Undecidable,
    }
}

fn marcinkiewicz_rule(psi: Psi, tail: Tail) -> Membership {
    match psi {
        // 1/ψ(t) = 2 + log(1/t), so the test is sup log(e/t)·∫₀ᵗ f < ∞
        Psi::Log => match tail {
            Tail::Bounded => Membership::Member,
            Tail::PowerLog { a, b } => {
                let critical = (a - 1.0).abs() <= EXPONENT_TOL;
                if a < 1.0 - EXPONENT_TOL || (critical && b <= -2.0) {
                    Membership::Member
                } else {
                    Membership::NotMember
                }
            }
            Tail::ExpPowerLog { a, b, .. } if a == 0.0 && b < 1.0 => Membership::Member,
            Tail::ExpPowerLog { .. } => Membership::NotMember,
            Tail::Unknown => Membership::Undecidable,
        },
    }
}

/// The tail rules of each space.
pub fn tail_membership(space: SymmetricSpace, tail: Tail) -> Membership {
    match space {
        SymmetricSpace::Lp(p) => lp_rule(p, tail),
        SymmetricSpace::Linf => match tail {
            Tail::Bounded => Membership::Member,
            Tail::Unknown => Membership::Undecidable,
            _ => Membership::NotMember,
        },
        SymmetricSpace::Llog => lp_rule(1.0, tail.log_of()),
        SymmetricSpace::Marcinkiewicz(psi) => marcinkiewicz_rule(psi, tail),
    }
}

/// `f ∈ E`, decided through `f*` only.
pub fn membership(space: SymmetricSpace, f: Function<'_>) -> Membership {
    match f {
        Function::Grid(_) => Membership::Member,
        Function::Profile(p) => tail_membership(space, p.tail_at_0()),
    }
}

/// `f ∈ E_log`, i.e. `log₊ f ∈ E`.
pub fn elog_membership(space: SymmetricSpace, f: Function<'_>) -> Membership {
    match f {
        Function::Grid(_) => Membership::Member,
        Function::Profile(p) => match p.log_parts() {
            Ok((plus, _)) => membership(space, Function::Profile(&plus)),
            Err(_) => Membership::Undecidable,
        },
    }
}

/// The equivalent criterion `log(1 + f) ∈ E`.
pub fn elog_membership_via_log1p(space: SymmetricSpace, f: Function<'_>) -> Membership {
    match f {
        Function::Grid(_) => Membership::Member,
        Function::Profile(p) => match p.log_one_plus() {
            Ok(g) => membership(space, Function::Profile(&g)),
            Err(_) => Membership::Undecidable,
        },
    }
}

/// `(1/ψ(t))·∫₀ᵗ f*`.
pub fn marcinkiewicz_functional(psi: Psi, f: Function<'_>, t: f64) -> Result<f64, SpaceError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(SpaceError::InvalidArgument(format!("t = {t} outside (0,1)")));
    }
    let integral = match f {
        Function::Grid(g) => decreasing_rearrangement(g)
            .integrate(0.0, t)
            .map_err(|e| SpaceError::InvalidArgument(e.to_string()))?,
        Function::Profile(p) => p.integral_to(t)?,
    };
    Ok(integral / psi.eval(t))
}

/// `sup_t (1/ψ(t))·∫₀ᵗ f*` over the audit grid, or `∞` for a certified non-member.
pub fn marcinkiewicz_sup(psi: Psi, f: Function<'_>) -> Result<f64, SpaceError> {
    match membership(SymmetricSpace::Marcinkiewicz(psi), f) {
        Membership::NotMember => return Ok(f64::INFINITY),
        Membership::Undecidable => {
            return Err(SpaceError::NotCertified("tail does not match a Marcinkiewicz rule".into()))
        }
        Membership::Member => {}
    }
    let mut sup: f64 = 0.0;
    for t in audit_grid() {
        sup = sup.max(marcinkiewicz_functional(psi, f, t)?);
    }
    Ok(sup)
}
