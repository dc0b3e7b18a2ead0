//! Piecewise-constant functions on `(0,1)` with exact calculus.
//!
//! A [`GridFn`] carries `n` values, one per cell `((k-1)/n, k/n)`. Integrals
//! are computed from cell sums, so there is no quadrature error. Evaluation at
//! cell boundaries follows an explicit [`Continuity`] convention; boundary
//! points are best addressed exactly through [`GridPoint`].

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("a step function needs at least one cell")]
    Empty,
    #[error("non-finite value {value} in cell {cell}")]
    NonFinite { cell: usize, value: f64 },
    #[error("values increase between cells {cell} and {}", cell + 1)]
    NotMonotone { cell: usize },
    #[error("invalid integration interval ({a}, {b})")]
    InvalidInterval { a: f64, b: f64 },
    #[error("logarithm of non-positive value {value} in cell {cell}")]
    LogDomain { cell: usize, value: f64 },
}

/// How a step function is evaluated at the boundary between two cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Continuity {
    Right,
    Left,
}

/// An exact rational point `num/den` of `[0,1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub num: u64,
    pub den: u64,
}

impl GridPoint {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0 && num <= den, "grid point {num}/{den} outside [0,1]");
        GridPoint { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `x / 2`
    pub fn half(self) -> Self {
        GridPoint::new(self.num, 2 * self.den)
    }

    /// `1 - x`
    pub fn complement(self) -> Self {
        GridPoint::new(self.den - self.num, self.den)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Interior cell boundaries `k/n` of an `n`-cell grid lying strictly inside `(lo, hi)`.
pub fn boundaries_in(n: usize, lo: f64, hi: f64) -> Vec<GridPoint> {
    (1..n as u64)
        .map(|k| GridPoint::new(k, n as u64))
        .filter(|p| p.value() > lo && p.value() < hi)
        .collect()
}

/// Cell midpoints `(2k-1)/(2n)` of an `n`-cell grid lying strictly inside `(lo, hi)`.
pub fn midpoints_in(n: usize, lo: f64, hi: f64) -> Vec<GridPoint> {
    (1..=n as u64)
        .map(|k| GridPoint::new(2 * k - 1, 2 * n as u64))
        .filter(|p| p.value() > lo && p.value() < hi)
        .collect()
}

/// Boundaries and midpoints inside `(lo, hi)`, sorted.
pub fn check_points_in(n: usize, lo: f64, hi: f64) -> Vec<GridPoint> {
    let mut pts = boundaries_in(n, lo, hi);
    pts.extend(midpoints_in(n, lo, hi));
    pts.sort_by(|p, q| (p.num * q.den).cmp(&(q.num * p.den)));
    pts
}

/// Cell-wise maps accepted by [`GridFn::map`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointwiseMap {
    Log,
    /// `max(log x, 0)`, with `log₊ 0 = 0`.
    LogPlus,
    /// `-min(log x, 0)`; undefined at zero.
    LogMinus,
    Abs,
    Exp,
    MinConst(f64),
    Scale(f64),
    AddConst(f64),
    PositivePart,
    NegativePart,
}

fn log_plus(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        x.ln()
    }
}

fn log_minus(x: f64) -> f64 {
    if x >= 1.0 {
        0.0
    } else {
        -x.ln()
    }
}

/// A real step function on `(0,1)` with `n` equal cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFn {
    values: Vec<f64>,
    convention: Continuity,
}

impl GridFn {
    pub fn new(values: Vec<f64>) -> Result<Self, StepError> {
        Self::with_convention(values, Continuity::Right)
    }

    pub fn with_convention(values: Vec<f64>, convention: Continuity) -> Result<Self, StepError> {
        if values.is_empty() {
            return Err(StepError::Empty);
        }
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(StepError::NonFinite { cell, value });
        }
        Ok(GridFn { values, convention })
    }

    pub fn constant(value: f64, n_cells: usize) -> Result<Self, StepError> {
        Self::new(vec![value; n_cells])
    }

    /// Samples `f` at cell midpoints.
    pub fn from_midpoints(n_cells: usize, f: impl Fn(f64) -> f64) -> Result<Self, StepError> {
        let n = n_cells as f64;
        Self::new((0..n_cells).map(|k| f((k as f64 + 0.5) / n)).collect())
    }

    pub fn n_cells(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn convention(&self) -> Continuity {
        self.convention
    }

    pub fn cell_value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Exact evaluation at a rational point, honouring the boundary convention.
    pub fn eval_at(&self, x: GridPoint) -> f64 {
        let n = self.n_cells() as u64;
        let scaled = x.num * n;
        let cell = scaled / x.den;
        if scaled.is_multiple_of(x.den) {
            self.eval_boundary(cell as usize)
        } else {
            self.values[cell as usize]
        }
    }

    /// Evaluation at a floating point position. Positions within `1e-9` cells
    /// of a boundary are treated as that boundary.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n_cells();
        let scaled = (x.clamp(0.0, 1.0)) * n as f64;
        let nearest = scaled.round();
        if (scaled - nearest).abs() <= 1e-9 {
            self.eval_boundary(nearest as usize)
        } else {
            self.values[(scaled.floor() as usize).min(n - 1)]
        }
    }

    fn eval_boundary(&self, k: usize) -> f64 {
        let n = self.n_cells();
        match self.convention {
            Continuity::Right => self.values[k.min(n - 1)],
            Continuity::Left => self.values[k.max(1) - 1],
        }
    }

    fn primitive(&self, x: f64) -> f64 {
        let n = self.n_cells();
        let scaled = x.clamp(0.0, 1.0) * n as f64;
        let full = (scaled.floor() as usize).min(n);
        let head: f64 = self.values[..full].iter().sum::<f64>() / n as f64;
        if full == n {
            head
        } else {
            head + (x - full as f64 / n as f64) * self.values[full]
        }
    }

    /// Exact integral over `(a, b)` for `0 ≤ a ≤ b ≤ 1`.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64, StepError> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
            return Err(StepError::InvalidInterval { a, b });
        }
        if a == b {
            return Ok(0.0);
        }
        Ok(self.primitive(b) - self.primitive(a))
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n_cells() as f64
    }

    /// `∫_t^{1-t} f` as used by the Ψ-transform; zero for `t ≥ 1/2`.
    fn symmetric_integral(&self, t: f64) -> f64 {
        if t >= 0.5 {
            return 0.0;
        }
        self.primitive(1.0 - t) - self.primitive(t)
    }

    pub fn map(&self, map: PointwiseMap) -> Result<GridFn, StepError> {
        let mut out = Vec::with_capacity(self.values.len());
        for (cell, &v) in self.values.iter().enumerate() {
            let mapped = match map {
                PointwiseMap::Log => {
                    if v <= 0.0 {
                        return Err(StepError::LogDomain { cell, value: v });
                    }
                    v.ln()
                }
                PointwiseMap::LogPlus => {
                    if v < 0.0 {
                        return Err(StepError::LogDomain { cell, value: v });
                    }
                    log_plus(v)
                }
                PointwiseMap::LogMinus => {
                    if v <= 0.0 {
                        return Err(StepError::LogDomain { cell, value: v });
                    }
                    log_minus(v)
                }
                PointwiseMap::Abs => v.abs(),
                PointwiseMap::Exp => v.exp(),
                PointwiseMap::MinConst(c) => v.min(c),
                PointwiseMap::Scale(c) => c * v,
                PointwiseMap::AddConst(c) => v + c,
                PointwiseMap::PositivePart => v.max(0.0),
                PointwiseMap::NegativePart => (-v).max(0.0),
            };
            out.push(mapped);
        }
        GridFn::with_convention(out, self.convention)
    }

    /// Same function on a grid of `n_cells`, which must be a multiple of the current size.
    pub fn refine(&self, n_cells: usize) -> GridFn {
        let n = self.n_cells();
        assert!(n_cells.is_multiple_of(n), "{n_cells} is not a refinement of {n}");
        let factor = n_cells / n;
        let values = self
            .values
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, factor))
            .collect();
        GridFn { values, convention: self.convention }
    }

    /// Cell-wise combination on the least common refinement of both grids.
    pub fn zip_with(&self, other: &GridFn, op: impl Fn(f64, f64) -> f64) -> Result<GridFn, StepError> {
        let n = lcm(self.n_cells(), other.n_cells());
        let a = self.refine(n);
        let b = other.refine(n);
        let values = a.values.iter().zip(&b.values).map(|(&x, &y)| op(x, y)).collect();
        GridFn::with_convention(values, self.convention)
    }

    pub fn add(&self, other: &GridFn) -> Result<GridFn, StepError> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &GridFn) -> Result<GridFn, StepError> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &GridFn) -> Result<GridFn, StepError> {
        self.zip_with(other, |x, y| x * y)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A nonincreasing step function, the shape of `μ(A)` and `λ(A)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneStepFn(GridFn);

impl MonotoneStepFn {
    pub fn new(values: Vec<f64>) -> Result<Self, StepError> {
        Self::from_grid(GridFn::new(values)?)
    }

    pub fn from_grid(f: GridFn) -> Result<Self, StepError> {
        if let Some(cell) = f.values.windows(2).position(|w| w[0] < w[1]) {
            return Err(StepError::NotMonotone { cell });
        }
        Ok(MonotoneStepFn(f))
    }

    pub fn as_grid(&self) -> &GridFn {
        &self.0
    }

    pub fn into_grid(self) -> GridFn {
        self.0
    }

    /// The version with `f̃(x) = lim_{t→x⁻} f(t)` at every boundary.
    pub fn left_continuous_version(&self) -> MonotoneStepFn {
        MonotoneStepFn(GridFn { values: self.0.values.clone(), convention: Continuity::Left })
    }

    pub fn right_continuous_version(&self) -> MonotoneStepFn {
        MonotoneStepFn(GridFn { values: self.0.values.clone(), convention: Continuity::Right })
    }
}

impl Deref for MonotoneStepFn {
    type Target = GridFn;

    fn deref(&self) -> &GridFn {
        &self.0
    }
}

/// The decreasing rearrangement `f*` of `|f|`.
pub fn decreasing_rearrangement(f: &GridFn) -> MonotoneStepFn {
    let mut values: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    MonotoneStepFn(GridFn { values, convention: Continuity::Right })
}

/// `(D₂f)(t) = f(t/2)`. On an `n`-cell grid, cell `k` of the output reads cell `⌊k/2⌋` of `f`.
pub fn dilate2(f: &GridFn) -> GridFn {
    let values = (0..f.n_cells()).map(|k| f.values[k / 2]).collect();
    GridFn { values, convention: f.convention }
}

/// `(Ψf)(t) = (1/t) ∫_t^{1-t} f` for `t < 1/2`, and `0` otherwise.
pub fn psi_at(f: &GridFn, t: f64) -> f64 {
    if t <= 0.0 || t >= 0.5 {
        return 0.0;
    }
    f.symmetric_integral(t) / t
}

/// The Ψ-transform of a step function. `Ψf` is continuous on `(0,1]` rather
/// than piecewise constant, so it is held as an evaluator over exact integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiTransform {
    source: GridFn,
}

pub fn psi_transform(f: &GridFn) -> PsiTransform {
    PsiTransform { source: f.clone() }
}

impl PsiTransform {
    pub fn eval(&self, t: f64) -> f64 {
        psi_at(&self.source, t)
    }

    pub fn eval_at(&self, t: GridPoint) -> f64 {
        psi_at(&self.source, t.value())
    }

    /// `sup |Ψf|` over `(0,1)`.
    ///
    /// `t·(Ψf)(t)` is affine between consecutive boundaries, so `|Ψf|` is
    /// monotone on each piece. On the first cell `t·(Ψf)(t) = α - t(f₁ + fₙ)`
    /// with `α = ∫₀¹ f`; a nonzero `α` (beyond `1e-10·∫|f|` rounding) makes the
    /// supremum infinite. Otherwise it is attained at a boundary below `1/2` or
    /// on the first cell.
    pub fn sup_abs(&self) -> f64 {
        let n = self.source.n_cells();
        let alpha = self.source.integral();
        let mass = self.source.values.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
        if alpha.abs() > 1e-10 * (1.0 + mass) {
            return f64::INFINITY;
        }
        let first = self.eval(0.5 / n as f64).abs();
        boundaries_in(n, 0.0, 0.5)
            .into_iter()
            .map(|p| self.eval_at(p).abs())
            .fold(first, f64::max)
    }

    pub fn source(&self) -> &GridFn {
        &self.source
    }
}
