//! Finite matrix models of a tracial algebra: `n×n` complex matrices with the
//! normalized trace `τ = (1/n)·tr`.
//!
//! Singular values (and, for self-adjoint matrices, the eigendecomposition)
//! are computed once at construction. Every step function derived from a
//! [`MatrixOperator`] reads from these caches.

mod ensemble;
mod io;

pub use ensemble::{ginibre, haar_unitary, hermitian_gaussian, sample, EnsembleKind, EnsembleSpec};
pub use io::{parse_matrix, write_matrix};

use nalgebra::{DMatrix, SVD, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::stepfn::{MonotoneStepFn, StepError};

pub type C64 = Complex64;

/// Relative hermiticity tolerance, applied against the spectral norm.
pub const HERMITICITY_REL_TOL: f64 = 1e-12;
const HERMITICITY_ABS_FLOOR: f64 = 1e-300;
const MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatError {
    #[error("matrix must be square and non-empty, got {rows}×{cols}")]
    Shape { rows: usize, cols: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("operator is not self-adjoint (max |A - A†| = {deviation:e}, tolerance {tolerance:e})")]
    NotSelfAdjoint { deviation: f64, tolerance: f64 },
    #[error("{what} failed to converge")]
    Decomposition { what: &'static str },
    #[error("functional calculus domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix text format: {0}")]
    Parse(String),
    #[error(transparent)]
    Step(#[from] StepError),
}

#[derive(Clone, Debug)]
struct Eigen {
    /// nonincreasing
    values: Vec<f64>,
    /// columns ordered like `values`
    vectors: DMatrix<C64>,
}

#[derive(Clone, Debug)]
pub struct MatrixOperator {
    entries: DMatrix<C64>,
    singular_values: Vec<f64>,
    eigen: Option<Eigen>,
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Copies the upper triangle onto the lower one and zeroes imaginary
/// diagonal parts. Only used on results that are Hermitian by construction.
fn mirror_upper(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
}

impl MatrixOperator {
    pub fn new(entries: DMatrix<C64>) -> Result<Self, MatError> {
        let (rows, cols) = entries.shape();
        if rows == 0 || rows != cols {
            return Err(MatError::Shape { rows, cols });
        }
        for row in 0..rows {
            for col in 0..cols {
                let z = entries[(row, col)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(MatError::NonFinite { row, col });
                }
            }
        }
        let svd = SVD::try_new(entries.clone(), false, false, f64::EPSILON, MAX_SWEEPS)
            .ok_or(MatError::Decomposition { what: "singular value decomposition" })?;
        let singular_values = sorted_desc(svd.singular_values.iter().copied().collect());
        let norm = singular_values[0];
        let tolerance = (HERMITICITY_REL_TOL * norm).max(HERMITICITY_ABS_FLOOR);
        let eigen = if hermitian_deviation(&entries) <= tolerance {
            Some(Self::decompose_hermitian(&entries)?)
        } else {
            None
        };
        Ok(MatrixOperator { entries, singular_values, eigen })
    }

    fn decompose_hermitian(m: &DMatrix<C64>) -> Result<Eigen, MatError> {
        let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_SWEEPS)
            .ok_or(MatError::Decomposition { what: "Hermitian eigendecomposition" })?;
        let n = m.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(Eigen { values, vectors })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self, MatError> {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self, MatError> {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; n]).expect("identity is valid")
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_real_diagonal(&vec![0.0; n]).expect("zero matrix is valid")
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// Nonincreasing, nonnegative.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Nonincreasing eigenvalues, present only for self-adjoint operators.
    pub fn eigenvalues(&self) -> Option<&[f64]> {
        self.eigen.as_ref().map(|e| e.values.as_slice())
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.eigen.is_some()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.entries)
    }

    /// Operator norm.
    pub fn norm(&self) -> f64 {
        self.singular_values[0]
    }

    /// Normalized trace `(1/n)·tr A`.
    pub fn tau(&self) -> C64 {
        self.entries.trace() / self.n() as f64
    }

    /// Number of singular values above `n·ε·‖A‖`.
    pub fn numerical_rank(&self) -> usize {
        let cutoff = self.n() as f64 * f64::EPSILON * self.norm();
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn is_singular(&self) -> bool {
        self.norm() == 0.0 || self.numerical_rank() < self.n()
    }

    /// `μ(A)`: the `k`-th cell holds the `k`-th largest singular value.
    pub fn mu(&self) -> MonotoneStepFn {
        MonotoneStepFn::new(self.singular_values.clone()).expect("sorted singular values")
    }

    /// `λ(A)` for self-adjoint `A`: the `k`-th cell holds the `k`-th largest eigenvalue.
    pub fn lambda(&self) -> Result<MonotoneStepFn, MatError> {
        let eigen = self.eigen_or_err()?;
        Ok(MonotoneStepFn::new(eigen.values.clone())?)
    }

    fn eigen_or_err(&self) -> Result<&Eigen, MatError> {
        self.eigen.as_ref().ok_or_else(|| MatError::NotSelfAdjoint {
            deviation: self.hermitian_deviation(),
            tolerance: (HERMITICITY_REL_TOL * self.norm()).max(HERMITICITY_ABS_FLOOR),
        })
    }

    fn check_dim(&self, other: &MatrixOperator) -> Result<(), MatError> {
        if self.n() != other.n() {
            return Err(MatError::DimensionMismatch { left: self.n(), right: other.n() });
        }
        Ok(())
    }

    pub fn product(&self, other: &MatrixOperator) -> Result<MatrixOperator, MatError> {
        self.check_dim(other)?;
        Self::new(&self.entries * &other.entries)
    }

    pub fn sum(&self, other: &MatrixOperator) -> Result<MatrixOperator, MatError> {
        self.check_dim(other)?;
        Self::new(&self.entries + &other.entries)
    }

    pub fn difference(&self, other: &MatrixOperator) -> Result<MatrixOperator, MatError> {
        self.check_dim(other)?;
        Self::new(&self.entries - &other.entries)
    }

    pub fn scaled(&self, c: f64) -> Result<MatrixOperator, MatError> {
        Self::new(self.entries.map(|z| z * c))
    }

    /// `A + c·1`
    pub fn shifted(&self, c: f64) -> Result<MatrixOperator, MatError> {
        let mut m = self.entries.clone();
        for i in 0..self.n() {
            m[(i, i)] += C64::new(c, 0.0);
        }
        Self::new(m)
    }

    pub fn adjoint(&self) -> Result<MatrixOperator, MatError> {
        Self::new(self.entries.adjoint())
    }

    pub fn inverse(&self) -> Result<MatrixOperator, MatError> {
        if self.is_singular() {
            return Err(MatError::Domain("inverse of a singular matrix".into()));
        }
        let inv = self
            .entries
            .clone()
            .try_inverse()
            .ok_or_else(|| MatError::Domain("inverse of a singular matrix".into()))?;
        Self::new(inv)
    }

    /// `V f(D) V†` for self-adjoint `A = V D V†`.
    pub fn functional_calculus(&self, map: impl Fn(f64) -> f64) -> Result<MatrixOperator, MatError> {
        Self::new(self.functional_calculus_entries(map)?)
    }

    /// The entries of `f(A)`, exactly Hermitian, without decomposing the result.
    pub fn functional_calculus_entries(&self, map: impl Fn(f64) -> f64) -> Result<DMatrix<C64>, MatError> {
        let eigen = self.eigen_or_err()?;
        let n = self.n();
        let mapped: Vec<f64> = eigen.values.iter().map(|&x| map(x)).collect();
        if let Some(bad) = mapped.iter().position(|v| !v.is_finite()) {
            return Err(MatError::Domain(format!(
                "map is not finite at eigenvalue {}",
                eigen.values[bad]
            )));
        }
        let v = &eigen.vectors;
        let mut out = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &fk) in mapped.iter().enumerate() {
                    if fk != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * fk;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        mirror_upper(&mut out);
        Ok(out)
    }

    pub fn exp(&self) -> Result<MatrixOperator, MatError> {
        self.functional_calculus(f64::exp)
    }

    /// Requires a strictly positive definite operator.
    pub fn log(&self) -> Result<MatrixOperator, MatError> {
        let min = *self.eigen_or_err()?.values.last().expect("n ≥ 1");
        if min <= 0.0 {
            return Err(MatError::Domain(format!("log of an operator with eigenvalue {min}")));
        }
        self.functional_calculus(f64::ln)
    }

    /// `T₊ = max(T, 0)`
    pub fn positive_part(&self) -> Result<MatrixOperator, MatError> {
        self.functional_calculus(|x| x.max(0.0))
    }

    /// `T₋ = -min(T, 0)`
    pub fn negative_part(&self) -> Result<MatrixOperator, MatError> {
        self.functional_calculus(|x| (-x).max(0.0))
    }

    /// Spectral projection `1_{[lo, hi]}(A)` onto a closed interval.
    pub fn spectral_projection(&self, lo: f64, hi: f64) -> Result<MatrixOperator, MatError> {
        self.functional_calculus(|x| if (lo..=hi).contains(&x) { 1.0 } else { 0.0 })
    }

    /// `T₀ = min{T₊, c} − min{T₋, c}`, i.e. the eigenvalues of `T` clipped to `[−c, c]`.
    pub fn truncate_at_level(&self, c: f64) -> Result<MatrixOperator, MatError> {
        if c.is_nan() || c < 0.0 {
            return Err(MatError::InvalidParameter(format!("truncation level {c} must be ≥ 0")));
        }
        self.functional_calculus(|x| x.clamp(-c, c))
    }

    /// `A†A`, assembled from its upper triangle so it is exactly Hermitian.
    pub fn gram(&self) -> Result<MatrixOperator, MatError> {
        let n = self.n();
        let a = &self.entries;
        let mut gram = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += a[(k, i)].conj() * a[(k, j)];
                }
                gram[(i, j)] = acc;
            }
        }
        mirror_upper(&mut gram);
        MatrixOperator::new(gram)
    }

    /// `|A| = (A†A)^{1/2}`.
    pub fn polar_abs(&self) -> Result<MatrixOperator, MatError> {
        self.gram()?.functional_calculus(|x| x.max(0.0).sqrt())
    }

    /// The Fuglede–Kadison determinant `Δ(A) = (∏ σ_k)^{1/n} = |det A|^{1/n}`.
    /// Returns exactly `0` for numerically singular matrices.
    pub fn fk_det(&self) -> f64 {
        if self.is_singular() {
            return 0.0;
        }
        let mean_log = self.singular_values.iter().map(|s| s.ln()).sum::<f64>() / self.n() as f64;
        mean_log.exp()
    }

    /// `exp(τ(log(|A| + ε)))`.
    pub fn fk_det_eps(&self, eps: f64) -> Result<f64, MatError> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(MatError::InvalidParameter(format!("ε = {eps} must be > 0")));
        }
        let mean_log =
            self.singular_values.iter().map(|s| (s + eps).ln()).sum::<f64>() / self.n() as f64;
        Ok(mean_log.exp())
    }
}
