//! Seeded random matrix ensembles.
//!
//! Gaussian ensembles are normalized by `1/√n`, so singular values of the
//! complex Ginibre ensemble stay in `[0, 2·scale]` and the Hermitian ensemble
//! has its spectrum near `[−2·scale, 2·scale]` for every `n`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{MatError, MatrixOperator, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    IidComplexGaussian,
    HermitianGaussian,
    DiagonalWithSpectrum(Vec<f64>),
    HaarUnitaryConjugate(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub scale: f64,
    pub seed: u64,
}

fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_entries(n: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Complex Ginibre matrix with `E|a_ij|² = scale²/n`.
pub fn ginibre(n: usize, scale: f64, rng: &mut impl Rng) -> Result<MatrixOperator, MatError> {
    let k = scale / (n as f64).sqrt();
    MatrixOperator::new(gaussian_entries(n, rng).map(|z| z * k))
}

/// Hermitian Gaussian (GUE-type) matrix, exactly self-adjoint by construction.
pub fn hermitian_gaussian(n: usize, scale: f64, rng: &mut impl Rng) -> Result<MatrixOperator, MatError> {
    let k = scale / (n as f64).sqrt();
    let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        m[(i, i)] = C64::new(d * k, 0.0);
        for j in (i + 1)..n {
            let z = complex_gaussian(rng) * k;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    MatrixOperator::new(m)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `diag(R)` divided out.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let qr = gaussian_entries(n, rng).qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

fn check_spectrum(n: usize, spectrum: &[f64]) -> Result<(), MatError> {
    if spectrum.len() != n {
        return Err(MatError::InvalidParameter(format!(
            "prescribed spectrum has {} entries for n = {n}",
            spectrum.len()
        )));
    }
    Ok(())
}

/// Draws a matrix from `spec`. Output is a deterministic function of the spec.
pub fn sample(spec: &EnsembleSpec) -> Result<MatrixOperator, MatError> {
    if spec.n == 0 {
        return Err(MatError::InvalidParameter("n must be ≥ 1".into()));
    }
    if !(spec.scale > 0.0 && spec.scale.is_finite()) {
        return Err(MatError::InvalidParameter(format!("scale {} must be > 0", spec.scale)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    match &spec.kind {
        EnsembleKind::IidComplexGaussian => ginibre(n, spec.scale, &mut rng),
        EnsembleKind::HermitianGaussian => hermitian_gaussian(n, spec.scale, &mut rng),
        EnsembleKind::DiagonalWithSpectrum(spectrum) => {
            check_spectrum(n, spectrum)?;
            let scaled: Vec<f64> = spectrum.iter().map(|x| x * spec.scale).collect();
            MatrixOperator::from_real_diagonal(&scaled)
        }
        EnsembleKind::HaarUnitaryConjugate(spectrum) => {
            check_spectrum(n, spectrum)?;
            let u = haar_unitary(n, &mut rng);
            let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
            for i in 0..n {
                for j in i..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for (k, &d) in spectrum.iter().enumerate() {
                        acc += u[(i, k)] * u[(j, k)].conj() * (d * spec.scale);
                    }
                    m[(i, j)] = acc;
                }
            }
            for i in 0..n {
                m[(i, i)].im = 0.0;
                for j in (i + 1)..n {
                    m[(j, i)] = m[(i, j)].conj();
                }
            }
            MatrixOperator::new(m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: EnsembleKind, n: usize, seed: u64) -> EnsembleSpec {
        EnsembleSpec { kind, n, scale: 1.0, seed }
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        for kind in [EnsembleKind::IidComplexGaussian, EnsembleKind::HermitianGaussian] {
            let a = sample(&spec(kind.clone(), 12, 99)).unwrap();
            let b = sample(&spec(kind.clone(), 12, 99)).unwrap();
            assert_eq!(a.entries(), b.entries());
            let c = sample(&spec(kind, 12, 100)).unwrap();
            assert_ne!(a.entries(), c.entries());
        }
    }

    #[test]
    fn diagonal_spectrum_is_realized() {
        let m = sample(&spec(EnsembleKind::DiagonalWithSpectrum(vec![3.0, 1.0]), 2, 0)).unwrap();
        assert_eq!(m.mu().values(), &[3.0, 1.0]);
        assert!(sample(&spec(EnsembleKind::DiagonalWithSpectrum(vec![3.0]), 2, 0)).is_err());
    }

    #[test]
    fn hermitian_gaussian_is_exactly_self_adjoint() {
        let m = sample(&spec(EnsembleKind::HermitianGaussian, 16, 5)).unwrap();
        assert_eq!(m.hermitian_deviation(), 0.0);
        assert!(m.is_self_adjoint());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(10, &mut rng);
        let prod = u.adjoint() * &u;
        let id = DMatrix::<C64>::identity(10, 10);
        assert!((prod - id).norm() < 1e-12);
    }

    #[test]
    fn haar_conjugate_keeps_spectrum() {
        let spectrum = vec![2.0, 0.5, -1.0, -3.0];
        let m = sample(&spec(EnsembleKind::HaarUnitaryConjugate(spectrum.clone()), 4, 8)).unwrap();
        let lambda = m.lambda().unwrap();
        for (a, b) in lambda.values().iter().zip(&spectrum) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(sample(&EnsembleSpec { kind: EnsembleKind::HermitianGaussian, n: 0, scale: 1.0, seed: 0 }).is_err());
        assert!(sample(&EnsembleSpec { kind: EnsembleKind::HermitianGaussian, n: 3, scale: 0.0, seed: 0 }).is_err());
    }
}
