//! Adaptive Gauss–Kronrod (7/15) quadrature, with dyadic splitting toward an
//! integrable singularity at the left endpoint.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("quadrature did not reach relative tolerance {tol} (estimate {estimate}, error {error})")]
    NoConvergence { tol: f64, estimate: f64, error: f64 },
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };
    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    depth: u32,
) -> Result<(f64, f64), QuadError> {
    let (value, err) = gk15(f, a, b)?;
    if err <= abs_tol || depth == 0 || (b - a) <= 1e-15 * a.abs().max(b.abs()) {
        return Ok((value, err));
    }
    let mid = 0.5 * (a + b);
    let (l, el) = adaptive(f, a, mid, 0.5 * abs_tol, depth - 1)?;
    let (r, er) = adaptive(f, mid, b, 0.5 * abs_tol, depth - 1)?;
    Ok((l + r, el + er))
}

/// `∫_a^b f` for a smooth integrand, to relative tolerance `rel_tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    let (rough, _) = gk15(f, a, b)?;
    let target = rel_tol * rough.abs().max(1e-300);
    let (value, err) = adaptive(f, a, b, target, 40)?;
    if err > rel_tol * value.abs().max(1e-300) * 10.0 && err > 1e-300 {
        return Err(QuadError::NoConvergence { tol: rel_tol, estimate: value, error: err });
    }
    Ok(value)
}

/// `∫_0^t f` for `f` nonnegative and possibly singular (but integrable) at `0`.
///
/// `(0,t)` is split into dyadic pieces `(t/2^{k+1}, t/2^k)`; summation stops
/// once pieces are negligible, and the remaining tail is estimated from the
/// geometric decay of the last pieces.
pub fn integrate_from_zero(f: &dyn Fn(f64) -> f64, t: f64, rel_tol: f64) -> Result<f64, QuadError> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut hi = t;
    let mut prev_piece = f64::INFINITY;
    let mut small_run = 0;
    for _ in 0..1060 {
        let lo = 0.5 * hi;
        if lo < 1e-280 {
            // pieces still matter this close to 0: the tail decays too slowly to sum
            return Err(QuadError::NoConvergence { tol: rel_tol, estimate: total, error: f64::INFINITY });
        }
        let piece = integrate(f, lo, hi, rel_tol * 0.1)?;
        total += piece;
        let ratio = if prev_piece.is_finite() && prev_piece > 0.0 { piece / prev_piece } else { 1.0 };
        if piece.abs() <= rel_tol * 1e-2 * total.abs() && ratio < 1.0 {
            small_run += 1;
            if small_run >= 3 {
                total += piece * ratio / (1.0 - ratio);
                return Ok(total);
            }
        } else {
            small_run = 0;
        }
        prev_piece = piece;
        hi = lo;
    }
    Ok(total)
}
