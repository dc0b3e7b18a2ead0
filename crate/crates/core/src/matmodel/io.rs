//! Plain-text matrix files: a first line holding `n`, then `n` rows of `n`
//! whitespace-separated `re,im` pairs, row-major.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{MatError, MatrixOperator, C64};

/// Writes with 17 significant digits, enough to restore every `f64` exactly.
pub fn write_matrix(m: &MatrixOperator) -> String {
    let n = m.n();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let z = m.entries()[(i, j)];
                format!("{:.16e},{:.16e}", z.re, z.im)
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<MatrixOperator, MatError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| MatError::Parse("empty input".into()))?;
    let n: usize = header
        .parse()
        .map_err(|_| MatError::Parse(format!("first line must be the dimension, got {header:?}")))?;
    if n == 0 {
        return Err(MatError::Parse("dimension must be ≥ 1".into()));
    }
    let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| MatError::Parse(format!("expected {n} rows, found {i}")))?;
        let pairs: Vec<&str> = line.split_whitespace().collect();
        if pairs.len() != n {
            return Err(MatError::Parse(format!("row {} has {} entries, expected {n}", i + 1, pairs.len())));
        }
        for (j, pair) in pairs.iter().enumerate() {
            let (re, im) = pair
                .split_once(',')
                .ok_or_else(|| MatError::Parse(format!("entry ({}, {}) is not re,im: {pair:?}", i + 1, j + 1)))?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| MatError::Parse(format!("entry ({}, {}): bad number {s:?}", i + 1, j + 1)))
            };
            m[(i, j)] = C64::new(parse(re)?, parse(im)?);
        }
    }
    if lines.next().is_some() {
        return Err(MatError::Parse(format!("trailing content after {n} rows")));
    }
    MatrixOperator::new(m)
}
