//! Dense matrix exponential via scaling and squaring with a truncated
//! Taylor series.
//!
//! The argument is scaled until its max-norm is at most one half, the series
//! is summed to degree 18 (remainder below 1e-22 at that radius), and the
//! result is squared back up. Nilpotent arguments stay exact because their
//! powers vanish identically.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpError {
    #[error("matrix is not square")]
    NonSquare,
    #[error("matrix entries and time must be finite")]
    NonFinite,
}

pub type Matrix = Vec<Vec<f64>>;

const TAYLOR_DEGREE: usize = 18;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(&x, &y)| x * y).sum())
        .collect()
}

/// Largest absolute entry.
pub fn max_norm(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

pub fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (&x, &y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

/// Computes `exp(tA)`.
pub fn matrix_exp(a: &[Vec<f64>], t: f64) -> Result<Matrix, ExpError> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(ExpError::NonSquare);
    }
    if !t.is_finite() || a.iter().flatten().any(|x| !x.is_finite()) {
        return Err(ExpError::NonFinite);
    }
    let scaled_input: Matrix = a
        .iter()
        .map(|row| row.iter().map(|&x| x * t).collect())
        .collect();
    let norm = max_norm(&scaled_input);
    let squarings = if norm <= 0.5 {
        0
    } else {
        (norm / 0.5).log2().ceil() as u32
    };
    let factor = 2.0f64.powi(squarings as i32);
    let x: Matrix = scaled_input
        .iter()
        .map(|row| row.iter().map(|&v| v / factor).collect())
        .collect();

    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=TAYLOR_DEGREE {
        term = mat_mul(&term, &x);
        for row in term.iter_mut() {
            for entry in row.iter_mut() {
                *entry /= k as f64;
            }
        }
        for (ri, row) in term.iter().enumerate() {
            for (ci, &entry) in row.iter().enumerate() {
                result[ri][ci] += entry;
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    Ok(result)
}
