//! Thin helpers over faer's dense LU.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, MatRef};

use crate::error::{Error, Result};

pub struct Lu {
    lu: faer::linalg::solvers::PartialPivLu<f64>,
}

impl Lu {
    pub fn new(a: MatRef<'_, f64>) -> Self {
        Self { lu: a.partial_piv_lu() }
    }

    /// `(sign, log|det|)`; `None` when a pivot vanishes or is not finite.
    pub fn slogdet(&self) -> Option<(f64, f64)> {
        let u = self.lu.U();
        let mut sign = permutation_sign(self.lu.P().arrays().0);
        let mut log = 0.0;
        for i in 0..u.nrows() {
            let d = u[(i, i)];
            if d == 0.0 || !d.is_finite() {
                return None;
            }
            sign *= d.signum();
            log += d.abs().ln();
        }
        Some((sign, log))
    }

    pub fn solve(&self, rhs: MatRef<'_, f64>) -> Mat<f64> {
        self.lu.solve(rhs)
    }

    pub fn inverse(&self) -> Mat<f64> {
        self.lu.inverse()
    }
}

fn permutation_sign(fwd: &[usize]) -> f64 {
    let mut seen = vec![false; fwd.len()];
    let mut transpositions = 0usize;
    for start in 0..fwd.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = fwd[i];
            len += 1;
        }
        transpositions += len - 1;
    }
    if transpositions % 2 == 0 { 1.0 } else { -1.0 }
}

/// `log det a`, failing on a vanishing pivot or a negative determinant.
pub fn logdet_positive(a: MatRef<'_, f64>, iteration: usize) -> Result<f64> {
    match Lu::new(a).slogdet() {
        Some((s, l)) if s > 0.0 => Ok(l),
        _ => Err(Error::SingularKernel { iteration }),
    }
}

pub fn identity_minus(a: MatRef<'_, f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (i == j) as u8 as f64 - a[(i, j)])
}

pub fn max_abs(a: MatRef<'_, f64>) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].abs());
        }
    }
    m
}
