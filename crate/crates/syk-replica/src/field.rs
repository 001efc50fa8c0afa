use faer::Mat;
use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Flavor-resolved two-time grid, stored row-major over the combined
/// index `flavor * points + k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilocalField {
    flavors: usize,
    points: usize,
    data: Vec<f64>,
}

impl BilocalField {
    pub fn zeros(flavors: usize, points: usize) -> Self {
        let n = flavors * points;
        Self { flavors, points, data: vec![0.0; n * n] }
    }

    pub fn from_fn(flavors: usize, points: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = flavors * points;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { flavors, points, data }
    }

    pub fn from_vec(flavors: usize, points: usize, data: Vec<f64>) -> Result<Self> {
        let n = flavors * points;
        if data.len() != n * n {
            return Err(Error::Dimension(format!("expected {} values, got {}", n * n, data.len())));
        }
        Ok(Self { flavors, points, data })
    }

    pub fn from_mat(flavors: usize, points: usize, m: &Mat<f64>, scale: f64) -> Self {
        Self::from_fn(flavors, points, |i, j| m[(i, j)] * scale)
    }

    pub fn to_mat(&self, scale: f64) -> Mat<f64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| self.data[i * n + j] * scale)
    }

    pub fn flavors(&self) -> usize {
        self.flavors
    }

    /// Grid points per flavor.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dim(&self) -> usize {
        self.flavors * self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn at(&self, fa: usize, a: usize, fb: usize, b: usize) -> f64 {
        self[(fa * self.points + a, fb * self.points + b)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { flavors: self.flavors, points: self.points, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest violation of `F(i,j) = -F(j,i)`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] + self.data[j * n + i]).abs());
            }
        }
        worst
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.flavors != other.flavors || self.points != other.points {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.flavors, self.points, other.flavors, other.points
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for BilocalField {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim() + j]
    }
}

impl IndexMut<(usize, usize)> for BilocalField {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        let n = self.dim();
        &mut self.data[i * n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mat_round_trip() {
        let f = BilocalField::from_fn(2, 3, |i, j| i as f64 - 2.0 * j as f64);
        let back = BilocalField::from_mat(2, 3, &f.to_mat(2.0), 0.5);
        assert_eq!(f, back);
        assert_eq!(f.at(1, 0, 0, 2), 3.0 - 4.0);
    }

    #[test]
    fn antisymmetry_defect_detects_symmetric_part() {
        let a = BilocalField::from_fn(1, 4, |i, j| i as f64 - j as f64);
        assert_eq!(a.antisymmetry_defect(), 0.0);
        let mut b = a.clone();
        b[(0, 1)] += 0.25;
        assert_eq!(b.antisymmetry_defect(), 0.25);
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(BilocalField::from_vec(1, 3, vec![0.0; 8]).is_err());
    }
}
