//! Anderson mixing for the fixed-point map `x -> g(x)`.

use std::collections::VecDeque;

pub(crate) struct Anderson {
    depth: usize,
    mixing: f64,
    xs: VecDeque<Vec<f64>>,
    fs: VecDeque<Vec<f64>>,
}

impl Anderson {
    pub fn new(depth: usize, mixing: f64) -> Self {
        Self { depth, mixing, xs: VecDeque::new(), fs: VecDeque::new() }
    }

    pub fn reset(&mut self) {
        self.xs.clear();
        self.fs.clear();
    }

    /// Next iterate given the current point `x` and residual `f = g(x) - x`.
    pub fn next(&mut self, x: &[f64], f: &[f64]) -> Vec<f64> {
        let b = self.mixing;
        if self.depth == 0 {
            return x.iter().zip(f).map(|(x, f)| x + b * f).collect();
        }
        self.xs.push_back(x.to_vec());
        self.fs.push_back(f.to_vec());
        if self.xs.len() > self.depth + 1 {
            self.xs.pop_front();
            self.fs.pop_front();
        }
        let m = self.xs.len() - 1;
        let mut out: Vec<f64> = x.iter().zip(f).map(|(x, f)| x + b * f).collect();
        if m == 0 {
            return out;
        }
        let df: Vec<Vec<f64>> =
            (0..m).map(|i| self.fs[i + 1].iter().zip(&self.fs[i]).map(|(a, b)| a - b).collect()).collect();
        let mut gram = vec![0.0; m * m];
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            rhs[i] = dot(&df[i], f);
            for j in i..m {
                let v = dot(&df[i], &df[j]);
                gram[i * m + j] = v;
                gram[j * m + i] = v;
            }
        }
        let scale = (0..m).map(|i| gram[i * m + i]).fold(0.0, f64::max);
        if scale == 0.0 {
            return out;
        }
        for i in 0..m {
            gram[i * m + i] += 1e-12 * scale;
        }
        let Some(gamma) = solve_small(&mut gram, &mut rhs, m) else {
            self.reset();
            return out;
        };
        for (i, &g) in gamma.iter().enumerate() {
            let (x1, x0) = (&self.xs[i + 1], &self.xs[i]);
            let d = &df[i];
            for k in 0..out.len() {
                out[k] -= g * ((x1[k] - x0[k]) + b * d[k]);
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve_small(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))?;
        if a[p * n + c].abs() < 1e-300 || !a[p * n + c].is_finite() {
            return None;
        }
        if p != c {
            for k in 0..n {
                a.swap(c * n + k, p * n + k);
            }
            b.swap(c, p);
        }
        for r in c + 1..n {
            let f = a[r * n + c] / a[c * n + c];
            for k in c..n {
                a[r * n + k] -= f * a[c * n + k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
