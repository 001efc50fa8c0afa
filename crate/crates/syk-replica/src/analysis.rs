//! Post-processing: conformal fits, perturbative coefficients, zero
//! temperature extrapolation, thresholds and SSB onset detection.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::Lu;
use faer::Mat;

/// Tolerance on the HS minimizer above which the strong symmetry counts as
/// broken.
pub const SSB_TOL: f64 = 1e-4;

/// Not-a-knot cubic spline through `(x, y)` with increasing `x`.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m2: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() || n < 2 {
            return Err(Error::InsufficientPoints { need: 2, got: n.min(y.len()) });
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("spline knots must increase".into()));
        }
        // second derivatives; not-a-knot ends from four knots on, natural below
        let mut a = Mat::<f64>::zeros(n, n);
        let mut rhs = Mat::<f64>::zeros(n, 1);
        for i in 1..n - 1 {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            a[(i, i - 1)] = h0;
            a[(i, i)] = 2.0 * (h0 + h1);
            a[(i, i + 1)] = h1;
            rhs[(i, 0)] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        if n >= 4 {
            let (h0, h1) = (x[1] - x[0], x[2] - x[1]);
            a[(0, 0)] = h1;
            a[(0, 1)] = -(h0 + h1);
            a[(0, 2)] = h0;
            let (g0, g1) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
            a[(n - 1, n - 3)] = g1;
            a[(n - 1, n - 2)] = -(g0 + g1);
            a[(n - 1, n - 1)] = g0;
        } else {
            a[(0, 0)] = 1.0;
            a[(n - 1, n - 1)] = 1.0;
        }
        let sol = Lu::new(a.as_ref()).solve(rhs.as_ref());
        let m2: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m2 })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    fn locate(&self, t: f64) -> (usize, f64, f64, f64) {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        (i, h, (self.x[i + 1] - t) / h, (t - self.x[i]) / h)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (i, h, a, b) = self.locate(t);
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m2[i + 1] - (3.0 * a * a - 1.0) * self.m2[i]) * h / 6.0
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (i, h, a, b) = self.locate(t);
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m2[i] + (b * b * b - b) * self.m2[i + 1]) * h * h / 6.0
    }
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Global minimum of `f` on `[a, b]`: dense sampling, then golden section
/// in the bracket around the best sample. Endpoints are candidates.
pub fn minimize_on(f: impl Fn(f64) -> f64, a: f64, b: f64, samples: usize) -> (f64, f64) {
    if !(b > a) {
        return (a, f(a));
    }
    let n = samples.max(3);
    let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let k = (0..n).min_by(|&i, &j| fs[i].total_cmp(&fs[j])).unwrap();
    let (lo, hi) = (xs[k.saturating_sub(1)], xs[(k + 1).min(n - 1)]);
    let (x, fx) = golden_section(&f, lo, hi, 1e-10 * (b - a).max(1.0));
    if fx < fs[k] { (x, fx) } else { (xs[k], fs[k]) }
}

/// Weighted least squares for `y ~ sum_j c_j x^{powers[j]}`.
/// Returns coefficients, their covariance (scaled by the residual variance
/// when there are spare degrees of freedom) and the rms residual.
pub fn least_squares(x: &[f64], y: &[f64], powers: &[i32]) -> Result<(Vec<f64>, Vec<Vec<f64>>, f64)> {
    let (n, k) = (x.len(), powers.len());
    if n < k || n != y.len() {
        return Err(Error::InsufficientPoints { need: k, got: n });
    }
    let a = faer::Mat::from_fn(n, k, |i, j| x[i].powi(powers[j]));
    let ata = a.transpose() * &a;
    let aty = a.transpose() * faer::Mat::from_fn(n, 1, |i, _| y[i]);
    let lu = crate::linalg::Lu::new(ata.as_ref());
    if lu.slogdet().is_none() {
        return Err(Error::Fit("singular normal equations".into()));
    }
    let c = lu.solve(aty.as_ref());
    let coef: Vec<f64> = (0..k).map(|j| c[(j, 0)]).collect();
    let resid: Vec<f64> = (0..n)
        .map(|i| y[i] - (0..k).map(|j| coef[j] * x[i].powi(powers[j])).sum::<f64>())
        .collect();
    let ss: f64 = resid.iter().map(|r| r * r).sum();
    let var = if n > k { ss / (n - k) as f64 } else { 0.0 };
    let inv = lu.inverse();
    let cov = (0..k).map(|i| (0..k).map(|j| inv[(i, j)] * var).collect()).collect();
    Ok((coef, cov, (ss / n as f64).sqrt()))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConformalFit {
    pub delta: f64,
    pub amplitude: f64,
    pub residual: f64,
}

/// Fits `G(tau) = A (pi / (beta sin(pi tau / beta)))^{2 Delta}` on
/// `tau in [0.2 beta, 0.8 beta]`.
pub fn fit_conformal(curve: &[(f64, f64)], beta: f64) -> Result<ConformalFit> {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &(tau, g) in curve {
        if tau < 0.2 * beta || tau > 0.8 * beta {
            continue;
        }
        if !(g > 0.0) {
            return Err(Error::NonPositive(tau));
        }
        xs.push((PI / (beta * (PI * tau / beta).sin())).ln());
        ys.push(g.ln());
    }
    let (c, _, residual) = least_squares(&xs, &ys, &[0, 1])?;
    Ok(ConformalFit { delta: c[1] / 2.0, amplitude: c[0].exp(), residual })
}

/// Coefficient `Gamma` of `s(p) - s(0) - slope p = -Gamma p^2 + c3 p^3`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub gamma: f64,
    pub cubic: f64,
    pub residual: f64,
}

/// Fits the second-order coefficient of a small-rate series with the
/// first-order slope removed. `shift` holds `s(p) - s(0)`.
pub fn fit_quadratic(p: &[f64], shift: &[f64], slope: f64) -> Result<QuadraticFit> {
    let y: Vec<f64> = p.iter().zip(shift).map(|(p, s)| s - slope * p).collect();
    let (c, _, residual) = if p.len() >= 3 {
        least_squares(p, &y, &[2, 3])?
    } else {
        let (c, cov, r) = least_squares(p, &y, &[2])?;
        (vec![c[0], 0.0], cov, r)
    };
    Ok(QuadraticFit { gamma: -c[0], cubic: c[1], residual })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbativeFit {
    pub renyi_n: usize,
    pub beta: f64,
    /// Second-order coefficients in the rate `p`.
    pub gamma_q: f64,
    pub gamma_qr: f64,
    /// First-order slopes `ds/dp` at zero rate.
    pub slope_q: f64,
    pub slope_qr: f64,
    pub fit_window: Vec<f64>,
    pub residual: f64,
}

impl PerturbativeFit {
    /// Second-order coefficient in the HS variable `phi`, using
    /// `p_phi = phi - phi^2 + O(phi^3)`.
    pub fn gamma_q_phi(&self) -> f64 {
        self.gamma_q + self.slope_q
    }

    pub fn gamma_qr_phi(&self) -> f64 {
        self.gamma_qr + self.slope_qr
    }

    /// Perturbative SSB onset `n / (2 Gamma_phi)`.
    pub fn predicted_qc(&self) -> f64 {
        self.renyi_n as f64 / (2.0 * self.gamma_q_phi())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    pub sigma: f64,
    pub order: usize,
}

/// Polynomial fit in `T = 1/beta`; returns the `T = 0` intercept and its
/// standard error from the fit covariance.
pub fn extrapolate_zero_t(values: &[(f64, f64)], order: usize) -> Result<Extrapolation> {
    if order == 0 || order > 2 {
        return Err(Error::InvalidParameter(format!("extrapolation order {order} (use 1 or 2)")));
    }
    if values.len() < order + 1 {
        return Err(Error::InsufficientPoints { need: order + 1, got: values.len() });
    }
    let t: Vec<f64> = values.iter().map(|(b, _)| 1.0 / b).collect();
    let y: Vec<f64> = values.iter().map(|(_, y)| *y).collect();
    let powers: Vec<i32> = (0..=order as i32).collect();
    let (c, cov, _) = least_squares(&t, &y, &powers)?;
    Ok(Extrapolation { value: c[0], sigma: cov[0][0].max(0.0).sqrt(), order })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub rate: f64,
    /// The cut was never crossed; `rate` is the scan's right endpoint.
    pub open_ended: bool,
}

/// Largest rate with `ic >= (1 - epsilon) clean`, on the running minimum
/// of the curve (which enforces monotonicity), linearly interpolated.
pub fn epsilon_threshold(curve: &[(f64, f64)], clean: f64, epsilon: f64) -> Result<Crossing> {
    if curve.is_empty() {
        return Err(Error::EmptyScan);
    }
    let cut = (1.0 - epsilon) * clean;
    let mut mono = Vec::with_capacity(curve.len());
    let mut run = f64::INFINITY;
    for &(r, v) in curve {
        run = run.min(v);
        mono.push((r, run));
    }
    if mono[0].1 < cut {
        return Ok(Crossing { rate: mono[0].0, open_ended: false });
    }
    for w in mono.windows(2) {
        let ((r0, v0), (r1, v1)) = (w[0], w[1]);
        if v1 < cut {
            let t = if v0 > v1 { (v0 - cut) / (v0 - v1) } else { 0.0 };
            return Ok(Crossing { rate: r0 + t * (r1 - r0), open_ended: false });
        }
    }
    Ok(Crossing { rate: mono.last().unwrap().0, open_ended: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Onset {
    pub q_c: f64,
    pub open_ended: bool,
}

/// Smallest scanned `q` with `phi_star > tol`, placed at the midpoint of
/// the bracketing scan points.
pub fn detect_ssb_onset(scan: &[(f64, f64)], tol: f64) -> Result<Onset> {
    if scan.is_empty() {
        return Err(Error::EmptyScan);
    }
    match scan.iter().position(|&(_, phi)| phi > tol) {
        None => Ok(Onset { q_c: scan.last().unwrap().0, open_ended: true }),
        Some(0) => Ok(Onset { q_c: scan[0].0, open_ended: false }),
        Some(i) => Ok(Onset { q_c: 0.5 * (scan[i - 1].0 + scan[i].0), open_ended: false }),
    }
}

/// Bisection refinement of the onset between a symmetric `lo` and a broken
/// `hi`, given a minimizer evaluator.
pub fn refine_onset(phi_star: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64, rel: f64) -> f64 {
    while hi - lo > rel * hi {
        let mid = 0.5 * (lo + hi);
        if phi_star(mid) > tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Temperature for system size `n` under `beta = c N^alpha`.
pub fn beta_of_n(n: f64, c: f64, alpha: f64) -> f64 {
    c * n.powf(alpha)
}

/// Perturbative Rényi-2 coherent information per Majorana under
/// parity-breaking noise: `s0 - A N^{-2 alpha Delta} p - (Gq - Gqr) p^2`.
pub fn perturbative_breaking(p: f64, s0: f64, a: f64, dgamma: f64, n: f64, alpha: f64, delta: f64) -> f64 {
    s0 - a * n.powf(-2.0 * alpha * delta) * p - dgamma * p * p
}

/// Perturbative Rényi-`k` coherent information per Majorana under
/// parity-conserving noise: `s0 - N^{-4 alpha Delta} / (k/(2q) - Gq)`,
/// valid below the pole.
pub fn perturbative_conserving(q: f64, s0: f64, gamma_q: f64, n: f64, alpha: f64, delta: f64, k: usize) -> f64 {
    s0 - n.powf(-4.0 * alpha * delta) / (k as f64 / (2.0 * q) - gamma_q)
}

/// Asymptotic parity-breaking threshold for `epsilon ~ N^-eta`:
/// `min(N^{2 alpha Delta - eta}, N^{-eta/2} / sqrt(Gq - Gqr))`.
pub fn breaking_threshold_asymptotic(n: f64, alpha: f64, delta: f64, eta: f64, dgamma: f64) -> f64 {
    n.powf(2.0 * alpha * delta - eta).min(n.powf(-eta / 2.0) / dgamma.sqrt())
}

/// Asymptotic parity-conserving threshold `1 / (Gq + N^{eta - 4 alpha Delta})`.
pub fn conserving_threshold_asymptotic(n: f64, alpha: f64, delta: f64, eta: f64, gamma_q: f64) -> f64 {
    1.0 / (gamma_q + n.powf(eta - 4.0 * alpha * delta))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub n: usize,
    /// Inverse temperature, `None` for the zero temperature extrapolation.
    pub beta: Option<f64>,
    /// System size under `beta = c N^alpha`.
    pub n_majorana: Option<f64>,
    pub q_c: f64,
    pub q_c_open_ended: bool,
    /// Epsilon threshold of the parity-conserving curve.
    pub q_th: f64,
    pub q_th_open_ended: bool,
    pub p_th: f64,
    pub p_th_open_ended: bool,
    pub epsilon: f64,
    pub eta: Option<f64>,
    pub c: f64,
    pub alpha: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubic_interior_and_knots() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| (2.0 * t).sin()).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((s.eval(*a) - b).abs() < 1e-14);
        }
        assert!((s.eval(1.234) - (2.468f64).sin()).abs() < 1e-4);
        assert!(CubicSpline::new(&[0.0, 0.0], &[1.0, 2.0]).is_err());
        let x = [0.0, 0.1, 0.3, 0.7, 1.5, 2.0];
        let c = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t - 0.3 * t * t * t;
        let y: Vec<f64> = x.iter().map(|&t| c(t)).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for t in [0.0, 0.01, 0.05, 0.5, 1.9] {
            assert!((s.eval(t) - c(t)).abs() < 1e-12);
            let dc = -2.0 + t - 0.9 * t * t;
            assert!((s.derivative(t) - dc).abs() < 1e-11);
        }
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, f) = golden_section(|t| (t - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10);
        // x is resolved to about sqrt(eps) near a quadratic minimum
        assert!((x - 0.3).abs() < 1e-7 && (f - 1.0).abs() < 1e-14);
        let (x, _) = minimize_on(|t| -(t - 0.2).powi(2), 0.0, 1.0, 11);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn conformal_fit_is_exact_on_synthetic_data() {
        let beta = 10.0;
        let curve: Vec<(f64, f64)> = (1..200)
            .map(|k| {
                let tau = k as f64 * beta / 200.0;
                (tau, 0.7 * (PI / (beta * (PI * tau / beta).sin())).powf(0.6))
            })
            .collect();
        let f = fit_conformal(&curve, beta).unwrap();
        assert!((f.delta - 0.3).abs() < 1e-12);
        assert!((f.amplitude - 0.7).abs() < 1e-12);
        assert!(f.residual < 1e-10);
        let bad = vec![(5.0, -0.1)];
        assert!(matches!(fit_conformal(&bad, beta), Err(Error::NonPositive(_))));
    }

    #[test]
    fn quadratic_fit_synthetic() {
        let p = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06];
        let s: Vec<f64> = p.iter().map(|p| -0.7 * p * p).collect();
        let f = fit_quadratic(&p, &s, 0.0).unwrap();
        assert!((f.gamma - 0.7).abs() < 1e-10);
        let s: Vec<f64> = p.iter().map(|p| -0.2 * p - 0.7 * p * p + 0.1 * p * p * p).collect();
        let f = fit_quadratic(&p, &s, -0.2).unwrap();
        assert!((f.gamma - 0.7).abs() < 1e-9 && (f.cubic - 0.1).abs() < 1e-7);
    }

    #[test]
    fn extrapolation_cases() {
        let c: Vec<(f64, f64)> = [20.0, 40.0, 80.0].iter().map(|&b| (b, 1.5)).collect();
        assert!((extrapolate_zero_t(&c, 2).unwrap().value - 1.5).abs() < 1e-12);
        let l: Vec<(f64, f64)> = [10.0, 20.0, 30.0].iter().map(|&b| (b, 0.25 + 3.0 / b)).collect();
        let e = extrapolate_zero_t(&l, 1).unwrap();
        assert!((e.value - 0.25).abs() < 1e-12 && e.sigma < 1e-10);
        assert!(matches!(extrapolate_zero_t(&l[..2], 2), Err(Error::InsufficientPoints { .. })));
    }

    #[test]
    fn threshold_cases() {
        let curve: Vec<(f64, f64)> = (0..11).map(|i| (i as f64 * 0.1, 1.0 - i as f64 * 0.1)).collect();
        let all = epsilon_threshold(&curve, 1.0, 1.0).unwrap();
        assert!(all.open_ended && all.rate == 1.0);
        let c = epsilon_threshold(&curve, 1.0, 0.25).unwrap();
        assert!((c.rate - 0.25).abs() < 1e-12 && !c.open_ended);
        let mut prev = 0.0;
        for eps in [0.01, 0.1, 0.3, 0.6, 0.9] {
            let r = epsilon_threshold(&curve, 1.0, eps).unwrap().rate;
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn onset_cases() {
        let flat: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 0.0)).collect();
        assert!(detect_ssb_onset(&flat, SSB_TOL).unwrap().open_ended);
        let step: Vec<(f64, f64)> = (0..21).map(|i| {
            let q = i as f64 * 0.02;
            (q, if q >= 0.2 - 1e-12 { 0.5 } else { 0.0 })
        }).collect();
        let o = detect_ssb_onset(&step, SSB_TOL).unwrap();
        assert!((o.q_c - 0.2).abs() <= 0.02);
        let r = refine_onset(|q| if q > 0.2 { 1.0 } else { 0.0 }, 0.18, 0.22, SSB_TOL, 1e-9);
        assert!((r - 0.2).abs() < 1e-8);
    }

    #[test]
    fn perturbative_thresholds() {
        // epsilon = N^-eta cut applied to the perturbative conserving curve
        let (n, alpha, delta, eta, gq) = (1e6, 0.9, 0.25, 0.3, 1.2);
        let qth = conserving_threshold_asymptotic(n, alpha, delta, eta, gq);
        let s0 = 0.2;
        let ic = perturbative_conserving(qth, s0, gq, n, alpha, delta, 2);
        assert!(((s0 - ic) / n.powf(-eta) - 1.0).abs() < 1e-9);
        let pth = breaking_threshold_asymptotic(n, alpha, 0.25, eta, 0.5);
        assert!(pth <= n.powf(-eta / 2.0) / 0.5f64.sqrt() + 1e-15);
    }
}
