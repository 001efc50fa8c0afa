//! Channel rates, insertion strengths and Rényi coherent information.
//!
//! The parity-breaking channel at rate `p` enters the doubled contour as
//! `exp(phi_p sum 2i gamma gamma_bar)` with `phi_p = artanh(p / (1 - p))`.
//! It acts on both sides of the replicated state, so every Rényi-2 diagram
//! carries `theta = 2 phi_p` on its merged window, while each of the three
//! Rényi-3 windows carries `theta = phi_p`. The parity-conserving channel is
//! decoupled by an HS field `phi` and evaluated through the same map at
//! `p_phi = tanh(phi) / (1 + tanh(phi))`.

use serde::{Deserialize, Serialize};

use crate::analysis::{minimize_on, CubicSpline, SSB_TOL};
use crate::contour::{build_contour, ContourKind};
use crate::error::{Error, Result};
use crate::models::ModelParams;
use crate::solver::{ContourSolver, CoreSolution, SolverConfig};

pub fn phi_of_p(p: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::RateOutOfDomain(p));
    }
    Ok(phi_of_p_unchecked(p))
}

/// `artanh(p / (1 - p))` continued to small negative `p`.
fn phi_of_p_unchecked(p: f64) -> f64 {
    (p / (1.0 - p)).atanh()
}

pub fn p_of_phi(phi: f64) -> f64 {
    let t = phi.tanh();
    t / (1.0 + t)
}

/// Insertion strength per noise window for HS value or channel angle `phi`.
pub fn theta_of_phi(n: usize, phi: f64) -> Result<f64> {
    match n {
        2 => Ok(2.0 * phi),
        3 => Ok(phi),
        _ => Err(Error::InvalidParameter(format!("Rényi index {n} not supported (use 2 or 3)"))),
    }
}

/// `I_c^{(n)} / N` from the two diagram actions.
pub fn ic_from_actions(n: usize, s_q: f64, s_qr: f64) -> f64 {
    (s_q - s_qr) / (n as f64 - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p: f64,
    pub q: f64,
    pub phi0: f64,
}

impl NoiseParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("parity-conserving rate q = {q}")));
        }
        Ok(Self { p, q, phi0: phi_of_p(p)? })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyResult {
    pub renyi_n: usize,
    pub p: f64,
    pub q: f64,
    pub s_qr: f64,
    pub s_q: f64,
    pub ic_density: f64,
    /// HS minimizer of the system diagram.
    pub phi_star: f64,
    pub phi_star_qr: f64,
    /// Minimizer with the explicit first-order term removed (the strongly
    /// symmetric part of the landscape); decides `ssb`.
    pub phi_star_sym: f64,
    pub ssb: bool,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagram {
    /// System plus reference, `S_{Q'R}`.
    Qr,
    /// System alone, `S_{Q'}`.
    Q,
}

/// The pair of replica diagrams for one Rényi index, temperature and model.
pub struct Replicas {
    pub n: usize,
    pub beta: f64,
    pub m: usize,
    qr: ContourSolver,
    q: ContourSolver,
}

impl Replicas {
    pub fn new(beta: f64, m: usize, params: ModelParams, n: usize, cfg: SolverConfig) -> Result<Self> {
        let (kqr, kq) = ContourKind::renyi_pair(n)?;
        let qr = ContourSolver::new(build_contour(kqr, beta, m)?, params, cfg.clone())?;
        let q = ContourSolver::new(build_contour(kq, beta, m)?, params, cfg)?;
        Ok(Self { n, beta, m, qr, q })
    }

    pub fn solver(&self, d: Diagram) -> &ContourSolver {
        match d {
            Diagram::Qr => &self.qr,
            Diagram::Q => &self.q,
        }
    }

    /// Diagram action at channel angle `phi`.
    pub fn solve_at(&self, d: Diagram, phi: f64, seed: Option<&faer::Mat<f64>>) -> Result<CoreSolution> {
        let sol = self.solver(d).solve_core(theta_of_phi(self.n, phi)?, seed)?;
        if !sol.converged {
            return Err(Error::NotConverged {
                contour: self.solver(d).spec().kind.to_string(),
                iterations: sol.iterations,
                residual: sol.residual,
            });
        }
        Ok(sol)
    }

    /// `ds/dp` at zero rate by a central difference at `p = +-h`.
    pub fn slope(&self, d: Diagram, h: f64) -> Result<f64> {
        let up = self.solve_at(d, phi_of_p_unchecked(h), None)?;
        let down = self.solve_at(d, phi_of_p_unchecked(-h), Some(&up.g))?;
        Ok((up.action - down.action) / (2.0 * h))
    }

    /// Continuation scan of the diagram action over increasing `phis`.
    /// Points that fail to converge are dropped.
    pub fn landscape(&self, d: Diagram, phis: &[f64]) -> Result<Landscape> {
        let mut seed: Option<faer::Mat<f64>> = None;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        let mut skipped = Vec::new();
        for &phi in phis {
            match self.solve_at(d, phi, seed.as_ref()) {
                Ok(sol) => {
                    xs.push(phi);
                    ys.push(sol.action);
                    seed = Some(sol.g);
                }
                Err(Error::SingularKernel { .. } | Error::NotConverged { .. }) => skipped.push(phi),
                Err(e) => return Err(e),
            }
        }
        if xs.is_empty() {
            return Err(Error::EmptyScan);
        }
        let slope = self.slope(d, 1e-3)?;
        Landscape::new(d, self.n, xs, ys, slope, skipped)
    }
}

/// Diagram action as a function of the channel angle, `s(phi)`.
#[derive(Clone, Debug)]
pub struct Landscape {
    pub diagram: Diagram,
    pub n: usize,
    pub phis: Vec<f64>,
    pub actions: Vec<f64>,
    /// `ds/dp` at zero rate.
    pub slope: f64,
    pub skipped: Vec<f64>,
    spline: CubicSpline,
}

impl Landscape {
    pub fn new(diagram: Diagram, n: usize, phis: Vec<f64>, actions: Vec<f64>, slope: f64, skipped: Vec<f64>) -> Result<Self> {
        let spline = CubicSpline::new(&phis, &actions)?;
        Ok(Self { diagram, n, phis, actions, slope, skipped, spline })
    }

    pub fn clean(&self) -> f64 {
        self.actions[0]
    }

    pub fn phi_max(&self) -> f64 {
        *self.phis.last().unwrap()
    }

    pub fn value(&self, phi: f64) -> f64 {
        self.spline.eval(phi)
    }

    /// `ds/dphi` of the interpolated landscape at zero angle.
    pub fn interpolated_slope(&self) -> f64 {
        self.spline.derivative(0.0)
    }

    /// Minimizes `n phi^2 / (2q) + s(phi + phi0)` over `phi >= 0`.
    /// With `symmetric`, the first-order term of `s` is removed so that only
    /// the strongly symmetric response remains. The interpolant's own slope
    /// is subtracted, which keeps `phi = 0` exactly stationary.
    pub fn minimize(&self, q: f64, phi0: f64, symmetric: bool) -> (f64, f64) {
        let slope = self.interpolated_slope();
        let f = |phi: f64| {
            let x = phi + phi0;
            let lin = if symmetric { slope * x } else { 0.0 };
            self.n as f64 * phi * phi / (2.0 * q) + self.value(x) - lin
        };
        if q <= 0.0 {
            return (0.0, f(0.0));
        }
        minimize_on(f, 0.0, (self.phi_max() - phi0).max(0.0), 4000)
    }

    /// `(p, s(p) - s(0))` for landscape points with `p <= p_max`.
    pub fn small_rate_points(&self, p_max: f64) -> (Vec<f64>, Vec<f64>) {
        let s0 = self.clean();
        self.phis
            .iter()
            .zip(&self.actions)
            .filter(|(phi, _)| **phi > 0.0 && p_of_phi(**phi) <= p_max * (1.0 + 1e-9))
            .map(|(phi, s)| (p_of_phi(*phi), s - s0))
            .unzip()
    }
}

/// Default HS grid: the small-rate fit points `p = 0.01..0.06`, then a
/// geometric ramp to `2 phi_p(0.45)`; `points` entries in total.
pub fn default_phi_grid(points: usize) -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend((1..=6).map(|k| phi_of_p_unchecked(0.01 * k as f64)));
    let lo = *g.last().unwrap();
    let hi = 2.0 * phi_of_p_unchecked(0.45);
    let rest = points.saturating_sub(g.len()).max(2);
    let ratio = (hi / lo).powf(1.0 / rest as f64);
    g.extend((1..=rest).map(|k| lo * ratio.powi(k as i32)));
    g
}

/// Assembles an entropy result from the two landscapes.
pub fn entropies_from_landscapes(lq: &Landscape, lqr: &Landscape, p: f64, q: f64) -> Result<EntropyResult> {
    if lq.n != lqr.n {
        return Err(Error::InvalidParameter("landscapes for different Rényi indices".into()));
    }
    let phi0 = phi_of_p(p)?;
    let (phi_star, s_q, phi_star_qr, s_qr, phi_star_sym) = if q > 0.0 {
        let (a, fa) = lq.minimize(q, phi0, false);
        let (b, fb) = lqr.minimize(q, phi0, false);
        let (c, _) = lq.minimize(q, phi0, true);
        (a, fa, b, fb, c)
    } else {
        (0.0, lq.value(phi0), 0.0, lqr.value(phi0), 0.0)
    };
    Ok(EntropyResult {
        renyi_n: lq.n,
        p,
        q,
        s_qr,
        s_q,
        ic_density: ic_from_actions(lq.n, s_q, s_qr),
        phi_star,
        phi_star_qr,
        phi_star_sym,
        ssb: phi_star_sym > SSB_TOL,
        converged: lq.skipped.is_empty() && lqr.skipped.is_empty(),
    })
}

/// Parity-breaking noise only: one solve per diagram at `phi_p`.
pub fn entropies_breaking(reps: &Replicas, p: f64) -> Result<EntropyResult> {
    let phi = phi_of_p(p)?;
    let qr = reps.solve_at(Diagram::Qr, phi, None)?;
    let q = reps.solve_at(Diagram::Q, phi, None)?;
    Ok(EntropyResult {
        renyi_n: reps.n,
        p,
        q: 0.0,
        s_qr: qr.action,
        s_q: q.action,
        ic_density: ic_from_actions(reps.n, q.action, qr.action),
        phi_star: 0.0,
        phi_star_qr: 0.0,
        phi_star_sym: 0.0,
        ssb: false,
        converged: true,
    })
}

/// Parity-conserving noise at rate `q` via the HS minimization.
pub fn entropies_conserving(reps: &Replicas, q: f64, phis: &[f64]) -> Result<EntropyResult> {
    entropies_both(reps, 0.0, q, phis)
}

/// Both channels: minimizes `n phi^2 / (2q) + s(p_{phi + phi0})`. The grid
/// minimum is refined by golden section on a cubic spline of the landscape
/// and the action is then re-evaluated by a solve at the minimizer.
pub fn entropies_both(reps: &Replicas, p: f64, q: f64, phis: &[f64]) -> Result<EntropyResult> {
    let noise = NoiseParams::new(p, q)?;
    if q == 0.0 {
        return entropies_breaking(reps, p);
    }
    let lq = reps.landscape(Diagram::Q, phis)?;
    let lqr = reps.landscape(Diagram::Qr, phis)?;
    let mut r = entropies_from_landscapes(&lq, &lqr, p, q)?;
    let n = reps.n as f64;
    let polish = |d: Diagram, phi: f64| -> Result<f64> {
        Ok(n * phi * phi / (2.0 * q) + reps.solve_at(d, phi + noise.phi0, None)?.action)
    };
    // a failed polish keeps the spline value and flags the result
    match polish(Diagram::Q, r.phi_star) {
        Ok(v) => r.s_q = v,
        Err(_) => r.converged = false,
    }
    match polish(Diagram::Qr, r.phi_star_qr) {
        Ok(v) => r.s_qr = v,
        Err(_) => r.converged = false,
    }
    r.ic_density = ic_from_actions(reps.n, r.s_q, r.s_qr);
    Ok(r)
}

/// Rényi-2 coherent information per Majorana of unencoded Majorana Bell
/// pairs under the same channels, from the exact oracle.
pub fn baseline_no_encoding(p: f64, q: f64) -> Result<f64> {
    crate::edoracle::bell_pair_coherent_info(p, q, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn rate_maps() {
        assert_eq!(phi_of_p(0.0).unwrap(), 0.0);
        assert!((phi_of_p(0.25).unwrap() - (1.0f64 / 3.0).atanh()).abs() < 1e-15);
        assert!((phi_of_p(0.25).unwrap() - 0.34657359).abs() < 1e-8);
        assert!(phi_of_p(0.49).unwrap().is_finite());
        assert!(matches!(phi_of_p(0.5), Err(Error::RateOutOfDomain(_))));
        assert!(phi_of_p(-0.1).is_err());
        for p in [0.0, 0.01, 0.2, 0.3, 0.49] {
            assert!((p_of_phi(phi_of_p(p).unwrap()) - p).abs() < 1e-15);
        }
    }

    #[test]
    fn free_clean_values() {
        let cfg = SolverConfig::default();
        for n in [2, 3] {
            let reps = Replicas::new(2.0, 16, ModelParams::syk(0.0), n, cfg.clone()).unwrap();
            let r = entropies_breaking(&reps, 0.0).unwrap();
            assert!((r.ic_density - 0.5 * LN_2).abs() < 1e-12, "{n}: {}", r.ic_density);
        }
    }

    #[test]
    fn free_breaking_values_match_closed_forms() {
        let cfg = SolverConfig::default();
        let p = 0.1;
        let phi = phi_of_p(p).unwrap();
        let reps = Replicas::new(2.0, 16, ModelParams::syk(0.0), 2, cfg.clone()).unwrap();
        let r = entropies_breaking(&reps, p).unwrap();
        assert!((r.s_q - (-0.5 * LN_2 - 2.0 * phi)).abs() < 1e-11);
        assert!((r.s_qr - (-LN_2 - (2.0 * phi).cosh().ln())).abs() < 1e-11);
        // the single-pair oracle value of the unencoded channel
        let base = baseline_no_encoding(p, 0.0).unwrap();
        assert!((r.ic_density - base).abs() < 1e-11, "{} {base}", r.ic_density);
    }

    #[test]
    fn default_grid_shape() {
        let g = default_phi_grid(41);
        assert_eq!(g.len(), 41);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!((g[40] - 2.0 * phi_of_p(0.45).unwrap()).abs() < 1e-12);
        assert!((p_of_phi(g[6]) - 0.06).abs() < 1e-14);
    }

    #[test]
    fn zero_q_pins_phi() {
        let phis = default_phi_grid(12);
        let acts: Vec<f64> = phis.iter().map(|p| -p * p).collect();
        let l = Landscape::new(Diagram::Q, 2, phis, acts, 0.0, vec![]).unwrap();
        assert_eq!(l.minimize(0.0, 0.0, false).0, 0.0);
        // curvature 1/q - 1: symmetric below q = 1, broken above
        assert!(l.minimize(0.5, 0.0, false).0 < 1e-6);
        assert!(l.minimize(2.0, 0.0, false).0 > 1.0);
    }
}
