//! Thermal contour solved in the Matsubara basis.
//!
//! On the thermal circle every field is an antiperiodic circulant
//! `G_ij = g(i - j)`, so the discrete Dyson equation diagonalizes under the
//! twisted DFT with eigenvectors `exp(i w_n tau_k)`, `w_n = (2n+1) pi / beta`.
//! This solves exactly the same discrete equations as the dense path.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use super::anderson::Anderson;
use super::{Acceleration, SolverConfig};
use crate::error::{Error, Result};
use crate::models::{ModelParams, LOWRANK_CLOSURE_C};

#[derive(Clone, Debug)]
pub struct ThermalSolution {
    pub beta: f64,
    pub m: usize,
    /// `g[k] = G(k dtau)` for `k = 0..M`; `g[0] = 0`.
    pub g: Vec<f64>,
    pub sigma: Vec<f64>,
    pub action: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl ThermalSolution {
    pub fn dtau(&self) -> f64 {
        self.beta / self.m as f64
    }

    /// `(tau, G(tau))` at grid separations `k dtau`, `k = 1..M`.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        (1..self.m).map(|k| (k as f64 * self.dtau(), self.g[k])).collect()
    }

    /// `G(beta')` read at offset `k` steps; `k` in `0..M`.
    pub fn at_offset(&self, k: usize) -> f64 {
        self.g[k]
    }

    /// Value of a dense antiperiodic circulant entry `(i, j)`.
    pub fn entry(values: &[f64], i: usize, j: usize) -> f64 {
        if i >= j { values[i - j] } else { -values[values.len() + i - j] }
    }
}

struct Transforms {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    twist: Vec<Complex64>,
}

impl Transforms {
    fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let twist = (0..m).map(|k| Complex64::from_polar(1.0, PI * k as f64 / m as f64)).collect();
        Self { m, fwd: planner.plan_fft_forward(m), inv: planner.plan_fft_inverse(m), twist }
    }

    /// Fermionic eigenvalues `sum_k c_k exp(i pi (2n+1) k / M)`.
    fn fermion_eigs(&self, c: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = c.iter().zip(&self.twist).map(|(&x, t)| t * x).collect();
        self.inv.process(&mut buf);
        buf
    }

    fn fermion_values(&self, eigs: &[Complex64]) -> Vec<f64> {
        let mut buf = eigs.to_vec();
        self.fwd.process(&mut buf);
        let m = self.m as f64;
        buf.iter().zip(&self.twist).map(|(z, t)| (z * t.conj()).re / m).collect()
    }

    /// Bosonic (periodic) eigenvalues `sum_k c_k exp(2 pi i n k / M)`.
    fn boson_eigs(&self, c: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = c.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.inv.process(&mut buf);
        buf
    }

    fn boson_values(&self, eigs: &[Complex64]) -> Vec<f64> {
        let mut buf = eigs.to_vec();
        self.fwd.process(&mut buf);
        buf.iter().map(|z| z.re / self.m as f64).collect()
    }
}

struct ClosureValue {
    sigma: Vec<f64>,
    interaction: f64,
}

fn closure(t: &Transforms, g: &[f64], dt: f64, params: &ModelParams, iteration: usize) -> Result<ClosureValue> {
    let m = g.len() as f64;
    match *params {
        ModelParams::Syk { j } => {
            let j2 = j * j;
            let sigma = g.iter().map(|x| j2 * x.powi(3)).collect();
            let g4: f64 = g.iter().map(|x| x.powi(4)).sum();
            Ok(ClosureValue { sigma, interaction: -j2 / 8.0 * dt * dt * m * g4 })
        }
        ModelParams::LowRank { g: coupling, rank_gamma } => {
            if coupling == 0.0 {
                return Ok(ClosureValue { sigma: vec![0.0; g.len()], interaction: 0.0 });
            }
            let g2 = coupling * coupling;
            let pi: Vec<f64> = g.iter().map(|x| x * x).collect();
            let lam = t.boson_eigs(&pi);
            let mut logdet = 0.0;
            let mut d_eigs = Vec::with_capacity(lam.len());
            for l in &lam {
                let a = 1.0 - g2 * dt * l.re;
                if !(a > 0.0) {
                    return Err(Error::SingularKernel { iteration });
                }
                logdet += a.ln();
                d_eigs.push(Complex64::new(g2 / a, 0.0));
            }
            let d_op = t.boson_values(&d_eigs);
            let pref = LOWRANK_CLOSURE_C * rank_gamma / dt;
            let sigma = d_op.iter().zip(g).map(|(d, x)| pref * d * x).collect();
            Ok(ClosureValue { sigma, interaction: 0.5 * rank_gamma * logdet })
        }
    }
}

/// Largest `beta g^2 / 4` for which the free propagator is an admissible
/// low-rank seed.
const LOWRANK_FREE_SEED_LIMIT: f64 = 0.8;
const LOWRANK_RAMP: f64 = 1.25;

/// Solves the thermal Schwinger-Dyson equations at inverse temperature
/// `beta` on `m` midpoints.
///
/// Without a seed, strongly coupled low-rank runs are reached by
/// continuation in `g` from a coupling at which the free propagator keeps
/// the boson kernel positive.
pub fn solve_thermal(
    beta: f64,
    m: usize,
    params: &ModelParams,
    cfg: &SolverConfig,
    seed: Option<&[f64]>,
) -> Result<ThermalSolution> {
    params.validate()?;
    if let (None, ModelParams::LowRank { g, rank_gamma }) = (seed, *params) {
        let start = (4.0 * LOWRANK_FREE_SEED_LIMIT / beta).sqrt();
        if g > start {
            let mut coupling = start;
            let mut sol = iterate(beta, m, &ModelParams::lowrank(coupling, rank_gamma), cfg, None)?;
            let mut iterations = sol.iterations;
            let mut ramp = LOWRANK_RAMP;
            while coupling < g && sol.converged {
                let next = (coupling * ramp).min(g);
                match iterate(beta, m, &ModelParams::lowrank(next, rank_gamma), cfg, Some(&sol.g)) {
                    Ok(s) if s.converged => {
                        iterations += s.iterations;
                        coupling = next;
                        sol = s;
                    }
                    Ok(_) | Err(Error::SingularKernel { .. }) if ramp > 1.001 => ramp = ramp.sqrt(),
                    Ok(s) => {
                        iterations += s.iterations;
                        sol = s;
                    }
                    Err(e) => return Err(e),
                }
            }
            sol.iterations = iterations;
            return Ok(sol);
        }
    }
    iterate(beta, m, params, cfg, seed)
}

fn iterate(
    beta: f64,
    m: usize,
    params: &ModelParams,
    cfg: &SolverConfig,
    seed: Option<&[f64]>,
) -> Result<ThermalSolution> {
    if !(beta > 0.0) || m < 2 || m % 2 != 0 {
        return Err(Error::InvalidParameter(format!("thermal grid beta={beta}, M={m}")));
    }
    let t = Transforms::new(m);
    let dt = beta / m as f64;
    let g0: Vec<f64> = (0..m).map(|k| if k == 0 { 0.0 } else { 0.5 }).collect();
    let g0_eigs: Vec<Complex64> = t.fermion_eigs(&g0).into_iter().map(|z| z * dt).collect();
    let dyson = |sigma: &[f64]| -> Vec<f64> {
        let s = t.fermion_eigs(sigma);
        let eigs: Vec<Complex64> = g0_eigs.iter().zip(&s).map(|(g0, s)| g0 / (1.0 - g0 * s * dt)).collect();
        t.fermion_values(&eigs).into_iter().map(|x| x / dt).collect()
    };
    let mut g: Vec<f64> = match seed {
        Some(s) if s.len() == m => s.to_vec(),
        _ => g0.clone(),
    };
    let depth = match cfg.acceleration {
        Acceleration::None => 0,
        Acceleration::Anderson { depth } => depth,
    };
    let mut mixer = Anderson::new(depth, cfg.mixing);
    let mut residual = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut prev: Option<Vec<f64>> = None;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let c = match closure(&t, &g, dt, params, iterations) {
            Ok(c) => c,
            // step back toward the last admissible iterate
            Err(Error::SingularKernel { .. }) if prev.is_some() => {
                let p = prev.as_ref().unwrap();
                g = g.iter().zip(p).map(|(a, b)| 0.5 * (a + b)).collect();
                mixer.reset();
                continue;
            }
            Err(e) => return Err(e),
        };
        prev = Some(g.clone());
        let mut next = dyson(&c.sigma);
        next[0] = 0.0;
        let f: Vec<f64> = next.iter().zip(&g).map(|(a, b)| a - b).collect();
        residual = f.iter().fold(0.0, |m, x| m.max(x.abs()));
        if !residual.is_finite() {
            return Err(Error::SingularKernel { iteration: iterations });
        }
        if residual <= cfg.tolerance {
            g = next;
            converged = true;
            break;
        }
        if residual > 1e3 * best {
            mixer.reset();
        }
        best = best.min(residual);
        g = mixer.next(&g, &f);
    }
    let c = closure(&t, &g, dt, params, iterations)?;
    let s = t.fermion_eigs(&c.sigma);
    let logdet: f64 = g0_eigs.iter().zip(&s).map(|(g0, s)| (1.0 - g0 * s * dt).norm().ln()).sum();
    let sg: f64 = c.sigma.iter().zip(&g).map(|(a, b)| a * b).sum();
    let action = -0.5 * LN_2 - 0.5 * logdet + 0.5 * dt * dt * m as f64 * sg + c.interaction;
    Ok(ThermalSolution { beta, m, g, sigma: c.sigma, action, iterations, residual, converged })
}
