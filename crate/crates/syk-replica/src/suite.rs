//! Threshold suites: one pair of HS landscapes per temperature, the
//! perturbative coefficients read off their small-rate ends, rate scans,
//! SSB onset, and zero temperature extrapolation across temperatures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    detect_ssb_onset, epsilon_threshold, extrapolate_zero_t, fit_quadratic, refine_onset, Extrapolation,
    PerturbativeFit, SSB_TOL,
};
use crate::channels::{
    entropies_from_landscapes, ic_from_actions, p_of_phi, phi_of_p, Diagram, EntropyResult, Landscape, Replicas,
};
use crate::error::{Error, Result};
use crate::models::ModelParams;
use crate::solver::{solve_thermal, SolverConfig};

/// Largest rate used by the quadratic fits.
pub const FIT_P_MAX: f64 = 0.06;

/// HS grid for threshold work: the fit points `p = 0.01..0.06`, then a
/// geometric ramp to `phi_max`; `points` entries including `phi = 0`.
pub fn threshold_phi_grid(points: usize, phi_max: f64) -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend((1..=6).map(|k| phi_of_p(0.01 * k as f64).expect("fit rates are in range")));
    let lo = *g.last().unwrap();
    let rest = points.saturating_sub(g.len()).max(2);
    let ratio = (phi_max / lo).powf(1.0 / rest as f64);
    g.extend((1..=rest).map(|k| lo * ratio.powi(k as i32)));
    g
}

/// Uniform grid `step, 2 step, ..., count step`.
pub fn uniform_grid(step: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| step * k as f64).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub renyi_n: usize,
    pub betas: Vec<f64>,
    pub dtau: f64,
    pub params: ModelParams,
    pub phis: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub order: usize,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.betas.is_empty() || self.q_grid.is_empty() || self.phis.is_empty() {
            return Err(Error::EmptyScan);
        }
        if !(self.dtau > 0.0) {
            return Err(Error::InvalidParameter(format!("dtau = {}", self.dtau)));
        }
        if self.q_grid.windows(2).any(|w| !(w[1] > w[0])) || self.q_grid[0] <= 0.0 {
            return Err(Error::InvalidParameter("q grid must be positive and increasing".into()));
        }
        Ok(())
    }

    /// Even number of grid points closest to `beta / dtau`.
    pub fn grid_points(&self, beta: f64) -> usize {
        (((beta / self.dtau) / 2.0).round() as usize * 2).max(8)
    }
}

/// Everything measured at one temperature.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BetaPoint {
    pub beta: f64,
    pub m: usize,
    pub renyi_n: usize,
    /// Thermal `G_{n beta}(beta)`, the scale of the first-order term.
    pub g_nbeta: f64,
    pub fit: PerturbativeFit,
    pub clean_ic: f64,
    pub clean_s_q: f64,
    /// Onset of the strongly symmetric minimizer.
    pub q_c: f64,
    pub q_c_open_ended: bool,
    pub q_scan: Vec<EntropyResult>,
    /// `(p, ic)` at `q = 0`.
    pub p_scan: Vec<(f64, f64)>,
    pub skipped: usize,
}

impl BetaPoint {
    /// First-order slope predicted from the thermal propagator, `-2n G_{n beta}(beta)`.
    pub fn thermal_slope(&self) -> f64 {
        -2.0 * self.renyi_n as f64 * self.g_nbeta
    }

    /// `s_q(q) - s_q(0)` from the perturbative HS saddle,
    /// `-(n G)^2 / (n/q - 2 Gamma_phi)` (for `n = 2`: `-4 G^2 / (1/q - Gamma)`).
    pub fn hs_shift(&self, q: f64) -> f64 {
        let n = self.renyi_n as f64;
        let a = self.fit.slope_q;
        -a * a / (2.0 * (n / q - 2.0 * self.fit.gamma_q_phi()))
    }

    /// Epsilon thresholds of this temperature's `(q, p)` scans.
    pub fn thresholds(&self, epsilon: f64) -> Result<((f64, bool), (f64, bool))> {
        let qc: Vec<(f64, f64)> = self.q_scan.iter().map(|r| (r.q, r.ic_density)).collect();
        let q = epsilon_threshold(&qc, self.clean_ic, epsilon)?;
        let mut pc = vec![(0.0, self.clean_ic)];
        pc.extend(self.p_scan.iter().copied());
        let p = epsilon_threshold(&pc, self.clean_ic, epsilon)?;
        Ok(((q.rate, q.open_ended), (p.rate, p.open_ended)))
    }
}

/// Quadratic coefficients from the small-rate ends of two landscapes.
pub fn fit_gamma(lq: &Landscape, lqr: &Landscape, beta: f64) -> Result<PerturbativeFit> {
    let (pq, sq) = lq.small_rate_points(FIT_P_MAX);
    let (pr, sr) = lqr.small_rate_points(FIT_P_MAX);
    let fq = fit_quadratic(&pq, &sq, lq.slope)?;
    let fr = fit_quadratic(&pr, &sr, lqr.slope)?;
    Ok(PerturbativeFit {
        renyi_n: lq.n,
        beta,
        gamma_q: fq.gamma,
        gamma_qr: fr.gamma,
        slope_q: lq.slope,
        slope_qr: lqr.slope,
        fit_window: pq,
        residual: fq.residual.max(fr.residual),
    })
}

/// Onset of `phi_star_sym` on `lq`, scanned on `q_grid` then bisected.
pub fn ssb_onset(lq: &Landscape, q_grid: &[f64]) -> Result<(f64, bool)> {
    let sym = |q: f64| lq.minimize(q, 0.0, true).0;
    let scan: Vec<(f64, f64)> = q_grid.iter().map(|&q| (q, sym(q))).collect();
    let onset = detect_ssb_onset(&scan, SSB_TOL)?;
    if onset.open_ended {
        return Ok((onset.q_c, true));
    }
    let i = scan.iter().position(|&(_, phi)| phi > SSB_TOL).unwrap();
    if i == 0 {
        return Ok((refine_onset(sym, 0.0, scan[0].0, SSB_TOL, 1e-6), false));
    }
    Ok((refine_onset(sym, scan[i - 1].0, scan[i].0, SSB_TOL, 1e-6), false))
}

/// Runs one temperature of a suite.
pub fn beta_point(cfg: &SuiteConfig, beta: f64, solver: &SolverConfig) -> Result<BetaPoint> {
    let m = cfg.grid_points(beta);
    let n = cfg.renyi_n;
    let reps = Replicas::new(beta, m, cfg.params, n, solver.clone())?;
    let lq = reps.landscape(Diagram::Q, &cfg.phis)?;
    let lqr = reps.landscape(Diagram::Qr, &cfg.phis)?;
    let thermal = solve_thermal(n as f64 * beta, n * m, &cfg.params, solver, None)?;
    if !thermal.converged {
        return Err(Error::NotConverged { contour: "thermal".into(), iterations: thermal.iterations, residual: thermal.residual });
    }
    let fit = fit_gamma(&lq, &lqr, beta)?;
    let (q_c, q_c_open_ended) = ssb_onset(&lq, &cfg.q_grid)?;
    let q_scan = cfg
        .q_grid
        .iter()
        .map(|&q| entropies_from_landscapes(&lq, &lqr, 0.0, q))
        .collect::<Result<Vec<_>>>()?;
    let phi_top = lq.phi_max().min(lqr.phi_max());
    let p_scan = cfg
        .p_grid
        .iter()
        .filter(|&&p| phi_of_p(p).is_ok_and(|phi| phi <= phi_top))
        .map(|&p| {
            let phi = phi_of_p(p).unwrap();
            (p, ic_from_actions(n, lq.value(phi), lqr.value(phi)))
        })
        .collect();
    Ok(BetaPoint {
        beta,
        m,
        renyi_n: n,
        g_nbeta: thermal.at_offset(m),
        clean_ic: ic_from_actions(n, lq.clean(), lqr.clean()),
        clean_s_q: lq.clean(),
        fit,
        q_c,
        q_c_open_ended,
        q_scan,
        p_scan,
        skipped: lq.skipped.len() + lqr.skipped.len(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteResult {
    pub config: SuiteConfig,
    pub points: Vec<BetaPoint>,
    pub clean_ic: Extrapolation,
    pub gamma_q_phi: Extrapolation,
    pub q_c: Extrapolation,
    /// `ic(q)` extrapolated at each `q` of the grid.
    pub ic_of_q: Vec<(f64, Extrapolation)>,
    /// `ic(p)` at `q = 0` extrapolated at each rate covered at every temperature.
    pub ic_of_p: Vec<(f64, Extrapolation)>,
}

impl SuiteResult {
    /// Largest `q` on the grid below the extrapolated onset.
    pub fn plateau(&self) -> Vec<(f64, f64)> {
        self.ic_of_q.iter().filter(|(q, _)| *q < self.q_c.value).map(|(q, e)| (*q, e.value)).collect()
    }

    /// Max relative deviation of the extrapolated `ic(q)` from the
    /// extrapolated clean value below the onset.
    pub fn plateau_deviation(&self) -> f64 {
        let c = self.clean_ic.value;
        self.plateau().iter().map(|(_, v)| ((v - c) / c).abs()).fold(0.0, f64::max)
    }

    /// Extrapolated `ic(q)` above the onset.
    pub fn above_onset(&self) -> Vec<(f64, f64)> {
        self.ic_of_q.iter().filter(|(q, _)| *q > self.q_c.value).map(|(q, e)| (*q, e.value)).collect()
    }

    /// Epsilon threshold of the extrapolated `ic(p)` curve.
    pub fn p_threshold(&self, epsilon: f64) -> Result<(f64, bool)> {
        let mut curve = vec![(0.0, self.clean_ic.value)];
        curve.extend(self.ic_of_p.iter().map(|(p, e)| (*p, e.value)));
        let c = epsilon_threshold(&curve, self.clean_ic.value, epsilon)?;
        Ok((c.rate, c.open_ended))
    }

    /// Epsilon threshold of the extrapolated `ic(q)` curve.
    pub fn q_threshold(&self, epsilon: f64) -> Result<(f64, bool)> {
        let curve: Vec<(f64, f64)> = self.ic_of_q.iter().map(|(q, e)| (*q, e.value)).collect();
        let c = epsilon_threshold(&curve, self.clean_ic.value, epsilon)?;
        Ok((c.rate, c.open_ended))
    }
}

/// Runs every temperature (concurrently) and extrapolates to `T = 0`.
pub fn run_suite(cfg: &SuiteConfig, solver: &SolverConfig) -> Result<SuiteResult> {
    cfg.validate()?;
    let mut points = cfg.betas.par_iter().map(|&b| beta_point(cfg, b, solver)).collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| a.beta.total_cmp(&b.beta));
    extrapolate_suite(cfg.clone(), points)
}

/// Zero temperature extrapolation of per-temperature results.
pub fn extrapolate_suite(config: SuiteConfig, points: Vec<BetaPoint>) -> Result<SuiteResult> {
    let order = config.order.min(points.len().saturating_sub(1)).max(1);
    let series = |f: &dyn Fn(&BetaPoint) -> f64| -> Result<Extrapolation> {
        extrapolate_zero_t(&points.iter().map(|p| (p.beta, f(p))).collect::<Vec<_>>(), order)
    };
    let clean_ic = series(&|p| p.clean_ic)?;
    let gamma_q_phi = series(&|p| p.fit.gamma_q_phi())?;
    let q_c = series(&|p| p.q_c)?;
    let ic_of_q = config
        .q_grid
        .iter()
        .enumerate()
        .map(|(k, &q)| Ok((q, series(&|p| p.q_scan[k].ic_density)?)))
        .collect::<Result<Vec<_>>>()?;
    let common = points.iter().map(|p| p.p_scan.len()).min().unwrap_or(0);
    let ic_of_p = (0..common)
        .map(|k| Ok((points[0].p_scan[k].0, series(&|p| p.p_scan[k].1)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteResult { config, points, clean_ic, gamma_q_phi, q_c, ic_of_q, ic_of_p })
}

/// `p_phi` on a landscape grid, for reporting.
pub fn rates_of(phis: &[f64]) -> Vec<f64> {
    phis.iter().map(|&x| p_of_phi(x)).collect()
}
