//! Schwinger-Dyson solver on replica contours.
//!
//! Thermal contours are solved in the Matsubara basis; contours with noise
//! windows use the dense solver restricted to SYK points (see `reduced`).
//! Both iterate `G -> (G0^-1 - Sigma[G] - V)^-1` with Anderson acceleration
//! or plain damping, and return the per-Majorana on-shell action
//! normalized to the exact free value.

mod anderson;
mod reduced;
mod thermal;

pub(crate) use anderson::Anderson;
pub use thermal::{solve_thermal, ThermalSolution};

use faer::Mat;
use std::sync::OnceLock;

use crate::contour::{free_propagator, noise_vertex, ContourKind, ContourSpec};
use crate::error::{Error, Result};
use crate::field::BilocalField;
use crate::linalg::Lu;
use crate::models::{closure, free_action, ModelParams};
use reduced::{dressed, Geometry, ThetaSetup};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Acceleration {
    /// `G <- (1 - x) G + x G_new`.
    None,
    /// Anderson mixing over the last `depth` iterates.
    Anderson { depth: usize },
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub mixing: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub warm_start: Option<BilocalField>,
    pub acceleration: Acceleration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mixing: 0.5,
            tolerance: 1e-8,
            max_iterations: 2000,
            warm_start: None,
            acceleration: Acceleration::Anderson { depth: 10 },
        }
    }
}

impl SolverConfig {
    /// Plain damping with weight `mixing`.
    pub fn damped(mixing: f64) -> Self {
        Self { mixing, acceleration: Acceleration::None, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::InvalidParameter(format!("mixing {} outside (0, 1]", self.mixing)));
        }
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidParameter("tolerance and max_iterations must be positive".into()));
        }
        Ok(())
    }

    fn depth(&self) -> usize {
        match self.acceleration {
            Acceleration::None => 0,
            Acceleration::Anderson { depth } => depth,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub kind: ContourKind,
    pub beta: f64,
    pub m: usize,
    pub theta: f64,
    pub g: BilocalField,
    pub sigma: BilocalField,
    pub action: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Converged fields on SYK points only, in kernel units.
#[derive(Clone, Debug)]
pub struct CoreSolution {
    pub theta: f64,
    pub g: Mat<f64>,
    pub action: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Solver bound to one contour and model; reusable across `theta`.
pub struct ContourSolver {
    spec: ContourSpec,
    params: ModelParams,
    cfg: SolverConfig,
    geo: Geometry,
    seed: OnceLock<Result<Mat<f64>>>,
}

impl ContourSolver {
    pub fn new(spec: ContourSpec, params: ModelParams, cfg: SolverConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        if let Some(w) = &cfg.warm_start {
            if w.flavors() != spec.flavors || w.points() != spec.points {
                return Err(Error::Dimension(format!(
                    "warm start {}x{} on contour {}x{}",
                    w.flavors(),
                    w.points(),
                    spec.flavors,
                    spec.points
                )));
            }
        }
        let geo = Geometry::new(&spec);
        Ok(Self { spec, params, cfg, geo, seed: OnceLock::new() })
    }

    pub fn spec(&self) -> &ContourSpec {
        &self.spec
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Default seed: the configured warm start, else the thermal solution at
    /// `segments * beta` laid along the SYK points.
    fn default_seed(&self) -> Result<Mat<f64>> {
        self.seed
            .get_or_init(|| match &self.cfg.warm_start {
                Some(w) => {
                    let s = &self.geo.s;
                    Ok(Mat::from_fn(s.len(), s.len(), |a, b| w[(s[a], s[b])]))
                }
                None => thermal_seed(&self.spec, &self.params, &self.cfg),
            })
            .as_ref()
            .map(|m| m.clone())
            .map_err(|e| Error::InvalidParameter(format!("thermal seed: {e}")))
    }

    /// Solves on SYK points at insertion strength `theta`.
    pub fn solve_core(&self, theta: f64, seed: Option<&Mat<f64>>) -> Result<CoreSolution> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta = {theta}")));
        }
        if self.spec.kind == ContourKind::Thermal {
            let m = self.spec.m;
            let g_seed = match (seed, &self.cfg.warm_start) {
                (Some(s), _) => Some((0..m).map(|k| s[(k, 0)]).collect::<Vec<_>>()),
                (None, Some(w)) => Some((0..m).map(|k| w[(k, 0)]).collect()),
                (None, None) => None,
            };
            let t = solve_thermal(self.spec.beta, self.spec.m, &self.params, &self.cfg, g_seed.as_deref())?;
            let n = self.spec.m;
            return Ok(CoreSolution {
                theta,
                g: Mat::from_fn(n, n, |i, j| ThermalSolution::entry(&t.g, i, j)),
                action: t.action,
                iterations: t.iterations,
                residual: t.residual,
                converged: t.converged,
            });
        }
        let setup = ThetaSetup::new(&self.spec, &self.geo, theta)?;
        let dt = self.spec.dtau();
        let seed = if self.params.is_free() {
            Mat::from_fn(setup.gt.nrows(), setup.gt.ncols(), |a, b| setup.gt[(a, b)] / dt)
        } else {
            match seed {
                Some(s) => s.clone(),
                None => self.default_seed()?,
            }
        };
        let base = free_action(&self.spec) - self.spec.noise_normalization(theta) - 0.5 * setup.logdet_windows;
        iterate(&setup, seed, dt, &self.params, &self.cfg, base, theta)
    }

    /// Rebuilds the full-contour fields from a core solution.
    pub fn expand(&self, core: &CoreSolution) -> Result<SolveResult> {
        let spec = &self.spec;
        let dt = spec.dtau();
        let s = &self.geo.s;
        let sig_core = closure(core.g.as_ref(), dt, &self.params, core.iterations)?.sigma;
        let mut g = BilocalField::zeros(spec.flavors, spec.points);
        let mut sigma = BilocalField::zeros(spec.flavors, spec.points);
        for (a, &i) in s.iter().enumerate() {
            for (b, &j) in s.iter().enumerate() {
                g[(i, j)] = core.g[(a, b)];
                sigma[(i, j)] = sig_core[(a, b)];
            }
        }
        let w = &self.geo.w;
        if !w.is_empty() {
            let all: Vec<usize> = (0..spec.dim()).collect();
            let gt_s_all = dressed(spec, &self.geo, core.theta, s, &all)?.gt;
            let gt_w_all = dressed(spec, &self.geo, core.theta, w, &all)?.gt;
            let gt_ss = Mat::from_fn(s.len(), s.len(), |a, b| gt_s_all[(a, s[b])]);
            let kt = Lu::new(gt_ss.as_ref()).inverse();
            let g_ss_op = Mat::from_fn(s.len(), s.len(), |a, b| dt * core.g[(a, b)]);
            let sig_op = Mat::from_fn(s.len(), s.len(), |a, b| dt * sig_core[(a, b)]);
            // G[S, :] = G_SS Kt Gt[S, :]
            let g_s_all = &g_ss_op * (&kt * &gt_s_all);
            // G[W, :] = Gt[W, :] + Gt[W, S] sigma G[S, :]
            let gt_ws = Mat::from_fn(w.len(), s.len(), |a, b| gt_w_all[(a, s[b])]);
            let g_w_all = &gt_w_all + &gt_ws * (&sig_op * &g_s_all);
            for (a, &i) in s.iter().enumerate() {
                for &j in w {
                    g[(i, j)] = g_s_all[(a, j)] / dt;
                }
            }
            for (a, &i) in w.iter().enumerate() {
                for j in 0..spec.dim() {
                    g[(i, j)] = g_w_all[(a, j)] / dt;
                }
            }
        }
        Ok(SolveResult {
            kind: spec.kind,
            beta: spec.beta,
            m: spec.m,
            theta: core.theta,
            g,
            sigma,
            action: core.action,
            iterations: core.iterations,
            residual: core.residual,
            converged: core.converged,
        })
    }

    pub fn solve(&self, theta: f64) -> Result<SolveResult> {
        self.expand(&self.solve_core(theta, None)?)
    }
}

fn upper(g: &Mat<f64>) -> Vec<f64> {
    let n = g.nrows();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for j in 1..n {
        for i in 0..j {
            out.push(g[(i, j)]);
        }
    }
    out
}

fn from_upper(x: &[f64], n: usize) -> Mat<f64> {
    let mut g = Mat::zeros(n, n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            g[(i, j)] = x[k];
            g[(j, i)] = -x[k];
            k += 1;
        }
    }
    g
}

fn iterate(
    setup: &ThetaSetup,
    seed: Mat<f64>,
    dt: f64,
    params: &ModelParams,
    cfg: &SolverConfig,
    base: f64,
    theta: f64,
) -> Result<CoreSolution> {
    let n = setup.kt.nrows();
    let kernel = |g: &Mat<f64>, iteration: usize| -> Result<(Lu, crate::models::Closure)> {
        let c = closure(g.as_ref(), dt, params, iteration)?;
        let k = Mat::from_fn(n, n, |a, b| setup.kt[(a, b)] - dt * c.sigma[(a, b)]);
        Ok((Lu::new(k.as_ref()), c))
    };
    let mut x = upper(&seed);
    let mut g = from_upper(&x, n);
    let mut mixer = Anderson::new(cfg.depth(), cfg.mixing);
    let (mut residual, mut best) = (f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let (lu, _) = kernel(&g, iterations)?;
        let next = upper(&lu.inverse());
        let f: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a / dt - b).collect();
        residual = f.iter().fold(0.0, |m, v| m.max(v.abs()));
        if !residual.is_finite() {
            return Err(Error::SingularKernel { iteration: iterations });
        }
        if residual <= cfg.tolerance {
            x = next.iter().map(|v| v / dt).collect();
            g = from_upper(&x, n);
            converged = true;
            break;
        }
        if residual > 1e3 * best {
            mixer.reset();
        }
        best = best.min(residual);
        x = mixer.next(&x, &f);
        g = from_upper(&x, n);
    }
    let (lu, c) = kernel(&g, iterations)?;
    let ld = lu.slogdet().ok_or(Error::SingularKernel { iteration: iterations })?.1;
    let mut sg = 0.0;
    for b in 0..n {
        for a in 0..n {
            sg += c.sigma[(a, b)] * g[(a, b)];
        }
    }
    let action = base - 0.5 * (ld - setup.logdet_kt) + 0.5 * dt * dt * sg + c.interaction;
    Ok(CoreSolution { theta, g, action, iterations, residual, converged })
}

/// Thermal solution at `segments * beta` mapped onto the SYK points of
/// `spec` by cumulative SYK time; exact at `theta = 0`.
pub fn thermal_seed(spec: &ContourSpec, params: &ModelParams, cfg: &SolverConfig) -> Result<Mat<f64>> {
    let reps = spec.kind.segments();
    let steps = spec.effective_steps();
    let n = steps.len();
    if params.is_free() {
        let mt = reps * spec.m;
        let g: Vec<f64> = (0..mt).map(|k| if k == 0 { 0.0 } else { 0.5 }).collect();
        return Ok(seed_from_curve(&steps, &g, n));
    }
    let cfg = SolverConfig { warm_start: None, ..cfg.clone() };
    let t = solve_thermal(reps as f64 * spec.beta, reps * spec.m, params, &cfg, None)?;
    Ok(seed_from_curve(&steps, &t.g, n))
}

fn seed_from_curve(steps: &[(usize, usize)], g: &[f64], n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |a, b| {
        let ((fa, ka), (fb, kb)) = (steps[a], steps[b]);
        if fa != fb { 0.0 } else { ThermalSolution::entry(g, ka, kb) }
    })
}

pub fn solve(spec: &ContourSpec, params: &ModelParams, theta: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    ContourSolver::new(spec.clone(), *params, cfg.clone())?.solve(theta)
}

/// Sequential solves warm-started from the previous converged point.
/// Failures are reported per point; the sweep continues from the last
/// successful solution.
pub fn continuation_solve(
    spec: &ContourSpec,
    params: &ModelParams,
    thetas: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<Result<SolveResult>>> {
    let solver = ContourSolver::new(spec.clone(), *params, cfg.clone())?;
    let mut seed: Option<Mat<f64>> = None;
    let mut out = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let r = solver.solve_core(theta, seed.as_ref()).and_then(|core| {
            if core.converged {
                seed = Some(core.g.clone());
            }
            solver.expand(&core)
        });
        out.push(r);
    }
    Ok(out)
}

/// Indices `i` where adjacent actions in a sweep differ by more than
/// `jump` while `theta` moves by at most `max_step`.
pub fn branch_jumps(results: &[SolveResult], max_step: f64, jump: f64) -> Vec<usize> {
    results
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[1].theta - w[0].theta).abs() <= max_step && (w[1].action - w[0].action).abs() > jump)
        .map(|(i, _)| i + 1)
        .collect()
}

/// `-log Z_beta / N` from the thermal contour on `m` points.
pub fn free_energy_density(beta: f64, m: usize, params: &ModelParams, cfg: &SolverConfig) -> Result<f64> {
    let t = solve_thermal(beta, m, params, cfg, None)?;
    if !t.converged {
        return Err(Error::NotConverged { contour: "thermal".into(), iterations: t.iterations, residual: t.residual });
    }
    Ok(t.action)
}

/// Entropy density `beta A'(beta) - A(beta)` with `A = -log Z / N`, by a
/// central difference at fixed `dtau = beta / m` (`m +- 2` points).
pub fn entropy_density(beta: f64, m: usize, params: &ModelParams, cfg: &SolverConfig) -> Result<f64> {
    let dt = beta / m as f64;
    let centre = solve_thermal(beta, m, params, cfg, None)?;
    let side = |mm: usize| -> Result<f64> {
        let seed = resample(&centre.g, mm);
        let t = solve_thermal(mm as f64 * dt, mm, params, cfg, Some(&seed))?;
        if !t.converged {
            return Err(Error::NotConverged { contour: "thermal".into(), iterations: t.iterations, residual: t.residual });
        }
        Ok(t.action)
    };
    if !centre.converged {
        return Err(Error::NotConverged {
            contour: "thermal".into(),
            iterations: centre.iterations,
            residual: centre.residual,
        });
    }
    let (hi, lo) = (side(m + 2)?, side(m - 2)?);
    let slope = (hi - lo) / (4.0 * dt);
    Ok(beta * slope - centre.action)
}

/// Linear resampling of a thermal curve `g[k] = G(k beta / M)` onto
/// `m_new` points, using `G(0+) = G(beta-) = 1/2`.
fn resample(g: &[f64], m_new: usize) -> Vec<f64> {
    let m = g.len();
    let value = |k: usize| if k == 0 || k == m { 0.5 } else { g[k] };
    (0..m_new)
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            let x = k as f64 * m as f64 / m_new as f64;
            let i = (x.floor() as usize).min(m - 1);
            let t = x - i as f64;
            (1.0 - t) * value(i) + t * value(i + 1)
        })
        .collect()
}

/// `max |(G0^-1 - dtau (Sigma + V)) dtau G - 1|` on the full contour.
pub fn dyson_residual(spec: &ContourSpec, g: &BilocalField, sigma: &BilocalField, theta: f64) -> Result<f64> {
    let dt = spec.dtau();
    let d = spec.dim();
    let k0 = Lu::new(free_propagator(spec).to_mat(dt).as_ref()).inverse();
    let v = noise_vertex(spec, theta);
    let k = Mat::from_fn(d, d, |i, j| k0[(i, j)] - dt * (sigma[(i, j)] + v[(i, j)]));
    let prod = &k * g.to_mat(dt);
    let mut r: f64 = 0.0;
    for j in 0..d {
        for i in 0..d {
            r = r.max((prod[(i, j)] - (i == j) as u8 as f64).abs());
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::build_contour;
    use crate::models::action_density;
    use std::f64::consts::LN_2;

    fn exact_free(kind: ContourKind, theta: f64) -> f64 {
        match kind {
            ContourKind::Thermal => -0.5 * LN_2,
            ContourKind::Renyi2Q => -0.5 * LN_2 - theta,
            ContourKind::Renyi2Qr => -LN_2 - theta.cosh().ln(),
            ContourKind::Renyi3Qr => -1.5 * LN_2 - (0.25 * (3.0 * theta).exp() + 0.75 * (-theta).exp()).ln(),
            ContourKind::Renyi3Q => -0.5 * LN_2 - 3.0 * theta,
        }
    }

    #[test]
    fn free_solves_are_exact() {
        let p = ModelParams::syk(0.0);
        for kind in ContourKind::ALL {
            let spec = build_contour(kind, 2.0, 16).unwrap();
            let r = solve(&spec, &p, 0.0, &SolverConfig::default()).unwrap();
            assert!(r.converged && r.iterations == 1, "{kind}");
            assert!(r.g.max_abs_diff(&free_propagator(&spec)) < 1e-12, "{kind}");
            let free = free_action(&spec);
            assert!((r.action - free).abs() < 1e-12, "{kind}: {}", r.action);
        }
    }

    #[test]
    fn free_noise_values() {
        let p = ModelParams::syk(0.0);
        for kind in [ContourKind::Renyi2Q, ContourKind::Renyi2Qr, ContourKind::Renyi3Qr, ContourKind::Renyi3Q] {
            for theta in [0.1, 0.7, 2.0] {
                let spec = build_contour(kind, 1.5, 16).unwrap();
                let r = solve(&spec, &p, theta, &SolverConfig::default()).unwrap();
                assert!((r.action - exact_free(kind, theta)).abs() < 1e-10, "{kind} {theta}: {}", r.action);
            }
        }
    }

    #[test]
    fn reduced_matches_full_space() {
        let p = ModelParams::syk(1.0);
        let cfg = SolverConfig { tolerance: 1e-12, ..SolverConfig::default() };
        for kind in [ContourKind::Renyi2Q, ContourKind::Renyi2Qr, ContourKind::Renyi3Qr, ContourKind::Renyi3Q] {
            let spec = build_contour(kind, 3.0, 12).unwrap();
            let theta = 0.4;
            let r = solve(&spec, &p, theta, &cfg).unwrap();
            assert!(r.converged);
            let full = action_density(&r.g, &r.sigma, &spec, &p, theta).unwrap();
            assert!((full - r.action).abs() < 1e-10, "{kind}: {full} vs {}", r.action);
            assert!(dyson_residual(&spec, &r.g, &r.sigma, theta).unwrap() < 1e-9, "{kind}");
            assert!(r.g.antisymmetry_defect() < 1e-12);
        }
    }

    #[test]
    fn thermal_matches_dense_path() {
        let spec = build_contour(ContourKind::Thermal, 4.0, 16).unwrap();
        let p = ModelParams::syk(1.0);
        let cfg = SolverConfig { tolerance: 1e-12, ..SolverConfig::default() };
        let fft = solve(&spec, &p, 0.0, &cfg).unwrap();
        let geo = Geometry::new(&spec);
        let setup = ThetaSetup::new(&spec, &geo, 0.0).unwrap();
        let seed = free_propagator(&spec).to_mat(1.0);
        let dense = iterate(&setup, seed, spec.dtau(), &p, &cfg, free_action(&spec), 0.0).unwrap();
        assert!((fft.action - dense.action).abs() < 1e-11);
        let full = action_density(&fft.g, &fft.sigma, &spec, &p, 0.0).unwrap();
        assert!((full - fft.action).abs() < 1e-11);
    }

    #[test]
    fn lowrank_thermal_matches_dense_path() {
        let spec = build_contour(ContourKind::Thermal, 4.0, 16).unwrap();
        let p = ModelParams::lowrank(0.8, 3.0);
        let cfg = SolverConfig { tolerance: 1e-12, ..SolverConfig::default() };
        let fft = solve(&spec, &p, 0.0, &cfg).unwrap();
        let full = action_density(&fft.g, &fft.sigma, &spec, &p, 0.0).unwrap();
        assert!((full - fft.action).abs() < 1e-11, "{full} {}", fft.action);
    }

    #[test]
    fn decoupled_replicas_at_zero_theta() {
        let p = ModelParams::syk(1.0);
        let cfg = SolverConfig::default();
        let qr = solve(&build_contour(ContourKind::Renyi2Qr, 5.0, 20).unwrap(), &p, 0.0, &cfg).unwrap();
        let th = solve(&build_contour(ContourKind::Thermal, 5.0, 20).unwrap(), &p, 0.0, &cfg).unwrap();
        assert!((qr.action - 2.0 * th.action).abs() < 1e-9);
        let pts = qr.g.points();
        let mut off: f64 = 0.0;
        for i in 0..pts {
            for j in 0..pts {
                off = off.max(qr.g[(i, pts + j)].abs());
            }
        }
        assert!(off < 1e-8);
    }

    #[test]
    fn continuation_single_point_equals_solve() {
        let spec = build_contour(ContourKind::Renyi2Q, 4.0, 16).unwrap();
        let p = ModelParams::syk(1.0);
        let cfg = SolverConfig::default();
        let a = solve(&spec, &p, 0.3, &cfg).unwrap();
        let b = continuation_solve(&spec, &p, &[0.3], &cfg).unwrap().remove(0).unwrap();
        assert_eq!(a.action, b.action);
    }

    #[test]
    fn resample_is_identity_on_same_grid() {
        let g: Vec<f64> = (0..10).map(|k| if k == 0 { 0.0 } else { 0.3 + 0.01 * k as f64 }).collect();
        assert_eq!(resample(&g, 10), g);
    }
}
