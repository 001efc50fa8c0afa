//! Command-line driver: `solve`, `coherent-info`, `threshold`, `oracle`,
//! `fit-gamma` and `extrapolate`.
//!
//! Exit codes: 0 success, 1 other failure (including total convergence
//! failure), 2 partial convergence failure, 3 convention-check failure.

pub mod checkpoint;
pub mod config;
pub mod output;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::LN_2;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{beta_of_n, extrapolate_zero_t, Extrapolation, PerturbativeFit, ThresholdResult};
use crate::channels::{entropies_breaking, entropies_from_landscapes, phi_of_p, Diagram, EntropyResult, Replicas};
use crate::contour::build_contour;
use crate::edoracle::{self, Channel, ChannelFamily, ChoiCheck};
use crate::error::{Error, Result};
use crate::solver::{entropy_density, free_energy_density, solve_thermal, ContourSolver};
use crate::suite::{self, threshold_phi_grid, uniform_grid, SuiteConfig};

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CheckpointHeader};
pub use config::{RawConfig, RunConfig};
pub use output::{num, write_json, Csv};

#[derive(Parser, Debug)]
#[command(name = "syk-replica", version, about = "Large-N replica solver for SYK code coherent information")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat sectioned key=value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides [output] dir).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent scan points.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Rényi index (overrides [scan] renyi).
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub renyi: Option<u8>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Solve contours and write checkpoints plus a JSON summary.
    Solve,
    /// Coherent information over the configured (beta, p, q) grid as CSV.
    CoherentInfo,
    /// Perturbative fits, SSB onset and epsilon thresholds with T -> 0 extrapolation.
    Threshold,
    /// Exact small-N convention checks, bounds and disorder averages.
    Oracle,
    /// Second-order coefficients Gamma_Q, Gamma_QR per temperature.
    FitGamma,
    /// Zero temperature extrapolation of a two-column series or of the entropy.
    Extrapolate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failed,
    Partial,
    ConventionFailure,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Failed => 1,
            Outcome::Partial => 2,
            Outcome::ConventionFailure => 3,
        }
    }

    fn from_counts(ok: usize, total: usize) -> Self {
        match (ok, total) {
            (o, t) if o == t => Outcome::Success,
            (0, _) => Outcome::Failed,
            _ => Outcome::Partial,
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(o) => o.code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default_config(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(n) = cli.renyi {
        cfg.scan.renyi = n as usize;
    }
    fs::create_dir_all(&cfg.out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Solve => cmd_solve(&cfg),
        Command::CoherentInfo => cmd_coherent_info(&cfg),
        Command::Threshold => cmd_threshold(&cfg),
        Command::Oracle => cmd_oracle(&cfg),
        Command::FitGamma => cmd_fit_gamma(&cfg),
        Command::Extrapolate => cmd_extrapolate(&cfg),
    })
}

fn grid_points(beta: f64, m: Option<usize>, dtau: f64) -> usize {
    m.unwrap_or_else(|| (((beta / dtau) / 2.0).round() as usize * 2).max(8))
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveRecord {
    pub kind: String,
    pub beta: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub theta: f64,
    pub action: Option<f64>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub converged: bool,
    pub checkpoint: Option<PathBuf>,
    pub error: Option<String>,
}

fn checkpoint_name(kind: &str, beta: f64, theta: f64) -> String {
    format!("{kind}_beta{beta}_theta{theta}.sykgf")
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome> {
    let warm = cfg.warm_start.as_deref().map(read_checkpoint).transpose()?;
    let c = &cfg.contour;
    let points: Vec<_> = c
        .kinds
        .iter()
        .flat_map(|&k| c.betas.iter().flat_map(move |&b| c.thetas.iter().map(move |&t| (k, b, t))))
        .collect();
    let records: Vec<SolveRecord> = points
        .par_iter()
        .map(|&(kind, beta, theta)| {
            let m = grid_points(beta, c.m, c.dtau);
            let mut rec = SolveRecord {
                kind: kind.name().into(),
                beta,
                m,
                theta,
                action: None,
                iterations: None,
                residual: None,
                converged: false,
                checkpoint: None,
                error: None,
            };
            let mut attempt = || -> Result<()> {
                let spec = build_contour(kind, beta, m)?;
                let mut solver_cfg = cfg.solver.clone();
                if let Some(w) = &warm {
                    if w.header.kind == kind.name() && w.header.m == m && w.header.beta == beta {
                        solver_cfg.warm_start = Some(w.g.clone());
                    }
                }
                let res = ContourSolver::new(spec, cfg.params, solver_cfg)?.solve(theta)?;
                let path = cfg.out_dir.join(checkpoint_name(kind.name(), beta, theta));
                write_checkpoint(&path, &CheckpointHeader::new(kind, beta, m, cfg.params, theta), &res.g)?;
                rec.action = Some(res.action);
                rec.iterations = Some(res.iterations);
                rec.residual = Some(res.residual);
                rec.converged = res.converged;
                rec.checkpoint = Some(path);
                Ok(())
            };
            if let Err(e) = attempt() {
                rec.error = Some(e.to_string());
            }
            eprintln!(
                "solve {} beta={} M={} theta={}: {}",
                rec.kind,
                beta,
                m,
                theta,
                match (&rec.error, rec.action) {
                    (Some(e), _) => format!("error: {e}"),
                    (None, Some(a)) => format!("action={a:.12} iterations={:?} converged={}", rec.iterations, rec.converged),
                    _ => String::new(),
                }
            );
            rec
        })
        .collect();
    write_json(&cfg.out_dir.join("solve_summary.json"), &records)?;
    Ok(Outcome::from_counts(records.iter().filter(|r| r.converged).count(), records.len()))
}

pub const COHERENT_INFO_COLUMNS: [&str; 10] =
    ["beta", "renyi", "p", "q", "s_qr", "s_q", "ic_density", "phi_star", "ssb", "converged"];

fn failed_row(n: usize, p: f64, q: f64) -> EntropyResult {
    EntropyResult {
        renyi_n: n,
        p,
        q,
        s_qr: f64::NAN,
        s_q: f64::NAN,
        ic_density: f64::NAN,
        phi_star: f64::NAN,
        phi_star_qr: f64::NAN,
        phi_star_sym: f64::NAN,
        ssb: false,
        converged: false,
    }
}

/// Entropy results for every `(p, q)` at one temperature, ordered by `(p, q)`.
pub fn coherent_info_at(cfg: &RunConfig, beta: f64) -> Vec<EntropyResult> {
    let s = &cfg.scan;
    let n = s.renyi;
    let mut ps = s.p.clone();
    let mut qs = s.q.clone();
    ps.sort_by(f64::total_cmp);
    qs.sort_by(f64::total_cmp);
    let m = grid_points(beta, None, s.dtau);
    let reps = match Replicas::new(beta, m, cfg.params, n, cfg.solver.clone()) {
        Ok(r) => r,
        Err(_) => return ps.iter().flat_map(|&p| qs.iter().map(move |&q| failed_row(n, p, q))).collect(),
    };
    let landscapes = if qs.iter().any(|&q| q > 0.0) {
        let p_max = ps.iter().cloned().fold(0.0, f64::max);
        let phi_max = s.phi_max.max(phi_of_p(p_max).unwrap_or(0.0) + 0.5);
        let grid = threshold_phi_grid(s.phi_points, phi_max);
        reps.landscape(Diagram::Q, &grid).and_then(|lq| Ok((lq, reps.landscape(Diagram::Qr, &grid)?))).ok()
    } else {
        None
    };
    let mut rows = Vec::new();
    for &p in &ps {
        for &q in &qs {
            let r = if q == 0.0 {
                entropies_breaking(&reps, p)
            } else {
                match &landscapes {
                    Some((lq, lqr)) => entropies_from_landscapes(lq, lqr, p, q),
                    None => Err(Error::EmptyScan),
                }
            };
            rows.push(r.unwrap_or_else(|_| failed_row(n, p, q)));
        }
    }
    rows
}

pub fn cmd_coherent_info(cfg: &RunConfig) -> Result<Outcome> {
    let mut betas = cfg.scan.betas.clone();
    betas.sort_by(f64::total_cmp);
    let per_beta: Vec<(f64, Vec<EntropyResult>)> =
        betas.par_iter().map(|&b| (b, coherent_info_at(cfg, b))).collect();
    let mut csv = Csv::new("coherent-info", &COHERENT_INFO_COLUMNS);
    let (mut ok, mut total) = (0, 0);
    for (beta, rows) in &per_beta {
        for r in rows {
            total += 1;
            ok += r.converged as usize;
            csv.push(vec![
                num(*beta),
                r.renyi_n.to_string(),
                num(r.p),
                num(r.q),
                num(r.s_qr),
                num(r.s_q),
                num(r.ic_density),
                num(r.phi_star),
                r.ssb.to_string(),
                r.converged.to_string(),
            ]);
        }
    }
    let path = cfg.out_dir.join(format!("coherent_info_n{}.csv", cfg.scan.renyi));
    csv.write(&path)?;
    eprintln!("wrote {} rows to {}", csv.len(), path.display());
    Ok(Outcome::from_counts(ok, total))
}

/// Suite configuration derived from the `[scan]` section.
pub fn suite_config(cfg: &RunConfig) -> SuiteConfig {
    let s = &cfg.scan;
    let positive = |v: &[f64]| v.iter().copied().filter(|&x| x > 0.0).collect::<Vec<_>>();
    let mut q_grid = positive(&s.q);
    if q_grid.is_empty() {
        q_grid = uniform_grid(0.005, 80);
    }
    q_grid.sort_by(f64::total_cmp);
    let mut p_grid = positive(&s.p);
    if p_grid.is_empty() {
        p_grid = uniform_grid(0.01, 40);
    }
    p_grid.sort_by(f64::total_cmp);
    SuiteConfig {
        renyi_n: s.renyi,
        betas: s.betas.clone(),
        dtau: s.dtau,
        params: cfg.params,
        phis: threshold_phi_grid(s.phi_points, s.phi_max),
        q_grid,
        p_grid,
        order: s.order,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaSummary {
    pub beta: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub fit: PerturbativeFit,
    pub gamma_q_phi: f64,
    pub predicted_qc: f64,
    pub g_nbeta: f64,
    pub thermal_slope: f64,
    pub clean_ic: f64,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub renyi_n: usize,
    pub c: f64,
    pub alpha: f64,
    pub eta: Option<f64>,
    pub per_beta: Vec<BetaSummary>,
    pub clean_ic_zero_t: Extrapolation,
    pub gamma_q_phi_zero_t: Extrapolation,
    pub q_c_zero_t: Extrapolation,
    pub thresholds: Vec<ThresholdResult>,
}

pub fn cmd_threshold(cfg: &RunConfig) -> Result<Outcome> {
    let sc = suite_config(cfg);
    let res = suite::run_suite(&sc, &cfg.solver)?;
    let t = &cfg.threshold;
    let n_of_beta = |b: f64| (b / t.c).powf(1.0 / t.alpha);
    let mut thresholds = Vec::new();
    for &eps in &t.epsilon {
        for p in &res.points {
            let ((q_th, qo), (p_th, po)) = p.thresholds(eps)?;
            thresholds.push(ThresholdResult {
                n: sc.renyi_n,
                beta: Some(p.beta),
                n_majorana: Some(n_of_beta(p.beta)),
                q_c: p.q_c,
                q_c_open_ended: p.q_c_open_ended,
                q_th,
                q_th_open_ended: qo,
                p_th,
                p_th_open_ended: po,
                epsilon: eps,
                eta: t.eta,
                c: t.c,
                alpha: t.alpha,
            });
        }
        let (q_th, qo) = res.q_threshold(eps)?;
        let (p_th, po) = res.p_threshold(eps)?;
        thresholds.push(ThresholdResult {
            n: sc.renyi_n,
            beta: None,
            n_majorana: None,
            q_c: res.q_c.value,
            q_c_open_ended: res.points.iter().any(|p| p.q_c_open_ended),
            q_th,
            q_th_open_ended: qo,
            p_th,
            p_th_open_ended: po,
            epsilon: eps,
            eta: t.eta,
            c: t.c,
            alpha: t.alpha,
        });
    }
    debug_assert!((beta_of_n(n_of_beta(40.0), t.c, t.alpha) - 40.0).abs() < 1e-9);
    let report = ThresholdReport {
        renyi_n: sc.renyi_n,
        c: t.c,
        alpha: t.alpha,
        eta: t.eta,
        per_beta: res
            .points
            .iter()
            .map(|p| BetaSummary {
                beta: p.beta,
                m: p.m,
                fit: p.fit.clone(),
                gamma_q_phi: p.fit.gamma_q_phi(),
                predicted_qc: p.fit.predicted_qc(),
                g_nbeta: p.g_nbeta,
                thermal_slope: p.thermal_slope(),
                clean_ic: p.clean_ic,
                skipped: p.skipped,
            })
            .collect(),
        clean_ic_zero_t: res.clean_ic,
        gamma_q_phi_zero_t: res.gamma_q_phi,
        q_c_zero_t: res.q_c,
        thresholds,
    };
    let n = sc.renyi_n;
    write_json(&cfg.out_dir.join(format!("threshold_n{n}.json")), &report)?;
    let mut csv = Csv::new("threshold-qscan", &["beta", "q", "ic_density", "phi_star", "phi_star_sym", "ssb"]);
    for p in &res.points {
        for r in &p.q_scan {
            csv.push(vec![num(p.beta), num(r.q), num(r.ic_density), num(r.phi_star), num(r.phi_star_sym), r.ssb.to_string()]);
        }
    }
    for (q, e) in &res.ic_of_q {
        csv.push(vec!["inf".into(), num(*q), num(e.value), "nan".into(), "nan".into(), (*q > res.q_c.value).to_string()]);
    }
    csv.write(&cfg.out_dir.join(format!("threshold_qscan_n{n}.csv")))?;
    let mut csv = Csv::new("threshold-pscan", &["beta", "p", "ic_density"]);
    for p in &res.points {
        for &(rate, ic) in &p.p_scan {
            csv.push(vec![num(p.beta), num(rate), num(ic)]);
        }
    }
    for (rate, e) in &res.ic_of_p {
        csv.push(vec!["inf".into(), num(*rate), num(e.value)]);
    }
    csv.write(&cfg.out_dir.join(format!("threshold_pscan_n{n}.csv")))?;
    let skipped: usize = res.points.iter().map(|p| p.skipped).sum();
    Ok(if skipped > 0 { Outcome::Partial } else { Outcome::Success })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub check: String,
    pub n_majorana: usize,
    pub parameter: f64,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleCheck {
    fn new(check: &str, n_majorana: usize, parameter: f64, value: f64, tolerance: f64) -> Self {
        Self { check: check.into(), n_majorana, parameter, value, tolerance, pass: value.abs() <= tolerance }
    }
}

/// Convention checks: Majorana algebra, Kraus parity relations, Choi
/// identities for both channel families, and exact infinite temperature
/// entropies.
pub fn oracle_convention_checks(sizes: &[usize]) -> Result<(Vec<OracleCheck>, Vec<ChoiCheck>)> {
    let mut checks = Vec::new();
    let mut chois = Vec::new();
    for &n in sizes {
        checks.push(OracleCheck::new("algebra", n, 0.0, edoracle::MajoranaAlgebra::new(n)?.check_relations(), 1e-13));
        let (pair, single) = edoracle::kraus_parity_relations(n)?;
        checks.push(OracleCheck::new("pair_kraus_commute_parity", n, 0.0, pair, 1e-13));
        checks.push(OracleCheck::new("single_kraus_anticommute_parity", n, 0.0, single, 1e-13));
        for p in [0.0, 0.1, 0.3] {
            let c = edoracle::verify_channel_choi(ChannelFamily::Single, p, n)?;
            checks.push(OracleCheck::new("choi_single", n, p, c.deviation, 1e-10));
            chois.push(c);
        }
        for q in [0.0, 0.2, 0.5, 0.9] {
            let c = edoracle::verify_channel_choi(ChannelFamily::Pair, q, n)?;
            checks.push(OracleCheck::new("choi_pair", n, q, c.deviation, 1e-10));
            chois.push(c);
        }
        let state = edoracle::maximally_entangled(n)?;
        for k in [2, 3] {
            let s = edoracle::clean_coherent_info(&state, k)?;
            checks.push(OracleCheck::new(&format!("beta0_entropy_n{k}"), n, 0.0, s - n as f64 / 2.0 * LN_2, 1e-12));
        }
        checks.push(OracleCheck::new("annihilation", n, 0.0, edoracle::annihilation_defect(&state), 1e-13));
    }
    Ok((checks, chois))
}

pub fn cmd_oracle(cfg: &RunConfig) -> Result<Outcome> {
    let o = &cfg.oracle;
    let (mut checks, chois) = oracle_convention_checks(&o.choi_sizes)?;
    let n = cfg.scan.renyi;
    let bounds = edoracle::bounds_check(o.draws, o.bounds_n_majorana, &cfg.params, n, 0x5eed)?;
    let violations = bounds.iter().filter(|b| !b.holds).count();
    checks.push(OracleCheck::new("bounds_violations", o.bounds_n_majorana, o.draws as f64, violations as f64, 0.0));
    let convention_ok = checks.iter().all(|c| c.pass);
    let mut csv = Csv::new("oracle-checks", &["check", "n_majorana", "parameter", "value", "tolerance", "pass"]);
    for c in &checks {
        csv.push(vec![c.check.clone(), c.n_majorana.to_string(), num(c.parameter), num(c.value), num(c.tolerance), c.pass.to_string()]);
    }
    csv.write(&cfg.out_dir.join("oracle_checks.csv"))?;
    write_json(&cfg.out_dir.join("oracle_choi.json"), &chois)?;
    let mut avg = Csv::new("oracle-average", &["n_majorana", "beta", "renyi", "p", "q", "ic_mean", "ic_stderr", "seeds"]);
    for &p in &o.p {
        for &q in &o.q {
            let (mean, se) =
                edoracle::disorder_average(o.n_majorana, &cfg.params, o.beta, Channel { p, q }, n, &o.seeds)?;
            avg.push(vec![
                o.n_majorana.to_string(),
                num(o.beta),
                n.to_string(),
                num(p),
                num(q),
                num(mean / o.n_majorana as f64),
                num(se / o.n_majorana as f64),
                o.seeds.len().to_string(),
            ]);
        }
    }
    avg.write(&cfg.out_dir.join("oracle_average.csv"))?;
    for c in checks.iter().filter(|c| !c.pass) {
        eprintln!("convention check failed: {} N={} param={} value={:e}", c.check, c.n_majorana, c.parameter, c.value);
    }
    Ok(if convention_ok { Outcome::Success } else { Outcome::ConventionFailure })
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaRecord {
    pub fit: PerturbativeFit,
    pub gamma_q_phi: f64,
    pub predicted_qc: f64,
    pub g_nbeta: f64,
    pub thermal_slope: f64,
    pub slope_relative_error: f64,
}

/// Fits at one temperature using only the small-rate landscape points.
pub fn fit_gamma_at(cfg: &RunConfig, beta: f64) -> Result<GammaRecord> {
    let n = cfg.scan.renyi;
    let m = grid_points(beta, None, cfg.scan.dtau);
    let reps = Replicas::new(beta, m, cfg.params, n, cfg.solver.clone())?;
    let grid = threshold_phi_grid(7, 1.0);
    let grid = &grid[..7];
    let lq = reps.landscape(Diagram::Q, grid)?;
    let lqr = reps.landscape(Diagram::Qr, grid)?;
    let fit = suite::fit_gamma(&lq, &lqr, beta)?;
    let thermal = solve_thermal(n as f64 * beta, n * m, &cfg.params, &cfg.solver, None)?;
    let g_nbeta = thermal.at_offset(m);
    let thermal_slope = -2.0 * n as f64 * g_nbeta;
    Ok(GammaRecord {
        gamma_q_phi: fit.gamma_q_phi(),
        predicted_qc: fit.predicted_qc(),
        slope_relative_error: (fit.slope_q - thermal_slope).abs() / thermal_slope.abs(),
        fit,
        g_nbeta,
        thermal_slope,
    })
}

pub fn cmd_fit_gamma(cfg: &RunConfig) -> Result<Outcome> {
    let results: Vec<Result<GammaRecord>> = cfg.scan.betas.par_iter().map(|&b| fit_gamma_at(cfg, b)).collect();
    let ok: Vec<&GammaRecord> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    for (b, r) in cfg.scan.betas.iter().zip(&results) {
        if let Err(e) = r {
            eprintln!("fit-gamma beta={b}: {e}");
        }
    }
    write_json(&cfg.out_dir.join(format!("fit_gamma_n{}.json", cfg.scan.renyi)), &ok)?;
    Ok(Outcome::from_counts(ok.len(), results.len()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtrapolationReport {
    pub quantity: String,
    pub points: Vec<(f64, f64)>,
    pub result: Extrapolation,
}

/// `(beta, value)` series for the configured quantity.
pub fn extrapolation_series(cfg: &RunConfig) -> Result<(String, Vec<(f64, f64)>)> {
    let e = &cfg.extrapolate;
    if let Some(input) = &e.input {
        return Ok((input.display().to_string(), output::read_pairs(input)?));
    }
    let dtau = cfg.contour.dtau;
    let f: fn(f64, usize, &crate::models::ModelParams, &crate::solver::SolverConfig) -> Result<f64> =
        match e.quantity.as_str() {
            "entropy" => entropy_density,
            "free_energy" => free_energy_density,
            other => return Err(Error::InvalidParameter(format!("quantity `{other}` (use entropy or free_energy)"))),
        };
    let pts = cfg
        .scan
        .betas
        .par_iter()
        .map(|&b| Ok((b, f(b, grid_points(b, None, dtau), &cfg.params, &cfg.solver)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((e.quantity.clone(), pts))
}

pub fn cmd_extrapolate(cfg: &RunConfig) -> Result<Outcome> {
    let (quantity, points) = extrapolation_series(cfg)?;
    let result = extrapolate_zero_t(&points, cfg.extrapolate.order)?;
    let mut csv = Csv::new("extrapolate", &["beta", "value"]);
    for &(b, v) in &points {
        csv.push(vec![num(b), num(v)]);
    }
    csv.write(&cfg.out_dir.join("extrapolate_series.csv"))?;
    write_json(&cfg.out_dir.join("extrapolate.json"), &ExtrapolationReport { quantity, points, result })?;
    eprintln!("T -> 0: {} +- {}", result.value, result.sigma);
    Ok(Outcome::Success)
}

/// Output directory helper for callers that bypass `run`.
pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)?;
    Ok(())
}
