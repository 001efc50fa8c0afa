//! Flat sectioned `key = value` run configuration.
//!
//! ```text
//! # comment
//! [model]
//! name = syk
//! J = 1.0
//! [scan]
//! beta = 20, 40
//! p = 0:0.2:0.02
//! ```
//! Lists are comma separated; `start:stop:step` expands to an inclusive
//! range. Unknown sections or keys are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::contour::ContourKind;
use crate::error::{Error, Result};
use crate::models::ModelParams;
use crate::solver::{Acceleration, SolverConfig};

const KEYS: &[(&str, &[&str])] = &[
    ("model", &["name", "J", "g", "rank_gamma"]),
    ("solver", &["mixing", "tolerance", "max_iterations", "acceleration", "depth", "warm_start"]),
    ("contour", &["kinds", "beta", "M", "dtau", "theta"]),
    ("scan", &["renyi", "beta", "dtau", "p", "q", "phi_points", "phi_max", "order"]),
    ("threshold", &["epsilon", "c", "alpha", "eta"]),
    ("oracle", &["n_majorana", "choi_sizes", "seeds", "draws", "beta", "p", "q", "bounds_n_majorana"]),
    ("extrapolate", &["input", "quantity", "order"]),
    ("output", &["dir"]),
];

/// Parsed but untyped configuration.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    values: BTreeMap<(String, String), (usize, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(Error::Config { line: line_no, msg: format!("unknown section [{name}]") });
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config { line: line_no, msg: format!("expected key = value, got `{line}`") });
            };
            let Some(sec) = &section else {
                return Err(Error::Config { line: line_no, msg: "key outside of any section".into() });
            };
            let key = key.trim();
            let allowed = KEYS.iter().find(|(s, _)| s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(Error::Config { line: line_no, msg: format!("unknown key `{key}` in [{sec}]") });
            }
            if values.insert((sec.clone(), key.to_string()), (line_no, value.trim().to_string())).is_some() {
                return Err(Error::Config { line: line_no, msg: format!("duplicate key `{key}` in [{sec}]") });
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn get(&self, section: &str, key: &str) -> Option<(usize, &str)> {
        self.values.get(&(section.to_string(), key.to_string())).map(|(l, v)| (*l, v.as_str()))
    }

    pub fn str(&self, section: &str, key: &str) -> Option<&str> {
        self.get(section, key).map(|(_, v)| v)
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|(l, v)| v.parse().map_err(|_| Error::Config { line: l, msg: format!("`{v}` is not a number") }))
            .transpose()
    }

    pub fn usize(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.get(section, key)
            .map(|(l, v)| v.parse().map_err(|_| Error::Config { line: l, msg: format!("`{v}` is not a count") }))
            .transpose()
    }

    pub fn f64_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(section, key).map(|(l, v)| parse_list(v).map_err(|msg| Error::Config { line: l, msg })).transpose()
    }

    pub fn str_list(&self, section: &str, key: &str) -> Option<Vec<String>> {
        self.str(section, key).map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
    }
}

fn parse_list(v: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
        match parts.len() {
            1 => out.push(num(parts[0])?),
            3 => {
                let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
                if !(h > 0.0) || b < a {
                    return Err(format!("bad range `{item}`"));
                }
                let count = ((b - a) / h + 1e-9).floor() as usize;
                out.extend((0..=count).map(|k| a + k as f64 * h));
            }
            _ => return Err(format!("bad list item `{item}`")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ContourSection {
    pub kinds: Vec<ContourKind>,
    pub betas: Vec<f64>,
    pub m: Option<usize>,
    pub dtau: f64,
    pub thetas: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ScanSection {
    pub renyi: usize,
    pub betas: Vec<f64>,
    pub dtau: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub phi_points: usize,
    pub phi_max: f64,
    pub order: usize,
}

#[derive(Clone, Debug)]
pub struct ThresholdSection {
    pub epsilon: Vec<f64>,
    pub c: f64,
    pub alpha: f64,
    pub eta: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct OracleSection {
    pub n_majorana: usize,
    pub choi_sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub draws: usize,
    pub bounds_n_majorana: usize,
    pub beta: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ExtrapolateSection {
    pub input: Option<PathBuf>,
    pub quantity: String,
    pub order: usize,
}

/// Typed run configuration with defaults for everything not given.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: ModelParams,
    pub solver: SolverConfig,
    pub warm_start: Option<PathBuf>,
    pub contour: ContourSection,
    pub scan: ScanSection,
    pub threshold: ThresholdSection,
    pub oracle: OracleSection,
    pub extrapolate: ExtrapolateSection,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let params = match raw.str("model", "name").unwrap_or("syk") {
            "syk" => ModelParams::syk(raw.f64("model", "J")?.unwrap_or(1.0)),
            "lowrank" => ModelParams::lowrank(
                raw.f64("model", "g")?.unwrap_or(1.0),
                raw.f64("model", "rank_gamma")?.unwrap_or(4.236),
            ),
            other => return Err(Error::UnknownModel(other.to_string())),
        };
        params.validate()?;
        let mut solver = SolverConfig::default();
        if let Some(x) = raw.f64("solver", "mixing")? {
            solver.mixing = x;
        }
        if let Some(x) = raw.f64("solver", "tolerance")? {
            solver.tolerance = x;
        }
        if let Some(x) = raw.usize("solver", "max_iterations")? {
            solver.max_iterations = x;
        }
        let depth = raw.usize("solver", "depth")?.unwrap_or(10);
        solver.acceleration = match raw.str("solver", "acceleration").unwrap_or("anderson") {
            "anderson" => Acceleration::Anderson { depth },
            "none" | "damped" => Acceleration::None,
            other => return Err(Error::InvalidParameter(format!("acceleration `{other}` (use anderson or none)"))),
        };
        solver.validate()?;
        let kinds = raw
            .str_list("contour", "kinds")
            .unwrap_or_else(|| vec!["thermal".into()])
            .iter()
            .map(|k| k.parse())
            .collect::<Result<Vec<ContourKind>>>()?;
        let contour = ContourSection {
            kinds,
            betas: raw.f64_list("contour", "beta")?.unwrap_or_else(|| vec![10.0]),
            m: raw.usize("contour", "M")?,
            dtau: raw.f64("contour", "dtau")?.unwrap_or(0.05),
            thetas: raw.f64_list("contour", "theta")?.unwrap_or_else(|| vec![0.0]),
        };
        let scan = ScanSection {
            renyi: raw.usize("scan", "renyi")?.unwrap_or(2),
            betas: raw.f64_list("scan", "beta")?.unwrap_or_else(|| vec![20.0, 30.0, 40.0, 60.0, 80.0]),
            dtau: raw.f64("scan", "dtau")?.unwrap_or(0.2),
            p: raw.f64_list("scan", "p")?.unwrap_or_else(|| vec![0.0]),
            q: raw.f64_list("scan", "q")?.unwrap_or_else(|| vec![0.0]),
            phi_points: raw.usize("scan", "phi_points")?.unwrap_or(21),
            phi_max: raw.f64("scan", "phi_max")?.unwrap_or(0.8),
            order: raw.usize("scan", "order")?.unwrap_or(2),
        };
        let threshold = ThresholdSection {
            epsilon: raw.f64_list("threshold", "epsilon")?.unwrap_or_else(|| vec![0.05]),
            c: raw.f64("threshold", "c")?.unwrap_or(1.0),
            alpha: raw.f64("threshold", "alpha")?.unwrap_or(0.9),
            eta: raw.f64("threshold", "eta")?,
        };
        let oracle = OracleSection {
            n_majorana: raw.usize("oracle", "n_majorana")?.unwrap_or(8),
            choi_sizes: raw
                .f64_list("oracle", "choi_sizes")?
                .unwrap_or_else(|| vec![2.0, 4.0])
                .into_iter()
                .map(|x| x as usize)
                .collect(),
            seeds: raw
                .f64_list("oracle", "seeds")?
                .unwrap_or_else(|| (1..=20).map(f64::from).collect())
                .into_iter()
                .map(|x| x as u64)
                .collect(),
            draws: raw.usize("oracle", "draws")?.unwrap_or(100),
            bounds_n_majorana: raw.usize("oracle", "bounds_n_majorana")?.unwrap_or(4),
            beta: raw.f64("oracle", "beta")?.unwrap_or(5.0),
            p: raw.f64_list("oracle", "p")?.unwrap_or_else(|| vec![0.0, 0.05, 0.1, 0.2]),
            q: raw.f64_list("oracle", "q")?.unwrap_or_else(|| vec![0.0]),
        };
        let extrapolate = ExtrapolateSection {
            input: raw.str("extrapolate", "input").map(PathBuf::from),
            quantity: raw.str("extrapolate", "quantity").unwrap_or("entropy").to_string(),
            order: raw.usize("extrapolate", "order")?.unwrap_or(2),
        };
        Ok(Self {
            params,
            solver,
            warm_start: raw.str("solver", "warm_start").map(PathBuf::from),
            contour,
            scan,
            threshold,
            oracle,
            extrapolate,
            out_dir: PathBuf::from(raw.str("output", "dir").unwrap_or("out")),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_raw(&RawConfig::load(path)?)
    }

    /// All defaults.
    pub fn default_config() -> Self {
        Self::from_raw(&RawConfig::default()).expect("defaults are valid")
    }
}
