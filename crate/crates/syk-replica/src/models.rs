//! Self-energy closures and the large-N action for SYK and low-rank SYK.
//!
//! The interaction order is fixed to four. The low-rank closure is the
//! bosonized form `Pi = G^2`, `D = (g^-2 - Pi)^-1`, `Sigma = c gamma D G`
//! with `c = LOWRANK_CLOSURE_C`; its small-`g` expansion reproduces SYK
//! with `J^2 = 2 gamma g^4`.

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::contour::{free_propagator, noise_vertex, ContourSpec};
use crate::error::{Error, Result};
use crate::field::BilocalField;
use crate::linalg::{identity_minus, logdet_positive, Lu};

/// Prefactor of the low-rank closure, fixed by matching the conformal
/// solution to the rank-dimension relation (see `delta_of_gamma`).
pub const LOWRANK_CLOSURE_C: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    Syk { j: f64 },
    #[serde(rename = "lowrank")]
    LowRank { g: f64, rank_gamma: f64 },
}

impl ModelParams {
    pub fn syk(j: f64) -> Self {
        Self::Syk { j }
    }

    pub fn lowrank(g: f64, rank_gamma: f64) -> Self {
        Self::LowRank { g, rank_gamma }
    }

    /// Low-rank model whose leading interaction matches SYK at coupling `j`.
    pub fn lowrank_matching(j: f64, rank_gamma: f64) -> Self {
        Self::LowRank { g: (j * j / (2.0 * rank_gamma)).powf(0.25), rank_gamma }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Syk { .. } => "syk",
            Self::LowRank { .. } => "lowrank",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Syk { j } if j >= 0.0 && j.is_finite() => Ok(()),
            Self::LowRank { g, rank_gamma } if g >= 0.0 && g.is_finite() && rank_gamma > 0.0 && rank_gamma.is_finite() => {
                Ok(())
            }
            _ => Err(Error::InvalidParameter(format!("{self:?}"))),
        }
    }

    pub fn is_free(&self) -> bool {
        match *self {
            Self::Syk { j } => j == 0.0,
            Self::LowRank { g, .. } => g == 0.0,
        }
    }

    /// SYK coupling with the same leading-order interaction.
    pub fn effective_j(&self) -> f64 {
        match *self {
            Self::Syk { j } => j,
            Self::LowRank { g, rank_gamma } => (2.0 * rank_gamma).sqrt() * g * g,
        }
    }
}

/// Closure output on the masked subspace.
pub(crate) struct Closure {
    pub sigma: Mat<f64>,
    /// Interaction part of the action per Majorana.
    pub interaction: f64,
}

/// Evaluates the closure for a field restricted to masked points.
/// `g` is in kernel units, the result too.
pub(crate) fn closure(g: MatRef<'_, f64>, dt: f64, params: &ModelParams, iteration: usize) -> Result<Closure> {
    let n = g.nrows();
    match *params {
        ModelParams::Syk { j } => {
            let j2 = j * j;
            let sigma = Mat::from_fn(n, n, |a, b| j2 * g[(a, b)].powi(3));
            let mut g4 = 0.0;
            for b in 0..n {
                for a in 0..n {
                    g4 += g[(a, b)].powi(4);
                }
            }
            Ok(Closure { sigma, interaction: -j2 / 8.0 * dt * dt * g4 })
        }
        ModelParams::LowRank { g: coupling, rank_gamma } => {
            if coupling == 0.0 {
                return Ok(Closure { sigma: Mat::zeros(n, n), interaction: 0.0 });
            }
            let g2 = coupling * coupling;
            let boson = Mat::from_fn(n, n, |a, b| {
                (a == b) as u8 as f64 - g2 * dt * g[(a, b)] * g[(a, b)]
            });
            let lu = Lu::new(boson.as_ref());
            let logdet = match lu.slogdet() {
                Some((s, l)) if s > 0.0 => l,
                _ => return Err(Error::SingularKernel { iteration }),
            };
            // D kernel = g^2 (1 - g^2 dt Pi)^-1 / dt
            let d = lu.inverse();
            let pref = LOWRANK_CLOSURE_C * rank_gamma * g2 / dt;
            let sigma = Mat::from_fn(n, n, |a, b| pref * d[(a, b)] * g[(a, b)]);
            Ok(Closure { sigma, interaction: 0.5 * rank_gamma * logdet })
        }
    }
}

fn masked(field: &BilocalField, idx: &[usize]) -> Mat<f64> {
    Mat::from_fn(idx.len(), idx.len(), |a, b| field[(idx[a], idx[b])])
}

fn scatter(spec: &ContourSpec, idx: &[usize], m: &Mat<f64>) -> BilocalField {
    let mut out = BilocalField::zeros(spec.flavors, spec.points);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            out[(i, j)] = m[(a, b)];
        }
    }
    out
}

fn check_shape(g: &BilocalField, spec: &ContourSpec) -> Result<()> {
    if g.flavors() != spec.flavors || g.points() != spec.points {
        return Err(Error::Dimension(format!(
            "field {}x{} on contour {}x{}",
            g.flavors(),
            g.points(),
            spec.flavors,
            spec.points
        )));
    }
    Ok(())
}

/// `Sigma = J^2 G^3` on masked pairs, zero elsewhere.
pub fn syk_self_energy(g: &BilocalField, spec: &ContourSpec, params: &ModelParams) -> Result<BilocalField> {
    let ModelParams::Syk { .. } = params else {
        return Err(Error::ModelMismatch { expected: "syk", got: params.name() });
    };
    self_energy(g, spec, params)
}

pub fn lowrank_self_energy(g: &BilocalField, spec: &ContourSpec, params: &ModelParams) -> Result<BilocalField> {
    let ModelParams::LowRank { .. } = params else {
        return Err(Error::ModelMismatch { expected: "lowrank", got: params.name() });
    };
    self_energy(g, spec, params)
}

pub fn self_energy(g: &BilocalField, spec: &ContourSpec, params: &ModelParams) -> Result<BilocalField> {
    check_shape(g, spec)?;
    let idx = spec.syk_indices();
    let c = closure(masked(g, &idx).as_ref(), spec.dtau(), params, 0)?;
    Ok(scatter(spec, &idx, &c.sigma))
}

/// `gamma(Delta) = (2 Delta - 1)(sec 2 pi Delta - 1) / (8 Delta - 2)`.
pub fn gamma_of_delta(delta: f64) -> f64 {
    (2.0 * delta - 1.0) * (1.0 / (2.0 * PI * delta).cos() - 1.0) / (8.0 * delta - 2.0)
}

/// Inverts [`gamma_of_delta`] on `(1/4, 1/2)` by bisection.
pub fn delta_of_gamma(rank_gamma: f64) -> Result<f64> {
    if !(rank_gamma > 0.0) || !rank_gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("rank_gamma = {rank_gamma}")));
    }
    // gamma_of_delta decreases from +inf at 1/4 to 0 at 1/2.
    let (mut lo, mut hi) = (0.25 + 1e-15, 0.5 - 1e-15);
    let f = |d: f64| gamma_of_delta(d) - rank_gamma;
    if f(lo) < 0.0 || f(hi) > 0.0 {
        return Err(Error::NoRoot(format!("rank_gamma = {rank_gamma}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Free-fermion value of the action: `-(flavors/2) log 2`.
pub fn free_action(spec: &ContourSpec) -> f64 {
    -0.5 * spec.flavors as f64 * std::f64::consts::LN_2
}

/// Per-Majorana action on the full contour:
/// `-1/2 log det(1 - G0 (Sigma + V))` relative to the free kernel, the exact
/// free value, `1/2 int Sigma G`, and the interaction term of the model.
pub fn action_density(
    g: &BilocalField,
    sigma: &BilocalField,
    spec: &ContourSpec,
    params: &ModelParams,
    theta: f64,
) -> Result<f64> {
    check_shape(g, spec)?;
    check_shape(sigma, spec)?;
    let dt = spec.dtau();
    let g0 = free_propagator(spec).to_mat(dt);
    let v = noise_vertex(spec, theta);
    let s = Mat::from_fn(spec.dim(), spec.dim(), |i, j| dt * (sigma[(i, j)] + v[(i, j)]));
    let ld = logdet_positive(identity_minus((&g0 * &s).as_ref()).as_ref(), 0)?;
    let idx = spec.syk_indices();
    let interaction = closure(masked(g, &idx).as_ref(), dt, params, 0)?.interaction;
    let sg: f64 = sigma.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
    Ok(free_action(spec) - spec.noise_normalization(theta) - 0.5 * ld + 0.5 * dt * dt * sg + interaction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_contour, ContourKind};

    #[test]
    fn syk_closure_examples() {
        let c = build_contour(ContourKind::Renyi2Q, 1.0, 8).unwrap();
        let p = ModelParams::syk(1.0);
        let zero = BilocalField::zeros(1, c.points);
        assert_eq!(syk_self_energy(&zero, &c, &p).unwrap().max_abs(), 0.0);
        let half = BilocalField::from_fn(1, c.points, |_, _| 0.5);
        let s = syk_self_energy(&half, &c, &p).unwrap();
        assert_eq!(s[(0, 1)], 0.125);
        // k = 10 lies in the noise window
        assert_eq!(s[(10, 1)], 0.0);
        assert_eq!(s[(17, 1)], 0.125);
        assert!(matches!(lowrank_self_energy(&half, &c, &p), Err(Error::ModelMismatch { .. })));
    }

    #[test]
    fn syk_closure_is_odd() {
        let c = build_contour(ContourKind::Renyi2Qr, 1.0, 8).unwrap();
        let p = ModelParams::syk(1.3);
        let g = BilocalField::from_fn(2, c.points, |i, j| ((i * 3 + j * 5) % 7) as f64 / 7.0 - 0.4);
        let a = syk_self_energy(&g, &c, &p).unwrap();
        let b = syk_self_energy(&g.map(|x| -x), &c, &p).unwrap();
        assert_eq!(a.max_abs_diff(&b.map(|x| -x)), 0.0);
    }

    #[test]
    fn lowrank_zero_field() {
        let c = build_contour(ContourKind::Thermal, 2.0, 8).unwrap();
        let p = ModelParams::lowrank(0.7, 3.0);
        let s = lowrank_self_energy(&BilocalField::zeros(1, 8), &c, &p).unwrap();
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn lowrank_small_coupling_approaches_syk() {
        let c = build_contour(ContourKind::Thermal, 2.0, 16).unwrap();
        let g = free_propagator(&c);
        let j = 1e-4;
        let lr = lowrank_self_energy(&g, &c, &ModelParams::lowrank_matching(j, 5.0)).unwrap();
        let syk = syk_self_energy(&g, &c, &ModelParams::syk(j)).unwrap();
        assert!(lr.max_abs_diff(&syk) < 1e-3 * syk.max_abs());
        assert!(lr.antisymmetry_defect() < 1e-15);
    }

    #[test]
    fn rank_dimension_relation() {
        assert!((gamma_of_delta(0.3) - 4.2360679).abs() < 1e-6);
        let d = delta_of_gamma(gamma_of_delta(0.3)).unwrap();
        assert!((d - 0.3).abs() < 1e-12);
        assert!((delta_of_gamma(4.236).unwrap() - 0.3).abs() < 1e-4);
        assert!(delta_of_gamma(1e-6).unwrap() > 0.499);
        assert!(delta_of_gamma(1e6).unwrap() < 0.2501);
        assert!(delta_of_gamma(-1.0).is_err());
        let mut prev = 0.5;
        for g in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let d = delta_of_gamma(g).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn free_actions() {
        let ln2 = std::f64::consts::LN_2;
        for (kind, expect) in [
            (ContourKind::Thermal, -0.5 * ln2),
            (ContourKind::Renyi2Qr, -ln2),
            (ContourKind::Renyi2Q, -0.5 * ln2),
        ] {
            let c = build_contour(kind, 1.0, 8).unwrap();
            let g = free_propagator(&c);
            let s = BilocalField::zeros(c.flavors, c.points);
            let a = action_density(&g, &s, &c, &ModelParams::syk(0.0), 0.0).unwrap();
            assert!((a - expect).abs() < 1e-12, "{kind}: {a}");
        }
    }

    #[test]
    fn model_validation() {
        assert!(ModelParams::syk(-1.0).validate().is_err());
        assert!(ModelParams::lowrank(1.0, 0.0).validate().is_err());
        assert!(ModelParams::lowrank(1.0, 2.0).validate().is_ok());
        let m = ModelParams::lowrank_matching(1.0, 4.0);
        assert!((m.effective_j() - 1.0).abs() < 1e-14);
    }
}
