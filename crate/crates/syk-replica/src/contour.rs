//! Discretized replica contours.
//!
//! Every contour is a set of flavors, each a circle of length `len * beta`
//! sampled at midpoints `tau_k = (k + 1/2) dtau` with `dtau = beta / M`.
//! Points either carry SYK evolution (the Hamiltonian mask) or sit in a
//! noise window, where they are paired with a partner point by a mirror map
//! `tau -> c beta - tau`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::BilocalField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourKind {
    Thermal,
    Renyi2Qr,
    Renyi2Q,
    Renyi3Qr,
    Renyi3Q,
}

impl ContourKind {
    pub const ALL: [ContourKind; 5] =
        [Self::Thermal, Self::Renyi2Qr, Self::Renyi2Q, Self::Renyi3Qr, Self::Renyi3Q];

    pub fn name(self) -> &'static str {
        match self {
            Self::Thermal => "thermal",
            Self::Renyi2Qr => "renyi2_qr",
            Self::Renyi2Q => "renyi2_q",
            Self::Renyi3Qr => "renyi3_qr",
            Self::Renyi3Q => "renyi3_q",
        }
    }

    pub fn flavors(self) -> usize {
        match self {
            Self::Thermal | Self::Renyi2Q | Self::Renyi3Q => 1,
            Self::Renyi2Qr => 2,
            Self::Renyi3Qr => 3,
        }
    }

    /// Length of each flavor's circle in units of beta.
    pub fn length_in_beta(self) -> usize {
        match self {
            Self::Thermal => 1,
            Self::Renyi2Qr | Self::Renyi3Qr => 2,
            Self::Renyi2Q => 4,
            Self::Renyi3Q => 6,
        }
    }

    /// Number of SYK segments of length beta on each flavor.
    pub fn segments(self) -> usize {
        match self {
            Self::Thermal | Self::Renyi2Qr | Self::Renyi3Qr => 1,
            Self::Renyi2Q => 2,
            Self::Renyi3Q => 3,
        }
    }

    /// Diagram pair for a Rényi index: `(system+reference, system)`.
    pub fn renyi_pair(n: usize) -> Result<(Self, Self)> {
        match n {
            2 => Ok((Self::Renyi2Qr, Self::Renyi2Q)),
            3 => Ok((Self::Renyi3Qr, Self::Renyi3Q)),
            _ => Err(Error::InvalidParameter(format!("Rényi index {n} not supported (use 2 or 3)"))),
        }
    }
}

impl fmt::Display for ContourKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ContourKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// A grid point: `(flavor, index within flavor)`.
pub type Site = (usize, usize);

/// Bilocal noise insertion on one window.
///
/// Source points `k` in `source` on flavor `flavors.0` couple to
/// `mirror * M - 1 - k` on flavor `flavors.1`. The orientation
/// (source, partner) fixes the sign of the vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseWindow {
    pub flavors: (usize, usize),
    pub source: Range<usize>,
    pub mirror: usize,
}

impl NoiseWindow {
    pub fn partner(&self, m: usize, k: usize) -> usize {
        self.mirror * m - 1 - k
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn pairs(&self, m: usize) -> impl Iterator<Item = (Site, Site)> + '_ {
        self.source.clone().map(move |k| ((self.flavors.0, k), (self.flavors.1, self.partner(m, k))))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub beta: f64,
    /// Grid points per beta (M).
    pub m: usize,
    pub flavors: usize,
    /// Points per flavor.
    pub points: usize,
    /// Indexed by `flavor * points + k`.
    pub hamiltonian_mask: Vec<bool>,
    pub noise_windows: Vec<NoiseWindow>,
}

impl ContourSpec {
    pub fn dtau(&self) -> f64 {
        self.beta / self.m as f64
    }

    pub fn total_length(&self) -> f64 {
        self.kind.length_in_beta() as f64 * self.beta
    }

    pub fn dim(&self) -> usize {
        self.flavors * self.points
    }

    pub fn index(&self, (f, k): Site) -> usize {
        f * self.points + k
    }

    pub fn tau(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dtau()
    }

    /// Combined indices of points with SYK evolution, in contour order.
    pub fn syk_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.hamiltonian_mask[i]).collect()
    }

    pub fn window_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.hamiltonian_mask[i]).collect()
    }

    /// Cumulative SYK time of each masked point, used to map a thermal
    /// solution at `segments * beta` onto the contour. Returns
    /// `(flavor, step)` per entry of [`Self::syk_indices`].
    pub fn effective_steps(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for f in 0..self.flavors {
            let mut step = 0;
            for k in 0..self.points {
                if self.hamiltonian_mask[f * self.points + k] {
                    out.push((f, step));
                    step += 1;
                }
            }
        }
        out
    }

    /// `sum_w n_w log cosh(theta / n_w)`: the normalization of the exact
    /// per-slice transfer weights `tanh(theta / n_w)`.
    pub fn noise_normalization(&self, theta: f64) -> f64 {
        self.noise_windows
            .iter()
            .map(|w| {
                let n = w.len() as f64;
                n * (theta / n).cosh().ln()
            })
            .sum()
    }
}

pub fn build_contour(kind: ContourKind, beta: f64, m: usize) -> Result<ContourSpec> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be positive and finite, got {beta}")));
    }
    if m < 8 {
        return Err(Error::GridTooCoarse(format!("M = {m} < 8")));
    }
    if m % 2 != 0 {
        return Err(Error::InvalidParameter(format!("M = {m} must be even (windows are split in halves)")));
    }
    let flavors = kind.flavors();
    let points = kind.length_in_beta() * m;
    let h = m / 2;
    let on = |segments: &[usize]| -> Vec<bool> { (0..points).map(|k| segments.contains(&(k / m))).collect() };
    let (flavor_mask, noise_windows) = match kind {
        ContourKind::Thermal => (on(&[0]), vec![]),
        ContourKind::Renyi2Qr => (on(&[0]), vec![NoiseWindow { flavors: (0, 1), source: m..2 * m, mirror: 3 }]),
        ContourKind::Renyi2Q => (on(&[0, 2]), vec![NoiseWindow { flavors: (0, 0), source: m..2 * m, mirror: 5 }]),
        ContourKind::Renyi3Qr => (
            on(&[0]),
            [(0, 2), (2, 1), (1, 0)]
                .into_iter()
                .map(|fl| NoiseWindow { flavors: fl, source: m..m + h, mirror: 3 })
                .collect(),
        ),
        ContourKind::Renyi3Q => (
            on(&[0, 2, 4]),
            vec![
                NoiseWindow { flavors: (0, 0), source: m..m + h, mirror: 7 },
                NoiseWindow { flavors: (0, 0), source: m + h..2 * m, mirror: 5 },
                NoiseWindow { flavors: (0, 0), source: 3 * m + h..4 * m, mirror: 9 },
            ],
        ),
    };
    let hamiltonian_mask = (0..flavors).flat_map(|_| flavor_mask.iter().copied()).collect();
    Ok(ContourSpec { kind, beta, m, flavors, points, hamiltonian_mask, noise_windows })
}

/// Antiperiodic free Majorana propagator `1/2 sgn(x)` continued with
/// `G(x + length) = -G(x)`.
pub fn free_green(x: f64, length: f64) -> f64 {
    let wraps = (x / length).floor();
    let r = x - wraps * length;
    if r == 0.0 {
        return 0.0;
    }
    if (wraps as i64).rem_euclid(2) == 0 { 0.5 } else { -0.5 }
}

/// J = 0, noise-free propagator on the grid: block diagonal in flavor,
/// `1/2 sgn(tau - tau')` inside each block.
pub fn free_propagator(spec: &ContourSpec) -> BilocalField {
    let p = spec.points;
    BilocalField::from_fn(spec.flavors, p, |i, j| {
        if i / p != j / p {
            0.0
        } else {
            0.5 * ((i % p) as f64 - (j % p) as f64).signum() * ((i != j) as u8 as f64)
        }
    })
}

/// Bilocal insertion kernel for total strength `theta` per window.
///
/// Each window with `n` pairs carries the exact single-slice transfer weight
/// `tanh(theta / n)`, so `sum artanh(dtau^2 V / 2)` over a window's pairs is
/// exactly `theta`, and `sum dtau^2 V / 2` tends to `theta` as `dtau -> 0`.
pub fn noise_vertex(spec: &ContourSpec, theta: f64) -> BilocalField {
    let mut v = BilocalField::zeros(spec.flavors, spec.points);
    let dt2 = spec.dtau() * spec.dtau();
    for w in &spec.noise_windows {
        let weight = 2.0 * (theta / w.len() as f64).tanh() / dt2;
        for (a, b) in w.pairs(spec.m) {
            let (ia, ib) = (spec.index(a), spec.index(b));
            v[(ib, ia)] += weight;
            v[(ia, ib)] -= weight;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_contour() {
        let c = build_contour(ContourKind::Thermal, 1.0, 64).unwrap();
        assert_eq!((c.flavors, c.points), (1, 64));
        assert!(c.hamiltonian_mask.iter().all(|&b| b));
        assert!(c.noise_windows.is_empty());
    }

    #[test]
    fn renyi2_q_layout() {
        let c = build_contour(ContourKind::Renyi2Q, 1.0, 32).unwrap();
        assert_eq!(c.points, 128);
        assert!((c.total_length() - 4.0).abs() < 1e-15);
        for k in 0..128 {
            let tau = c.tau(k);
            let inside = tau < 1.0 || (2.0..3.0).contains(&tau);
            assert_eq!(c.hamiltonian_mask[k], inside, "k={k}");
        }
        let w = &c.noise_windows[0];
        for (a, b) in w.pairs(c.m) {
            assert!((c.tau(a.1) + c.tau(b.1) - 5.0).abs() < 1e-12);
            assert!((1.0..2.0).contains(&c.tau(a.1)));
        }
    }

    #[test]
    fn renyi3_qr_layout() {
        let c = build_contour(ContourKind::Renyi3Qr, 2.0, 16).unwrap();
        assert_eq!((c.flavors, c.points), (3, 32));
        assert!((c.total_length() - 4.0).abs() < 1e-15);
        let pairs: Vec<_> = c.noise_windows.iter().map(|w| w.flavors).collect();
        assert_eq!(pairs, vec![(0, 2), (2, 1), (1, 0)]);
        for w in &c.noise_windows {
            for (a, b) in w.pairs(c.m) {
                assert!((c.tau(a.1) + c.tau(b.1) - 6.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn masks_and_windows_partition_every_contour() {
        for kind in ContourKind::ALL {
            let c = build_contour(kind, 1.5, 12).unwrap();
            let mut seen = vec![0u8; c.dim()];
            for (i, &on) in c.hamiltonian_mask.iter().enumerate() {
                seen[i] += on as u8;
            }
            for w in &c.noise_windows {
                for (a, b) in w.pairs(c.m) {
                    seen[c.index(a)] += 1;
                    seen[c.index(b)] += 1;
                }
            }
            assert!(seen.iter().all(|&s| s == 1), "{kind}");
            let on = c.hamiltonian_mask.iter().filter(|&&b| b).count();
            assert_eq!(on, kind.flavors() * kind.segments() * c.m, "{kind}");
        }
    }

    #[test]
    fn partner_map_is_an_involution() {
        for kind in ContourKind::ALL {
            let c = build_contour(kind, 1.0, 10).unwrap();
            for w in &c.noise_windows {
                for k in w.source.clone() {
                    assert_eq!(w.partner(c.m, w.partner(c.m, k)), k);
                }
            }
        }
    }

    #[test]
    fn refinement_nests() {
        for kind in ContourKind::ALL {
            let coarse = build_contour(kind, 1.0, 8).unwrap();
            let fine = build_contour(kind, 1.0, 16).unwrap();
            for f in 0..coarse.flavors {
                for k in 0..coarse.points {
                    let c = coarse.hamiltonian_mask[coarse.index((f, k))];
                    assert_eq!(c, fine.hamiltonian_mask[fine.index((f, 2 * k))]);
                    assert_eq!(c, fine.hamiltonian_mask[fine.index((f, 2 * k + 1))]);
                }
            }
            for (wc, wf) in coarse.noise_windows.iter().zip(&fine.noise_windows) {
                assert_eq!(wc.flavors, wf.flavors);
                assert_eq!(2 * wc.source.start, wf.source.start);
                assert_eq!(2 * wc.source.end, wf.source.end);
            }
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(build_contour(ContourKind::Thermal, 1.0, 6), Err(Error::GridTooCoarse(_))));
        assert!(build_contour(ContourKind::Thermal, 1.0, 9).is_err());
        assert!(build_contour(ContourKind::Thermal, 0.0, 8).is_err());
        assert!(matches!("renyi4".parse::<ContourKind>(), Err(Error::UnknownKind(_))));
        assert_eq!("renyi3_q".parse::<ContourKind>().unwrap(), ContourKind::Renyi3Q);
    }

    #[test]
    fn free_propagator_values() {
        let c = build_contour(ContourKind::Renyi2Qr, 1.0, 8).unwrap();
        let g = free_propagator(&c);
        assert_eq!(g.antisymmetry_defect(), 0.0);
        assert_eq!(g.at(0, 5, 0, 2), 0.5);
        assert_eq!(g.at(0, 2, 0, 5), -0.5);
        assert_eq!(g.at(0, 3, 1, 1), 0.0);
        assert_eq!(g.at(1, 4, 1, 4), 0.0);
    }

    #[test]
    fn free_green_is_antiperiodic() {
        let len = 2.0;
        for &x in &[0.3, 1.1, -0.7, 1.9] {
            assert_eq!(free_green(x - len, len), -free_green(x, len));
            assert_eq!(free_green(x + 2.0 * len, len), free_green(x, len));
            assert_eq!(free_green(-x, len), -free_green(x, len));
        }
        assert_eq!(free_green(0.4, len), 0.5);
    }

    #[test]
    fn noise_vertex_structure() {
        let c = build_contour(ContourKind::Renyi2Qr, 1.0, 16).unwrap();
        assert_eq!(noise_vertex(&c, 0.0).max_abs(), 0.0);
        let t = 0.37;
        let v = noise_vertex(&c, t);
        assert_eq!(v.antisymmetry_defect(), 0.0);
        let dt2 = c.dtau() * c.dtau();
        let mut exact = 0.0;
        let mut bare = 0.0;
        let p = c.points;
        for i in 0..c.dim() {
            for j in 0..c.dim() {
                if v[(i, j)] != 0.0 {
                    assert_ne!(i / p, j / p, "diagonal flavor block entry");
                }
                if v[(i, j)] > 0.0 {
                    exact += (0.5 * dt2 * v[(i, j)]).atanh();
                    bare += 0.5 * dt2 * v[(i, j)];
                }
            }
        }
        assert!((exact - t).abs() < 1e-13);
        assert!((bare - t).abs() < t.powi(3) / (3.0 * 16.0 * 16.0) * 1.01);
    }

    #[test]
    fn renyi2_q_vertex_support() {
        let c = build_contour(ContourKind::Renyi2Q, 1.0, 8).unwrap();
        let v = noise_vertex(&c, 0.5);
        for i in 0..c.dim() {
            for j in 0..c.dim() {
                if v[(i, j)] != 0.0 {
                    assert!((c.tau(i) + c.tau(j) - 5.0).abs() < 1e-12);
                    assert_eq!(v[(i, j)], -v[(j, i)]);
                }
            }
        }
    }
}
