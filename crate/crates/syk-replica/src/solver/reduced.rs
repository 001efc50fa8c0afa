//! Dense solver restricted to the points with SYK evolution.
//!
//! The self-energy vanishes on noise windows, so the window fields can be
//! integrated out exactly: with `g0` the free operator and `v` the vertex,
//! `Gt = [(1 - g0 v)^-1 g0]` restricted to SYK points is the J = 0 propagator
//! in the presence of noise, and the Dyson equation on SYK points reads
//! `G = (Gt^-1 - Sigma)^-1`. The log-determinant splits accordingly into
//! `log det(1 - g0_WW v_WW) + log det(1 - Gt Sigma)`.

use faer::Mat;

use crate::contour::ContourSpec;
use crate::error::{Error, Result};
use crate::linalg::Lu;

pub(crate) struct Geometry {
    pub s: Vec<usize>,
    pub w: Vec<usize>,
    /// For each window position `i`: position of its partner.
    partner: Vec<usize>,
    /// For each window position `i`: orientation of `v[i, partner(i)]`.
    orientation: Vec<f64>,
    /// Pairs per window, per window position.
    window_len: Vec<usize>,
}

impl Geometry {
    pub fn new(spec: &ContourSpec) -> Self {
        let s = spec.syk_indices();
        let w = spec.window_indices();
        let mut pos = vec![usize::MAX; spec.dim()];
        for (i, &g) in w.iter().enumerate() {
            pos[g] = i;
        }
        let mut partner = vec![usize::MAX; w.len()];
        let mut orientation = vec![0.0; w.len()];
        let mut window_len = vec![0; w.len()];
        for win in &spec.noise_windows {
            for (a, b) in win.pairs(spec.m) {
                let (ia, ib) = (pos[spec.index(a)], pos[spec.index(b)]);
                partner[ia] = ib;
                partner[ib] = ia;
                // v[b, a] = +weight, v[a, b] = -weight
                orientation[ib] = 1.0;
                orientation[ia] = -1.0;
                window_len[ia] = win.len();
                window_len[ib] = win.len();
            }
        }
        Self { s, w, partner, orientation, window_len }
    }
}

fn g0(spec: &ContourSpec, i: usize, j: usize) -> f64 {
    let p = spec.points;
    if i / p != j / p || i == j {
        0.0
    } else if i > j {
        0.5 * spec.dtau()
    } else {
        -0.5 * spec.dtau()
    }
}

/// Noise-dressed free propagator in operator units.
pub(crate) struct Dressed {
    /// Rows and columns over `rows` x `cols` of the full contour.
    pub gt: Mat<f64>,
    /// `log det(1 - g0_WW v_WW)`.
    pub logdet_windows: f64,
}

/// Computes `Gt[rows, cols]` for insertion strength `theta`.
pub(crate) fn dressed(spec: &ContourSpec, geo: &Geometry, theta: f64, rows: &[usize], cols: &[usize]) -> Result<Dressed> {
    let base = Mat::from_fn(rows.len(), cols.len(), |a, b| g0(spec, rows[a], cols[b]));
    let nw = geo.w.len();
    if nw == 0 || theta == 0.0 {
        return Ok(Dressed { gt: base, logdet_windows: 0.0 });
    }
    let dt = spec.dtau();
    // c[i] = v[i, partner(i)] in operator units
    let c: Vec<f64> = (0..nw)
        .map(|i| geo.orientation[i] * 2.0 * (theta / geo.window_len[i] as f64).tanh() / dt)
        .collect();
    // (g0 v)[x, j] = g0[x, w[partner(j)]] * c[partner(j)]
    let a = Mat::from_fn(nw, nw, |i, j| {
        let pj = geo.partner[j];
        (i == j) as u8 as f64 - g0(spec, geo.w[i], geo.w[pj]) * c[pj]
    });
    let lu = Lu::new(a.as_ref());
    let logdet_windows = match lu.slogdet() {
        Some((_, l)) => l,
        None => return Err(Error::SingularKernel { iteration: 0 }),
    };
    let rhs = Mat::from_fn(nw, cols.len(), |i, b| g0(spec, geo.w[i], cols[b]));
    let x = lu.solve(rhs.as_ref());
    let bmat = Mat::from_fn(rows.len(), nw, |r, j| {
        let pj = geo.partner[j];
        g0(spec, rows[r], geo.w[pj]) * c[pj]
    });
    let gt = base + &bmat * &x;
    Ok(Dressed { gt, logdet_windows })
}

/// Everything that depends on `theta` but not on the interacting fields.
pub(crate) struct ThetaSetup {
    /// `Gt` on SYK points.
    pub gt: Mat<f64>,
    /// `Gt^-1`.
    pub kt: Mat<f64>,
    pub logdet_kt: f64,
    pub logdet_windows: f64,
}

impl ThetaSetup {
    pub fn new(spec: &ContourSpec, geo: &Geometry, theta: f64) -> Result<Self> {
        let d = dressed(spec, geo, theta, &geo.s, &geo.s)?;
        let lu = Lu::new(d.gt.as_ref());
        let logdet_kt = match lu.slogdet() {
            Some((_, l)) => -l,
            None => return Err(Error::SingularKernel { iteration: 0 }),
        };
        Ok(Self { kt: lu.inverse(), gt: d.gt, logdet_kt, logdet_windows: d.logdet_windows })
    }
}
