//! Exact small-N oracle.
//!
//! System `Q` and reference `R` each carry `N` Majoranas; Jordan-Wigner
//! places `Q` first, so `Q` is the leading `N/2` qubits and every `Q`
//! operator is supported there. Majoranas satisfy `gamma^2 = 1/2`.

mod pauli;

pub use pauli::{majorana_strings, Pauli};

use faer::{c64, Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::channels::phi_of_p;
use crate::error::{Error, Result};
use crate::models::ModelParams;

/// Largest `N` for which density matrices on `Q (x) R` are formed.
pub const MAX_DENSE_MAJORANAS: usize = 12;
pub const MAX_MAJORANAS: usize = 16;

fn czero() -> c64 {
    c64::new(0.0, 0.0)
}

/// Dense Majorana operators on `N/2` qubits.
pub struct MajoranaAlgebra {
    pub n_majorana: usize,
    strings: Vec<Pauli>,
}

impl MajoranaAlgebra {
    pub fn new(n_majorana: usize) -> Result<Self> {
        if n_majorana == 0 || n_majorana % 2 != 0 || n_majorana > 2 * MAX_MAJORANAS {
            return Err(Error::Dimension(format!("{n_majorana} Majoranas")));
        }
        Ok(Self { n_majorana, strings: majorana_strings(n_majorana / 2) })
    }

    pub fn dim(&self) -> usize {
        1 << (self.n_majorana / 2)
    }

    /// `sqrt(2) gamma_j` as a Pauli string.
    pub fn string(&self, j: usize) -> Pauli {
        self.strings[j]
    }

    pub fn dense(&self, j: usize) -> Mat<c64> {
        let d = self.strings[j].to_dense(self.dim());
        Mat::from_fn(d.nrows(), d.ncols(), |a, b| d[(a, b)] * FRAC_1_SQRT_2)
    }

    /// Fermion parity `prod_k Z_k`, proportional to the product of all
    /// Majoranas.
    pub fn parity(&self) -> Pauli {
        Pauli { x: 0, z: self.dim() - 1, phase: 0 }
    }

    /// Max deviation of `{g_i, g_j} = delta_ij` and of Hermiticity.
    pub fn check_relations(&self) -> f64 {
        let g: Vec<Mat<c64>> = (0..self.n_majorana).map(|j| self.dense(j)).collect();
        let mut dev: f64 = 0.0;
        for i in 0..g.len() {
            let h = &g[i] - g[i].adjoint();
            dev = dev.max(max_abs(&h));
            for j in 0..g.len() {
                let a = &g[i] * &g[j] + &g[j] * &g[i];
                let e = Mat::from_fn(a.nrows(), a.ncols(), |r, c| {
                    a[(r, c)] - c64::new(((i == j) && (r == c)) as u8 as f64, 0.0)
                });
                dev = dev.max(max_abs(&e));
            }
        }
        dev
    }
}

pub fn max_abs(m: &Mat<c64>) -> f64 {
    let mut d: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            d = d.max(m[(i, j)].norm());
        }
    }
    d
}

fn add_string(h: &mut Mat<c64>, p: Pauli, coef: f64) {
    for b in 0..h.nrows() {
        let (a, c) = p.apply(b);
        h[(a, b)] += c * coef;
    }
}

/// Disorder draw of the Hamiltonian on `n_majorana` Majoranas (`N/2`
/// qubits). SYK: antisymmetric `J_ijkl` of variance `J^2 / 6N^3`, summed
/// over unrestricted indices. Low-rank: `round(gamma N)` antisymmetric
/// `u^n` of variance `(g/N)^2`, `H = sum_n (sum_ij u_ij gamma_i gamma_j)^2`.
pub fn build_hamiltonian(n_majorana: usize, seed: u64, params: &ModelParams) -> Result<Mat<c64>> {
    if !(4..=MAX_MAJORANAS).contains(&n_majorana) || n_majorana % 2 != 0 {
        return Err(Error::Dimension(format!("Hamiltonian on {n_majorana} Majoranas (need even 4..=16)")));
    }
    params.validate()?;
    let alg = MajoranaAlgebra::new(n_majorana)?;
    let dim = alg.dim();
    let n = n_majorana as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Mat::<c64>::zeros(dim, dim);
    match *params {
        ModelParams::Syk { j } => {
            let sd = (j * j / (6.0 * n.powi(3))).sqrt();
            let dist = Normal::new(0.0, sd).map_err(|e| Error::Oracle(e.to_string()))?;
            for a in 0..n_majorana {
                for b in a + 1..n_majorana {
                    for c in b + 1..n_majorana {
                        for d in c + 1..n_majorana {
                            let x: f64 = rng.sample(dist);
                            // 24 orderings, gamma^4 = P^4 / 4
                            let p = alg.string(a).mul(alg.string(b)).mul(alg.string(c)).mul(alg.string(d));
                            add_string(&mut h, p, 24.0 * x / 4.0);
                        }
                    }
                }
            }
        }
        ModelParams::LowRank { g, rank_gamma } => {
            let ranks = ((rank_gamma * n).round() as usize).max(1);
            let dist = Normal::new(0.0, g / n).map_err(|e| Error::Oracle(e.to_string()))?;
            for _ in 0..ranks {
                // B = sum_ij u_ij gamma_i gamma_j = sum_{i<j} u_ij P_i P_j
                let mut bmat = Mat::<c64>::zeros(dim, dim);
                for a in 0..n_majorana {
                    for b in a + 1..n_majorana {
                        let u: f64 = rng.sample(dist);
                        add_string(&mut bmat, alg.string(a).mul(alg.string(b)), u);
                    }
                }
                h += &bmat * &bmat;
            }
        }
    }
    Ok(h)
}

/// Pure state on `Q (x) R`, `N/2 + N/2` qubits.
#[derive(Clone, Debug)]
pub struct ExactState {
    pub n_majorana: usize,
    pub beta: f64,
    pub amplitudes: Vec<c64>,
}

impl ExactState {
    pub fn dims(&self) -> (usize, usize) {
        let d = 1 << (self.n_majorana / 2);
        (d, d)
    }

    pub fn density(&self) -> Mat<c64> {
        let a = &self.amplitudes;
        Mat::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj())
    }
}

/// Joint algebra of `Q` (Majoranas `0..N`) and `R` (`N..2N`).
pub fn joint_strings(n_majorana: usize) -> Vec<Pauli> {
    majorana_strings(n_majorana)
}

fn apply_string(p: Pauli, v: &[c64]) -> Vec<c64> {
    let mut out = vec![czero(); v.len()];
    for (b, &x) in v.iter().enumerate() {
        let (a, c) = p.apply(b);
        out[a] += c * x;
    }
    out
}

fn normalize(v: &mut [c64]) -> f64 {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
    n
}

/// The maximally entangled state with `(gamma_Q^j - i gamma_R^j)|Phi> = 0`,
/// obtained as the joint +1 eigenvector of `2i gamma_Q^j gamma_R^j`.
pub fn maximally_entangled(n_majorana: usize) -> Result<ExactState> {
    if n_majorana == 0 || n_majorana % 2 != 0 || n_majorana > MAX_DENSE_MAJORANAS {
        return Err(Error::Dimension(format!("{n_majorana} Majoranas")));
    }
    let s = joint_strings(n_majorana);
    let dim = 1usize << n_majorana;
    // 2i gamma_Q gamma_R = i P_Q P_R
    let projectors: Vec<Pauli> = (0..n_majorana).map(|j| s[j].mul(s[n_majorana + j]).scale(1)).collect();
    for start in 0..dim {
        let mut v = vec![czero(); dim];
        v[start] = c64::new(1.0, 0.0);
        for &x in &projectors {
            let xv = apply_string(x, &v);
            for (a, b) in v.iter_mut().zip(&xv) {
                *a = (*a + b) * 0.5;
            }
        }
        if normalize(&mut v) > 1e-6 {
            return Ok(ExactState { n_majorana, beta: 0.0, amplitudes: v });
        }
    }
    Err(Error::Oracle("no joint +1 eigenvector".into()))
}

/// `max_j |(gamma_Q^j - i gamma_R^j) |psi>|`.
pub fn annihilation_defect(state: &ExactState) -> f64 {
    let n = state.n_majorana;
    let s = joint_strings(n);
    (0..n)
        .map(|j| {
            let a = apply_string(s[j], &state.amplitudes);
            let b = apply_string(s[n + j], &state.amplitudes);
            a.iter().zip(&b).map(|(x, y)| (x - c64::new(0.0, 1.0) * y).norm_sqr()).sum::<f64>().sqrt() * FRAC_1_SQRT_2
        })
        .fold(0.0, f64::max)
}

/// `exp(-beta h / 2)` for Hermitian `h`.
pub fn half_boltzmann(h: &Mat<c64>, beta: f64) -> Result<Mat<c64>> {
    let eig = h.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Oracle(format!("{e:?}")))?;
    let u = eig.U();
    let s = eig.S().column_vector();
    let e0 = (0..s.nrows()).map(|i| s[i].re).fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = (0..s.nrows()).map(|i| (-0.5 * beta * (s[i].re - e0)).exp()).collect();
    let uw = Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * w[j]);
    Ok(&uw * u.adjoint())
}

/// `Z^{-1/2} exp(-beta H_R / 2) |Phi_QR>` for `h` acting on `R`.
pub fn tfd_state(h: &Mat<c64>, n_majorana: usize, beta: f64) -> Result<ExactState> {
    let mut phi = maximally_entangled(n_majorana)?;
    let d = 1 << (n_majorana / 2);
    if h.nrows() != d {
        return Err(Error::Dimension(format!("Hamiltonian of size {} for {n_majorana} Majoranas", h.nrows())));
    }
    if beta == 0.0 {
        return Ok(phi);
    }
    // R Majoranas carry the Q parity string, which cancels in even
    // products, so H_R = 1 (x) h.
    let k = half_boltzmann(h, beta)?;
    let a = &phi.amplitudes;
    let mut out = vec![czero(); a.len()];
    for q in 0..d {
        for r in 0..d {
            let mut acc = czero();
            for s in 0..d {
                acc += k[(r, s)] * a[q * d + s];
            }
            out[q * d + r] = acc;
        }
    }
    normalize(&mut out);
    phi.amplitudes = out;
    phi.beta = beta;
    Ok(phi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    /// Parity-breaking rate per Majorana.
    pub p: f64,
    /// Parity-conserving rate; each pair is hit with probability `q / N`.
    pub q: f64,
}

impl Channel {
    pub fn single(p: f64) -> Self {
        Self { p, q: 0.0 }
    }

    pub fn pair(q: f64) -> Self {
        Self { p: 0.0, q }
    }

    fn validate(&self, n: usize) -> Result<()> {
        phi_of_p(self.p)?;
        if !(self.q >= 0.0 && self.q <= n as f64) {
            return Err(Error::InvalidParameter(format!("pair rate q = {} outside [0, N]", self.q)));
        }
        Ok(())
    }

    /// Kraus pairs `(weight, string)` acting as `rho -> (1-w) rho + w P rho P^+`,
    /// in application order.
    fn kraus_terms(&self, strings: &[Pauli]) -> Vec<(f64, Pauli)> {
        let n = strings.len();
        let mut out = Vec::new();
        if self.p > 0.0 {
            // 2p gamma rho gamma = p P rho P
            out.extend(strings.iter().map(|&s| (self.p, s)));
        }
        if self.q > 0.0 {
            // 4 (q/N) g_i g_j rho g_j g_i = (q/N) P_i P_j rho (P_i P_j)^+
            for i in 0..n {
                for j in i + 1..n {
                    out.push((self.q / n as f64, strings[i].mul(strings[j])));
                }
            }
        }
        out
    }
}

fn conjugate(rho: &Mat<c64>, p: Pauli) -> Mat<c64> {
    let dim = rho.nrows();
    let mut perm = vec![(0usize, czero()); dim];
    for b in 0..dim {
        perm[b] = p.apply(b);
    }
    let mut out = Mat::zeros(dim, dim);
    // (P rho P^+)[a', b'] = c_a rho[a, b] conj(c_b) with P|a> = c_a |a'>
    for b in 0..dim {
        let (bp, cb) = perm[b];
        for a in 0..dim {
            let (ap, ca) = perm[a];
            out[(ap, bp)] = ca * rho[(a, b)] * cb.conj();
        }
    }
    out
}

fn trace(m: &Mat<c64>) -> c64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Applies the product channel to the first `n_sys` Majoranas of the
/// joint algebra of `rho`'s register.
pub fn apply_channel(rho: &Mat<c64>, n_sys: usize, channel: Channel) -> Result<Mat<c64>> {
    channel.validate(n_sys)?;
    let nq = rho.nrows().trailing_zeros() as usize;
    if 1 << nq != rho.nrows() || 2 * nq < n_sys {
        return Err(Error::Dimension(format!("density matrix of size {}", rho.nrows())));
    }
    let strings = majorana_strings(nq);
    let t0 = trace(rho);
    let mut out = rho.clone();
    for (w, s) in channel.kraus_terms(&strings[..n_sys]) {
        let c = conjugate(&out, s);
        out = Mat::from_fn(out.nrows(), out.ncols(), |i, j| out[(i, j)] * (1.0 - w) + c[(i, j)] * w);
    }
    let drift = (trace(&out) - t0).norm();
    if drift > 1e-12 {
        return Err(Error::Oracle(format!("channel changed the trace by {drift:.3e}")));
    }
    Ok(out)
}

/// `Tr_B rho` for `rho` on `A (x) B` with `dim B = db`.
pub fn partial_trace_last(rho: &Mat<c64>, db: usize) -> Mat<c64> {
    let da = rho.nrows() / db;
    Mat::from_fn(da, da, |a, b| (0..db).map(|r| rho[(a * db + r, b * db + r)]).sum())
}

/// `log tr(rho^n) / (1 - n)` for `n` in `{2, 3}`.
pub fn renyi_entropy(rho: &Mat<c64>, n: usize) -> Result<f64> {
    let t = match n {
        2 => {
            let mut s = 0.0;
            for j in 0..rho.ncols() {
                for i in 0..rho.nrows() {
                    s += rho[(i, j)].norm_sqr();
                }
            }
            s
        }
        3 => trace(&(&(rho * rho) * rho)).re,
        _ => return Err(Error::InvalidParameter(format!("Rényi index {n} not supported (use 2 or 3)"))),
    };
    Ok(t.ln() / (1.0 - n as f64))
}

/// `S_n(Q)` of the clean state, the maximal coherent information.
pub fn clean_coherent_info(state: &ExactState, n: usize) -> Result<f64> {
    let (_, dr) = state.dims();
    renyi_entropy(&partial_trace_last(&state.density(), dr), n)
}

/// Rényi-n coherent information `S_n(Q') - S_n(Q'R)` after the channel.
pub fn exact_coherent_info(state: &ExactState, channel: Channel, n: usize) -> Result<f64> {
    if state.n_majorana > MAX_DENSE_MAJORANAS {
        return Err(Error::Dimension(format!("{} Majoranas exceed the dense limit", state.n_majorana)));
    }
    let (_, dr) = state.dims();
    let rho = apply_channel(&state.density(), state.n_majorana, channel)?;
    let s_qr = renyi_entropy(&rho, n)?;
    let s_q = renyi_entropy(&partial_trace_last(&rho, dr), n)?;
    Ok(s_q - s_qr)
}

/// Per-Majorana coherent information of unencoded Bell pairs: two
/// Majoranas for the single channel, four when pair noise is present.
pub fn bell_pair_coherent_info(p: f64, q: f64, n: usize) -> Result<f64> {
    let size = if q > 0.0 { 4 } else { 2 };
    let state = maximally_entangled(size)?;
    Ok(exact_coherent_info(&state, Channel { p, q }, n)? / size as f64)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum ChannelFamily {
    Single,
    Pair,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ChoiCheck {
    pub family: ChannelFamily,
    pub rate: f64,
    pub n_majorana: usize,
    /// Max deviation from `C exp(c X)` with the exact coefficient.
    pub deviation: f64,
    /// Exponent coefficient used.
    pub coefficient: f64,
    /// Pair family only: deviation when the coefficient is `phi_{q/2N}`.
    pub printed_deviation: Option<f64>,
}

/// `f(S)` for Hermitian `S` whose spectrum lies in `spectrum`, by Lagrange
/// interpolation on the eigenvalues.
fn spectral_function(s: &Mat<c64>, spectrum: &[f64], f: impl Fn(f64) -> f64) -> Mat<c64> {
    let dim = s.nrows();
    let eye = Mat::<c64>::identity(dim, dim);
    let mut out = Mat::<c64>::zeros(dim, dim);
    for (k, &lk) in spectrum.iter().enumerate() {
        let mut proj = eye.clone();
        for (l, &ll) in spectrum.iter().enumerate() {
            if l != k {
                let shifted = Mat::from_fn(dim, dim, |i, j| (s[(i, j)] - eye[(i, j)] * ll) / (lk - ll));
                proj = &proj * &shifted;
            }
        }
        out += Mat::from_fn(dim, dim, |i, j| proj[(i, j)] * f(lk));
    }
    out
}

/// Compares the channel's doubled-state operator built from Kraus operators
/// with the exponential form, on the doubled space `Q (x) Qbar` with
/// `(gamma_j - i gamma_bar_j)|Phi> = 0`.
///
/// Single: `N[rho] -> C exp(phi_p X) ||rho>>` on even operators, with
/// `X = sum_j 2i gamma_j gamma_bar_j`.
/// Pair: `N[rho] -> C exp(c X^2) ||rho>>` on all operators, where the
/// product over pairs gives exactly `c = phi_{q/N} / 2`.
pub fn verify_channel_choi(family: ChannelFamily, rate: f64, n_majorana: usize) -> Result<ChoiCheck> {
    if n_majorana == 0 || n_majorana % 2 != 0 || n_majorana > 8 {
        return Err(Error::Dimension(format!("Choi check on {n_majorana} Majoranas (need even <= 8)")));
    }
    let n = n_majorana;
    let alg = MajoranaAlgebra::new(n)?;
    let dq = alg.dim();
    let phi = maximally_entangled(n)?;
    let strings = joint_strings(n);
    let dim = dq * dq;
    let mut x = Mat::<c64>::zeros(dim, dim);
    for j in 0..n {
        add_string(&mut x, strings[j].mul(strings[n + j]).scale(1), 1.0);
    }
    let levels: Vec<f64> = (0..=n).map(|k| 2.0 * k as f64 - n as f64).collect();
    let channel = match family {
        ChannelFamily::Single => Channel::single(rate),
        ChannelFamily::Pair => Channel::pair(rate),
    };
    channel.validate(n)?;
    let coefficient = match family {
        ChannelFamily::Single => phi_of_p(rate)?,
        ChannelFamily::Pair => 0.5 * phi_of_p(rate / n as f64)?,
    };
    let expo = |c: f64| match family {
        ChannelFamily::Single => spectral_function(&x, &levels, |l| (c * l).exp()),
        ChannelFamily::Pair => spectral_function(&(&x * &x), &squares(&levels), |l| (c * l).exp()),
    };
    // operator basis on Q: Pauli strings, even ones only for the single family
    let basis: Vec<Pauli> = (0..dq)
        .flat_map(|xm| (0..dq).map(move |zm| Pauli { x: xm, z: zm, phase: 0 }))
        .filter(|p| matches!(family, ChannelFamily::Pair) || p.commutes(alg.parity()))
        .collect();
    let gammas: Vec<Mat<c64>> = (0..n).map(|j| alg.dense(j)).collect();
    let embed = |op: &Mat<c64>| -> Vec<c64> {
        // (op (x) 1)|Phi>
        let a = &phi.amplitudes;
        let mut out = vec![czero(); dim];
        for qa in 0..dq {
            for r in 0..dq {
                let mut acc = czero();
                for qb in 0..dq {
                    acc += op[(qa, qb)] * a[qb * dq + r];
                }
                out[qa * dq + r] = acc;
            }
        }
        out
    };
    let kraus = |op: &Mat<c64>| -> Mat<c64> {
        let mut cur = op.clone();
        if channel.p > 0.0 {
            for g in &gammas {
                let t = g * &cur * g;
                cur = Mat::from_fn(dq, dq, |i, j| cur[(i, j)] * (1.0 - channel.p) + t[(i, j)] * 2.0 * channel.p);
            }
        }
        if channel.q > 0.0 {
            let r = channel.q / n as f64;
            for i in 0..n {
                for j in i + 1..n {
                    let t = &gammas[i] * &gammas[j] * &cur * &gammas[j] * &gammas[i];
                    cur = Mat::from_fn(dq, dq, |a, b| cur[(a, b)] * (1.0 - r) + t[(a, b)] * 4.0 * r);
                }
            }
        }
        cur
    };
    let deviation_for = |e: &Mat<c64>| -> f64 {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for p in &basis {
            let op = p.to_dense(dq);
            lhs.extend(embed(&kraus(&op)));
            let v = embed(&op);
            for i in 0..dim {
                rhs.push((0..dim).map(|k| e[(i, k)] * v[k]).sum::<c64>());
            }
        }
        let num: c64 = rhs.iter().zip(&lhs).map(|(b, a)| b.conj() * a).sum();
        let den: f64 = rhs.iter().map(|b| b.norm_sqr()).sum();
        let c = num / den;
        lhs.iter().zip(&rhs).map(|(a, b)| (a - c * b).norm()).fold(0.0, f64::max)
    };
    let deviation = deviation_for(&expo(coefficient));
    let printed_deviation = match family {
        ChannelFamily::Single => None,
        ChannelFamily::Pair => Some(deviation_for(&expo(phi_of_p(rate / (2.0 * n as f64))?))),
    };
    Ok(ChoiCheck { family, rate, n_majorana, deviation, coefficient, printed_deviation })
}

fn squares(levels: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = levels.iter().map(|l| l * l).collect();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

/// Max `|[K, parity]|` over pair Kraus strings and `|{K, parity}|` over
/// single ones, on `n_majorana` Majoranas.
pub fn kraus_parity_relations(n_majorana: usize) -> Result<(f64, f64)> {
    let alg = MajoranaAlgebra::new(n_majorana)?;
    let g = alg.parity().to_dense(alg.dim());
    let mut pair: f64 = 0.0;
    let mut single: f64 = 0.0;
    for i in 0..n_majorana {
        let a = alg.dense(i);
        single = single.max(max_abs(&(&a * &g + &g * &a)));
        for j in i + 1..n_majorana {
            let k = &a * alg.dense(j);
            pair = pair.max(max_abs(&(&k * &g - &g * &k)));
        }
    }
    Ok((pair, single))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundRecord {
    pub seed: u64,
    pub p: f64,
    pub q: f64,
    pub beta: f64,
    pub ic: f64,
    pub clean: f64,
    pub holds: bool,
}

/// Random `(p, q, beta, seed)` draws checking `-I_c(Q) <= I_c <= I_c(Q)`.
pub fn bounds_check(draws: usize, n_majorana: usize, params: &ModelParams, n: usize, seed: u64) -> Result<Vec<BoundRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<(u64, f64, f64, f64)> = (0..draws)
        .map(|_| (rng.random::<u64>(), 0.499 * rng.random::<f64>(), 2.0 * rng.random::<f64>(), 8.0 * rng.random::<f64>()))
        .collect();
    specs
        .into_par_iter()
        .map(|(s, p, q, beta)| {
            let h = build_hamiltonian(n_majorana, s, params)?;
            let state = tfd_state(&h, n_majorana, beta)?;
            let clean = clean_coherent_info(&state, n)?;
            let ic = exact_coherent_info(&state, Channel { p, q }, n)?;
            let tol = 1e-10;
            Ok(BoundRecord { seed: s, p, q, beta, ic, clean, holds: ic <= clean + tol && ic >= -clean - tol })
        })
        .collect()
}

/// Disorder mean and standard error of the coherent information.
pub fn disorder_average(
    n_majorana: usize,
    params: &ModelParams,
    beta: f64,
    channel: Channel,
    n: usize,
    seeds: &[u64],
) -> Result<(f64, f64)> {
    let vals: Vec<f64> = seeds
        .par_iter()
        .map(|&s| {
            let h = build_hamiltonian(n_majorana, s, params)?;
            exact_coherent_info(&tfd_state(&h, n_majorana, beta)?, channel, n)
        })
        .collect::<Result<_>>()?;
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / k;
    let var = if vals.len() > 1 { vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
    Ok((mean, (var / k).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn algebra_relations() {
        for n in [2, 4, 8, 12] {
            assert!(MajoranaAlgebra::new(n).unwrap().check_relations() < 1e-13);
        }
        assert!(MajoranaAlgebra::new(3).is_err());
    }

    #[test]
    fn hamiltonian_properties() {
        let z = build_hamiltonian(8, 1, &ModelParams::syk(0.0)).unwrap();
        assert_eq!(max_abs(&z), 0.0);
        for p in [ModelParams::syk(1.0), ModelParams::lowrank(1.0, 2.0)] {
            let h = build_hamiltonian(8, 7, &p).unwrap();
            assert!(max_abs(&(&h - h.adjoint())) < 1e-13);
            if let ModelParams::Syk { .. } = p {
                assert!(trace(&h).norm() < 1e-12 * 16.0);
            }
        }
        assert!(build_hamiltonian(18, 0, &ModelParams::syk(1.0)).is_err());
    }

    #[test]
    fn maximally_entangled_state() {
        for n in [2, 4, 6] {
            let s = maximally_entangled(n).unwrap();
            assert!(annihilation_defect(&s) < 1e-13);
            let clean = clean_coherent_info(&s, 2).unwrap();
            assert!((clean - n as f64 / 2.0 * LN_2).abs() < 1e-12);
            assert!((clean_coherent_info(&s, 3).unwrap() - clean).abs() < 1e-12);
            assert!(renyi_entropy(&s.density(), 2).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn channels_preserve_trace_and_identity() {
        let s = tfd_state(&build_hamiltonian(4, 3, &ModelParams::syk(1.0)).unwrap(), 4, 1.0).unwrap();
        let rho = s.density();
        let same = apply_channel(&rho, 4, Channel { p: 0.0, q: 0.0 }).unwrap();
        assert!(max_abs(&(&same - &rho)) == 0.0);
        let out = apply_channel(&rho, 4, Channel { p: 0.3, q: 1.1 }).unwrap();
        assert!((trace(&out).re - 1.0).abs() < 1e-12);
        let (pair, single) = kraus_parity_relations(6).unwrap();
        assert!(pair < 1e-14 && single < 1e-14);
    }

    #[test]
    fn choi_identities() {
        for n in [2, 4] {
            for r in [0.0, 0.1, 0.3] {
                let c = verify_channel_choi(ChannelFamily::Single, r, n).unwrap();
                assert!(c.deviation < 1e-10, "single {n} {r}: {}", c.deviation);
                let c = verify_channel_choi(ChannelFamily::Pair, r, n).unwrap();
                assert!(c.deviation < 1e-10, "pair {n} {r}: {}", c.deviation);
            }
        }
    }

    #[test]
    fn baseline_values() {
        assert!((bell_pair_coherent_info(0.0, 0.0, 2).unwrap() - 0.5 * LN_2).abs() < 1e-12);
        let p: f64 = 0.1;
        let exact = 0.5 * LN_2 + ((1.0 - p) * (1.0 - p) + p * p).ln();
        assert!((bell_pair_coherent_info(p, 0.0, 2).unwrap() - exact).abs() < 1e-12);
        let floor = bell_pair_coherent_info(0.5 - 1e-12, 0.0, 2).unwrap();
        assert!((floor + 0.5 * LN_2).abs() < 1e-9);
    }

    #[test]
    fn low_temperature_state_is_nearly_pure_on_q() {
        let h = build_hamiltonian(8, 5, &ModelParams::syk(1.0)).unwrap();
        let s = tfd_state(&h, 8, 400.0).unwrap();
        assert!(clean_coherent_info(&s, 2).unwrap() < 0.05);
    }
}
