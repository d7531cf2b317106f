//! Limiting processes of the local-to-unity likelihood and their functionals.
//!
//! Stochastic integrals are discretized on a uniform grid of `m` steps with
//! left-endpoint (Ito) sums. `J(s) = int_0^s e^{beta (s-t)} dW(t)` follows the
//! one-step recursion `J_{j+1} = e^{beta/m} J_j + dW_j`.
//!
//! `Z0(beta) = sum_k beta^2 X_k^2 / (pi^2 k^2 + beta^2) + sum_k ln(pi^2 k^2 / (pi^2 k^2 + beta^2))`
//! with `X_k` iid standard normal is evaluated from `K` draws; its log sum is
//! `-ln(sinh|beta| / |beta|)` in closed form.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::golden_max;
use crate::rng::{replicate_rng, replicate_rng_tagged};
use crate::stats::quantile;

pub const DEFAULT_M: usize = 5000;
pub const DEFAULT_K: usize = 100_000;
pub const DEFAULT_BETA_MAX: f64 = 60.0;
pub const MIN_CRIT_REPS: usize = 10_000;

/// Standard Brownian increments on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianGrid {
    increments: Vec<f64>,
}

impl BrownianGrid {
    pub fn new(increments: Vec<f64>) -> Result<Self> {
        if increments.is_empty() || increments.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("Brownian increments must be finite and non-empty".into()));
        }
        Ok(Self { increments })
    }

    pub fn draw<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let sd = (1.0 / m as f64).sqrt();
        let increments = (0..m)
            .map(|_| sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect();
        Self { increments }
    }

    pub fn m(&self) -> usize {
        self.increments.len()
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// `W(j/m)` for `j = 0..=m`.
    pub fn path(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.m() + 1);
        w.push(0.0);
        let mut acc = 0.0;
        for dw in &self.increments {
            acc += dw;
            w.push(acc);
        }
        w
    }

    pub fn w1(&self) -> f64 {
        self.increments.iter().sum()
    }

    /// The same path on a grid `factor` times coarser.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.m() % factor != 0 {
            return Err(Error::Invalid(format!("cannot coarsen {} steps by {factor}", self.m())));
        }
        Self::new(self.increments.chunks(factor).map(|c| c.iter().sum()).collect())
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta <= 0.0) || !beta.is_finite() {
        return Err(Error::Invalid(format!("beta must be finite and <= 0, got {beta}")));
    }
    Ok(())
}

/// `U(beta, eta) = 2 int g dW + int g^2 ds`, `g(s) = beta J(s) + eta e^{beta s}`.
pub fn eval_u_beta_eta(beta: f64, eta: f64, grid: &BrownianGrid) -> Result<f64> {
    check_beta(beta)?;
    let dt = 1.0 / grid.m() as f64;
    let decay = (beta * dt).exp();
    let (mut j, mut e, mut u) = (0.0, 1.0, 0.0);
    for &dw in grid.increments() {
        let g = beta * j + eta * e;
        u += 2.0 * g * dw + g * g * dt;
        j = decay * j + dw;
        e *= decay;
    }
    Ok(u)
}

/// `U(beta, eta) = a + 2 eta b + eta^2 c` at fixed beta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Coefficients of [`eval_u_beta_eta`] in eta, by the same left-endpoint sums.
pub fn u_quadratic(beta: f64, grid: &BrownianGrid) -> Result<UQuadratic> {
    check_beta(beta)?;
    let dt = 1.0 / grid.m() as f64;
    let decay = (beta * dt).exp();
    let (mut j, mut e) = (0.0, 1.0);
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for &dw in grid.increments() {
        let bj = beta * j;
        a += 2.0 * bj * dw + bj * bj * dt;
        b += e * dw + bj * e * dt;
        c += e * e * dt;
        j = decay * j + dw;
        e *= decay;
    }
    Ok(UQuadratic { a, b, c })
}

/// `2 beta sum J dW + beta^2 sum J^2 dt` with the Ito sum rewritten through
/// `J_m^2 = (e^{2 beta dt} - 1) sum J_j^2 + 2 e^{beta dt} sum J_j dW_j + qv`.
/// With `qv = sum dW^2` this is the plain left-endpoint sum.
fn a_with_qv(beta: f64, dt: f64, j_end: f64, sum_j2: f64, qv: f64) -> f64 {
    let decay = (beta * dt).exp();
    let s_jdw = (j_end * j_end - qv - (2.0 * beta * dt).exp_m1() * sum_j2) / (2.0 * decay);
    2.0 * beta * s_jdw + beta * beta * sum_j2 * dt
}

#[cfg(test)]
fn quadratic_variation(grid: &BrownianGrid) -> f64 {
    grid.increments().iter().map(|d| d * d).sum()
}

/// `U*` on one path. The realized quadratic variation in the Ito sum is
/// replaced by the path constant that makes `dU*/dbeta` vanish at zero, as it
/// does for the continuous-time process; the plain sum leaves an
/// `O(m^{-1/2})` random slope there that biases the location of the maximum.
#[derive(Debug, Clone)]
pub struct UstarPath<'a> {
    grid: &'a BrownianGrid,
    qv: f64,
}

impl<'a> UstarPath<'a> {
    pub fn new(grid: &'a BrownianGrid) -> Self {
        let dt = 1.0 / grid.m() as f64;
        // at beta = 0: B = W(1), C = sum dt and their beta-derivatives
        let (mut w, mut bp, mut cp) = (0.0, 0.0, 0.0);
        for (i, &dw) in grid.increments().iter().enumerate() {
            let s = i as f64 * dt;
            bp += s * dw + w * dt;
            cp += 2.0 * s * dt;
            w += dw;
        }
        let c0 = grid.m() as f64 * dt;
        let rp = w * bp / c0 - w * w * cp / (2.0 * c0 * c0) - cp / (2.0 * c0);
        Self { grid, qv: w * w - 2.0 * rp }
    }

    #[cfg(test)]
    fn with_qv(grid: &'a BrownianGrid, qv: f64) -> Self {
        Self { grid, qv }
    }

    pub fn eval(&self, beta: f64) -> f64 {
        if beta == 0.0 {
            return 0.0;
        }
        let grid = self.grid;
        let dt = 1.0 / grid.m() as f64;
        let decay = (beta * dt).exp();
        let (mut j, mut e) = (0.0, 1.0);
        let (mut sum_j2, mut b, mut c, mut w1) = (0.0, 0.0, 0.0, 0.0);
        for &dw in grid.increments() {
            sum_j2 += j * j;
            b += e * dw + beta * j * e * dt;
            c += e * e * dt;
            w1 += dw;
            j = decay * j + dw;
            e *= decay;
        }
        let a = a_with_qv(beta, dt, j, sum_j2, self.qv);
        -a / 2.0 + b * b / (2.0 * c) - c.ln() / 2.0 - w1 * w1 / 2.0
    }
}

/// `ln int exp(-U(beta, eta)/2) d eta - ln int exp(-U(0, eta)/2) d eta`; see
/// [`UstarPath`] for the discretization.
pub fn ustar(beta: f64, grid: &BrownianGrid) -> Result<f64> {
    check_beta(beta)?;
    Ok(UstarPath::new(grid).eval(beta))
}

/// `L*(beta, gamma) = -gamma N - gamma^2 var(N) / 2 + U*(beta)`.
pub fn eval_l_ma2(beta: f64, gamma: f64, n_draw: f64, var_n: f64, grid: &BrownianGrid) -> Result<f64> {
    if !(var_n >= 1.0) || !var_n.is_finite() {
        return Err(Error::Invalid(format!("var(N) = {var_n} requires |alpha0| < 1")));
    }
    Ok(-gamma * n_draw - gamma * gamma * var_n / 2.0 + ustar(beta, grid)?)
}

/// `var(N) = 1 / (1 - alpha0^2)`.
pub fn var_n_for(alpha0: f64) -> Result<f64> {
    if !(alpha0.abs() < 1.0) {
        return Err(Error::Invalid(format!("|alpha0| must be below 1, got {alpha0}")));
    }
    Ok(1.0 / (1.0 - alpha0 * alpha0))
}

/// `(e^{beta s} - 1) / beta`, equal to `s` at `beta = 0`.
fn mean_kernel(beta: f64, s: f64) -> f64 {
    if beta == 0.0 {
        s
    } else {
        (beta * s).exp_m1() / beta
    }
}

/// Limit of the nonzero-mean MA(1) objective:
/// `U = 2 int h dW + int h^2 ds`, `h(s) = beta J(s) + alpha e^{beta s} - eta0 (e^{beta s} - 1)/beta`.
pub fn eval_u_mean_case(eta0: f64, beta: f64, alpha: f64, grid: &BrownianGrid) -> Result<f64> {
    check_beta(beta)?;
    let dt = 1.0 / grid.m() as f64;
    let decay = (beta * dt).exp();
    let (mut j, mut e, mut u) = (0.0, 1.0, 0.0);
    for (i, &dw) in grid.increments().iter().enumerate() {
        let h = beta * j + alpha * e - eta0 * mean_kernel(beta, i as f64 * dt);
        u += 2.0 * h * dw + h * h * dt;
        j = decay * j + dw;
        e *= decay;
    }
    Ok(u)
}

/// Coefficients of `U = a + 2 alpha ba - 2 eta0 be + alpha^2 caa - 2 alpha eta0 cae + eta0^2 cee`.
#[derive(Debug, Clone, Copy)]
struct MeanSums {
    ba: f64,
    be: f64,
    caa: f64,
    cae: f64,
    cee: f64,
}

impl MeanSums {
    /// `ln int exp(-U/2) d alpha` maximized over `eta0`, less `a/2` and
    /// `ln(2 pi)/2`, with the maximizer.
    fn profile(&self) -> (f64, f64) {
        let d = self.cee - self.cae * self.cae / self.caa;
        let lin = self.be - self.ba * self.cae / self.caa;
        let value = self.ba * self.ba / (2.0 * self.caa) - self.caa.ln() / 2.0 + lin * lin / (2.0 * d);
        (value, lin / d)
    }
}

/// Profile of the nonzero-mean limit on one path, with the quadratic
/// variation constant chosen as in [`UstarPath`].
#[derive(Debug, Clone)]
pub struct MeanCasePath<'a> {
    grid: &'a BrownianGrid,
    qv: f64,
}

impl<'a> MeanCasePath<'a> {
    pub fn new(grid: &'a BrownianGrid) -> Self {
        let dt = 1.0 / grid.m() as f64;
        let mut w = 0.0;
        let (mut s0, mut d) = (
            MeanSums { ba: 0.0, be: 0.0, caa: 0.0, cae: 0.0, cee: 0.0 },
            MeanSums { ba: 0.0, be: 0.0, caa: 0.0, cae: 0.0, cee: 0.0 },
        );
        for (i, &dw) in grid.increments().iter().enumerate() {
            let s = i as f64 * dt;
            s0.ba += dw;
            s0.be += s * dw;
            s0.caa += dt;
            s0.cae += s * dt;
            s0.cee += s * s * dt;
            d.ba += s * dw + w * dt;
            d.be += 0.5 * s * s * dw + w * s * dt;
            d.caa += 2.0 * s * dt;
            d.cae += 1.5 * s * s * dt;
            d.cee += s * s * s * dt;
            w += dw;
        }
        let MeanSums { ba, be, caa, cae, cee } = s0;
        let lin = be - ba * cae / caa;
        let dd = cee - cae * cae / caa;
        let lin_p = d.be - (d.ba * cae + ba * d.cae) / caa + ba * cae * d.caa / (caa * caa);
        let dd_p = d.cee - 2.0 * cae * d.cae / caa + cae * cae * d.caa / (caa * caa);
        let rp = ba * d.ba / caa - ba * ba * d.caa / (2.0 * caa * caa) - d.caa / (2.0 * caa)
            + lin * lin_p / dd
            - lin * lin * dd_p / (2.0 * dd * dd);
        Self { grid, qv: w * w - 2.0 * rp }
    }

    #[cfg(test)]
    fn with_qv(grid: &'a BrownianGrid, qv: f64) -> Self {
        Self { grid, qv }
    }

    /// `(value, eta0_tilde)` at `beta`.
    pub fn eval(&self, beta: f64) -> (f64, f64) {
        let grid = self.grid;
        let dt = 1.0 / grid.m() as f64;
        let decay = (beta * dt).exp();
        let (mut j, mut e, mut sum_j2) = (0.0, 1.0, 0.0);
        let mut sums = MeanSums { ba: 0.0, be: 0.0, caa: 0.0, cae: 0.0, cee: 0.0 };
        for (i, &dw) in grid.increments().iter().enumerate() {
            let bj = beta * j;
            let g = mean_kernel(beta, i as f64 * dt);
            sum_j2 += j * j;
            sums.ba += e * dw + bj * e * dt;
            sums.be += g * dw + bj * g * dt;
            sums.caa += e * e * dt;
            sums.cae += e * g * dt;
            sums.cee += g * g * dt;
            j = decay * j + dw;
            e *= decay;
        }
        let a = if beta == 0.0 { 0.0 } else { a_with_qv(beta, dt, j, sum_j2, self.qv) };
        let (v, eta) = sums.profile();
        (v - a / 2.0, eta)
    }
}

/// `max over eta0 of ln int exp(-U(eta0, beta, alpha)/2) d alpha` (up to the
/// constant `ln(2 pi)/2`) and its maximizer.
pub fn mean_case_profile(beta: f64, grid: &BrownianGrid) -> Result<(f64, f64)> {
    check_beta(beta)?;
    Ok(MeanCasePath::new(grid).eval(beta))
}

/// Search points on `[-beta_max, 0]`: step 0.1 on `[-2, 0]`, 0.5 on
/// `[-10, -2]`, 1 beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaGrid {
    points: Vec<f64>,
}

impl Default for BetaGrid {
    fn default() -> Self {
        Self::with_max(DEFAULT_BETA_MAX)
    }
}

impl BetaGrid {
    pub fn with_max(beta_max: f64) -> Self {
        let mut points = vec![0.0];
        let mut b: f64 = 0.0;
        while b > -beta_max + 1e-12 {
            let step = if b > -2.0 + 1e-12 {
                0.1
            } else if b > -10.0 + 1e-12 {
                0.5
            } else {
                1.0
            };
            b = (b - step).max(-beta_max);
            points.push((b * 10.0).round() / 10.0);
        }
        points.reverse();
        Self { points }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn beta_max(&self) -> f64 {
        -self.points[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSearch {
    pub beta: f64,
    pub value: f64,
    pub value_at_zero: f64,
    pub at_zero: bool,
    pub range_exceeded: bool,
}

const REFINE_PEAKS: usize = 3;

/// Maximizes `f` over the grid with golden refinement around the best local
/// maxima. The maximizer is `beta = 0` unless some negative beta improves on
/// `f(0)` by more than a relative `1e-12`.
pub fn search_beta<F: FnMut(f64) -> f64>(mut f: F, grid: &BetaGrid) -> BetaSearch {
    let p = grid.points();
    let last = p.len() - 1;
    let vals: Vec<f64> = p.iter().map(|&b| f(b)).collect();
    let f0 = vals[last];
    let mut peaks: Vec<usize> = (0..=last)
        .filter(|&i| (i == 0 || vals[i] >= vals[i - 1]) && (i == last || vals[i] >= vals[i + 1]))
        .collect();
    peaks.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let mut best = (p[0], vals[0]);
    for i in 1..last {
        if vals[i] > best.1 {
            best = (p[i], vals[i]);
        }
    }
    for &i in peaks.iter().take(REFINE_PEAKS) {
        let lo = p[i.saturating_sub(1)];
        let hi = p[(i + 1).min(last)];
        let cand = golden_max(&mut f, lo, hi, 1e-9);
        if cand.0 < 0.0 && cand.1 > best.1 {
            best = cand;
        }
    }
    let slack = 1e-12 * (1.0 + f0.abs());
    if best.1 > f0 + slack {
        BetaSearch {
            beta: best.0,
            value: best.1,
            value_at_zero: f0,
            at_zero: false,
            range_exceeded: best.0 <= p[0] + 1e-6,
        }
    } else {
        BetaSearch {
            beta: 0.0,
            value: f0,
            value_at_zero: f0,
            at_zero: true,
            range_exceeded: false,
        }
    }
}

fn log_sinhc(b: f64) -> f64 {
    let b = b.abs();
    if b < 1e-4 {
        b * b / 6.0
    } else {
        b + (-(-2.0 * b).exp()).ln_1p() - std::f64::consts::LN_2 - b.ln()
    }
}

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

/// `Z0(beta)` from `K = xk.len()` draws by direct summation, plus the
/// deterministic remainder over `k > K` (with `X_k^2` replaced by its mean)
/// approximated by the integral from `K + 1/2`.
pub fn eval_z0(beta: f64, xk: &[f64]) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    let b2 = beta * beta;
    let mut s = 0.0;
    for (i, &x) in xk.iter().enumerate() {
        let pk = PI2 * ((i + 1) * (i + 1)) as f64;
        s += b2 * x * x / (pk + b2) + (pk / (pk + b2)).ln();
    }
    let a = xk.len() as f64 + 0.5;
    let c = beta.abs() / std::f64::consts::PI;
    let tail_first = c * (c / a).atan();
    let tail_log = -(2.0 * c * (c / a).atan() - a * (c * c / (a * a)).ln_1p());
    s + tail_first + tail_log
}

const K_EXACT: usize = 100;
const K_MID: usize = 2000;
const MID_TERMS: usize = 12;
const FAR_TERMS: usize = 3;

/// One draw of the `Z0` process, stored as exact terms for small `k` and
/// power sums `sum X_k^2 / (pi^2 k^2)^j` beyond, so that evaluation costs
/// `O(100)` regardless of `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Z0Series {
    exact: Vec<f64>,
    mid: [f64; MID_TERMS],
    far: [f64; FAR_TERMS],
    k: usize,
}

impl Z0Series {
    fn empty(k: usize) -> Self {
        Self {
            exact: Vec::with_capacity(K_EXACT.min(k)),
            mid: [0.0; MID_TERMS],
            far: [0.0; FAR_TERMS],
            k,
        }
    }

    fn push(&mut self, idx: usize, x: f64) {
        let x2 = x * x;
        if idx <= K_EXACT {
            self.exact.push(x2);
            return;
        }
        let inv = 1.0 / (PI2 * (idx * idx) as f64);
        let mut w = x2 * inv;
        if idx <= K_MID {
            for t in self.mid.iter_mut() {
                *t += w;
                w *= inv;
            }
        } else {
            for t in self.far.iter_mut() {
                *t += w;
                w *= inv;
            }
        }
    }

    pub fn from_draws(xk: &[f64]) -> Self {
        let mut s = Self::empty(xk.len());
        for (i, &x) in xk.iter().enumerate() {
            s.push(i + 1, x);
        }
        s
    }

    pub fn draw<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let mut s = Self::empty(k);
        for idx in 1..=k {
            s.push(idx, StandardNormal.sample(rng));
        }
        s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eval(&self, beta: f64) -> f64 {
        if beta == 0.0 {
            return 0.0;
        }
        let b2 = beta * beta;
        let mut s = 0.0;
        for (i, &x2) in self.exact.iter().enumerate() {
            let pk = PI2 * ((i + 1) * (i + 1)) as f64;
            s += b2 * x2 / (pk + b2);
        }
        // b2 x2 / (pk + b2) = x2 sum_j (-1)^j (b2 / pk)^{j+1}
        let mut pow = b2;
        for (j, &t) in self.mid.iter().enumerate() {
            s += if j % 2 == 0 { pow * t } else { -pow * t };
            pow *= b2;
        }
        let mut pow = b2;
        for (j, &t) in self.far.iter().enumerate() {
            s += if j % 2 == 0 { pow * t } else { -pow * t };
            pow *= b2;
        }
        let a = self.k as f64 + 0.5;
        let c = beta.abs() / std::f64::consts::PI;
        s + c * (c / a).atan() - log_sinhc(beta)
    }
}

/// One draw from the limit law of the unit-root estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitDraw {
    pub beta_tilde: f64,
    /// `Z0(beta_tilde) / 2`, the limit of the profile log-likelihood gap.
    pub glr_limit: f64,
    pub pileup: bool,
    pub range_exceeded: bool,
    pub gamma_tilde: Option<f64>,
}

pub fn argmax_z0_series(series: &Z0Series, grid: &BetaGrid) -> LimitDraw {
    let s = search_beta(|b| 0.5 * series.eval(b), grid);
    LimitDraw {
        beta_tilde: s.beta,
        glr_limit: s.value,
        pileup: s.at_zero,
        range_exceeded: s.range_exceeded,
        gamma_tilde: None,
    }
}

pub fn argmax_z0(xk: &[f64], grid: &BetaGrid) -> LimitDraw {
    argmax_z0_series(&Z0Series::from_draws(xk), grid)
}

/// Maximizes `U*` on one Brownian path.
pub fn argmax_ustar(path: &BrownianGrid, grid: &BetaGrid) -> LimitDraw {
    let u = UstarPath::new(path);
    let s = search_beta(|b| u.eval(b), grid);
    LimitDraw {
        beta_tilde: s.beta,
        glr_limit: s.value,
        pileup: s.at_zero,
        range_exceeded: s.range_exceeded,
        gamma_tilde: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Z0Config {
    pub k: usize,
    pub grid: BetaGrid,
}

impl Default for Z0Config {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            grid: BetaGrid::default(),
        }
    }
}

/// `reps` independent draws, replicate `i` seeded from `(seed, i)`.
/// Draws whose maximizer reaches the end of the search range are kept and
/// flagged; callers decide whether to discard them.
pub fn limit_draws(reps: usize, seed: u64, config: &Z0Config) -> Vec<LimitDraw> {
    (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i);
            argmax_z0_series(&Z0Series::draw(config.k, &mut rng), &config.grid)
        })
        .collect()
}

/// MA(2) limit draws with one unit root: `beta_tilde` from `Z0` and an
/// independent `gamma_tilde = -N / var(N)`, `N ~ N(0, 1/(1 - alpha0^2))`.
pub fn ma2_limit_draws(reps: usize, seed: u64, alpha0: f64, config: &Z0Config) -> Result<Vec<LimitDraw>> {
    let var_n = var_n_for(alpha0)?;
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i);
            let mut d = argmax_z0_series(&Z0Series::draw(config.k, &mut rng), &config.grid);
            let mut rng_n = replicate_rng_tagged(seed, i, 1);
            let n: f64 = var_n.sqrt() * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng_n);
            d.gamma_tilde = Some(-n / var_n);
            d
        })
        .collect())
}

/// Simulated critical values: `b_glr(a)` is the upper `a` quantile of
/// `Z0(beta_tilde)`, the limit of `2 (L_unconstrained - L_unit_root)`;
/// `b_mle(a)` is the lower `a` quantile of `beta_tilde`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritTable {
    pub alphas: Vec<f64>,
    pub b_glr: Vec<f64>,
    pub b_mle: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    #[serde(rename = "K")]
    pub k: usize,
    /// Brownian grid size; absent for series-based tables.
    pub m: Option<usize>,
    pub beta_max: f64,
    pub discarded: usize,
}

impl CritTable {
    pub fn from_draws(alphas: &[f64], draws: &[LimitDraw], seed: u64, config: &Z0Config) -> Result<Self> {
        if alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::Invalid("levels must lie in (0, 1)".into()));
        }
        let kept: Vec<&LimitDraw> = draws.iter().filter(|d| !d.range_exceeded).collect();
        if kept.is_empty() {
            return Err(Error::InsufficientReps { reps: 0, min: 1 });
        }
        let glr: Vec<f64> = kept.iter().map(|d| 2.0 * d.glr_limit).collect();
        let beta: Vec<f64> = kept.iter().map(|d| d.beta_tilde).collect();
        Ok(Self {
            alphas: alphas.to_vec(),
            b_glr: alphas.iter().map(|&a| quantile(&glr, 1.0 - a)).collect(),
            b_mle: alphas.iter().map(|&a| quantile(&beta, a)).collect(),
            reps: draws.len(),
            seed,
            k: config.k,
            m: None,
            beta_max: config.grid.beta_max(),
            discarded: draws.len() - kept.len(),
        })
    }

    /// `(b_glr, b_mle)` at `level`.
    pub fn lookup(&self, level: f64) -> Result<(f64, f64)> {
        self.alphas
            .iter()
            .position(|&a| (a - level).abs() < 1e-12)
            .map(|i| (self.b_glr[i], self.b_mle[i]))
            .ok_or(Error::LevelNotInTable(level))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(s)?;
        if t.alphas.len() != t.b_glr.len() || t.alphas.len() != t.b_mle.len() {
            return Err(Error::Parse("critical value columns differ in length".into()));
        }
        Ok(t)
    }
}

pub fn critical_values(alphas: &[f64], reps: usize, seed: u64) -> Result<CritTable> {
    critical_values_with(alphas, reps, seed, &Z0Config::default())
}

pub fn critical_values_with(alphas: &[f64], reps: usize, seed: u64, config: &Z0Config) -> Result<CritTable> {
    if reps < MIN_CRIT_REPS {
        return Err(Error::InsufficientReps { reps, min: MIN_CRIT_REPS });
    }
    CritTable::from_draws(alphas, &limit_draws(reps, seed, config), seed, config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionPileup {
    pub probability: f64,
    pub reps: usize,
    pub used: usize,
    pub failures: usize,
    pub range_exceeded: usize,
}

/// Pile-up probability of the unit-root MA(1) with an estimated mean: per
/// Brownian path, the nuisance root offset is integrated and the mean offset
/// maximized in closed form, then beta is searched over the grid.
pub fn pileup_regression_limit(reps: usize, seed: u64) -> Result<RegressionPileup> {
    pileup_regression_limit_with(reps, seed, DEFAULT_M, &BetaGrid::default())
}

pub fn pileup_regression_limit_with(reps: usize, seed: u64, m: usize, grid: &BetaGrid) -> Result<RegressionPileup> {
    if reps < MIN_CRIT_REPS {
        return Err(Error::InsufficientReps { reps, min: MIN_CRIT_REPS });
    }
    let outcomes: Vec<Option<BetaSearch>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let path = BrownianGrid::draw(m, &mut replicate_rng(seed, i));
            let profile = MeanCasePath::new(&path);
            let s = search_beta(|b| profile.eval(b).0, grid);
            s.value.is_finite().then_some(s)
        })
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_none()).count();
    let range_exceeded = outcomes.iter().flatten().filter(|s| s.range_exceeded).count();
    let used: Vec<&BetaSearch> = outcomes.iter().flatten().filter(|s| !s.range_exceeded).collect();
    let piled = used.iter().filter(|s| s.at_zero).count();
    Ok(RegressionPileup {
        probability: piled as f64 / used.len().max(1) as f64,
        reps,
        used: used.len(),
        failures,
        range_exceeded,
    })
}
