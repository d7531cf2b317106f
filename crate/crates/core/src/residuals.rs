//! Residual sequences `z_{1-q}..z_n` from data, candidate roots and augmented
//! initial values.
//!
//! The moving-average operator `prod_j (1 - r_j B)` is inverted one factor at a
//! time. Each stage consumes the previous stage's output on `[s, n]` and
//! produces a sequence on `[s - d, n]`, where `d` is the factor degree; the `d`
//! new leading values are that stage's augmented initial values. For roots
//! `(theta, alpha)` and data `X`:
//!
//! ```text
//! y_0 = y_init,   y_t = X_t + theta y_{t-1}          (t = 1..n)
//! z_-1 = z_init,  z_t = y_t + alpha z_{t-1}           (t = 0..n)
//! ```
//!
//! which reproduces `z_i = sum_j alpha^{i-j} y_j + alpha^i y_init + alpha^{i+1} z_init`
//! and, for three roots, the nested `w/y/z` recursions with
//! `y_-1 = y_init, y_0 = w_init + phi y_init` and
//! `z_-2 = z_init, z_-1 = y_init + psi z_init, z_0 = w_init + (phi + psi) y_init + psi^2 z_init`.
//! No step divides by a difference of roots, so repeated roots need no special case.
//!
//! A conjugate pair is inverted jointly as the real quadratic factor
//! `1 - 2 Re(r) B + |r|^2 B^2`. Factors with modulus above one are inverted
//! backwards in time from terminal values; the change of variables contributes
//! `-L log|r|` (linear) or `-L log|r|^2` (quadratic) to the log-density, with
//! `L` the stage input length.

use crate::error::{Error, Result};
use crate::linalg;
use crate::roots::RootSet;
use crate::sample::{GeneratingNoise, Sample};
use crate::scalar::Scalar;

/// One augmented initial value per unit of model order, in stage order.
#[derive(Debug, Clone, PartialEq)]
pub struct InitValues<T = f64>(pub Vec<T>);

impl<T: Scalar> InitValues<T> {
    pub fn zeros(q: usize) -> Self {
        Self(vec![T::zero(); q])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Factor<T> {
    /// `1 - r B`
    Linear { r: T },
    /// `1 + a1 B + a2 B^2`
    Quadratic { a1: T, a2: T },
}

impl<T: Scalar> Factor<T> {
    fn degree(&self) -> usize {
        match self {
            Factor::Linear { .. } => 1,
            Factor::Quadratic { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Stage<T> {
    factor: Factor<T>,
    backward: bool,
}

/// The factorized inverse filter for a root set.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade<T = f64> {
    stages: Vec<Stage<T>>,
    q: usize,
}

impl<T: Scalar> Cascade<T> {
    pub fn from_roots(roots: &RootSet<T>) -> Result<Self> {
        let rs = roots.roots();
        let unit_tol = T::lit(1e-9);
        let mut used = vec![false; rs.len()];
        let mut stages = Vec::new();
        for i in 0..rs.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let r = rs[i];
            if !(r.re.is_finite() && r.im.is_finite()) {
                return Err(Error::Invalid("non-finite root".into()));
            }
            let real_tol = T::tiny() * (T::one() + r.norm());
            let factor = if r.im.abs() <= real_tol {
                Factor::Linear { r: r.re }
            } else {
                let target = r.conj();
                let scale = T::one() + r.norm();
                let j = (i + 1..rs.len())
                    .find(|&j| !used[j] && (rs[j] - target).norm() <= T::lit(1e3) * T::tiny() * scale)
                    .ok_or(Error::ComplexCoefficients)?;
                used[j] = true;
                Factor::Quadratic {
                    a1: -(r.re + r.re),
                    a2: r.norm_sqr(),
                }
            };
            stages.push(Stage {
                factor,
                backward: r.norm() > T::one() + unit_tol,
            });
        }
        Ok(Self {
            stages,
            q: rs.len(),
        })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Runs all stages on `input` (`Y_1..Y_n`) with the given initial values.
    /// Returns the residuals on `[1-q, n]` and the log-Jacobian term.
    pub fn run(&self, input: &[T], inits: &[T]) -> (Vec<T>, T) {
        debug_assert_eq!(inits.len(), self.q);
        let mut cur = input.to_vec();
        let mut logjac = T::zero();
        let mut k = 0;
        for stage in &self.stages {
            let d = stage.factor.degree();
            let (next, lj) = apply_stage(stage, &cur, &inits[k..k + d]);
            k += d;
            cur = next;
            logjac = logjac + lj;
        }
        (cur, logjac)
    }
}

fn apply_stage<T: Scalar>(stage: &Stage<T>, input: &[T], seeds: &[T]) -> (Vec<T>, T) {
    let len = input.len();
    match (stage.factor, stage.backward) {
        (Factor::Linear { r }, false) => {
            let mut out = Vec::with_capacity(len + 1);
            out.push(seeds[0]);
            for t in 0..len {
                let prev = out[t];
                out.push(input[t] + r * prev);
            }
            (out, T::zero())
        }
        (Factor::Linear { r }, true) => {
            // input_t = out_{t+1} - r out_t, run from the terminal value
            let mut out = vec![T::zero(); len + 1];
            out[len] = seeds[0];
            for t in (0..len).rev() {
                out[t] = (out[t + 1] - input[t]) / r;
            }
            (out, -T::lit(len as f64) * r.abs().ln())
        }
        (Factor::Quadratic { a1, a2 }, false) => {
            // seeds are (out at index s-1, out at index s-2)
            let mut out = Vec::with_capacity(len + 2);
            out.push(seeds[1]);
            out.push(seeds[0]);
            for t in 0..len {
                let v = input[t] - a1 * out[t + 1] - a2 * out[t];
                out.push(v);
            }
            (out, T::zero())
        }
        (Factor::Quadratic { a1, a2 }, true) => {
            // input_t = out_{t+2} + a1 out_{t+1} + a2 out_t; seeds (out_n, out_{n-1})
            let mut out = vec![T::zero(); len + 2];
            out[len + 1] = seeds[0];
            out[len] = seeds[1];
            for t in (0..len).rev() {
                out[t] = (input[t] - out[t + 2] - a1 * out[t + 1]) / a2;
            }
            (out, -T::lit(len as f64) * a2.abs().ln())
        }
    }
}

fn apply_ma_factor<T: Scalar>(factor: Factor<T>, input: &[T]) -> Vec<T> {
    match factor {
        Factor::Linear { r } => input.windows(2).map(|w| w[1] - r * w[0]).collect(),
        Factor::Quadratic { a1, a2 } => input
            .windows(3)
            .map(|w| w[2] + a1 * w[1] + a2 * w[0])
            .collect(),
    }
}

/// Residuals on `[start, n]` together with the log-Jacobian of the initial
/// value parameterization (zero when every stage runs forward).
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals<T = f64> {
    pub start: i64,
    pub values: Vec<T>,
    pub log_jacobian: T,
}

fn detrended<T: Scalar>(sample: &Sample<T>, b: Option<&[T]>) -> Result<Vec<T>> {
    match (b, sample.regressors()) {
        (None, _) => Ok(sample.x().to_vec()),
        (Some(b), Some(reg)) if b.len() == reg.ncols() => Ok(sample
            .x()
            .iter()
            .enumerate()
            .map(|(i, &x)| x - reg.fitted(b, i))
            .collect()),
        (Some(b), Some(reg)) => Err(Error::Dimension(format!(
            "{} regression coefficients for {} regressors",
            b.len(),
            reg.ncols()
        ))),
        (Some(_), None) => Err(Error::Dimension(
            "regression coefficients given but sample has no regressors".into(),
        )),
    }
}

/// MA(1) residuals `z_0..z_n`: `z_0 = z_init`, `z_i = Y_i + theta z_{i-1}` with
/// `Y` the series less the regression fit.
pub fn residuals_ma1<T: Scalar>(
    sample: &Sample<T>,
    theta: T,
    z_init: T,
    b: Option<&[T]>,
) -> Result<Vec<T>> {
    let y = detrended(sample, b)?;
    let mut z = Vec::with_capacity(y.len() + 1);
    z.push(z_init);
    for (i, &yi) in y.iter().enumerate() {
        let prev = z[i];
        z.push(yi + theta * prev);
    }
    Ok(z)
}

/// Residuals `z_{1-q}..z_n` by the factor-at-a-time cascade.
pub fn residuals_cascade<T: Scalar>(
    sample: &Sample<T>,
    roots: &RootSet<T>,
    inits: &InitValues<T>,
) -> Result<Residuals<T>> {
    residuals_cascade_with(sample, roots, inits, None)
}

/// As [`residuals_cascade`] after removing `sum_k b_k f_k(t/n)`.
pub fn residuals_cascade_with<T: Scalar>(
    sample: &Sample<T>,
    roots: &RootSet<T>,
    inits: &InitValues<T>,
    b: Option<&[T]>,
) -> Result<Residuals<T>> {
    let q = roots.order();
    if inits.0.len() != q {
        return Err(Error::Dimension(format!(
            "{} initial values for order {}",
            inits.0.len(),
            q
        )));
    }
    if inits.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite initial value".into()));
    }
    let cascade = Cascade::from_roots(roots)?;
    let y = detrended(sample, b)?;
    let (values, log_jacobian) = cascade.run(&y, &inits.0);
    Ok(Residuals {
        start: 1 - q as i64,
        values,
        log_jacobian,
    })
}

/// The initial values under which the cascade reproduces the generating noise.
///
/// Stage `k`'s values are the intermediate process `prod_{j>k} (1 - r_j B) Z`
/// at the stage's leading indices (or terminal indices for backward stages).
pub fn true_inits<T: Scalar>(roots: &RootSet<T>, noise: &GeneratingNoise<T>) -> Result<InitValues<T>> {
    let cascade = Cascade::from_roots(roots)?;
    let q = roots.order() as i64;
    if noise.start != 1 - q {
        return Err(Error::Dimension(format!(
            "noise starts at {}, order {} needs {}",
            noise.start,
            q,
            1 - q
        )));
    }
    let mut inits = Vec::with_capacity(q as usize);
    for (k, stage) in cascade.stages.iter().enumerate() {
        let mut inter = noise.values.clone();
        for later in cascade.stages[k + 1..].iter().rev() {
            inter = apply_ma_factor(later.factor, &inter);
        }
        let d = stage.factor.degree();
        if stage.backward {
            let m = inter.len();
            inits.push(inter[m - 1]);
            if d == 2 {
                inits.push(inter[m - 2]);
            }
        } else if d == 1 {
            inits.push(inter[0]);
        } else {
            inits.push(inter[1]);
            inits.push(inter[0]);
        }
    }
    Ok(InitValues(inits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnLabel {
    Init(usize),
    Regression(usize),
}

/// Residuals as an affine function of the linear parameters `u`:
/// `z(u) = a - B u`, with the initial values first and regression coefficients
/// (if any) after them.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineResiduals<T = f64> {
    pub start: i64,
    pub a: Vec<T>,
    /// Columns of `B`.
    pub columns: Vec<Vec<T>>,
    pub labels: Vec<ColumnLabel>,
    pub n_inits: usize,
    pub n_obs: usize,
    pub log_jacobian: T,
    pub rank_deficient: bool,
}

impl<T: Scalar> AffineResiduals<T> {
    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn eval(&self, u: &[T]) -> Vec<T> {
        let mut z = self.a.clone();
        for (col, &uk) in self.columns.iter().zip(u) {
            for (zi, &bi) in z.iter_mut().zip(col) {
                *zi = *zi - bi * uk;
            }
        }
        z
    }

    /// Row-major Gram matrix `B'B` and the vector `B'a`.
    pub fn normal_equations(&self) -> (Vec<T>, Vec<T>) {
        let m = self.ncols();
        let mut g = vec![T::zero(); m * m];
        for i in 0..m {
            for j in 0..=i {
                let s = dot(&self.columns[i], &self.columns[j]);
                g[i * m + j] = s;
                g[j * m + i] = s;
            }
        }
        let v = self.columns.iter().map(|c| dot(c, &self.a)).collect();
        (g, v)
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

/// Builds `a` and `B` with `m + 1` cascade passes: `a` at zero linear
/// parameters, column `k` as `a - z(e_k)`.
pub fn affine_expansion<T: Scalar>(
    sample: &Sample<T>,
    roots: &RootSet<T>,
    with_regressors: bool,
) -> Result<AffineResiduals<T>> {
    let q = roots.order();
    let cascade = Cascade::from_roots(roots)?;
    let x = sample.x();
    let zeros = vec![T::zero(); q];
    let (a, log_jacobian) = cascade.run(x, &zeros);
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    for k in 0..q {
        let mut e = zeros.clone();
        e[k] = T::one();
        let (z, _) = cascade.run(x, &e);
        columns.push(a.iter().zip(&z).map(|(&ai, &zi)| ai - zi).collect());
        labels.push(ColumnLabel::Init(k));
    }
    if with_regressors {
        let reg = sample.regressors().ok_or_else(|| {
            Error::Dimension("regressors requested but sample has none".into())
        })?;
        for k in 0..reg.ncols() {
            let shifted: Vec<T> = x.iter().zip(reg.column(k)).map(|(&xi, &f)| xi - f).collect();
            let (z, _) = cascade.run(&shifted, &zeros);
            columns.push(a.iter().zip(&z).map(|(&ai, &zi)| ai - zi).collect());
            labels.push(ColumnLabel::Regression(k));
        }
    }
    let mut out = AffineResiduals {
        start: 1 - q as i64,
        a,
        columns,
        labels,
        n_inits: q,
        n_obs: sample.n(),
        log_jacobian,
        rank_deficient: false,
    };
    let (g, _) = out.normal_equations();
    out.rank_deficient = linalg::cholesky(&g, out.ncols()).is_none();
    Ok(out)
}
