//! Exact Gaussian likelihood with the augmented initial values integrated out.
//!
//! With residuals affine in the linear parameters, `z(u) = a - B u`, the `q`
//! initial values are integrated analytically and regression coefficients are
//! concentrated by least squares. The log-likelihood profiled over `sigma^2` is
//!
//! ```text
//! L = -(n/2) (1 + ln(2 pi S_min / n)) - (1/2) ln det(B_u' B_u) + log_jacobian
//! ```
//!
//! where `B_u` holds the initial-value columns only.

use crate::error::{Error, Result};
use crate::linalg;
use crate::residuals::{affine_expansion, AffineResiduals, InitValues};
use crate::roots::RootSet;
use crate::sample::Sample;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodValue<T = f64> {
    pub profile_loglik: T,
    pub sigma2_hat: T,
    /// Concentrated regression coefficients (empty without regressors).
    pub linear_estimates: Vec<T>,
    /// Estimated augmented initial values.
    pub init_estimates: Vec<T>,
    pub s_min: T,
    pub logdet: T,
    pub log_jacobian: T,
    /// Whether the normal equations needed diagonal jitter.
    pub jittered: bool,
}

pub fn sum_squares<T: Scalar>(residuals: &[T]) -> T {
    residuals.iter().fold(T::zero(), |s, &z| s + z * z)
}

fn profile<T: Scalar>(
    n: usize,
    q: usize,
    s_min: T,
    gram: &[T],
    m: usize,
    u_hat: Vec<T>,
    log_jacobian: T,
    jittered: bool,
) -> Result<LikelihoodValue<T>> {
    let block = linalg::leading_block(gram, m, q);
    let (lu, _) = linalg::cholesky_jittered(&block, q).ok_or(Error::DegenerateDesign)?;
    let logdet = linalg::cholesky_logdet(&lu, q);
    let nn = T::lit(n as f64);
    let sigma2_hat = (s_min / nn).max(T::min_positive_value());
    let two_pi = T::PI() + T::PI();
    let profile_loglik = -nn / T::lit(2.0) * (T::one() + (two_pi * sigma2_hat).ln())
        - logdet / T::lit(2.0)
        + log_jacobian;
    if !profile_loglik.is_finite() {
        return Err(Error::DegenerateDesign);
    }
    let linear_estimates = u_hat[q..].to_vec();
    let mut init_estimates = u_hat;
    init_estimates.truncate(q);
    Ok(LikelihoodValue {
        profile_loglik,
        sigma2_hat,
        linear_estimates,
        init_estimates,
        s_min,
        logdet,
        log_jacobian,
        jittered,
    })
}

/// Evaluates the likelihood from an explicit affine expansion.
pub fn loglik_from_expansion<T: Scalar>(e: &AffineResiduals<T>) -> Result<LikelihoodValue<T>> {
    let m = e.ncols();
    let (g, v) = e.normal_equations();
    let (l, jittered) = linalg::cholesky_jittered(&g, m).ok_or(Error::DegenerateDesign)?;
    let u_hat = linalg::cholesky_solve(&l, m, &v);
    let s_min = sum_squares(&e.eval(&u_hat));
    profile(e.n_obs, e.n_inits, s_min, &g, m, u_hat, e.log_jacobian, jittered)
}

/// Exact profile log-likelihood at the given roots. Regressors attached to the
/// sample are concentrated out.
pub fn exact_profile_loglik<T: Scalar>(sample: &Sample<T>, roots: &RootSet<T>) -> Result<LikelihoodValue<T>> {
    let e = affine_expansion(sample, roots, sample.regressors().is_some())?;
    loglik_from_expansion(&e)
}

/// Same value as [`exact_profile_loglik`] for roots in the closed unit disk,
/// computed from the coefficients by the direct recursion
/// `z_t = y_t - sum_j c_j z_{t-j}` with the pre-sample `z` as the integrated
/// parameters. Streams the data twice and allocates only `O(q m)`.
pub fn exact_profile_loglik_coeffs<T: Scalar>(sample: &Sample<T>, coeffs: &[T]) -> Result<LikelihoodValue<T>> {
    let q = coeffs.len();
    if q == 0 {
        return Err(Error::Dimension("empty coefficient vector".into()));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Invalid("non-finite coefficient".into()));
    }
    let x = sample.x();
    let n = x.len();
    let reg = sample.regressors();
    let p = reg.map_or(0, |r| r.ncols());
    // sequence 0: data response; 1..=q: pre-sample unit responses;
    // q+1..: responses to minus each regressor column
    let m = q + p;
    let k = m + 1;
    let mut hist = vec![T::zero(); k * q];
    for j in 0..q {
        // pre-sample values, newest first: hist[s * q + l] = z_{-l} of sequence s
        hist[(1 + j) * q + (q - 1 - j)] = T::one();
    }
    let mut gram = vec![T::zero(); k * k];
    for j in 0..q {
        let s = 1 + j;
        gram[s * k + s] = T::one();
    }
    let mut cur = vec![T::zero(); k];
    for t in 0..n {
        for s in 0..k {
            let input = if s == 0 {
                x[t]
            } else if s > q {
                -reg.unwrap().column(s - q - 1)[t]
            } else {
                T::zero()
            };
            let h = &hist[s * q..(s + 1) * q];
            let mut z = input;
            for j in 0..q {
                z = z - coeffs[j] * h[j];
            }
            cur[s] = z;
        }
        for s in 0..k {
            let h = &mut hist[s * q..(s + 1) * q];
            h.rotate_right(1);
            h[0] = cur[s];
            for r in 0..=s {
                gram[s * k + r] = gram[s * k + r] + cur[s] * cur[r];
            }
        }
    }
    for s in 0..k {
        for r in 0..s {
            gram[r * k + s] = gram[s * k + r];
        }
    }
    // z(w) = seq_0 + sum_s w_s seq_s; minimize over w
    let mut g = vec![T::zero(); m * m];
    let mut v = vec![T::zero(); m];
    for i in 0..m {
        for j in 0..m {
            g[i * m + j] = gram[(i + 1) * k + (j + 1)];
        }
        v[i] = -gram[(i + 1) * k];
    }
    let (l, jittered) = linalg::cholesky_jittered(&g, m).ok_or(Error::DegenerateDesign)?;
    let w = linalg::cholesky_solve(&l, m, &v);
    // second pass: residuals at the optimum, summed directly
    let mut h = vec![T::zero(); q];
    for j in 0..q {
        h[q - 1 - j] = w[j];
    }
    let mut s_min = sum_squares(&w[..q]);
    for t in 0..n {
        let mut z = x[t];
        if let Some(r) = reg {
            z = z - r.fitted(&w[q..], t);
        }
        for j in 0..q {
            z = z - coeffs[j] * h[j];
        }
        h.rotate_right(1);
        h[0] = z;
        s_min = s_min + z * z;
    }
    profile(n, q, s_min, &g, m, w, T::zero(), jittered)
}

/// Local coordinates around the truth: `theta = theta0 + beta / n` for the
/// first root, `alpha = alpha0 + gamma / sqrt(n)` for the second, and each
/// initial value offset by `sigma0 eta_k / sqrt(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalParams {
    pub beta: f64,
    pub gamma: f64,
    pub eta: Vec<f64>,
}

/// The data-generating truth needed for [`joint_objective_un`].
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub roots: RootSet,
    pub sigma0: f64,
}

/// `U_n = -2 sum r_i Z_i / sigma0^2 + sum r_i^2 / sigma0^2` with `r = Z - z`
/// over all residual indices, evaluated at the local parameters.
pub fn joint_objective_un(sample: &Sample, local: &LocalParams, truth: &Truth) -> Result<f64> {
    let noise = sample
        .noise()
        .ok_or_else(|| Error::MissingTruth("sample carries no generating noise".into()))?;
    let q = truth.roots.order();
    if !(1..=2).contains(&q) || local.eta.len() != q {
        return Err(Error::Dimension(format!(
            "local parameters for order {q} need {q} initial offsets"
        )));
    }
    let true_roots = truth
        .roots
        .as_real()
        .ok_or_else(|| Error::Invalid("local parameterization needs real roots".into()))?;
    let n = sample.n() as f64;
    let mut roots = vec![true_roots[0] + local.beta / n];
    if q == 2 {
        roots.push(true_roots[1] + local.gamma / n.sqrt());
    }
    let base = crate::residuals::true_inits(&truth.roots, noise)?;
    let inits: Vec<f64> = base
        .0
        .iter()
        .zip(&local.eta)
        .map(|(&v, &e)| v + truth.sigma0 * e / n.sqrt())
        .collect();
    let z = crate::residuals::residuals_cascade(sample, &RootSet::real(&roots), &InitValues(inits))?;
    let s2 = truth.sigma0 * truth.sigma0;
    Ok(z.values
        .iter()
        .zip(&noise.values)
        .map(|(&zi, &zz)| {
            let r = zz - zi;
            (-2.0 * r * zz + r * r) / s2
        })
        .sum())
}
