//! Monte Carlo harness: finite-sample tables, power curves and the mean-case
//! demonstration, with counter-based seeding and CSV output.

use std::fmt::Write as _;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::fit_ma2;
use crate::hypothesis::UnitRootFits;
use crate::likelihood::exact_profile_loglik;
use crate::limit::{pileup_regression_limit_with, BetaGrid, CritTable, RegressionPileup};
use crate::model::MaModel;
use crate::region::Segment;
use crate::rng::replicate_rng_tagged;
use crate::roots::RootSet;
use crate::sample::{Regressors, Sample};
use crate::simulate::{difference, simulate_ma_with, simulate_regression_ma1};

pub const THREADS_ENV: &str = "MAUR_THREADS";
pub const DESK_REPS: usize = 2000;
pub const PAPER_REPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Table3,
    Table4,
    Table5,
    Table8,
    Power,
    Critvals,
    Meanlimit,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Table3 => "table3",
            Self::Table4 => "table4",
            Self::Table5 => "table5",
            Self::Table8 => "table8",
            Self::Power => "power",
            Self::Critvals => "critvals",
            Self::Meanlimit => "meanlimit",
        }
    }

    /// Free root of the simulated MA(2) for the table experiments.
    pub fn alpha0(self) -> Option<f64> {
        match self {
            Self::Table3 => Some(0.3),
            Self::Table4 => Some(0.0),
            Self::Table5 => Some(-0.3),
            Self::Table8 => Some(1.0),
            _ => None,
        }
    }

    pub fn desk_ns(self) -> Vec<usize> {
        match self {
            Self::Table8 => vec![100, 200, 500],
            Self::Power => vec![50],
            Self::Meanlimit => vec![2000],
            _ => vec![25, 50, 100, 200, 400],
        }
    }

    pub fn paper_ns(self) -> Vec<usize> {
        match self {
            Self::Table8 => vec![100, 200, 500, 1000, 5000],
            Self::Power => vec![50, 100],
            Self::Meanlimit => vec![2000],
            _ => vec![25, 50, 100, 200, 400, 1000],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub alpha0: f64,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub level: f64,
    pub seed: u64,
    /// Local alternatives `theta = 1 + beta / n` for power runs.
    pub betas: Vec<f64>,
    pub sigma0: f64,
    pub output: Option<String>,
    /// Worker count; `MAUR_THREADS` takes precedence.
    pub workers: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(experiment: Experiment, paper_scale: bool) -> Self {
        Self {
            experiment,
            alpha0: experiment.alpha0().unwrap_or(-0.3),
            ns: if paper_scale { experiment.paper_ns() } else { experiment.desk_ns() },
            reps: if paper_scale { PAPER_REPS } else { DESK_REPS },
            level: 0.05,
            seed: 1,
            betas: vec![0.0, -2.0, -4.0, -8.0, -12.0],
            sigma0: 1.0,
            output: None,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::Invalid("reps must be at least 1".into()));
        }
        if self.ns.is_empty() {
            return Err(Error::Invalid("no sample sizes given".into()));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 5) {
            return Err(Error::TooSmall { n, min: 5 });
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Invalid(format!("level must lie in (0, 1), got {}", self.level)));
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(Error::Invalid("sigma0 must be positive".into()));
        }
        if self.experiment.alpha0().is_none() && self.alpha0.abs() >= 1.0 {
            return Err(Error::Invalid("alpha0 must lie in (-1, 1)".into()));
        }
        Ok(())
    }

    /// Provenance lines written ahead of every output file.
    pub fn provenance(&self) -> Vec<(String, String)> {
        let list = |v: &[String]| v.join(" ");
        let mut p = vec![
            ("experiment".to_string(), self.experiment.name().to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("reps".to_string(), self.reps.to_string()),
            ("n".to_string(), list(&self.ns.iter().map(|n| n.to_string()).collect::<Vec<_>>())),
        ];
        match self.experiment {
            Experiment::Power => {
                p.push(("alpha0".into(), self.alpha0.to_string()));
                p.push(("level".into(), self.level.to_string()));
                p.push(("beta".into(), list(&self.betas.iter().map(|b| b.to_string()).collect::<Vec<_>>())));
            }
            Experiment::Meanlimit => p.push(("sigma0".into(), self.sigma0.to_string())),
            _ => p.push(("alpha0".into(), self.alpha0.to_string())),
        }
        p.push(("software".into(), format!("maur {}", env!("CARGO_PKG_VERSION"))));
        p
    }
}

/// Worker count: `MAUR_THREADS` if set to a positive integer, else `requested`.
pub fn worker_count(requested: Option<usize>) -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .or(requested)
}

/// Runs `f` on a dedicated pool sized by [`worker_count`]. Results never
/// depend on the pool size.
pub fn with_workers<T: Send>(requested: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match worker_count(requested) {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SummaryRow {
    pub n: usize,
    pub reps: usize,
    /// Replicates excluded after a fit failure.
    pub failures: usize,
    pub pileup_prob: f64,
    pub var_c1: f64,
    pub mse_c1: f64,
    pub var_c2: f64,
    pub mse_c2: f64,
    /// Signed correlation of the normalized coefficient errors.
    pub corr: f64,
    pub beta: Option<f64>,
    pub power_glr: Option<f64>,
    pub power_mle: Option<f64>,
    pub undefined_rate: Option<f64>,
    /// Double unit root only: estimate on edge `c2 = 1` (unit-circle pair).
    pub pileup_ac: Option<f64>,
}

impl SummaryRow {
    pub fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(format!("summary row n={}: {what}", self.n)));
        let probs = [Some(self.pileup_prob), self.power_glr, self.power_mle, self.undefined_rate, self.pileup_ac];
        if probs.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("probability outside [0, 1]");
        }
        if self.mse_c1 < self.var_c1 - 1e-12 || self.mse_c2 < self.var_c2 - 1e-12 {
            return bad("mean squared error below variance");
        }
        if self.corr.abs() > 1.0 + 1e-12 {
            return bad("correlation outside [-1, 1]");
        }
        Ok(())
    }
}

/// Moments of `sqrt(n) (c_hat - c)` with population (divide-by-count)
/// variances, so that `mse = var + bias^2` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMoments {
    pub var_c1: f64,
    pub mse_c1: f64,
    pub var_c2: f64,
    pub mse_c2: f64,
    pub corr: f64,
}

pub fn error_moments(e1: &[f64], e2: &[f64]) -> ErrorMoments {
    let k = e1.len().max(1) as f64;
    let m1 = e1.iter().sum::<f64>() / k;
    let m2 = e2.iter().sum::<f64>() / k;
    let mse_c1 = e1.iter().map(|v| v * v).sum::<f64>() / k;
    let mse_c2 = e2.iter().map(|v| v * v).sum::<f64>() / k;
    let var_c1 = e1.iter().map(|v| (v - m1).powi(2)).sum::<f64>() / k;
    let var_c2 = e2.iter().map(|v| (v - m2).powi(2)).sum::<f64>() / k;
    let cov = e1.iter().zip(e2).map(|(a, b)| (a - m1) * (b - m2)).sum::<f64>() / k;
    let denom = (var_c1 * var_c2).sqrt();
    let corr = if denom > 0.0 { (cov / denom).clamp(-1.0, 1.0) } else { 0.0 };
    ErrorMoments { var_c1, mse_c1: mse_c1.max(var_c1), var_c2, mse_c2: mse_c2.max(var_c2), corr }
}

fn ma2_truth(alpha0: f64) -> Result<MaModel> {
    MaModel::from_roots(&RootSet::real(&[1.0, alpha0]), 1.0)
}

fn simulate_replicate(model: &MaModel, n: usize, seed: u64, i: u64) -> Result<Sample> {
    let mut rng = replicate_rng_tagged(seed, i, n as u64);
    simulate_ma_with(model, n, &mut rng, &StandardNormal)
}

struct Fitted {
    c1: f64,
    c2: f64,
    pileup: bool,
    on_ac: bool,
}

fn table_row(model: &MaModel, n: usize, reps: usize, seed: u64, with_ac: bool) -> Result<SummaryRow> {
    let fits: Vec<Result<Fitted>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let s = simulate_replicate(model, n, seed, i)?;
            let r = fit_ma2(&s)?;
            Ok(Fitted {
                c1: r.coeffs_hat[0],
                c2: r.coeffs_hat[1],
                pileup: r.is_pileup(Segment::Ab),
                on_ac: r.is_pileup(Segment::Ac),
            })
        })
        .collect();
    let ok: Vec<&Fitted> = fits.iter().filter_map(|f| f.as_ref().ok()).collect();
    let failures = reps - ok.len();
    if ok.is_empty() {
        return Err(Error::Invalid(format!("every replicate failed at n={n}")));
    }
    let c = model.coeffs();
    let rn = (n as f64).sqrt();
    let e1: Vec<f64> = ok.iter().map(|f| rn * (f.c1 - c[0])).collect();
    let e2: Vec<f64> = ok.iter().map(|f| rn * (f.c2 - c[1])).collect();
    let m = error_moments(&e1, &e2);
    let row = SummaryRow {
        n,
        reps,
        failures,
        pileup_prob: ok.iter().filter(|f| f.pileup).count() as f64 / ok.len() as f64,
        var_c1: m.var_c1,
        mse_c1: m.mse_c1,
        var_c2: m.var_c2,
        mse_c2: m.mse_c2,
        corr: m.corr,
        pileup_ac: with_ac.then(|| ok.iter().filter(|f| f.on_ac).count() as f64 / ok.len() as f64),
        ..Default::default()
    };
    row.check()?;
    Ok(row)
}

/// MA(2) with roots `(1, alpha0)`: pile-up on the unit-root segment and the
/// normalized coefficient error moments, one row per sample size.
pub fn run_table(spec: &ExperimentSpec) -> Result<Vec<SummaryRow>> {
    spec.validate()?;
    if !matches!(spec.experiment, Experiment::Table3 | Experiment::Table4 | Experiment::Table5) {
        return Err(Error::Invalid(format!("{} is not a coefficient table", spec.experiment.name())));
    }
    let model = ma2_truth(spec.alpha0)?;
    with_workers(spec.workers, || {
        spec.ns.iter().map(|&n| table_row(&model, n, spec.reps, spec.seed, false)).collect()
    })?
}

/// Double unit root `(c1, c2) = (-2, 1)`. Pile-up counts estimates on edge
/// `-c1 - c2 = 1`; estimates on the unit-circle edge `c2 = 1` are reported
/// separately in `pileup_ac`.
pub fn run_table8(spec: &ExperimentSpec) -> Result<Vec<SummaryRow>> {
    spec.validate()?;
    let model = ma2_truth(1.0)?;
    with_workers(spec.workers, || {
        spec.ns.iter().map(|&n| table_row(&model, n, spec.reps, spec.seed, true)).collect()
    })?
}

enum PowerOutcome {
    Failed,
    Done { glr: bool, mle: Option<bool> },
}

/// Rejection rates along `theta = 1 + beta / n` with the free root fixed.
/// MLE power is computed over the replicates where that test is defined.
pub fn run_power(spec: &ExperimentSpec, crit: &CritTable) -> Result<Vec<SummaryRow>> {
    spec.validate()?;
    crit.lookup(spec.level)?;
    if spec.betas.iter().any(|&b| !(b <= 0.0)) {
        return Err(Error::Invalid("local alternatives need beta <= 0".into()));
    }
    with_workers(spec.workers, || {
        let mut rows = Vec::new();
        for &n in &spec.ns {
            for (bi, &beta) in spec.betas.iter().enumerate() {
                let theta = 1.0 + beta / n as f64;
                let model = MaModel::from_roots(&RootSet::real(&[theta, spec.alpha0]), 1.0)?;
                let tag_seed = spec.seed ^ ((bi as u64 + 1) << 40);
                let outcomes: Vec<PowerOutcome> = (0..spec.reps as u64)
                    .into_par_iter()
                    .map(|i| {
                        let fits = simulate_replicate(&model, n, tag_seed, i).and_then(|s| UnitRootFits::new(&s));
                        let Ok(fits) = fits else { return PowerOutcome::Failed };
                        let Ok(glr) = fits.glr(spec.level, crit) else { return PowerOutcome::Failed };
                        let mle = fits.mle(spec.level, crit).ok().map(|r| r.reject);
                        PowerOutcome::Done { glr: glr.reject, mle }
                    })
                    .collect();
                let (mut used, mut glr, mut defined, mut mle) = (0usize, 0usize, 0usize, 0usize);
                for o in &outcomes {
                    if let PowerOutcome::Done { glr: g, mle: m } = o {
                        used += 1;
                        glr += *g as usize;
                        if let Some(m) = m {
                            defined += 1;
                            mle += *m as usize;
                        }
                    }
                }
                if used == 0 {
                    return Err(Error::Invalid(format!("every replicate failed at n={n}, beta={beta}")));
                }
                let row = SummaryRow {
                    n,
                    reps: spec.reps,
                    failures: spec.reps - used,
                    beta: Some(beta),
                    power_glr: Some(glr as f64 / used as f64),
                    power_mle: Some(if defined > 0 { mle as f64 / defined as f64 } else { f64::NAN }),
                    undefined_rate: Some((used - defined) as f64 / used as f64),
                    ..Default::default()
                };
                if defined > 0 {
                    row.check()?;
                }
                rows.push(row);
            }
        }
        Ok(rows)
    })?
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanLimitReport {
    pub n: usize,
    pub reps: usize,
    pub failures: usize,
    pub sigma0: f64,
    /// Empirical variance of `n^{3/2} (b_hat - b0) / sigma0`.
    pub var_scaled: f64,
    /// Largest gap between the sample mean of iid data and the mean implied
    /// by the initial-value estimate on the differenced data.
    pub max_identity_gap: f64,
    pub limit: Option<RegressionPileup>,
}

/// Mean of `y = b0 + sample`, implied by the initial-value estimate of the
/// unit-root MA(1) fitted to the differenced series.
pub fn mean_from_differences(y: &Sample) -> Result<f64> {
    let d = difference(y)?;
    let v = exact_profile_loglik(&d, &RootSet::real(&[1.0]))?;
    Ok(y.x()[0] - v.init_estimates[0])
}

/// Finite-sample mean estimate of a unit-root MA(1) with known root, and
/// the identity linking mean estimation to initial values after differencing.
/// With `limit_reps`, also the pile-up of the limit with an estimated mean.
pub fn run_meanlimit_demo(spec: &ExperimentSpec, limit_reps: Option<(usize, usize)>) -> Result<Vec<MeanLimitReport>> {
    spec.validate()?;
    const B0: f64 = 2.0;
    with_workers(spec.workers, || {
        let mut out = Vec::new();
        for &n in &spec.ns {
            let f = Regressors::polynomial(n, 0)?;
            let unit = RootSet::real(&[1.0]);
            let res: Vec<Result<(f64, f64)>> = (0..spec.reps as u64)
                .into_par_iter()
                .map(|i| {
                    let s = replicate_rng_tagged(spec.seed, i, n as u64).random::<u64>();
                    let x = simulate_regression_ma1(&[B0], &f, 1.0, spec.sigma0, n, s)?;
                    let b_hat = exact_profile_loglik(&x, &unit)?.linear_estimates[0];
                    let scaled = (n as f64).powf(1.5) * (b_hat - B0) / spec.sigma0;
                    let mut rng = replicate_rng_tagged(spec.seed, i, 2 * n as u64 + 1);
                    let y: Vec<f64> = (0..n)
                        .map(|_| B0 + spec.sigma0 * rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    let mean = y.iter().sum::<f64>() / n as f64;
                    let implied = mean_from_differences(&Sample::new(y)?)?;
                    Ok((scaled, (mean - implied).abs()))
                })
                .collect();
            let ok: Vec<(f64, f64)> = res.into_iter().filter_map(|r| r.ok()).collect();
            if ok.is_empty() {
                return Err(Error::Invalid(format!("every replicate failed at n={n}")));
            }
            let k = ok.len() as f64;
            let mean = ok.iter().map(|r| r.0).sum::<f64>() / k;
            let var_scaled = ok.iter().map(|r| (r.0 - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
            let max_identity_gap = ok.iter().map(|r| r.1).fold(0.0, f64::max);
            let limit = match limit_reps {
                Some((reps, m)) => Some(pileup_regression_limit_with(reps, spec.seed, m, &BetaGrid::default())?),
                None => None,
            };
            out.push(MeanLimitReport {
                n,
                reps: spec.reps,
                failures: spec.reps - ok.len(),
                sigma0: spec.sigma0,
                var_scaled,
                max_identity_gap,
                limit,
            });
        }
        Ok(out)
    })?
}

/// Six significant digits, `.` decimal separator, no exponent for moderate
/// magnitudes.
pub fn fmt_sig6(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    // rounding can carry into the next decade
    let s = format!("{:.5e}", v);
    let exp = s.split('e').nth(1).and_then(|e| e.parse::<i32>().ok()).unwrap_or(exp);
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let f = format!("{:.*}", decimals, v);
        if f.contains('.') {
            f.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            f
        }
    } else {
        s
    }
}

fn header_lines(spec: &ExperimentSpec) -> String {
    let mut h = String::new();
    for (k, v) in spec.provenance() {
        writeln!(h, "# {k}: {v}").expect("write to string");
    }
    h
}

pub fn write_rows_csv<W: Write>(spec: &ExperimentSpec, rows: &[SummaryRow], mut w: W) -> Result<()> {
    for r in rows {
        if r.beta.is_none() || r.power_mle.is_some_and(|p| !p.is_nan()) {
            r.check()?;
        }
    }
    let mut out = header_lines(spec);
    if spec.experiment == Experiment::Power {
        out.push_str("n,beta,reps,failures,power_glr,power_mle,undefined_rate\n");
        for r in rows {
            let o = |v: Option<f64>| fmt_sig6(v.unwrap_or(f64::NAN));
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n,
                o(r.beta),
                r.reps,
                r.failures,
                o(r.power_glr),
                o(r.power_mle),
                o(r.undefined_rate)
            )
            .expect("write to string");
        }
    } else {
        let ac = spec.experiment == Experiment::Table8;
        out.push_str("n,reps,failures,pileup_prob,var_c1,mse_c1,var_c2,mse_c2,corr");
        out.push_str(if ac { ",pileup_ac\n" } else { "\n" });
        for r in rows {
            write!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.n,
                r.reps,
                r.failures,
                fmt_sig6(r.pileup_prob),
                fmt_sig6(r.var_c1),
                fmt_sig6(r.mse_c1),
                fmt_sig6(r.var_c2),
                fmt_sig6(r.mse_c2),
                fmt_sig6(r.corr)
            )
            .expect("write to string");
            if ac {
                write!(out, ",{}", fmt_sig6(r.pileup_ac.unwrap_or(f64::NAN))).expect("write to string");
            }
            out.push('\n');
        }
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn write_meanlimit_csv<W: Write>(spec: &ExperimentSpec, rows: &[MeanLimitReport], mut w: W) -> Result<()> {
    let mut out = header_lines(spec);
    out.push_str("n,reps,failures,sigma0,var_scaled,max_identity_gap,limit_pileup,limit_used\n");
    for r in rows {
        let (p, used) = match &r.limit {
            Some(l) => (fmt_sig6(l.probability), l.used.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.reps,
            r.failures,
            fmt_sig6(r.sigma0),
            fmt_sig6(r.var_scaled),
            fmt_sig6(r.max_identity_gap),
            p,
            used
        )
        .expect("write to string");
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig6(0.643712345), "0.643712");
        assert_eq!(fmt_sig6(12.0), "12");
        assert_eq!(fmt_sig6(-0.99812345), "-0.998123");
        assert_eq!(fmt_sig6(9.999999), "10");
        assert_eq!(fmt_sig6(123456.7), "123457");
        assert_eq!(fmt_sig6(12345678.0), "1.23457e7");
        assert_eq!(fmt_sig6(1.5e-7), "1.50000e-7");
        assert_eq!(fmt_sig6(0.0), "0");
    }

    #[test]
    fn moments_decompose() {
        let e1 = [1.0, 2.0, 4.0];
        let e2 = [-1.0, -2.5, -3.0];
        let m = error_moments(&e1, &e2);
        let bias = 7.0 / 3.0;
        assert!((m.mse_c1 - (m.var_c1 + bias * bias)).abs() < 1e-12);
        assert!(m.corr < -0.8);
    }

    #[test]
    fn row_checks() {
        let mut r = SummaryRow { n: 10, pileup_prob: 0.5, var_c1: 1.0, mse_c1: 1.0, ..Default::default() };
        assert!(r.check().is_ok());
        r.mse_c1 = 0.9;
        assert!(r.check().is_err());
        r.mse_c1 = 1.0;
        r.pileup_prob = 1.2;
        assert!(r.check().is_err());
    }

    #[test]
    fn table_rows_independent_of_workers() {
        let mut spec = ExperimentSpec::new(Experiment::Table3, false);
        spec.ns = vec![30];
        spec.reps = 24;
        spec.workers = Some(1);
        let a = run_table(&spec).unwrap();
        spec.workers = Some(3);
        let b = run_table(&spec).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        write_rows_csv(&spec, &a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# experiment: table3\n# seed: 1\n"));
        assert!(text.contains("n,reps,failures,pileup_prob"));
    }

    #[test]
    fn differencing_identity() {
        let y = Sample::new(vec![3.0, 1.5, 2.2, 4.0, 2.9, 3.3]).unwrap();
        let mean = y.x().iter().sum::<f64>() / 6.0;
        assert!((mean_from_differences(&y).unwrap() - mean).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = ExperimentSpec::new(Experiment::Table3, false);
        spec.ns = vec![4];
        assert!(run_table(&spec).is_err());
        let spec = ExperimentSpec::new(Experiment::Power, false);
        assert!(run_table(&spec).is_err());
    }
}
