//! Tests of "exactly one unit root" against "no unit root" in MA(2).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{fit_ma2, fit_ma2_unit_constrained, EstimateReport};
use crate::limit::CritTable;
use crate::region::{RootKind, Segment};
use crate::sample::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "GLR")]
    Glr,
    #[serde(rename = "MLE")]
    Mle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub level: f64,
    pub critical_value: f64,
    pub reject: bool,
    /// Unconstrained estimate has complex roots.
    pub complex_region: bool,
}

/// Both fits behind the tests, computed once per sample.
#[derive(Debug, Clone)]
pub struct UnitRootFits {
    pub unconstrained: EstimateReport,
    pub constrained: EstimateReport,
    pub n: usize,
}

impl UnitRootFits {
    pub fn new(sample: &Sample) -> Result<Self> {
        let unconstrained = fit_ma2(sample)?;
        let mut constrained = fit_ma2_unit_constrained(sample)?;
        // an unconstrained optimum on the unit-root edge is also the
        // constrained one; the two searches may differ in the last digits
        if unconstrained.is_pileup(Segment::Ab) && unconstrained.loglik >= constrained.loglik {
            constrained = unconstrained.clone();
        }
        Ok(Self {
            unconstrained,
            constrained,
            n: sample.n(),
        })
    }

    /// `2 (L_unconstrained - L_unit_root)`, nonnegative since the unit-root
    /// segment is one of the unconstrained fit's candidates.
    pub fn glr_statistic(&self) -> f64 {
        (2.0 * (self.unconstrained.loglik - self.constrained.loglik)).max(0.0)
    }

    pub fn complex_region(&self) -> bool {
        self.unconstrained.root_kind == Some(RootKind::Complex)
    }

    pub fn glr(&self, level: f64, crit: &CritTable) -> Result<TestResult> {
        let (b_glr, _) = crit.lookup(level)?;
        let statistic = self.glr_statistic();
        Ok(TestResult {
            method: Method::Glr,
            statistic,
            level,
            critical_value: b_glr,
            reject: statistic > b_glr,
            complex_region: self.complex_region(),
        })
    }

    /// `beta_hat = n (theta_hat - 1)`; undefined for complex roots.
    pub fn mle(&self, level: f64, crit: &CritTable) -> Result<TestResult> {
        let (_, b_mle) = crit.lookup(level)?;
        if self.complex_region() {
            return Err(Error::TestUndefined);
        }
        let statistic = self.n as f64 * (self.unconstrained.theta_hat() - 1.0);
        Ok(TestResult {
            method: Method::Mle,
            statistic,
            level,
            critical_value: b_mle,
            reject: statistic < b_mle,
            complex_region: false,
        })
    }
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Invalid(format!("level must lie in (0, 1), got {level}")));
    }
    Ok(())
}

/// Generalized likelihood ratio test; rejects for large statistics.
pub fn glr_test(sample: &Sample, level: f64, crit: &CritTable) -> Result<TestResult> {
    check_level(level)?;
    crit.lookup(level)?;
    UnitRootFits::new(sample)?.glr(level, crit)
}

/// Test on `beta_hat = n (theta_hat - 1)`; rejects when it falls below the
/// lower quantile of its limit law.
pub fn mle_test(sample: &Sample, level: f64, crit: &CritTable) -> Result<TestResult> {
    check_level(level)?;
    crit.lookup(level)?;
    UnitRootFits::new(sample)?.mle(level, crit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MaModel;
    use crate::roots::RootSet;
    use crate::simulate::simulate_ma;

    fn table() -> CritTable {
        CritTable {
            alphas: vec![0.05],
            b_glr: vec![2.0],
            b_mle: vec![-7.0],
            reps: 0,
            seed: 0,
            k: 0,
            m: None,
            beta_max: 60.0,
            discarded: 0,
        }
    }

    #[test]
    fn json_shape() {
        let r = TestResult {
            method: Method::Glr,
            statistic: 3.21,
            level: 0.05,
            critical_value: 2.0,
            reject: true,
            complex_region: false,
        };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["method"], "GLR");
        assert_eq!(v["statistic"], 3.21);
        assert_eq!(v["reject"], true);
    }

    #[test]
    fn statistic_nonnegative_and_scale_free() {
        let m = MaModel::from_roots(&RootSet::real(&[1.0, -0.3]), 1.0).unwrap();
        for seed in 0..10 {
            let s = simulate_ma(&m, 80, seed).unwrap();
            let a = glr_test(&s, 0.05, &table()).unwrap();
            assert!(a.statistic >= 0.0);
            let b = glr_test(&s.scaled(7.5), 0.05, &table()).unwrap();
            assert!((a.statistic - b.statistic).abs() < 1e-8, "{} {}", a.statistic, b.statistic);
            if a.statistic == 0.0 {
                assert!(!a.reject);
            }
        }
    }

    #[test]
    fn pileup_never_rejects_mle_test() {
        let m = MaModel::from_roots(&RootSet::real(&[1.0, -0.3]), 1.0).unwrap();
        let mut seen = false;
        for seed in 0..20 {
            let s = simulate_ma(&m, 100, seed).unwrap();
            let fits = UnitRootFits::new(&s).unwrap();
            if fits.unconstrained.is_pileup(Segment::Ab) {
                seen = true;
                let r = fits.mle(0.05, &table()).unwrap();
                assert_eq!(r.statistic, 0.0);
                assert!(!r.reject);
                assert_eq!(fits.glr_statistic(), 0.0);
            }
        }
        assert!(seen);
    }

    #[test]
    fn level_must_be_tabulated() {
        let s = simulate_ma(&MaModel::new(vec![-1.3, 0.3], 1.0).unwrap(), 50, 1).unwrap();
        assert!(matches!(glr_test(&s, 0.1, &table()), Err(Error::LevelNotInTable(_))));
        assert!(mle_test(&s, 1.5, &table()).is_err());
    }
}
