use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::MaModel;
use crate::rng::seeded;
use crate::sample::{GeneratingNoise, Regressors, Sample};

/// Simulates `n` observations with Gaussian noise from a generator seeded by `seed`.
///
/// The generating noise `Z_{1-q}..Z_n` is retained on the sample.
pub fn simulate_ma(model: &MaModel, n: usize, seed: u64) -> Result<Sample> {
    let mut rng = seeded(seed);
    let s = simulate_ma_with(model, n, &mut rng, &StandardNormal)?;
    Ok(s.with_provenance("seed", seed))
}

/// As [`simulate_ma`] with any iid innovation law; draws are multiplied by sigma.
pub fn simulate_ma_with<R: Rng + ?Sized, D: Distribution<f64>>(
    model: &MaModel,
    n: usize,
    rng: &mut R,
    innovations: &D,
) -> Result<Sample> {
    let q = model.q();
    if n < q + 1 {
        return Err(Error::TooSmall { n, min: q + 1 });
    }
    let sigma = model.sigma();
    let z: Vec<f64> = (0..n + q).map(|_| sigma * innovations.sample(rng)).collect();
    let c = model.coeffs();
    let x = (0..n)
        .map(|i| {
            // z[i + q] is Z_{i+1}
            let t = i + q;
            c.iter()
                .enumerate()
                .fold(z[t], |acc, (j, &cj)| acc + cj * z[t - j - 1])
        })
        .collect();
    let coeffs = c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    Ok(Sample::new(x)?
        .with_noise(GeneratingNoise {
            start: 1 - q as i64,
            values: z,
        })
        .with_provenance("model", format!("ma({q}) coeffs=[{coeffs}] sigma={sigma}")))
}

/// `X_t = sum_k b_k f_k(t/n) + Z_t - theta0 Z_{t-1}`, noise `Z_0..Z_n` retained.
pub fn simulate_regression_ma1(
    b: &[f64],
    regressors: &Regressors,
    theta0: f64,
    sigma: f64,
    n: usize,
    seed: u64,
) -> Result<Sample> {
    if regressors.n() != n || regressors.ncols() != b.len() {
        return Err(Error::Dimension(format!(
            "regressors {}x{}, coefficients {}, n {}",
            regressors.n(),
            regressors.ncols(),
            b.len(),
            n
        )));
    }
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    let mut rng = seeded(seed);
    let z: Vec<f64> = (0..=n)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let x = (0..n)
        .map(|i| regressors.fitted(b, i) + z[i + 1] - theta0 * z[i])
        .collect();
    Ok(Sample::new(x)?
        .with_regressors(regressors.clone())?
        .with_noise(GeneratingNoise { start: 0, values: z })
        .with_provenance("seed", seed)
        .with_provenance("model", format!("regression ma(1) theta0={theta0} sigma={sigma}")))
}

/// First differences `y_t = x_t - x_{t-1}` (length `n - 1`); regressors are dropped.
pub fn difference(sample: &Sample) -> Result<Sample> {
    if sample.n() < 2 {
        return Err(Error::TooSmall {
            n: sample.n(),
            min: 2,
        });
    }
    let y = sample.x().windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = Sample::new(y)?;
    out.provenance = sample.provenance.clone();
    Ok(out.with_provenance("transform", "differenced"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::RootSet;

    fn acov(x: &[f64], h: usize) -> f64 {
        let n = x.len();
        let m = x.iter().sum::<f64>() / n as f64;
        (0..n - h).map(|t| (x[t] - m) * (x[t + h] - m)).sum::<f64>() / n as f64
    }

    #[test]
    fn identity_filter_returns_noise() {
        let m = MaModel::new(vec![0.0], 1.5).unwrap();
        let s = simulate_ma(&m, 50, 3).unwrap();
        let z = s.noise().unwrap();
        for t in 1..=50 {
            assert_eq!(s.x()[t - 1], z.at(t as i64));
        }
    }

    #[test]
    fn ma2_autocovariances_match_model() {
        let m = MaModel::from_roots(&RootSet::real(&[1.0, 0.3]), 1.0).unwrap();
        let s = simulate_ma(&m, 1000, 1).unwrap();
        let g = m.autocovariances();
        // standard errors via Bartlett's formula for an MA(2)
        let rho: Vec<f64> = g.iter().map(|v| v / g[0]).collect();
        let n = 1000.0;
        let se0 = (2.0 * g.iter().enumerate().map(|(h, v)| if h == 0 { v * v } else { 2.0 * v * v }).sum::<f64>() / n).sqrt();
        assert!((acov(s.x(), 0) - g[0]).abs() < 3.0 * se0, "gamma0");
        for h in 1..=2 {
            let var_rho = (1.0 + 2.0 * rho[1..].iter().map(|r| r * r).sum::<f64>()) / n;
            let r_hat = acov(s.x(), h) / acov(s.x(), 0);
            assert!((r_hat - rho[h]).abs() < 3.0 * var_rho.sqrt(), "lag {h}");
        }
    }

    #[test]
    fn double_difference_kills_frequency_zero() {
        let m = MaModel::new(vec![-2.0, 1.0], 1.0).unwrap();
        let s = simulate_ma(&m, 20_000, 5).unwrap();
        // periodogram at frequency zero
        let sum: f64 = s.x().iter().sum();
        let i0 = sum * sum / s.n() as f64;
        assert!(i0 < 1e-2, "periodogram at zero {i0}");
    }

    #[test]
    fn deterministic_given_seed() {
        let m = MaModel::new(vec![-1.3, 0.3], 1.0).unwrap();
        assert_eq!(simulate_ma(&m, 100, 9).unwrap(), simulate_ma(&m, 100, 9).unwrap());
        assert_ne!(simulate_ma(&m, 100, 9).unwrap().x(), simulate_ma(&m, 100, 10).unwrap().x());
    }

    #[test]
    fn too_short() {
        let m = MaModel::new(vec![-1.3, 0.3], 1.0).unwrap();
        assert_eq!(simulate_ma(&m, 2, 1), Err(Error::TooSmall { n: 2, min: 3 }));
    }

    #[test]
    fn regression_mean_and_unit_root() {
        let n = 20_000;
        let f = Regressors::polynomial(n, 0).unwrap();
        let s = simulate_regression_ma1(&[5.0], &f, 0.0, 1.0, n, 2).unwrap();
        let mean = s.x().iter().sum::<f64>() / n as f64;
        assert!((mean - 5.0).abs() < 4.0 / (n as f64).sqrt());
        let s = simulate_regression_ma1(&[0.0], &f, 1.0, 1.0, n, 3).unwrap();
        let r1 = acov(s.x(), 1) / acov(s.x(), 0);
        assert!((r1 + 0.5).abs() < 0.03, "lag-one autocorrelation {r1}");
        assert!(simulate_regression_ma1(&[1.0, 2.0], &f, 1.0, 1.0, n, 3).is_err());
    }

    #[test]
    fn trend_drops_out_after_detrending() {
        // with the same seed the trend enters additively, so removing the true
        // trend reproduces the trend-free series exactly
        let n = 500;
        let f = Regressors::polynomial(n, 1).unwrap();
        let with = simulate_regression_ma1(&[0.0, 3.0], &f, 1.0, 1.0, n, 4).unwrap();
        let without = simulate_regression_ma1(&[0.0, 0.0], &f, 1.0, 1.0, n, 4).unwrap();
        for i in 0..n {
            let detrended = with.x()[i] - f.fitted(&[0.0, 3.0], i);
            assert!((detrended - without.x()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn differencing() {
        let c = Sample::new(vec![2.0; 10]).unwrap();
        assert!(difference(&c).unwrap().x().iter().all(|&v| v == 0.0));
        let s = Sample::new(vec![1.0, 4.0, 2.0]).unwrap();
        assert_eq!(difference(&s).unwrap().x(), &[3.0, -2.0]);
    }

    #[test]
    fn differenced_iid_is_unit_root_ma1() {
        // y_t = mu + Z_t differenced equals Z_t - Z_{t-1}
        let m = MaModel::new(vec![0.0], 1.0).unwrap();
        let base = simulate_ma(&m, 200, 8).unwrap();
        let shifted = Sample::new(base.x().iter().map(|v| v + 3.0).collect()).unwrap();
        let d = difference(&shifted).unwrap();
        let z = base.noise().unwrap();
        for t in 2..=200 {
            assert!((d.x()[t - 2] - (z.at(t as i64) - z.at(t as i64 - 1))).abs() < 1e-12);
        }
        // with a linear trend the differences carry the slope as their mean
        let trend = Sample::new((1..=200).map(|t| 0.5 * t as f64 + base.x()[t - 1]).collect()).unwrap();
        let d = difference(&trend).unwrap();
        for t in 2..=200 {
            assert!((d.x()[t - 2] - (0.5 + z.at(t as i64) - z.at(t as i64 - 1))).abs() < 1e-12);
        }
    }
}
