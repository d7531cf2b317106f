use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{coeffs_from_roots, roots_from_coeffs, RootSet};
use crate::scalar::Scalar;

/// Moving-average model `X_t = Z_t + sum_j c_j Z_{t-j}` with noise scale `sigma`.
///
/// Serialized as `{"q":2,"coeffs":[-1.3,0.3],"sigma":1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel<T>", bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct MaModel<T = f64> {
    q: usize,
    coeffs: Vec<T>,
    sigma: T,
}

#[derive(Deserialize)]
struct RawModel<T> {
    q: usize,
    coeffs: Vec<T>,
    sigma: T,
}

impl<T: Scalar> TryFrom<RawModel<T>> for MaModel<T> {
    type Error = Error;

    fn try_from(raw: RawModel<T>) -> Result<Self> {
        if raw.q != raw.coeffs.len() {
            return Err(Error::Dimension(format!(
                "q = {} but {} coefficients",
                raw.q,
                raw.coeffs.len()
            )));
        }
        MaModel::new(raw.coeffs, raw.sigma)
    }
}

impl<T: Scalar> MaModel<T> {
    pub fn new(coeffs: Vec<T>, sigma: T) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("order q must be at least 1".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("coefficients must be finite".into()));
        }
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(Error::Invalid("sigma must be positive".into()));
        }
        Ok(Self {
            q: coeffs.len(),
            coeffs,
            sigma,
        })
    }

    pub fn from_roots(roots: &RootSet<T>, sigma: T) -> Result<Self> {
        Self::new(coeffs_from_roots(roots)?, sigma)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn roots(&self) -> RootSet<T> {
        roots_from_coeffs(&self.coeffs)
    }

    /// Autocovariances `gamma(0..=q)`.
    pub fn autocovariances(&self) -> Vec<T> {
        let mut full = vec![T::one()];
        full.extend_from_slice(&self.coeffs);
        let s2 = self.sigma * self.sigma;
        (0..=self.q)
            .map(|h| {
                (0..=self.q - h)
                    .map(|j| full[j] * full[j + h])
                    .fold(T::zero(), |a, b| a + b)
                    * s2
            })
            .collect()
    }
}
