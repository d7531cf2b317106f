//! Moving-average models with roots on or near the unit circle: exact
//! Gaussian likelihood with integrated initial values, maximum likelihood
//! over the closed invertibility region with pile-up detection, simulation of
//! the limiting processes, and unit-root tests.
//!
//! Numeric kernels are generic over [`scalar::Scalar`]; the estimators, limit
//! simulations and experiments work in `f64` through the aliases below.

pub mod error;
pub mod linalg;
pub mod model;
pub mod region;
pub mod residuals;
pub mod rng;
pub mod roots;
pub mod sample;
pub mod scalar;
pub mod simulate;
pub mod likelihood;
pub mod optim;
pub mod estimation;
pub mod stats;
pub mod limit;
pub mod hypothesis;
pub mod experiments;

pub use error::{Error, Result};
pub use estimation::{fit_ma1, fit_ma2, fit_ma2_unit_constrained, local_params, EstimateReport};
pub use hypothesis::{glr_test, mle_test, Method, TestResult};
pub use likelihood::{exact_profile_loglik, exact_profile_loglik_coeffs};
pub use limit::CritTable;
pub use region::{classify_region, RegionLabel, RootKind, Segment};
pub use scalar::Scalar;

pub type Model = model::MaModel<f64>;
pub type Roots = roots::RootSet<f64>;
pub type Series = sample::Sample<f64>;
pub type Covariates = sample::Regressors<f64>;
pub type Likelihood = likelihood::LikelihoodValue<f64>;
