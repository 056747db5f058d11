//! Bayes factors, power and sample size for normally distributed estimates.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the simulation module and
//! the command-line tool use.

pub mod bf;
pub mod error;
pub mod mc;
pub mod model;
pub mod numerics;
pub mod power;
pub mod ssd;
mod scalar;

pub use error::{Error, Result};
pub use model::{Orientation, Preset};
pub use power::{DesignDistribution, TTestKind};
pub use scalar::Scalar;
pub use ssd::{Method, RootChoice};

pub type AnalysisPrior = model::AnalysisPrior<f64>;
pub type DesignPrior = model::DesignPrior<f64>;
pub type TruncatedT = model::TruncatedT<f64>;
pub type Threshold = model::Threshold<f64>;
pub type TestSpec = model::TestSpec<f64>;
pub type EstimateInput = bf::EstimateInput<f64>;
pub type BayesFactor = bf::BayesFactor<f64>;
pub type TTestDesign = bf::TTestDesign<f64>;
pub type PowerQuery = power::PowerQuery<f64>;
pub type PowerResult = power::PowerResult<f64>;
pub type SuccessRegion = power::SuccessRegion<f64>;
pub type SampleSizeResult = ssd::SampleSizeResult<f64>;
pub type Feasibility = ssd::Feasibility<f64>;
pub type SearchOptions = ssd::SearchOptions<f64>;
