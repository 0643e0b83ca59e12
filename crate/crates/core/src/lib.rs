//! Analysis of cache-aided full-duplex small-cell networks: closed-form
//! stochastic-geometry metrics and a Monte Carlo simulator for checking them.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod caching;
pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod sweep;
pub mod units;

pub use analytics::{analytic_report, AnalyticReport, NetworkParams, TransformVariant};
pub use config::{CacheSamplingMode, CorrelationMode, ScenarioConfig, WindowRadius};
pub use engine::{Engine, EngineOutput, EngineRegistry, HitEstimator, HitRegistry};
pub use error::{Error, Result};
pub use montecarlo::{McEstimate, McOptions, Simulator};
pub use quadrature::QuadraturePolicy;
