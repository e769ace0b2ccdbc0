//! Preferential-attachment graphs and bootstrap percolation.

pub mod analytics;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod numerics;
pub mod params;
pub mod percolation;
pub mod rng;
pub mod scalar;
pub mod thresholds;
pub mod urns;
pub mod witness;

pub use error::{Error, Result};
pub use graph::{Edge, Multigraph, PaGraph};
pub use params::{make_params, Params};
pub use rng::RngStream;

/// Urn with floating-point weights.
pub type Urn = urns::UrnSpec<f64>;
/// Urn with exact rational weights, for `pmf_exact` and brute-force checks.
pub type ExactUrn = urns::UrnSpec<num_rational::BigRational>;
pub type Integral = numerics::IntegralParams<f64>;
pub type WeightBound = witness::BoundReport<f64>;
