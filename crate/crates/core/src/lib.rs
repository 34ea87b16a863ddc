//! Query means and variances for discrete Bayesian networks whose CPT rows
//! carry Dirichlet posteriors.
//!
//! For a query q(Θ) = P(H = h | E = e, Θ) the crate computes
//!
//! * the plug-in mean q̂1 and delta-method variance v̂1,
//! * the doubled-network mean and variance q̂2, v̂2,
//! * the adjusted estimates q̂3, v̂3 and q̂4, v̂4,
//! * a Monte-Carlo reference q̂0, v̂0,
//!
//! together with Student-t predictive densities for continuous children and
//! an experiment harness that compares all estimators on small benchmarks.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common double-precision instantiations.
#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks too

pub mod adjustments;
pub mod continuous;
pub mod delta;
pub mod doubling;
pub mod error;
pub mod factor;
pub mod harness;
pub mod inference;
pub mod io;
pub mod network;
pub mod oracle;
pub mod scalar;

pub use adjustments::{full_bundle, EstimateBundle};
pub use error::{Error, Result};
pub use inference::{evaluate_query, ParameterAssignment, Query};
pub use network::{bde_prior, CompleteData, Dag, DirichletRow, Network, VarId, Variable};
pub use scalar::Real;

pub type Network64 = network::Network<f64>;
pub type Network32 = network::Network<f32>;
pub type Factor64 = factor::Factor<f64>;
pub type Factor32 = factor::Factor<f32>;
pub type ParameterAssignment64 = inference::ParameterAssignment<f64>;
pub type DoubledNetwork64 = doubling::DoubledNetwork<f64>;
pub type EstimateBundle64 = adjustments::EstimateBundle<f64>;
pub type EstimateBundle32 = adjustments::EstimateBundle<f32>;
pub type RegressionFamily64 = continuous::RegressionFamily<f64>;
pub type StParams64 = continuous::StParams<f64>;
