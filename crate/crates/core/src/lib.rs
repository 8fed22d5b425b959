//! Shot-zone prediction for cricket: ball-by-ball ingest, rolling player
//! profiles, a from-scratch LSTM stack, the model ladder and a what-if
//! simulator.
//!
//! The numeric core is generic over [`nn::Scalar`] (`f32` or `f64`); the
//! aliases below fix the precision used by the command-line tools and the
//! service.

pub mod domain;
pub mod featurize;
pub mod ingest;
pub mod models;
pub mod nn;
pub mod simulate;

/// Parameter precision of trained bundles.
pub type Real = f32;
pub type Network = nn::Network<Real>;
pub type Bundle = models::ModelBundle<Real>;
/// Double precision, for gradient checking.
pub type Network64 = nn::Network<f64>;
pub type Bundle64 = models::ModelBundle<f64>;
