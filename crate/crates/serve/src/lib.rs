//! Command-line tools and the HTTP service for shot-zone prediction.

pub mod api;
pub mod cli;
pub mod schema;
pub mod wire;
