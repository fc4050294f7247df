//! Resilience analytics for social organizations observed through interaction logs.
//!
//! The crate turns timestamped interaction records into multi-edge networks,
//! compares them against a generalized hypergeometric ensemble, derives signed
//! relations and agent impact from over- and under-represented interactions,
//! and condenses structural balance and ensemble entropy into a resilience
//! score per time window. The [`intervene`] module simulates departures and
//! interventions on top of the same pipeline.

pub mod analysis;
pub mod ensemble;
pub mod error;
pub mod ingest;
pub mod intervene;
pub mod network;
pub mod resilience;
pub mod signed;
pub mod topology;

pub use error::{Error, Result};
pub use network::MultiEdgeNetwork;
