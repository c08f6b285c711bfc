//! Metric social choice with threshold approvals.
//!
//! Agents and alternatives live in a metric space; a mechanism sees only
//! limited views of the instance (ordinal rankings, alternative
//! distances, threshold approval sets) and must pick a single winner.
//! This crate provides:
//!
//! - instance representation with metric validation and closure
//!   ([`instance`]), and derivation of the elicitation views ([`views`]);
//! - the winner-selection mechanisms ([`mechanisms`]);
//! - objectives, brute-force optima and distortion reports ([`eval`]);
//! - generators for the known adversarial lower-bound instances
//!   ([`constructions`]);
//! - randomized hill-climbing search for high-distortion witnesses
//!   ([`search`]).

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod eval;
pub mod instance;
pub mod mechanisms;
pub mod search;
pub mod views;

pub use error::{Error, Result};
pub use instance::{Instance, DEFAULT_TAU};

/// `1 + sqrt(2)`, the threshold optimizing most of the guarantees here.
pub const ALPHA_STAR: f64 = 1.0 + std::f64::consts::SQRT_2;
