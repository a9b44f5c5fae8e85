//! Qualitative spatio-temporal reasoning over timestamped polygon data.
//!
//! The pipeline runs temporal partitioning and qualitative abstraction
//! ([`qualify`]), then consistency checking and distance-based conflict
//! resolution ([`qcn`], [`integrate`]). After that come event detection
//! ([`events`]) and abductive narrative completion ([`abduce`]), ending
//! with high-level process queries ([`rules`]). [`pipeline`] wires the
//! stages together over flat text artifacts.

pub mod calculus;
pub mod error;
pub mod qcn;
pub mod qualify;
pub mod integrate;
pub mod events;
pub mod abduce;
pub mod rules;
pub mod pipeline;

pub use error::{Error, Result};
