//! Certified numerics for transcendence criteria of Cantor-type series.

pub mod error;
pub mod exact;
pub mod approx;
pub mod criteria;
pub mod relations;
pub mod scenario;
pub mod sequences;

pub use error::{Error, Result};
