//! Convergents, certified tails and error bounds, measured approximation
//! exponents and Subspace-theorem instances.

use num_bigint::BigInt;
use serde::Serializer;

use crate::exact::{LogMag, LogMagRecord};

pub mod exponent;
pub mod series;
pub mod subspace;
pub mod tail;

pub use exponent::{error_report, measured_exponent, BoundParams, ErrorReport, MeasuredExponent};
pub use series::{corollary_series, Convergent, SeriesMode, SeriesSpec};
pub use subspace::{build_subspace_instance, height, verify_forms_inequality, DeltaPrime, SubspaceInstance};
pub use tail::{
    error_enclosure, error_enclosure_escalating, geometric_tail_bound, power_tail_bound, product_growth_within_pow2, product_tail_bound,
    tail_enclosure, tail_enclosure_with, value_enclosure, Tail, TailBound, TailOptions,
};

pub(crate) fn serialize_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn serialize_logmag<S: Serializer>(x: &LogMag, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&LogMagRecord::from(x), s)
}
