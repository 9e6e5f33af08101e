//! Exact and certified arithmetic: fixed-point logs, the log-magnitude
//! surrogate, rational enclosures and power comparisons.

pub mod enclosure;
pub mod fixed;
pub mod logmag;
pub mod power;
pub mod roots;

pub use enclosure::{enclose_sum, Enclosure, EnclosureRecord};
pub use fixed::{log2_bigint_abs, log2_biguint, Fixed};
pub use logmag::{cmp_logmag, fixed_to_logmag, scale_logmag, to_logmag, LogMag, LogMagRecord, LogOrdering, Sign, TOLERANCE};
pub use num_rational::BigRational;
pub use power::{compare_product_with_one, Decision, Factored, Method, PowerTerm, DEFAULT_BIT_BUDGET};
pub use roots::pow_enclosure;
