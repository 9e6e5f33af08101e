//! Integer relations among `1, beta_1, ..., beta_m`: enclosure-based search,
//! exact checks on convergents, and the independence probe for the
//! divisor-function pair.

pub mod lll;
pub mod probe;
pub mod search;
pub mod verify;

pub use lll::lll_reduce;
pub use probe::{corollary_independence_probe, ProbeReport, WitnessPair};
pub use search::{enumeration_key, find_relations, residual_enclosure, RelationCandidate, RelationStatus, SearchConfig, SearchMethod};
pub use verify::{
    default_search, find_series_relations, integer_residual, verify_relation_on_convergents, ConvergentCheck, ConvergentStatus,
    SeriesRelationReport,
};
