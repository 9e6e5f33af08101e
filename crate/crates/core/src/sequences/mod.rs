//! Coefficient and denominator sequences.

pub mod arith;
pub mod spec;

pub use arith::{divisor_count, sieve, sigma, totient, ArithFn};
pub use spec::{corollary_denominator_spec, corollary_denominators, sieve_window, SequenceKind, SequenceSpec, SequenceWindow};
