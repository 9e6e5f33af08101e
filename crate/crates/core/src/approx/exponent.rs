use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::series::{SeriesMode, SeriesSpec};
use super::tail::{error_enclosure_escalating, geometric_tail_bound, power_tail_bound, product_tail_bound, TailBound, TailOptions};
use crate::error::{Error, Result};
use crate::exact::{to_logmag, Enclosure, EnclosureRecord, Fixed};

/// Relative width demanded of error enclosures before an exponent is read off.
const EXPONENT_REL_BITS: u64 = 40;

const MICRO: i64 = 1_000_000;

/// `delta_N` with `|beta - p/q| = q^{-(1 + delta_N)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasuredExponent {
    /// Nearest multiple of 10^-6 to the log-domain estimate from the error upper end.
    #[serde(serialize_with = "serialize_micro")]
    pub delta: BigRational,
    /// Multiple of 10^-6 certified not to exceed the exponent of the error upper end.
    #[serde(serialize_with = "serialize_micro")]
    pub certified_lower: BigRational,
}

impl MeasuredExponent {
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.delta.to_f64().unwrap_or(f64::NAN)
    }
}

pub(crate) fn micro_string(x: &BigRational) -> String {
    let scaled = (x * BigRational::from_integer(MICRO.into())).round().to_integer();
    let neg = scaled.is_negative();
    let mag = scaled.magnitude();
    let int = mag / 1_000_000u32;
    let frac = mag % 1_000_000u32;
    format!("{}{int}.{frac:06}", if neg { "-" } else { "" })
}

fn serialize_micro<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&micro_string(x))
}

fn round_micro(x: &BigRational) -> BigRational {
    let m = BigInt::from(MICRO);
    BigRational::new((x * BigRational::from_integer(m.clone())).round().to_integer(), m)
}

fn floor_micro(x: &BigRational) -> BigRational {
    let m = BigInt::from(MICRO);
    BigRational::new((x * BigRational::from_integer(m.clone())).floor().to_integer(), m)
}

/// Exponent read off a positive error upper bound `e` and `log2 q` (with radius).
pub(crate) fn exponent_from_logs(e_log2: Fixed, e_err: Fixed, q_log2: Fixed, q_err: Fixed) -> Result<MeasuredExponent> {
    if q_log2 - q_err <= Fixed::ZERO {
        return Err(Error::Domain("q_N = 1 gives no exponent".into()));
    }
    let delta = (-e_log2).ratio(q_log2).expect("nonzero") - BigRational::one();
    // Worst case: larger error and, when -log e > 0, larger q.
    let num = -(e_log2 + e_err);
    let den = if num.is_negative() { q_log2 - q_err } else { q_log2 + q_err };
    let lower = num.ratio(den).expect("positive") - BigRational::one();
    Ok(MeasuredExponent { delta: round_micro(&delta), certified_lower: floor_micro(&lower) })
}

/// `delta_N` for series `i` at order `N`, from the upper end of the error enclosure.
pub fn measured_exponent(spec: &SeriesSpec, i: usize, order: u64) -> Result<MeasuredExponent> {
    let err = error_enclosure_escalating(spec, i, order, EXPONENT_REL_BITS, &TailOptions::default())?;
    exponent_of_error(spec, order, &err)
}

fn exponent_of_error(spec: &SeriesSpec, order: u64, err: &Enclosure) -> Result<MeasuredExponent> {
    if err.upper().is_zero() {
        return Err(Error::Domain(format!("the error at N = {order} is exactly zero; the exponent is unbounded")));
    }
    if !err.lower().is_positive() {
        return Err(Error::refused_with_hint(
            format!("error enclosure at N = {order} reaches zero"),
            "raise the lookahead cap or choose another N",
        ));
    }
    let e = to_logmag(err.upper());
    let q = spec.q_factored(order)?.log2();
    exponent_from_logs(e.log2mag(), e.err(), q.log2mag(), q.err())
}

/// Parameters for the analytic bounds in an [`ErrorReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundParams {
    /// Ratio `A` for the geometric bound.
    pub ratio: Option<BigRational>,
    /// `epsilon` for the power bound; falls back to the series' own.
    pub epsilon: Option<BigRational>,
    pub horizon: u64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams { ratio: Some(BigRational::from_integer(2.into())), epsilon: None, horizon: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub series: usize,
    pub order: u64,
    #[serde(serialize_with = "serialize_enclosure")]
    pub exact_error: Enclosure,
    pub geometric_bound: Option<TailBound>,
    pub power_bound: Option<TailBound>,
    pub product_bound: Option<TailBound>,
    pub measured_exponent: Option<MeasuredExponent>,
    /// Why an analytic bound or the exponent is absent.
    pub notes: Vec<String>,
}

fn serialize_enclosure<S: Serializer>(e: &Enclosure, s: S) -> std::result::Result<S::Ok, S::Error> {
    EnclosureRecord::from(e).serialize(s)
}

/// Error enclosure, whichever analytic bounds certify, and `delta_N`.
pub fn error_report(spec: &SeriesSpec, i: usize, order: u64, params: &BoundParams) -> Result<ErrorReport> {
    let exact_error = error_enclosure_escalating(spec, i, order, EXPONENT_REL_BITS, &TailOptions::default())?;
    let mut notes = Vec::new();
    let mut keep = |label: &str, r: Result<TailBound>| -> Result<Option<TailBound>> {
        match r {
            Ok(b) => {
                if b.upper < *exact_error.upper() {
                    return Err(Error::Domain(format!("{label} bound {} is below the certified error {}", b.upper, exact_error.upper())));
                }
                Ok(Some(b))
            }
            Err(e @ (Error::Refused { .. } | Error::Precondition(_) | Error::TooLarge(_))) => {
                notes.push(format!("{label}: {e}"));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };
    let sum = spec.mode() != SeriesMode::Product;
    let geometric_bound = match (&params.ratio, sum) {
        (Some(a), true) => keep("geometric", geometric_tail_bound(spec, i, order, a, params.horizon))?,
        _ => None,
    };
    let epsilon = params.epsilon.as_ref().or(spec.epsilon());
    let power_bound = match (epsilon, spec.mode()) {
        (Some(eps), SeriesMode::SumDirect) => keep("power", power_tail_bound(spec, i, order, eps, params.horizon))?,
        _ => None,
    };
    let product_bound = if sum { None } else { keep("product", product_tail_bound(spec, i, order, params.horizon))? };
    let measured_exponent = match exponent_of_error(spec, order, &exact_error) {
        Ok(m) => Some(m),
        Err(e) => {
            notes.push(format!("exponent: {e}"));
            None
        }
    };
    Ok(ErrorReport { series: i, order, exact_error, geometric_bound, power_bound, product_bound, measured_exponent, notes })
}
