//! Sign and base-2 log-magnitude surrogate for astronomically large or small
//! quantities.
//!
//! A [`LogMag`] carries an error radius next to its estimate. Comparisons
//! return [`LogOrdering::Uncertain`] inside the combined band and callers are
//! expected to fall back to exact arithmetic there.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::fixed::{log2_biguint, Fixed, LOG2_ERR_UNITS};
use crate::error::{Error, Result};

/// Log-domain tolerance: 2^-40.
pub const TOLERANCE: Fixed = Fixed::from_raw(1 << 24);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i8(s: i8) -> Self {
        match s.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogOrdering {
    Less,
    Greater,
    Equal,
    Uncertain,
}

impl LogOrdering {
    pub fn to_ordering(self) -> Option<Ordering> {
        match self {
            LogOrdering::Less => Some(Ordering::Less),
            LogOrdering::Greater => Some(Ordering::Greater),
            LogOrdering::Equal => Some(Ordering::Equal),
            LogOrdering::Uncertain => None,
        }
    }
}

/// `sign * 2^log2mag`, with `|log2mag - true log2| <= err`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LogMag {
    sign: Sign,
    log2mag: Fixed,
    err: Fixed,
}

impl LogMag {
    pub const ZERO: LogMag = LogMag { sign: Sign::Zero, log2mag: Fixed::ZERO, err: Fixed::ZERO };

    /// Positive value `2^log2mag` known to within `err`.
    pub fn positive(log2mag: Fixed, err: Fixed) -> Self {
        LogMag { sign: Sign::Positive, log2mag, err: err.abs() }
    }

    pub fn new(sign: Sign, log2mag: Fixed, err: Fixed) -> Self {
        if sign == Sign::Zero {
            return LogMag::ZERO;
        }
        LogMag { sign, log2mag, err: err.abs() }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// log2 of the magnitude; meaningless (zero) when the sign is zero.
    pub fn log2mag(&self) -> Fixed {
        self.log2mag
    }

    pub fn err(&self) -> Fixed {
        self.err
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn abs(self) -> Self {
        if self.is_zero() {
            self
        } else {
            LogMag { sign: Sign::Positive, ..self }
        }
    }

    /// Product of two values: logs add, errors add.
    pub fn mul(self, other: LogMag) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(LogMag::ZERO);
        }
        let log2mag = self.log2mag.checked_add(other.log2mag).ok_or_else(overflow)?;
        let sign = Sign::from_i8(self.sign.as_i8() * other.sign.as_i8());
        Ok(LogMag { sign, log2mag, err: self.err + other.err })
    }

    pub fn div(self, other: LogMag) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Domain("division by zero in log domain".into()));
        }
        let inv = LogMag { sign: other.sign, log2mag: -other.log2mag, err: other.err };
        self.mul(inv)
    }

    /// Interval of the log2 magnitude, `[log2mag - err, log2mag + err]`.
    pub fn log2_bounds(&self) -> (Fixed, Fixed) {
        (self.log2mag - self.err, self.log2mag + self.err)
    }

    /// log2 of `|self|` as a new positive-or-signed [`LogMag`], i.e. the
    /// second-order logarithm. Requires a nonzero value.
    ///
    /// The result sign is the sign of `log2 |self|`; its error accounts for
    /// the error already present in `self`.
    pub fn log2_of(&self) -> Result<LogMag> {
        if self.is_zero() {
            return Err(Error::Domain("log of zero".into()));
        }
        fixed_to_logmag(self.log2mag, self.err)
    }

    /// Natural log of `|self|`, as a [`LogMag`].
    pub fn ln_of(&self) -> Result<LogMag> {
        if self.is_zero() {
            return Err(Error::Domain("log of zero".into()));
        }
        let ln = self.log2mag.mul(Fixed::LN_2).ok_or_else(overflow)?;
        // |log2 * ln2_approx - log2_true * ln2| <= err * ln2 + |log2| * 2^-65 + 1ulp
        let rounding = Fixed::from_raw((self.log2mag.raw().abs() >> 64) + 2);
        let err = self.err.mul(Fixed::LN_2).ok_or_else(overflow)? + rounding;
        fixed_to_logmag(ln, err)
    }

    /// Lossy display estimate.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            s => s.as_i8() as f64 * self.log2mag.to_f64().exp2(),
        }
    }
}

fn overflow() -> Error {
    Error::TooLarge("log-domain value exceeds fixed-point range".into())
}

/// Turns a fixed-point real `x` (known to within `err`) into a [`LogMag`].
pub fn fixed_to_logmag(x: Fixed, err: Fixed) -> Result<LogMag> {
    if x == Fixed::ZERO && err == Fixed::ZERO {
        return Ok(LogMag::ZERO);
    }
    if x.abs() <= err {
        return Err(Error::refused("value indistinguishable from zero in log domain"));
    }
    let r = x.to_rational();
    let lm = to_logmag(&r);
    // Relative error err/|x| maps to a log2 error of at most log2(1 + e) / (1 - e) <= 1.5 e / (1 - e).
    let rel = BigRational::from_integer(err.raw().into()) / BigRational::from_integer(x.raw().abs().into());
    let half = BigRational::new(1.into(), 2.into());
    if rel > half {
        return Err(Error::refused("relative error too large for second-order logarithm"));
    }
    let three = BigRational::from_integer(3.into());
    let log_err = Fixed::ceil_rational(&(three * rel)).ok_or_else(overflow)?;
    Ok(LogMag { err: lm.err + log_err, ..lm })
}

/// Log-domain surrogate of a rational. Exact for powers of two.
pub fn to_logmag(r: &BigRational) -> LogMag {
    if r.is_zero() {
        return LogMag::ZERO;
    }
    let sign = if r.is_negative() { Sign::Negative } else { Sign::Positive };
    let num = log2_biguint(r.numer().magnitude());
    let den = log2_biguint(r.denom().magnitude());
    let exact = r.numer().magnitude().count_ones() == 1 && r.denom().magnitude().count_ones() == 1;
    let err = if exact { Fixed::ZERO } else { Fixed::from_raw(2 * LOG2_ERR_UNITS) };
    LogMag { sign, log2mag: num - den, err }
}

/// `a^e` in the log domain. Requires `a > 0`.
pub fn scale_logmag(a: &LogMag, e: &BigRational) -> Result<LogMag> {
    if a.sign != Sign::Positive {
        return Err(Error::Domain("scale_logmag requires a positive base".into()));
    }
    if e.is_zero() {
        return Ok(LogMag::positive(Fixed::ZERO, Fixed::ZERO));
    }
    let log2mag = a.log2mag.mul_rational(e).ok_or_else(overflow)?;
    let err_scaled = if a.err == Fixed::ZERO {
        Fixed::ZERO
    } else {
        Fixed::ceil_rational(&(a.err.to_rational() * e.abs())).ok_or_else(overflow)?
    };
    // One extra ulp for the rounding of the product, unless it was exact.
    let exact_product = BigRational::from_integer(a.log2mag.raw().into()) * e;
    let rounding = if exact_product.is_integer() { Fixed::ZERO } else { Fixed::from_raw(1) };
    Ok(LogMag { sign: Sign::Positive, log2mag, err: err_scaled + rounding })
}

/// Three-valued comparison with an explicit uncertainty band.
///
/// The band is `max(2 * TOLERANCE, a.err + b.err)`; values inside it compare
/// as [`LogOrdering::Uncertain`] unless both are zero.
pub fn cmp_logmag(a: &LogMag, b: &LogMag) -> LogOrdering {
    match (a.sign, b.sign) {
        (Sign::Zero, Sign::Zero) => return LogOrdering::Equal,
        (sa, sb) if sa != sb => {
            return if sa < sb { LogOrdering::Less } else { LogOrdering::Greater };
        }
        _ => {}
    }
    let band = std::cmp::max(TOLERANCE + TOLERANCE, a.err + b.err);
    let diff = a.log2mag - b.log2mag;
    if diff.abs() <= band {
        return LogOrdering::Uncertain;
    }
    let magnitude_greater = diff.is_positive();
    match (a.sign, magnitude_greater) {
        (Sign::Positive, true) | (Sign::Negative, false) => LogOrdering::Greater,
        _ => LogOrdering::Less,
    }
}

/// Serializable view: `{sign, log2mag}` with six decimals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogMagRecord {
    pub sign: i8,
    pub log2mag: Option<String>,
}

impl From<&LogMag> for LogMagRecord {
    fn from(l: &LogMag) -> Self {
        LogMagRecord {
            sign: l.sign.as_i8(),
            log2mag: if l.is_zero() { None } else { Some(l.log2mag.to_decimal(6)) },
        }
    }
}
