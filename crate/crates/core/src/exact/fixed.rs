//! Signed fixed-point reals with 64 fractional bits, used for base-2 logarithms.
//!
//! The integer part has 63 bits of headroom, so logarithms of integers with up
//! to 2^60 bits stay representable with room for sums of a few hundred terms.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const FRAC_BITS: u32 = 64;

/// Certified bound on the error of [`log2_biguint`], in units of 2^-64.
///
/// The truncated 64-bit mantissa and the 64 squaring steps each lose well under
/// 2^-60; 2^-56 leaves a wide margin.
pub const LOG2_ERR_UNITS: i128 = 1 << 8;

/// Fixed-point real `raw / 2^64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fixed(i128);

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);
    pub const ONE: Fixed = Fixed(1 << FRAC_BITS);

    /// ln 2 rounded to nearest (0xB17217F7D1CF79AC / 2^64).
    pub const LN_2: Fixed = Fixed(0xB172_17F7_D1CF_79AC);

    pub const fn from_raw(raw: i128) -> Self {
        Fixed(raw)
    }

    pub const fn raw(self) -> i128 {
        self.0
    }

    pub fn from_int(v: i64) -> Self {
        Fixed((v as i128) << FRAC_BITS)
    }

    /// Smallest positive value `2^-k` for `k <= 64`.
    pub fn pow2_neg(k: u32) -> Self {
        assert!(k <= FRAC_BITS);
        Fixed(1i128 << (FRAC_BITS - k))
    }

    pub fn abs(self) -> Self {
        Fixed(self.0.abs())
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn signum(self) -> i8 {
        self.0.signum() as i8
    }

    /// Exact conversion to a rational.
    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.0), BigInt::one() << FRAC_BITS)
    }

    /// Nearest fixed value to `r` (ties away from zero).
    pub fn from_rational(r: &BigRational) -> Option<Self> {
        let scaled = BigRational::new(r.numer() << FRAC_BITS, r.denom().clone());
        round_to_i128(&scaled).map(Fixed)
    }

    /// Largest fixed value not above `r`.
    pub fn floor_rational(r: &BigRational) -> Option<Self> {
        let scaled = r.numer() << FRAC_BITS;
        scaled.div_floor(r.denom()).to_i128().map(Fixed)
    }

    /// Smallest fixed value not below `r`.
    pub fn ceil_rational(r: &BigRational) -> Option<Self> {
        let scaled = r.numer() << FRAC_BITS;
        scaled.div_ceil(r.denom()).to_i128().map(Fixed)
    }

    /// `self * r` rounded to nearest; `None` on overflow.
    pub fn mul_rational(self, r: &BigRational) -> Option<Self> {
        let raw = BigRational::new(BigInt::from(self.0) * r.numer(), r.denom().clone());
        round_to_i128(&raw).map(Fixed)
    }

    /// Fixed-point product rounded to nearest.
    pub fn mul(self, other: Fixed) -> Option<Self> {
        let prod = BigInt::from(self.0) * BigInt::from(other.0);
        let half = BigInt::one() << (FRAC_BITS - 1);
        let rounded = if prod.is_negative() { -((-prod + half) >> FRAC_BITS) } else { (prod + half) >> FRAC_BITS };
        rounded.to_i128().map(Fixed)
    }

    /// Quotient `self / other` as an exact rational.
    pub fn ratio(self, other: Fixed) -> Option<BigRational> {
        if other.0 == 0 {
            return None;
        }
        Some(BigRational::new(BigInt::from(self.0), BigInt::from(other.0)))
    }

    pub fn checked_add(self, other: Fixed) -> Option<Self> {
        self.0.checked_add(other.0).map(Fixed)
    }

    pub fn checked_sub(self, other: Fixed) -> Option<Self> {
        self.0.checked_sub(other.0).map(Fixed)
    }

    /// Lossy conversion for display-only estimates.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 18446744073709551616.0
    }

    /// Decimal rendering with exactly `places` digits after the point,
    /// rounded half away from zero.
    pub fn to_decimal(self, places: u32) -> String {
        let neg = self.0 < 0;
        let abs = self.0.unsigned_abs();
        let mut int = abs >> FRAC_BITS;
        let frac = abs & ((1u128 << FRAC_BITS) - 1);
        let scale = 10u128.pow(places);
        // frac < 2^64 and scale <= 10^18 < 2^60, so the product fits in u128.
        let mut dec = (frac * scale + (1u128 << (FRAC_BITS - 1))) >> FRAC_BITS;
        if dec >= scale {
            dec -= scale;
            int += 1;
        }
        let sign = if neg && (int != 0 || dec != 0) { "-" } else { "" };
        if places == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{dec:0width$}", width = places as usize)
        }
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 + rhs.0)
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 - rhs.0)
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed(-self.0)
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(6))
    }
}

fn round_to_i128(r: &BigRational) -> Option<i128> {
    let (q, rem) = r.numer().div_rem(r.denom());
    let q = if (rem.abs() << 1) >= *r.denom() {
        if r.numer().is_negative() { q - 1 } else { q + 1 }
    } else {
        q
    };
    q.to_i128()
}

/// log2 of a positive integer, truncated toward zero on the fractional part.
///
/// Exact for powers of two. Error is below [`LOG2_ERR_UNITS`] ulps.
pub fn log2_biguint(n: &BigUint) -> Fixed {
    assert!(!n.is_zero(), "log2 of zero");
    let bits = n.bits();
    let exponent = (bits - 1) as i128;
    // Top 64 bits as a mantissa in [2^63, 2^64), i.e. m / 2^63 in [1, 2).
    let mantissa: u64 = if bits <= 64 {
        let v = n.to_u64().expect("fits in 64 bits");
        v << (64 - bits)
    } else {
        let top: BigUint = n >> (bits - 64);
        top.to_u64().expect("exactly 64 bits")
    };
    let mut x = mantissa as u128;
    let mut frac: u128 = 0;
    for _ in 0..FRAC_BITS {
        x = (x * x) >> 63;
        frac <<= 1;
        if x >= 1u128 << 64 {
            x >>= 1;
            frac |= 1;
        }
    }
    Fixed((exponent << FRAC_BITS) + frac as i128)
}

/// log2 |n| for a nonzero signed integer.
pub fn log2_bigint_abs(n: &BigInt) -> Fixed {
    log2_biguint(n.magnitude())
}
