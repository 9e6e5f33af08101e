//! Rational enclosures of `x^(a/b)` through integer `b`-th roots.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::enclosure::Enclosure;
use crate::error::{Error, Result};

/// Encloses `x^e` for positive rational `x` with width about `2^-precision_bits`
/// relative to `x^e`. The enclosure is a point when the root is exact.
pub fn pow_enclosure(x: &BigRational, e: &BigRational, precision_bits: u64, budget_bits: u64) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("rational power of non-positive base {x}")));
    }
    if e.is_zero() {
        return Ok(Enclosure::point(BigRational::one()));
    }
    let a = e.numer().abs();
    let b = e.denom().to_u32().ok_or_else(|| Error::TooLarge(format!("root degree {}", e.denom())))?;
    let a_usize = a.to_usize().ok_or_else(|| Error::TooLarge(format!("exponent numerator {a}")))?;
    let base_bits = x.numer().bits().max(x.denom().bits());
    if base_bits.saturating_mul(a_usize as u64) > budget_bits {
        return Err(Error::TooLarge(format!("power needs about {} bits", base_bits.saturating_mul(a_usize as u64))));
    }
    let base = if e.is_negative() { x.recip() } else { x.clone() };
    let p: BigUint = num_traits::pow(base.numer().magnitude().clone(), a_usize);
    let q: BigUint = num_traits::pow(base.denom().magnitude().clone(), a_usize);
    if b == 1 {
        return Ok(Enclosure::point(BigRational::new(p.into(), q.into())));
    }
    // (p/q)^(1/b) = (p q^(b-1) 2^(b k))^(1/b) / (q 2^k). Choose k so the root has
    // roughly `precision_bits` more bits than the scale.
    let log_p = p.bits() as i64 - q.bits() as i64;
    let k = (precision_bits as i64 + 2 - log_p / b as i64).max(0) as u64;
    let radicand: BigUint = &p * num_traits::pow(q.clone(), (b - 1) as usize) << (k * b as u64);
    if radicand.bits() > budget_bits.saturating_mul(2) {
        return Err(Error::TooLarge(format!("root radicand needs {} bits", radicand.bits())));
    }
    let r = radicand.nth_root(b);
    let scale = BigInt::from(q << k);
    let exact = num_traits::pow(r.clone(), b as usize) == radicand;
    let lower = BigRational::new(BigInt::from(r.clone()), scale.clone());
    if exact {
        return Ok(Enclosure::point(lower));
    }
    let upper = BigRational::new(BigInt::from(r + 1u32), scale);
    Enclosure::new(lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_roots_are_points() {
        let e = pow_enclosure(&r(9, 4), &r(3, 2), 32, 1 << 16).unwrap();
        assert!(e.is_point());
        assert_eq!(e.lower(), &r(27, 8));
        let e = pow_enclosure(&r(4, 1), &r(-1, 2), 32, 1 << 16).unwrap();
        assert_eq!(e.lower(), &r(1, 2));
    }

    #[test]
    fn irrational_roots_are_tight() {
        let e = pow_enclosure(&r(2, 1), &r(1, 2), 60, 1 << 16).unwrap();
        let sq = std::f64::consts::SQRT_2;
        assert!(e.lower().to_f64().unwrap() <= sq && sq <= e.upper().to_f64().unwrap());
        assert!(e.width() < r(1, 1 << 40));
        assert!(&e.lower().pow(2) < &r(2, 1) && &e.upper().pow(2) > &r(2, 1));
    }

    #[test]
    fn rejects_nonpositive_base() {
        assert!(pow_enclosure(&r(0, 1), &r(1, 2), 8, 64).is_err());
    }
}
