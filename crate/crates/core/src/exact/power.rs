//! Positive integers stored as `2^twos * odd`, and certified sign decisions for
//! products `Π x_j^{e_j}` with rational exponents.
//!
//! The two-adic part is kept as an exponent so that doubly exponential
//! denominators (pure powers of two) never have to be materialized.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::fixed::{log2_biguint, Fixed, LOG2_ERR_UNITS};
use super::logmag::LogMag;
use crate::error::{Error, Result};

/// Default cap on the size of any integer materialized by exact fallbacks.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factored {
    twos: u64,
    odd: BigUint,
}

impl Factored {
    pub fn one() -> Self {
        Factored { twos: 0, odd: BigUint::one() }
    }

    pub fn pow2(k: u64) -> Self {
        Factored { twos: k, odd: BigUint::one() }
    }

    pub fn from_biguint(n: &BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Domain("zero has no 2-adic factorization".into()));
        }
        let twos = n.trailing_zeros().expect("nonzero");
        Ok(Factored { twos, odd: n >> twos })
    }

    pub fn from_bigint(n: &BigInt) -> Result<Self> {
        if !n.is_positive() {
            return Err(Error::Domain(format!("expected a positive integer, got {n}")));
        }
        Factored::from_biguint(n.magnitude())
    }

    pub fn from_u64(n: u64) -> Result<Self> {
        Factored::from_biguint(&BigUint::from(n))
    }

    pub fn twos(&self) -> u64 {
        self.twos
    }

    pub fn odd(&self) -> &BigUint {
        &self.odd
    }

    pub fn is_one(&self) -> bool {
        self.twos == 0 && self.odd.is_one()
    }

    /// Bit length of the represented integer.
    pub fn bits(&self) -> u64 {
        self.twos + self.odd.bits()
    }

    pub fn mul(&self, other: &Factored) -> Result<Factored> {
        let twos = self.twos.checked_add(other.twos).ok_or_else(exponent_overflow)?;
        Ok(Factored { twos, odd: &self.odd * &other.odd })
    }

    pub fn pow(&self, e: u64, budget_bits: u64) -> Result<Factored> {
        let twos = self.twos.checked_mul(e).ok_or_else(exponent_overflow)?;
        if self.odd.is_one() {
            return Ok(Factored { twos, odd: BigUint::one() });
        }
        let odd_bits = (self.odd.bits().saturating_sub(1)).saturating_mul(e);
        if odd_bits > budget_bits {
            return Err(Error::TooLarge(format!("odd part of power needs about {odd_bits} bits")));
        }
        let e32 = u32::try_from(e).map_err(|_| exponent_overflow())?;
        Ok(Factored { twos, odd: num_traits::pow(self.odd.clone(), e32 as usize) })
    }

    pub fn to_biguint(&self, budget_bits: u64) -> Result<BigUint> {
        if self.bits() > budget_bits {
            return Err(Error::TooLarge(format!("integer with {} bits exceeds budget {budget_bits}", self.bits())));
        }
        Ok(&self.odd << self.twos)
    }

    pub fn to_bigint(&self, budget_bits: u64) -> Result<BigInt> {
        self.to_biguint(budget_bits).map(BigInt::from)
    }

    /// log2 of the value; exact when the odd part is 1.
    pub fn log2(&self) -> LogMag {
        let twos = Fixed::from_raw((self.twos as i128) << 64);
        if self.odd.is_one() {
            LogMag::positive(twos, Fixed::ZERO)
        } else {
            LogMag::positive(twos + log2_biguint(&self.odd), Fixed::from_raw(LOG2_ERR_UNITS))
        }
    }
}

fn exponent_overflow() -> Error {
    Error::TooLarge("two-adic exponent overflows u64".into())
}

/// How a [`Decision`] was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// All bases were powers of two; exponents compared as rationals.
    TwoAdicExponents,
    /// The certified log-domain interval excluded zero.
    LogDomain,
    /// Integer powers were materialized and compared.
    ExactIntegers,
    /// The log interval straddled zero and exact fallback exceeded the budget.
    Undecided,
}

/// Certified comparison of a product against 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    /// `Greater` means the product exceeds 1; `None` when undecided.
    pub ordering: Option<Ordering>,
    /// log2 of the product (estimate).
    pub log2: Fixed,
    /// Error radius on `log2`.
    pub err: Fixed,
    pub method: Method,
}

impl Decision {
    pub fn is_certified(&self) -> bool {
        self.ordering.is_some()
    }
}

/// One factor `base^exponent`.
#[derive(Clone, Debug)]
pub struct PowerTerm {
    pub base: Factored,
    pub exponent: BigRational,
}

impl PowerTerm {
    pub fn new(base: Factored, exponent: BigRational) -> Self {
        PowerTerm { base, exponent }
    }

    pub fn int(base: Factored, exponent: i64) -> Self {
        PowerTerm { base, exponent: BigRational::from_integer(exponent.into()) }
    }
}

fn saturating_fixed(r: &BigRational) -> Fixed {
    Fixed::from_rational(r).unwrap_or(if r.is_negative() {
        Fixed::from_raw(i128::MIN / 2)
    } else {
        Fixed::from_raw(i128::MAX / 2)
    })
}

/// Decides how `Π base_j^{exponent_j}` compares with 1.
///
/// Powers of two are handled through their exponents. Remaining odd parts go
/// through the log domain first and, when the interval is too close to zero,
/// through exact integer powers bounded by `budget_bits`.
pub fn compare_product_with_one(terms: &[PowerTerm], budget_bits: u64) -> Decision {
    let mut two_exp = BigRational::zero();
    let mut odd_terms: Vec<(&BigUint, &BigRational)> = Vec::new();
    for t in terms {
        if t.exponent.is_zero() {
            continue;
        }
        two_exp += &t.exponent * BigRational::from_integer(BigInt::from(t.base.twos));
        if !t.base.odd.is_one() {
            odd_terms.push((&t.base.odd, &t.exponent));
        }
    }

    if odd_terms.is_empty() {
        return Decision {
            ordering: Some(two_exp.cmp(&BigRational::zero())),
            log2: saturating_fixed(&two_exp),
            err: Fixed::ZERO,
            method: Method::TwoAdicExponents,
        };
    }

    let mut estimate = saturating_fixed(&two_exp);
    let mut err = Fixed::from_raw(1);
    for (odd, e) in &odd_terms {
        let l = log2_biguint(odd);
        let scaled = l.mul_rational(e).unwrap_or_else(|| saturating_fixed(&(l.to_rational() * *e)));
        estimate = estimate + scaled;
        // LOG2_ERR_UNITS * |e| raw units from the log, plus rounding of the product.
        let units = (BigRational::from_integer(LOG2_ERR_UNITS.into()) * e.abs()).ceil().to_integer();
        let units = units.to_i128().unwrap_or(i128::MAX / 4);
        err = Fixed::from_raw(err.raw().saturating_add(units).saturating_add(2));
    }
    if estimate.abs() > err {
        return Decision {
            ordering: Some(if estimate.is_positive() { Ordering::Greater } else { Ordering::Less }),
            log2: estimate,
            err,
            method: Method::LogDomain,
        };
    }

    match exact_compare(&two_exp, &odd_terms, budget_bits) {
        Some(ordering) => Decision { ordering: Some(ordering), log2: estimate, err, method: Method::ExactIntegers },
        None => Decision { ordering: None, log2: estimate, err, method: Method::Undecided },
    }
}

fn exact_compare(two_exp: &BigRational, odd_terms: &[(&BigUint, &BigRational)], budget_bits: u64) -> Option<Ordering> {
    let mut lcm = two_exp.denom().clone();
    for (_, e) in odd_terms {
        lcm = lcm.lcm(e.denom());
    }
    let scale = BigRational::from_integer(lcm);
    let k = (two_exp * &scale).to_integer();

    let mut est_bits: u64 = 0;
    let mut scaled: Vec<(&BigUint, BigInt)> = Vec::with_capacity(odd_terms.len());
    for (odd, e) in odd_terms {
        let ie = (*e * &scale).to_integer();
        let mag = ie.magnitude().to_u64()?;
        est_bits = est_bits.saturating_add(odd.bits().saturating_mul(mag));
        scaled.push((odd, ie));
    }
    if est_bits > budget_bits {
        return None;
    }
    let mut left = BigUint::one();
    let mut right = BigUint::one();
    for (odd, ie) in scaled {
        let p = num_traits::pow((*odd).clone(), ie.magnitude().to_usize()?);
        if ie.is_positive() {
            left *= p;
        } else {
            right *= p;
        }
    }
    // Compare left * 2^k with right.
    let (left_shift, right_shift) = if k.is_negative() { (BigInt::zero(), -k) } else { (k, BigInt::zero()) };
    let lbits = BigInt::from(left.bits()) + &left_shift;
    let rbits = BigInt::from(right.bits()) + &right_shift;
    if &lbits - &rbits >= BigInt::from(2) {
        return Some(Ordering::Greater);
    }
    if &rbits - &lbits >= BigInt::from(2) {
        return Some(Ordering::Less);
    }
    let ls = left_shift.to_u64()?;
    let rs = right_shift.to_u64()?;
    if ls.max(rs) > budget_bits {
        return None;
    }
    Some((left << ls).cmp(&(right << rs)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: u64) -> Factored {
        Factored::from_u64(n).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn factorization() {
        let x = f(96);
        assert_eq!(x.twos(), 5);
        assert_eq!(x.odd(), &BigUint::from(3u32));
        assert_eq!(x.to_biguint(64).unwrap(), BigUint::from(96u32));
        assert!(Factored::from_u64(0).is_err());
        assert_eq!(x.pow(3, 64).unwrap().to_biguint(64).unwrap(), BigUint::from(96u64.pow(3)));
    }

    #[test]
    fn pure_two_adic_is_exact() {
        // (2^9)^(3/2) vs 2^14: 13.5 < 14
        let d = compare_product_with_one(&[PowerTerm::new(Factored::pow2(9), r(3, 2)), PowerTerm::int(Factored::pow2(14), -1)], 64);
        assert_eq!(d.ordering, Some(Ordering::Less));
        assert_eq!(d.method, Method::TwoAdicExponents);
    }

    #[test]
    fn equality_needs_exact_integers() {
        // 9^(1/2) == 3
        let d = compare_product_with_one(&[PowerTerm::new(f(9), r(1, 2)), PowerTerm::int(f(3), -1)], 1 << 10);
        assert_eq!(d.ordering, Some(Ordering::Equal));
        assert_eq!(d.method, Method::ExactIntegers);
        // 6 * 2^-1 == 3
        let d = compare_product_with_one(&[PowerTerm::int(f(6), 1), PowerTerm::int(f(2), -1), PowerTerm::int(f(3), -1)], 64);
        assert_eq!(d.ordering, Some(Ordering::Equal));
    }

    #[test]
    fn log_domain_decides_clear_cases() {
        // 3^100 > 2^150
        let d = compare_product_with_one(&[PowerTerm::int(f(3), 100), PowerTerm::int(Factored::pow2(150), -1)], 64);
        assert_eq!(d.ordering, Some(Ordering::Greater));
        assert_eq!(d.method, Method::LogDomain);
    }

    #[test]
    fn budget_exhaustion_is_undecided() {
        let d = compare_product_with_one(&[PowerTerm::new(f(9), r(1, 2)), PowerTerm::int(f(3), -1)], 1);
        assert_eq!(d.ordering, None);
        assert_eq!(d.method, Method::Undecided);
    }
}
