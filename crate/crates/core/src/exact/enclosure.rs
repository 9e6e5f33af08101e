use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Closed rational interval `[lower, upper]` known to contain a real value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lower: BigRational,
    upper: BigRational,
}

impl Enclosure {
    pub fn new(lower: BigRational, upper: BigRational) -> Result<Self> {
        if lower > upper {
            return Err(Error::Domain(format!("enclosure with lower {lower} > upper {upper}")));
        }
        Ok(Enclosure { lower, upper })
    }

    pub fn point(x: BigRational) -> Self {
        Enclosure { lower: x.clone(), upper: x }
    }

    pub fn zero() -> Self {
        Enclosure::point(BigRational::zero())
    }

    pub fn lower(&self) -> &BigRational {
        &self.lower
    }

    pub fn upper(&self) -> &BigRational {
        &self.upper
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn contains_zero(&self) -> bool {
        !self.lower.is_positive() && !self.upper.is_negative()
    }

    /// True when `other` lies inside `self`.
    pub fn encloses(&self, other: &Enclosure) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lower: &self.lower + &other.lower, upper: &self.upper + &other.upper }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lower: &self.lower - &other.upper, upper: &self.upper - &other.lower }
    }

    pub fn shift(&self, x: &BigRational) -> Enclosure {
        Enclosure { lower: &self.lower + x, upper: &self.upper + x }
    }

    pub fn scale(&self, k: &BigRational) -> Enclosure {
        let a = &self.lower * k;
        let b = &self.upper * k;
        if k.is_negative() {
            Enclosure { lower: b, upper: a }
        } else {
            Enclosure { lower: a, upper: b }
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Enclosure {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let products = [
            &self.lower * &other.lower,
            &self.lower * &other.upper,
            &self.upper * &other.lower,
            &self.upper * &other.upper,
        ];
        let lower = products.iter().min().cloned().expect("nonempty");
        let upper = products.iter().max().cloned().expect("nonempty");
        Enclosure { lower, upper }
    }

    /// Enclosure of `|x|`.
    pub fn abs(&self) -> Enclosure {
        if !self.lower.is_negative() {
            self.clone()
        } else if !self.upper.is_positive() {
            Enclosure { lower: -&self.upper, upper: -&self.lower }
        } else {
            let upper = std::cmp::max(-&self.lower, self.upper.clone());
            Enclosure { lower: BigRational::zero(), upper }
        }
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lower: std::cmp::min(&self.lower, &other.lower).clone(),
            upper: std::cmp::max(&self.upper, &other.upper).clone(),
        }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

/// `[Σ terms, Σ terms + remainder_bound]` for a series whose tail is
/// nonnegative and bounded by `remainder_bound`.
pub fn enclose_sum(terms: &[BigRational], remainder_bound: &BigRational) -> Result<Enclosure> {
    if remainder_bound.is_negative() {
        return Err(Error::Precondition(format!("negative remainder bound {remainder_bound}")));
    }
    let sum: BigRational = terms.iter().fold(BigRational::zero(), |acc, t| acc + t);
    let upper = &sum + remainder_bound;
    Ok(Enclosure { lower: sum, upper })
}

/// Serialized bracket with decimal-string numerators and denominators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnclosureRecord {
    pub lower: String,
    pub upper: String,
}

impl From<&Enclosure> for EnclosureRecord {
    fn from(e: &Enclosure) -> Self {
        EnclosureRecord { lower: e.lower.to_string(), upper: e.upper.to_string() }
    }
}
