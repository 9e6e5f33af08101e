//! Lattice points `(p_{N,1}, ..., p_{N,m}, q_N)` and the product of the linear
//! forms `|q|, |q beta_1 - p_1|, ..., |q beta_m - p_m|` evaluated on them.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::exponent::micro_string;
use super::series::SeriesSpec;
use super::tail::{error_enclosure_escalating, TailOptions};
use crate::error::{Error, Result};
use crate::exact::{compare_product_with_one, log2_bigint_abs, to_logmag, Enclosure, EnclosureRecord, Factored, LogMag, PowerTerm, DEFAULT_BIT_BUDGET};

/// Largest `delta'` with `product <= H^{-delta'}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaPrime {
    /// Multiple of 10^-6, rounded down from the product's upper end.
    Finite(BigRational),
    /// The product vanishes.
    Infinite,
}

impl DeltaPrime {
    pub fn is_at_least(&self, x: &BigRational) -> bool {
        match self {
            DeltaPrime::Finite(d) => d >= x,
            DeltaPrime::Infinite => true,
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            DeltaPrime::Finite(d) => d.to_f64().unwrap_or(f64::NAN),
            DeltaPrime::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for DeltaPrime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DeltaPrime::Finite(d) => s.serialize_str(&micro_string(d)),
            DeltaPrime::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceInstance {
    pub order: u64,
    #[serde(serialize_with = "serialize_bigints")]
    pub point: Vec<BigInt>,
    #[serde(serialize_with = "crate::approx::serialize_bigint")]
    pub height: BigInt,
    /// `|q_N|` first, then `|q_N beta_i - p_{N,i}|` for each series.
    #[serde(serialize_with = "serialize_enclosures")]
    pub form_values: Vec<Enclosure>,
    #[serde(serialize_with = "serialize_enclosure")]
    pub product: Enclosure,
    #[serde(rename = "product_log2", serialize_with = "crate::approx::serialize_logmag")]
    pub product_logmag: LogMag,
    pub delta_prime_max: DeltaPrime,
}

fn serialize_bigints<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

fn serialize_enclosure<S: Serializer>(e: &Enclosure, s: S) -> std::result::Result<S::Ok, S::Error> {
    EnclosureRecord::from(e).serialize(s)
}

fn serialize_enclosures<S: Serializer>(es: &[Enclosure], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(es.iter().map(EnclosureRecord::from))
}

/// Height of an integer point: the largest absolute coordinate.
pub fn height(point: &[BigInt]) -> BigInt {
    point.iter().map(|x| x.abs()).max().unwrap_or_default()
}

/// Builds the instance at order `N`; each error enclosure is tightened to
/// relative width `2^-precision_bits`.
pub fn build_subspace_instance(spec: &SeriesSpec, order: u64, precision_bits: u64) -> Result<SubspaceInstance> {
    let q = spec.q(order)?;
    let qr = BigRational::from_integer(q.clone());
    let mut point = Vec::with_capacity(spec.m() + 1);
    let mut form_values = vec![Enclosure::point(qr.clone())];
    let opts = TailOptions::default();
    for i in 1..=spec.m() {
        point.push(spec.convergent(i, order)?.p);
        let err = error_enclosure_escalating(spec, i, order, precision_bits, &opts)?;
        form_values.push(err.scale(&qr));
    }
    point.push(q);
    let height = height(&point);
    if height <= BigInt::one() {
        return Err(Error::refused("height 1 gives no exponent"));
    }
    let product = form_values.iter().skip(1).fold(form_values[0].clone(), |acc, f| acc.mul(f));
    let product_logmag = to_logmag(product.upper());
    let delta_prime_max = if product.upper().is_zero() {
        DeltaPrime::Infinite
    } else {
        if !product.lower().is_positive() {
            return Err(Error::refused_with_hint(
                format!("form product at N = {order} is not bounded away from zero"),
                "raise the precision",
            ));
        }
        let lh = log2_bigint_abs(&height);
        let eh = crate::exact::Fixed::from_raw(1 << 8);
        let num = -(product_logmag.log2mag() + product_logmag.err());
        let den = if num.is_negative() { lh - eh } else { lh + eh };
        let d = num.ratio(den).expect("height above 1");
        let m = BigInt::from(1_000_000);
        DeltaPrime::Finite(BigRational::new((d * BigRational::from_integer(m.clone())).floor().to_integer(), m))
    };
    Ok(SubspaceInstance { order, point, height, form_values, product, product_logmag, delta_prime_max })
}

fn factored_rational(x: &BigRational) -> Result<(Factored, Factored)> {
    Ok((Factored::from_bigint(x.numer())?, Factored::from_bigint(x.denom())?))
}

/// `product <= H^{-delta'}`, decided on the product enclosure.
pub fn verify_forms_inequality(instance: &SubspaceInstance, delta_prime: &BigRational) -> Result<bool> {
    if !delta_prime.is_positive() {
        return Err(Error::Domain(format!("delta' = {delta_prime} must be positive")));
    }
    if instance.product.upper().is_zero() {
        return Ok(true);
    }
    let h = Factored::from_bigint(&instance.height)?;
    // Sign of log(x H^{delta'}) for an endpoint x.
    let side = |x: &BigRational| -> Result<Option<Ordering>> {
        if x.is_zero() {
            return Ok(Some(Ordering::Less));
        }
        let (n, d) = factored_rational(x)?;
        let terms = [PowerTerm::int(n, 1), PowerTerm::int(d, -1), PowerTerm::new(h.clone(), delta_prime.clone())];
        Ok(compare_product_with_one(&terms, DEFAULT_BIT_BUDGET).ordering)
    };
    match side(instance.product.upper())? {
        Some(Ordering::Less | Ordering::Equal) => return Ok(true),
        Some(Ordering::Greater) => {}
        None => return Err(Error::refused("forms inequality undecided within the size budget")),
    }
    match side(instance.product.lower())? {
        Some(Ordering::Greater) => Ok(false),
        _ => Err(Error::refused_with_hint("product enclosure straddles H^{-delta'}", "raise the precision")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::series::{corollary_series, SeriesMode};
    use crate::sequences::SequenceSpec;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn corollary_instance_at_three() {
        let inst = build_subspace_instance(&corollary_series(), 3, 64).unwrap();
        let strs: Vec<String> = inst.point.iter().map(|x| x.to_string()).collect();
        assert_eq!(strs, ["392", "528", "512"]);
        assert_eq!(inst.height, BigInt::from(528));
        // Oracle: 512 * (512 * 2^-18) * (512 * 3 * 2^-18) = 3 * 2^-9, up to the 2^-36 corrections.
        let oracle = r(3, 512);
        assert!(inst.product.lower() > &oracle);
        assert!(inst.product.upper() < &(oracle * r(1001, 1000)));
        let d = inst.delta_prime_max.to_f64();
        let expect = (9.0 - 3f64.log2()) / 528f64.log2();
        assert!((d - expect).abs() < 1e-5, "{d} vs {expect}");
        assert!(verify_forms_inequality(&inst, &r(1, 2)).unwrap());
        assert!(!verify_forms_inequality(&inst, &r(1, 1)).unwrap());
        assert!(matches!(verify_forms_inequality(&inst, &r(0, 1)), Err(Error::Domain(_))));
    }

    #[test]
    fn rational_values_give_zero_product() {
        let s = SeriesSpec::new(SeriesMode::SumDirect, vec![SequenceSpec::finite(vec![1.into(), 1.into()])], SequenceSpec::power(2)).unwrap();
        let inst = build_subspace_instance(&s, 3, 32).unwrap();
        assert_eq!(inst.delta_prime_max, DeltaPrime::Infinite);
        assert!(verify_forms_inequality(&inst, &r(1000, 1)).unwrap());
    }

    #[test]
    fn geometric_single_series() {
        // beta = 1, b_n = 2^n, N = 2: point (6, 8), product = 8 * (8 * 1/4) = 16.
        let s = SeriesSpec::new(SeriesMode::SumDirect, vec![SequenceSpec::constant(1)], SequenceSpec::power(2)).unwrap();
        let inst = build_subspace_instance(&s, 2, 16).unwrap();
        assert_eq!(inst.height, BigInt::from(8));
        assert!(inst.product.contains(&r(16, 1)));
        assert!(!inst.delta_prime_max.is_at_least(&BigRational::zero()));
    }

    #[test]
    fn serializes_as_strings() {
        let inst = build_subspace_instance(&corollary_series(), 3, 64).unwrap();
        let json = serde_json::to_value(&inst).unwrap();
        assert_eq!(json["height"], "528");
        assert_eq!(json["point"][0], "392");
        assert!(json["delta_prime_max"].as_str().unwrap().starts_with("0.81"));
    }
}
