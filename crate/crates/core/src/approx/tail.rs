//! Certified tails: exact lookahead terms plus a remainder from a term-ratio
//! certificate, and the geometric, power and product bounds.
//!
//! Ratio certificates are checked over a finite horizon of terms past the
//! lookahead; the remainder bound extrapolates the worst ratio seen there.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::series::{SeriesMode, SeriesSpec};
use crate::criteria::conditions::root_step_margin;
use crate::error::{Error, Result};
use crate::exact::{compare_product_with_one, pow_enclosure, to_logmag, Enclosure, Factored, Fixed, LogMag, PowerTerm, DEFAULT_BIT_BUDGET};

/// Ratios at or below `2^-64` are certified in the log domain and capped at
/// `2^-4096` so remainders stay small rationals.
const LOG_RATIO_CUTOFF: i64 = -64;
const RATIO_FLOOR_LOG2: i64 = -4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailOptions {
    /// Number of ratios checked past the lookahead.
    pub horizon: u64,
    /// Lookahead cap for precision escalation.
    pub max_lookahead: u64,
}

impl Default for TailOptions {
    fn default() -> Self {
        TailOptions { horizon: 6, max_lookahead: 64 }
    }
}

/// Bracket of `sum_{n > N} t_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tail {
    pub enclosure: Enclosure,
    /// `sum_{N < n <= N + K} t_n`.
    pub partial: BigRational,
    /// Certified bound on `|sum_{n > N + K} t_n|`.
    pub remainder: BigRational,
    pub lookahead: u64,
    /// Ratio bound used for the remainder; `None` when the tail is finite.
    pub ratio: Option<BigRational>,
}

fn sum_terms(spec: &SeriesSpec, i: usize, from: u64, to: u64) -> Result<BigRational> {
    let mut s = BigRational::zero();
    for n in from..=to {
        s += spec.term(i, n)?;
    }
    Ok(s)
}

/// Ratio bound `r < 1` with `|t_{n+1}| <= r |t_n|` for `n` in `start..start+horizon`.
fn ratio_certificate(spec: &SeriesSpec, i: usize, start: u64, horizon: u64) -> Result<BigRational> {
    let refuse = |why: String| Error::refused_with_hint(why, "increase N or use a denominator sequence with faster growth");
    let mut logs = Vec::with_capacity(horizon as usize + 1);
    for n in start..=start + horizon {
        match spec.term_log2(i, n)? {
            Some(l) => logs.push(l),
            None => return Err(refuse(format!("zero term at n = {n} inside the ratio horizon"))),
        }
    }
    let ratios: Vec<(Fixed, Fixed)> = logs.windows(2).map(|w| (w[1].0 - w[0].0, w[1].1 + w[0].1)).collect();
    let upper = ratios.iter().map(|(l, e)| *l + *e).max().expect("horizon >= 1");
    if !upper.is_negative() {
        return Err(refuse(format!("term ratio reaches 2^{} >= 1 within the horizon", upper.to_decimal(3))));
    }
    if upper <= Fixed::from_int(LOG_RATIO_CUTOFF) {
        for w in ratios.windows(2) {
            if w[1].0 > w[0].0 + w[0].1 + w[1].1 {
                return Err(refuse("term ratios increase over the horizon".into()));
            }
        }
        let k = Fixed::ceil_rational(&upper.to_rational()).map(|f| f.raw() >> 64).unwrap_or(0) as i64;
        let k = k.max(RATIO_FLOOR_LOG2);
        return Ok(BigRational::new(BigInt::one(), BigInt::one() << (-k) as u64));
    }
    let mut exact = Vec::with_capacity(horizon as usize);
    let mut prev = spec.term(i, start)?.abs();
    for n in start + 1..=start + horizon {
        let next = spec.term(i, n)?.abs();
        exact.push(&next / &prev);
        prev = next;
    }
    if exact.windows(2).any(|w| w[1] > w[0]) {
        return Err(refuse("term ratios increase over the horizon".into()));
    }
    let r = exact.into_iter().max().expect("horizon >= 1");
    if r >= BigRational::one() {
        return Err(refuse(format!("term ratio {r} is not below 1")));
    }
    Ok(r)
}

/// Encloses `sum_{n > N} t_n` using `K` exact terms and a certified remainder.
/// Eventually-zero coefficient sequences give an exact point.
pub fn tail_enclosure(spec: &SeriesSpec, i: usize, order: u64, lookahead: u64) -> Result<Tail> {
    tail_enclosure_with(spec, i, order, lookahead, &TailOptions::default())
}

pub fn tail_enclosure_with(spec: &SeriesSpec, i: usize, order: u64, lookahead: u64, opts: &TailOptions) -> Result<Tail> {
    if lookahead == 0 {
        return Err(Error::Precondition("lookahead K must be at least 1".into()));
    }
    let c = spec.coefficient(i)?;
    if let Some(z) = c.zero_from() {
        let partial = if z > order + 1 { sum_terms(spec, i, order + 1, z - 1)? } else { BigRational::zero() };
        return Ok(Tail {
            enclosure: Enclosure::point(partial.clone()),
            partial,
            remainder: BigRational::zero(),
            lookahead: z.saturating_sub(order + 1),
            ratio: None,
        });
    }
    let last = order + lookahead;
    let partial = sum_terms(spec, i, order + 1, last)?;
    let r = ratio_certificate(spec, i, last, opts.horizon.max(1))?;
    let t_last = spec.term(i, last)?.abs();
    let remainder = &t_last * &r / (BigRational::one() - &r);
    let enclosure = if c.is_nonnegative() {
        Enclosure::new(partial.clone(), &partial + &remainder)?
    } else {
        Enclosure::new(&partial - &remainder, &partial + &remainder)?
    };
    Ok(Tail { enclosure, partial, remainder, lookahead, ratio: Some(r) })
}

/// Encloses `|beta_i - p_{i,N}/q_N|` with lookahead `K`.
pub fn error_enclosure(spec: &SeriesSpec, i: usize, order: u64, lookahead: u64) -> Result<Enclosure> {
    let tail = tail_enclosure(spec, i, order, lookahead)?;
    match spec.mode() {
        SeriesMode::SumDirect | SeriesMode::SumPrefix => Ok(tail.enclosure.abs()),
        SeriesMode::Product => {
            if !spec.coefficient(i)?.is_nonnegative() {
                return Err(Error::refused("product error enclosure needs nonnegative coefficients"));
            }
            let quarter = BigRational::new(1.into(), 4.into());
            if tail.remainder > quarter {
                return Err(Error::refused_with_hint("product remainder exceeds 1/4", "increase the lookahead"));
            }
            let beta_n = spec.convergent(i, order)?.value();
            let mut pi_k = BigRational::one();
            for n in order + 1..=order + tail.lookahead {
                pi_k *= BigRational::one() + spec.term(i, n)?;
            }
            let one = BigRational::one();
            let two = BigRational::from_integer(2.into());
            let lower = &beta_n * (&pi_k - &one);
            let upper = &beta_n * (&pi_k * (&one + two * &tail.remainder) - &one);
            Enclosure::new(lower, upper)
        }
    }
}

/// Doubles the lookahead until the error enclosure has relative width at most
/// `2^-rel_bits`, up to `opts.max_lookahead`.
pub fn error_enclosure_escalating(spec: &SeriesSpec, i: usize, order: u64, rel_bits: u64, opts: &TailOptions) -> Result<Enclosure> {
    let mut k = 1;
    let mut last_err = None;
    while k <= opts.max_lookahead {
        match error_enclosure(spec, i, order, k) {
            Ok(e) => {
                if e.is_point() {
                    return Ok(e);
                }
                if e.lower().is_positive() {
                    let limit = e.lower() / BigRational::from_integer(BigInt::one() << rel_bits);
                    if e.width() <= limit {
                        return Ok(e);
                    }
                }
            }
            Err(err @ Error::Refused { .. }) => last_err = Some(err),
            Err(Error::TooLarge(msg)) => {
                return Err(Error::refused_with_hint(format!("operands too large at lookahead {k}: {msg}"), "lower N or the precision target"));
            }
            Err(e) => return Err(e),
        }
        k *= 2;
    }
    Err(last_err.unwrap_or_else(|| {
        Error::refused_with_hint(
            format!("error enclosure wider than 2^-{rel_bits} relative after lookahead {}", opts.max_lookahead),
            "raise the lookahead cap or lower the precision",
        )
    }))
}

/// A certified upper bound on a tail or error, with its log2 view.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailBound {
    pub kind: &'static str,
    #[serde(skip)]
    pub upper: BigRational,
    #[serde(serialize_with = "crate::approx::serialize_logmag")]
    pub logmag: LogMag,
}

impl TailBound {
    fn new(kind: &'static str, upper: BigRational) -> Self {
        let logmag = to_logmag(&upper);
        TailBound { kind, upper, logmag }
    }
}

fn require_sum_mode(spec: &SeriesSpec, what: &str) -> Result<()> {
    if spec.mode() == SeriesMode::Product {
        return Err(Error::Precondition(format!("{what} applies to series, not products")));
    }
    Ok(())
}

fn factored_abs(v: &BigInt) -> Result<Option<Factored>> {
    if v.is_zero() {
        Ok(None)
    } else {
        Factored::from_biguint(v.magnitude()).map(Some)
    }
}

fn term_denominator(spec: &SeriesSpec, n: u64) -> Result<Factored> {
    match spec.mode() {
        SeriesMode::SumPrefix => spec.q_factored(n),
        _ => spec.b_factored(n),
    }
}

/// `|t_{N+1}| A/(A-1)`, valid when `|t_n| >= A |t_{n+1}|` for `n >= N`
/// (checked exactly over `N..=N+horizon`).
pub fn geometric_tail_bound(spec: &SeriesSpec, i: usize, order: u64, a: &BigRational, horizon: u64) -> Result<TailBound> {
    require_sum_mode(spec, "the geometric bound")?;
    let one = BigRational::one();
    if *a <= one {
        return Err(Error::Precondition(format!("A = {a} must exceed 1")));
    }
    let c = spec.coefficient(i)?;
    let a_num = Factored::from_biguint(a.numer().magnitude())?;
    let a_den = Factored::from_biguint(a.denom().magnitude())?;
    for n in order.max(1)..=order + horizon {
        let cn = factored_abs(&c.value(n)?)?;
        let cn1 = factored_abs(&c.value(n + 1)?)?;
        let ok = match (cn, cn1) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(cn), Some(cn1)) => {
                let terms = [
                    PowerTerm::int(cn, 1),
                    PowerTerm::int(term_denominator(spec, n + 1)?, 1),
                    PowerTerm::int(cn1, -1),
                    PowerTerm::int(term_denominator(spec, n)?, -1),
                    PowerTerm::int(a_num.clone(), -1),
                    PowerTerm::int(a_den.clone(), 1),
                ];
                match compare_product_with_one(&terms, DEFAULT_BIT_BUDGET).ordering {
                    Some(Ordering::Less) => false,
                    Some(_) => true,
                    None => return Err(Error::refused(format!("ratio test at n = {n} undecided within budget"))),
                }
            }
        };
        if !ok {
            return Err(Error::refused(format!("term ratio at n = {n} is below A = {a}")));
        }
    }
    let t = spec.term(i, order + 1)?.abs();
    Ok(TailBound::new("geometric", t * a / (a - one)))
}

/// `(1/eps) (x^{1/(1+eps)} - 1)^{-eps}` with `x = b_{N+1}/c_{N+1}`, valid when
/// the root-step inequality holds from `N` on (checked over `N..=N+horizon`).
pub fn power_tail_bound(spec: &SeriesSpec, i: usize, order: u64, epsilon: &BigRational, horizon: u64) -> Result<TailBound> {
    if spec.mode() != SeriesMode::SumDirect {
        return Err(Error::Precondition("the power bound applies to sum-direct series".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::Precondition(format!("epsilon = {epsilon} must be positive")));
    }
    let c = spec.coefficient(i)?;
    let s = (BigRational::one() + epsilon).recip();
    let positive = |n: u64| -> Result<Factored> {
        let v = c.value(n)?;
        if !v.is_positive() {
            return Err(Error::refused(format!("power bound needs positive coefficients; c_{n} = {v}")));
        }
        Factored::from_bigint(&v)
    };
    for n in order.max(1)..=order + horizon {
        let m = root_step_margin(
            n,
            i,
            (&spec.b_factored(n + 1)?, &positive(n + 1)?),
            (&spec.b_factored(n)?, &positive(n)?),
            &s,
            DEFAULT_BIT_BUDGET,
        );
        match m.holds {
            Some(true) => {}
            Some(false) => return Err(Error::refused(format!("root-step inequality fails at n = {n}"))),
            None => return Err(Error::refused(format!("root-step inequality undecided at n = {n}"))),
        }
    }
    let x = BigRational::new(spec.b_factored(order + 1)?.to_bigint(DEFAULT_BIT_BUDGET)?, c.value(order + 1)?);
    let root = pow_enclosure(&x, &s, 96, DEFAULT_BIT_BUDGET)?;
    let base = root.lower() - BigRational::one();
    if !base.is_positive() {
        return Err(Error::refused("x^{1/(1+eps)} is not certified above 1"));
    }
    let inv = pow_enclosure(&base, &-epsilon.clone(), 96, DEFAULT_BIT_BUDGET)?;
    Ok(TailBound::new("power", inv.upper() / epsilon))
}

/// `3 beta_{i,N} sum_{n>N} c_n/b_n` for products, valid once the tail sum is
/// certified below 1/4 and `0 <= c_n <= b_n` on `1..=N+horizon`.
pub fn product_tail_bound(spec: &SeriesSpec, i: usize, order: u64, horizon: u64) -> Result<TailBound> {
    if spec.mode() != SeriesMode::Product {
        return Err(Error::Precondition("the product bound applies to product mode".into()));
    }
    let c = spec.coefficient(i)?;
    for n in 1..=order + horizon {
        let v = c.value(n)?;
        let b = spec.b_factored(n)?.to_bigint(DEFAULT_BIT_BUDGET)?;
        if v.is_negative() || v > b {
            return Err(Error::refused(format!("c_{n} = {v} is outside [0, b_{n}]")));
        }
    }
    let tail = tail_enclosure(spec, i, order, 2)?;
    let quarter = BigRational::new(1.into(), 4.into());
    if tail.enclosure.upper() >= &quarter {
        return Err(Error::refused_with_hint("tail sum not certified below 1/4", "increase N"));
    }
    let beta_n = spec.convergent(i, order)?.value();
    // Coarse growth check: beta_N <= 2^N whenever c_n <= b_n.
    debug_assert!(order > 62 || beta_n <= BigRational::from_integer(BigInt::one() << order));
    let three = BigRational::from_integer(3.into());
    Ok(TailBound::new("product", three * beta_n * tail.enclosure.upper()))
}

/// True when `prod_{n <= N} (1 + c_n/b_n) <= 2^N`.
pub fn product_growth_within_pow2(spec: &SeriesSpec, i: usize, order: u64) -> Result<bool> {
    let beta_n = spec.convergent(i, order)?.value();
    Ok(beta_n <= BigRational::from_integer(BigInt::one() << order.to_usize().unwrap_or(usize::MAX)))
}

/// Encloses `beta_i` to absolute width `2^-precision_bits`, doubling `N`
/// until the bracket is narrow enough.
pub fn value_enclosure(spec: &SeriesSpec, i: usize, precision_bits: u64) -> Result<Enclosure> {
    let target = BigRational::new(BigInt::one(), BigInt::one() << precision_bits);
    let mut order = 1u64;
    let mut last = None;
    while order <= 1 << 14 {
        let attempt = (|| -> Result<Enclosure> {
            let base = spec.convergent(i, order)?.value();
            match spec.mode() {
                SeriesMode::Product => {
                    let err = error_enclosure(spec, i, order, 1)?;
                    Ok(err.shift(&base))
                }
                _ => Ok(tail_enclosure(spec, i, order, 1)?.enclosure.shift(&base)),
            }
        })();
        match attempt {
            Ok(e) if e.width() <= target => return Ok(e),
            Ok(_) => {}
            Err(Error::TooLarge(msg)) => {
                return Err(Error::refused_with_hint(
                    format!("operands too large at N = {order} before reaching 2^-{precision_bits}: {msg}"),
                    "lower the precision",
                ))
            }
            Err(e @ Error::Refused { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        order *= 2;
    }
    Err(last.unwrap_or_else(|| Error::refused_with_hint(format!("no enclosure of width 2^-{precision_bits} found"), "lower the precision")))
}
