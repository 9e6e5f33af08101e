use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Factored, Fixed, DEFAULT_BIT_BUDGET};
use crate::sequences::{corollary_denominator_spec, SequenceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesMode {
    /// `sum c_n / b_n`
    SumDirect,
    /// `sum c_n / (b_1 ... b_n)`
    SumPrefix,
    /// `prod (1 + c_n / b_n)`
    Product,
}

impl SeriesMode {
    pub fn name(self) -> &'static str {
        match self {
            SeriesMode::SumDirect => "sum-direct",
            SeriesMode::SumPrefix => "sum-prefix",
            SeriesMode::Product => "product",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sum-direct" => Ok(SeriesMode::SumDirect),
            "sum-prefix" => Ok(SeriesMode::SumPrefix),
            "product" => Ok(SeriesMode::Product),
            other => Err(Error::Domain(format!("unknown series mode `{other}`"))),
        }
    }
}

/// Append-only cache of `b_n` and `b_1 ... b_n`, shared between clones.
#[derive(Debug, Default)]
struct PrefixCache {
    b: RwLock<Vec<Factored>>,
    prefix: RwLock<Vec<Factored>>,
}

/// `m` coefficient sequences over one denominator sequence.
#[derive(Clone, Debug)]
pub struct SeriesSpec {
    mode: SeriesMode,
    coefficients: Vec<SequenceSpec>,
    denominators: SequenceSpec,
    delta: BigRational,
    epsilon: Option<BigRational>,
    /// Enforce `c_{i,n} <= b_n` (the product-transcendence pipeline).
    bounded_coefficients: bool,
    cache: Arc<PrefixCache>,
}

impl PartialEq for SeriesSpec {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode
            && self.coefficients == other.coefficients
            && self.denominators == other.denominators
            && self.delta == other.delta
            && self.epsilon == other.epsilon
            && self.bounded_coefficients == other.bounded_coefficients
    }
}

/// `p / q` with `q = b_1 ... b_N` exactly (not reduced).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub series: usize,
    pub order: u64,
    #[serde(serialize_with = "crate::approx::serialize_bigint")]
    pub p: BigInt,
    #[serde(serialize_with = "crate::approx::serialize_bigint")]
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

fn product_tree(mut xs: Vec<BigInt>) -> BigInt {
    if xs.is_empty() {
        return BigInt::one();
    }
    while xs.len() > 1 {
        xs = xs.chunks(2).map(|c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() }).collect();
    }
    xs.pop().expect("nonempty")
}

impl SeriesSpec {
    pub fn new(mode: SeriesMode, coefficients: Vec<SequenceSpec>, denominators: SequenceSpec) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Domain("a series needs at least one coefficient sequence".into()));
        }
        Ok(SeriesSpec {
            mode,
            coefficients,
            denominators,
            delta: BigRational::zero(),
            epsilon: None,
            bounded_coefficients: false,
            cache: Arc::default(),
        })
    }

    pub fn with_delta(mut self, delta: BigRational) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_epsilon(mut self, epsilon: Option<BigRational>) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_bounded_coefficients(mut self, on: bool) -> Self {
        self.bounded_coefficients = on;
        self
    }

    pub fn mode(&self) -> SeriesMode {
        self.mode
    }

    pub fn m(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[SequenceSpec] {
        &self.coefficients
    }

    pub fn coefficient(&self, i: usize) -> Result<&SequenceSpec> {
        if i == 0 || i > self.m() {
            return Err(Error::Domain(format!("series index {i} outside 1..={}", self.m())));
        }
        Ok(&self.coefficients[i - 1])
    }

    pub fn denominators(&self) -> &SequenceSpec {
        &self.denominators
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn epsilon(&self) -> Option<&BigRational> {
        self.epsilon.as_ref()
    }

    pub fn bounded_coefficients(&self) -> bool {
        self.bounded_coefficients
    }

    fn ensure_cached(&self, n: u64) -> Result<()> {
        if self.cache.prefix.read().expect("cache lock").len() as u64 >= n {
            return Ok(());
        }
        let mut b = self.cache.b.write().expect("cache lock");
        let mut prefix = self.cache.prefix.write().expect("cache lock");
        while (prefix.len() as u64) < n {
            let k = prefix.len() as u64 + 1;
            let bk = self.denominators.factored(k).map_err(|e| match e {
                Error::Domain(_) => Error::Domain(format!("denominator b_{k} must be a positive integer")),
                other => other,
            })?;
            let pk = match prefix.last() {
                Some(last) => last.mul(&bk)?,
                None => bk.clone(),
            };
            b.push(bk);
            prefix.push(pk);
        }
        Ok(())
    }

    /// `b_n` as a factored integer.
    pub fn b_factored(&self, n: u64) -> Result<Factored> {
        if n == 0 {
            return Err(Error::Domain("denominators start at n = 1".into()));
        }
        self.ensure_cached(n)?;
        Ok(self.cache.b.read().expect("cache lock")[(n - 1) as usize].clone())
    }

    /// `q_n = b_1 ... b_n` as a factored integer; `q_0 = 1`.
    pub fn q_factored(&self, n: u64) -> Result<Factored> {
        if n == 0 {
            return Ok(Factored::one());
        }
        self.ensure_cached(n)?;
        Ok(self.cache.prefix.read().expect("cache lock")[(n - 1) as usize].clone())
    }

    pub fn q(&self, n: u64) -> Result<BigInt> {
        self.q_factored(n)?.to_bigint(DEFAULT_BIT_BUDGET)
    }

    /// Denominator of the `n`-th term.
    fn term_denominator(&self, n: u64) -> Result<Factored> {
        match self.mode {
            SeriesMode::SumDirect | SeriesMode::Product => self.b_factored(n),
            SeriesMode::SumPrefix => self.q_factored(n),
        }
    }

    /// Exact `n`-th term `c_n / b_n` (or `c_n / q_n` in prefix mode). In
    /// product mode this is the increment inside `1 + c_n/b_n`.
    pub fn term(&self, i: usize, n: u64) -> Result<BigRational> {
        let c = self.coefficient(i)?.value(n)?;
        if c.is_zero() {
            return Ok(BigRational::zero());
        }
        Ok(BigRational::new(c, self.term_denominator(n)?.to_bigint(DEFAULT_BIT_BUDGET)?))
    }

    /// `log2 |t_n|` and its error radius; `None` for a zero term.
    pub fn term_log2(&self, i: usize, n: u64) -> Result<Option<(Fixed, Fixed)>> {
        let c = self.coefficient(i)?.value(n)?;
        if c.is_zero() {
            return Ok(None);
        }
        let lc = Factored::from_biguint(c.magnitude())?.log2();
        let ld = self.term_denominator(n)?.log2();
        Ok(Some((lc.log2mag() - ld.log2mag(), lc.err() + ld.err())))
    }

    fn check_bounded(&self, i: usize, n: u64, c: &BigInt) -> Result<()> {
        if self.bounded_coefficients {
            let b = self.denominators.value(n)?;
            if c > &b || c.is_negative() {
                return Err(Error::HypothesisViolation(format!("c_{{{i},{n}}} = {c} is outside [0, b_{n}]")));
            }
        }
        Ok(())
    }

    /// Exact convergent `p_{i,N} / q_N`.
    pub fn convergent(&self, i: usize, order: u64) -> Result<Convergent> {
        if order == 0 {
            return Err(Error::Domain("convergents start at N = 1".into()));
        }
        let c = self.coefficient(i)?;
        let q = self.q(order)?;
        let p = match self.mode {
            SeriesMode::SumDirect => {
                // p_N = p_{N-1} b_N + c_N q_{N-1}
                let mut p = BigInt::zero();
                let mut prev_q = BigInt::one();
                for n in 1..=order {
                    let b = self.b_factored(n)?.to_bigint(DEFAULT_BIT_BUDGET)?;
                    p = p * &b + c.value(n)? * &prev_q;
                    prev_q *= b;
                }
                p
            }
            SeriesMode::SumPrefix => {
                // p_N = p_{N-1} b_N + c_N
                let mut p = BigInt::zero();
                for n in 1..=order {
                    let b = self.b_factored(n)?.to_bigint(DEFAULT_BIT_BUDGET)?;
                    p = p * b + c.value(n)?;
                }
                p
            }
            SeriesMode::Product => {
                let mut factors = Vec::with_capacity(order as usize);
                for n in 1..=order {
                    let cn = c.value(n)?;
                    self.check_bounded(i, n, &cn)?;
                    let f = self.b_factored(n)?.to_bigint(DEFAULT_BIT_BUDGET)? + cn;
                    if !f.is_positive() {
                        return Err(Error::Domain(format!("factor 1 + c_{{{i},{n}}}/b_{n} is not positive")));
                    }
                    factors.push(f);
                }
                product_tree(factors)
            }
        };
        Ok(Convergent { series: i, order, p, q })
    }
}

/// The Corollary pair: `c_1 = 1`, `c_2 = d(n)` over `b_1 = 2`,
/// `b_{n+1} = (b_1 ... b_n)^2`, with `delta = 3/5`.
pub fn corollary_series() -> SeriesSpec {
    SeriesSpec::new(
        SeriesMode::SumDirect,
        vec![SequenceSpec::constant(1), SequenceSpec::divisor_count()],
        corollary_denominator_spec(),
    )
    .expect("two coefficient sequences")
    .with_delta(BigRational::new(3.into(), 5.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn corollary_convergents() {
        let s = corollary_series();
        let c1 = s.convergent(1, 3).unwrap();
        assert_eq!((c1.p.clone(), c1.q.clone()), (BigInt::from(392), BigInt::from(512)));
        assert_eq!(c1.value(), r(1, 2) + r(1, 4) + r(1, 64));
        let c2 = s.convergent(2, 3).unwrap();
        assert_eq!((c2.p, c2.q), (BigInt::from(528), BigInt::from(512)));
    }

    #[test]
    fn first_convergent_is_first_term() {
        let s = SeriesSpec::new(SeriesMode::SumDirect, vec![SequenceSpec::constant(1)], SequenceSpec::power(2)).unwrap();
        assert_eq!(s.convergent(1, 1).unwrap().value(), r(1, 2));
        assert!(s.convergent(2, 1).is_err());
        assert!(s.convergent(1, 0).is_err());
    }

    #[test]
    fn prefix_and_product_modes() {
        let s = SeriesSpec::new(SeriesMode::SumPrefix, vec![SequenceSpec::sigma()], SequenceSpec::constant(3)).unwrap();
        // 1/3 + 3/9 + 4/27
        assert_eq!(s.convergent(1, 3).unwrap().value(), r(1, 3) + r(3, 9) + r(4, 27));
        let p = SeriesSpec::new(SeriesMode::Product, vec![SequenceSpec::constant(1)], corollary_denominator_spec()).unwrap();
        let c = p.convergent(1, 3).unwrap();
        assert_eq!(c.value(), r(3, 2) * r(5, 4) * r(65, 64));
        assert!(c.p.is_positive());
    }

    #[test]
    fn bounded_pipeline_rejects_large_coefficients() {
        let p = SeriesSpec::new(SeriesMode::Product, vec![SequenceSpec::constant(5)], SequenceSpec::power(2))
            .unwrap()
            .with_bounded_coefficients(true);
        assert!(matches!(p.convergent(1, 3), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn cache_is_shared_between_clones() {
        let s = corollary_series();
        let t = s.clone();
        s.q(6).unwrap();
        assert!(t.cache.prefix.read().unwrap().len() >= 6);
        assert_eq!(t.q_factored(6).unwrap().twos(), 3u64.pow(5));
    }
}
