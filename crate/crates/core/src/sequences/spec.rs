use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::arith::{sieve, ArithFn};
use crate::error::{Error, Result};
use crate::exact::{log2_bigint_abs, Factored, Fixed, LogMag, Sign, DEFAULT_BIT_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    Constant(BigInt),
    DivisorCount,
    Sigma,
    Totient,
    /// Coefficients in ascending degree.
    Polynomial(Vec<BigInt>),
    /// `base^n`.
    Power(BigInt),
    /// Finite table; lookups past the end fail.
    Table(Vec<BigInt>),
    /// Finite table followed by zeros.
    Finite(Vec<BigInt>),
    /// `b_1 = seed`, `b_{n+1} = (b_1 ... b_n)^power`.
    PrefixRecurrence { seed: BigUint, power: u32 },
}

/// A sequence family with an index offset: term `n` is `f(n + offset - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    kind: SequenceKind,
    offset: u64,
}

/// Consecutive values starting at index `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceWindow {
    pub start: u64,
    pub values: Vec<BigInt>,
}

impl SequenceWindow {
    pub fn get(&self, n: u64) -> Option<&BigInt> {
        n.checked_sub(self.start).and_then(|j| self.values.get(j as usize))
    }
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

impl SequenceSpec {
    pub fn new(kind: SequenceKind) -> Self {
        SequenceSpec { kind, offset: 1 }
    }

    pub fn with_offset(mut self, offset: u64) -> Result<Self> {
        if offset == 0 {
            return Err(Error::Domain("sequence offset must be positive".into()));
        }
        self.offset = offset;
        Ok(self)
    }

    pub fn constant(k: i64) -> Self {
        SequenceSpec::new(SequenceKind::Constant(k.into()))
    }

    pub fn divisor_count() -> Self {
        SequenceSpec::new(SequenceKind::DivisorCount)
    }

    pub fn sigma() -> Self {
        SequenceSpec::new(SequenceKind::Sigma)
    }

    pub fn totient() -> Self {
        SequenceSpec::new(SequenceKind::Totient)
    }

    pub fn polynomial(coeffs: &[i64]) -> Self {
        SequenceSpec::new(SequenceKind::Polynomial(ints(coeffs)))
    }

    pub fn power(base: i64) -> Self {
        SequenceSpec::new(SequenceKind::Power(base.into()))
    }

    pub fn table(values: Vec<BigInt>) -> Self {
        SequenceSpec::new(SequenceKind::Table(values))
    }

    pub fn finite(values: Vec<BigInt>) -> Self {
        SequenceSpec::new(SequenceKind::Finite(values))
    }

    pub fn prefix_square(seed: u64) -> Self {
        SequenceSpec::prefix_power(seed, 2)
    }

    pub fn prefix_power(seed: u64, power: u32) -> Self {
        SequenceSpec::new(SequenceKind::PrefixRecurrence { seed: BigUint::from(seed), power })
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    fn index(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::Domain("sequence indices start at 1".into()));
        }
        n.checked_add(self.offset - 1).ok_or_else(|| Error::TooLarge(format!("index {n}")))
    }

    /// Exponent `e_n` with `b_n = seed^{e_n}` for prefix recurrences.
    fn prefix_exponent(power: u32, x: u64) -> Result<u64> {
        if x == 1 {
            return Ok(1);
        }
        let k = power as u64;
        let grow = (k + 1).checked_pow((x - 2) as u32).and_then(|g| g.checked_mul(k));
        grow.ok_or_else(|| Error::TooLarge(format!("prefix recurrence exponent at index {x}")))
    }

    /// Exact value of term `n`.
    pub fn value(&self, n: u64) -> Result<BigInt> {
        let x = self.index(n)?;
        match &self.kind {
            SequenceKind::Constant(k) => Ok(k.clone()),
            SequenceKind::DivisorCount => Ok(ArithFn::DivisorCount.eval(x)?.into()),
            SequenceKind::Sigma => Ok(ArithFn::Sigma.eval(x)?.into()),
            SequenceKind::Totient => Ok(ArithFn::Totient.eval(x)?.into()),
            SequenceKind::Polynomial(c) => {
                let xb = BigInt::from(x);
                Ok(c.iter().rev().fold(BigInt::zero(), |acc, a| acc * &xb + a))
            }
            SequenceKind::Power(base) => {
                let bits = base.bits().saturating_mul(x);
                if bits > DEFAULT_BIT_BUDGET {
                    return Err(Error::TooLarge(format!("{base}^{x} needs about {bits} bits")));
                }
                Ok(num_traits::pow(base.clone(), x as usize))
            }
            SequenceKind::Table(v) => v
                .get((x - 1) as usize)
                .cloned()
                .ok_or(Error::TableOutOfRange { index: x, len: v.len() }),
            SequenceKind::Finite(v) => Ok(v.get((x - 1) as usize).cloned().unwrap_or_default()),
            SequenceKind::PrefixRecurrence { .. } => self.factored(n)?.to_bigint(DEFAULT_BIT_BUDGET),
        }
    }

    /// Term `n` as `2^k * odd`; requires a positive value. Prefix recurrences
    /// over a power-of-two seed never materialize the integer.
    pub fn factored(&self, n: u64) -> Result<Factored> {
        match &self.kind {
            SequenceKind::PrefixRecurrence { seed, power } => {
                let x = self.index(n)?;
                let e = SequenceSpec::prefix_exponent(*power, x)?;
                Factored::from_biguint(seed)?.pow(e, DEFAULT_BIT_BUDGET)
            }
            SequenceKind::Power(base) if base.is_positive() => {
                let x = self.index(n)?;
                Factored::from_bigint(base)?.pow(x, DEFAULT_BIT_BUDGET)
            }
            _ => Factored::from_bigint(&self.value(n)?),
        }
    }

    /// Signed log2 magnitude of term `n`.
    pub fn log2(&self, n: u64) -> Result<LogMag> {
        match &self.kind {
            SequenceKind::PrefixRecurrence { .. } => Ok(self.factored(n)?.log2()),
            SequenceKind::Power(base) if !base.is_zero() => {
                let x = self.index(n)?;
                let sign = if base.is_negative() && x % 2 == 1 { Sign::Negative } else { Sign::Positive };
                let l = log2_bigint_abs(base);
                let exact = base.magnitude().count_ones() == 1;
                let raw = l.raw().checked_mul(x as i128).ok_or_else(|| Error::TooLarge("log2 of power".into()))?;
                let err = if exact { Fixed::ZERO } else { Fixed::from_raw(256i128.saturating_mul(x as i128)) };
                Ok(LogMag::new(sign, Fixed::from_raw(raw), err))
            }
            _ => Ok(crate::exact::to_logmag(&BigInt::into(self.value(n)?))),
        }
    }

    /// First index from which every term is zero, when known.
    pub fn zero_from(&self) -> Option<u64> {
        let first_zero_x = match &self.kind {
            SequenceKind::Constant(k) if k.is_zero() => 1,
            SequenceKind::Polynomial(c) if c.iter().all(Zero::is_zero) => 1,
            SequenceKind::Power(b) if b.is_zero() => 1,
            SequenceKind::Finite(v) => {
                let last_nonzero = v.iter().rposition(|x| !x.is_zero()).map(|p| p + 1).unwrap_or(0);
                last_nonzero as u64 + 1
            }
            _ => return None,
        };
        Some(first_zero_x.saturating_sub(self.offset - 1).max(1))
    }

    /// True when every term is known to be nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        match &self.kind {
            SequenceKind::Constant(k) => !k.is_negative(),
            SequenceKind::DivisorCount | SequenceKind::Sigma | SequenceKind::Totient => true,
            SequenceKind::PrefixRecurrence { .. } => true,
            SequenceKind::Polynomial(c) => c.iter().all(|a| !a.is_negative()),
            SequenceKind::Power(b) => !b.is_negative(),
            SequenceKind::Table(v) | SequenceKind::Finite(v) => v.iter().all(|a| !a.is_negative()),
        }
    }

    /// Terms `start..=end`; arithmetic functions are sieved.
    pub fn window(&self, start: u64, end: u64) -> Result<SequenceWindow> {
        if start == 0 || end < start {
            return Err(Error::Domain(format!("invalid window [{start}, {end}]")));
        }
        let arith = match self.kind {
            SequenceKind::DivisorCount => Some(ArithFn::DivisorCount),
            SequenceKind::Sigma => Some(ArithFn::Sigma),
            SequenceKind::Totient => Some(ArithFn::Totient),
            _ => None,
        };
        let values = match arith {
            Some(f) if end - start > 64 => {
                let lo = self.index(start)?;
                let hi = self.index(end)?;
                let all = sieve(f, hi)?;
                all[(lo - 1) as usize..].iter().map(|&v| BigInt::from(v)).collect()
            }
            _ => (start..=end).map(|n| self.value(n)).collect::<Result<Vec<_>>>()?,
        };
        Ok(SequenceWindow { start, values })
    }
}

/// Sieved window `f(1..=n)` of an arithmetic function.
pub fn sieve_window(f: ArithFn, n: u64) -> Result<SequenceWindow> {
    Ok(SequenceWindow { start: 1, values: sieve(f, n)?.into_iter().map(BigInt::from).collect() })
}

/// `b_1 = 2`, `b_{n+1} = (b_1 ... b_n)^2`, computed by the recurrence itself.
pub fn corollary_denominators(n: u64) -> Result<SequenceWindow> {
    if n == 0 {
        return Err(Error::Domain("need at least one term".into()));
    }
    let mut values = vec![BigUint::from(2u32)];
    let mut prefix = BigUint::from(2u32);
    for _ in 1..n {
        let next = &prefix * &prefix;
        if next.bits() > DEFAULT_BIT_BUDGET {
            return Err(Error::TooLarge(format!("term needs {} bits", next.bits())));
        }
        prefix *= &next;
        values.push(next);
    }
    Ok(SequenceWindow { start: 1, values: values.into_iter().map(BigInt::from).collect() })
}

/// The Corollary's denominators as a [`SequenceSpec`].
pub fn corollary_denominator_spec() -> SequenceSpec {
    SequenceSpec::prefix_square(2)
}

fn join(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SequenceKind::Constant(k) => write!(f, "constant({k})")?,
            SequenceKind::DivisorCount => f.write_str("divisor-count")?,
            SequenceKind::Sigma => f.write_str("sigma")?,
            SequenceKind::Totient => f.write_str("totient")?,
            SequenceKind::Polynomial(c) => write!(f, "polynomial({})", join(c))?,
            SequenceKind::Power(b) => write!(f, "power({b})")?,
            SequenceKind::Table(v) => write!(f, "table({})", join(v))?,
            SequenceKind::Finite(v) => write!(f, "finite({})", join(v))?,
            SequenceKind::PrefixRecurrence { seed, power: 2 } => write!(f, "prefix-square-recurrence({seed})")?,
            SequenceKind::PrefixRecurrence { seed, power } => write!(f, "prefix-power-recurrence({seed},{power})")?,
        }
        if self.offset != 1 {
            write!(f, "@{}", self.offset)?;
        }
        Ok(())
    }
}

impl Serialize for SequenceSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_ints(args: &str) -> Result<Vec<BigInt>> {
    if args.trim().is_empty() {
        return Ok(Vec::new());
    }
    args.split(',')
        .map(|a| a.trim().parse::<BigInt>().map_err(|_| Error::Domain(format!("not an integer: `{}`", a.trim()))))
        .collect()
}

fn single<T: Clone>(v: &[T], kind: &str) -> Result<T> {
    match v {
        [x] => Ok(x.clone()),
        _ => Err(Error::Domain(format!("{kind} takes exactly one argument"))),
    }
}

impl FromStr for SequenceSpec {
    type Err = Error;

    /// Parses `kind`, `kind(args)` and an optional `@offset` suffix.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, offset) = match s.rsplit_once('@') {
            Some((b, o)) => {
                let o = o.trim().parse::<u64>().map_err(|_| Error::Domain(format!("bad offset `{o}`")))?;
                (b.trim(), o)
            }
            None => (s, 1),
        };
        let (name, args) = match body.find('(') {
            Some(i) if body.ends_with(')') => (&body[..i], Some(&body[i + 1..body.len() - 1])),
            Some(_) => return Err(Error::Domain(format!("unbalanced parentheses in `{body}`"))),
            None => (body, None),
        };
        let args = args.map(parse_ints).transpose()?;
        let need = |kind: &str| args.clone().ok_or_else(|| Error::Domain(format!("{kind} needs arguments")));
        let no_args = |kind: SequenceKind| {
            if args.is_some() {
                Err(Error::Domain(format!("`{name}` takes no arguments")))
            } else {
                Ok(kind)
            }
        };
        let kind = match name.trim() {
            "constant" => SequenceKind::Constant(single(&need(name)?, name)?),
            "divisor-count" => no_args(SequenceKind::DivisorCount)?,
            "sigma" => no_args(SequenceKind::Sigma)?,
            "totient" => no_args(SequenceKind::Totient)?,
            "polynomial" => SequenceKind::Polynomial(need(name)?),
            "power" => SequenceKind::Power(single(&need(name)?, name)?),
            "table" => SequenceKind::Table(need(name)?),
            "finite" => SequenceKind::Finite(need(name)?),
            "prefix-square-recurrence" | "prefix-power-recurrence" => {
                let a = need(name)?;
                let (seed, power) = match (name, a.as_slice()) {
                    ("prefix-square-recurrence", [s]) => (s.clone(), 2u32),
                    ("prefix-power-recurrence", [s, p]) => {
                        (s.clone(), p.to_u32().ok_or_else(|| Error::Domain(format!("bad power {p}")))?)
                    }
                    _ => return Err(Error::Domain(format!("wrong number of arguments for {name}"))),
                };
                if seed < BigInt::one() || power == 0 {
                    return Err(Error::Domain("prefix recurrence needs seed >= 1 and power >= 1".into()));
                }
                SequenceKind::PrefixRecurrence { seed: seed.magnitude().clone(), power }
            }
            other => return Err(Error::Domain(format!("unknown sequence kind `{other}`"))),
        };
        SequenceSpec::new(kind).with_offset(offset)
    }
}
