//! Finite-window checks of the growth hypotheses on coefficient and
//! denominator sequences.
//!
//! Asymptotic statements are replaced by explicit window surrogates:
//! "for all large n" is checked on the upper half of the window, limsup
//! conditions look for a record in the last quartile above a threshold, and
//! every verdict can be `Inconclusive`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{Decision, Factored, Fixed, DEFAULT_BIT_BUDGET};
use crate::sequences::SequenceSpec;

pub mod auxiliary;
pub mod conditions;
pub mod growth;

pub use auxiliary::{check_erdos_dn, check_hancl7, check_hancl8, check_prefix_power_bound};
pub use conditions::{check_condition1, check_condition2, check_theorem2_hypotheses, check_theorem_a};
pub use growth::{check_growth_window, check_ratio_vanishing, GrowthReport};

/// Inclusive index range `[start, end]`; empty when `end < start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Window {
    pub start: u64,
    pub end: u64,
}

impl Window {
    pub fn new(start: u64, end: u64) -> Result<Self> {
        if start == 0 {
            return Err(Error::Domain("window indices start at 1".into()));
        }
        if end + 1 < start {
            return Err(Error::Domain(format!("window [{start}, {end}] has negative length")));
        }
        Ok(Window { start, end })
    }

    pub fn empty() -> Self {
        Window { start: 1, end: 0 }
    }

    pub fn len(&self) -> u64 {
        (self.end + 1).saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<u64> {
        self.start..=self.end
    }

    /// First index of the upper half.
    pub fn tail_start(&self) -> u64 {
        self.start + self.len() / 2
    }

    /// First index of the last quartile.
    pub fn quartile_start(&self) -> u64 {
        self.start + (3 * self.len()) / 4
    }

    pub fn tail(&self) -> std::ops::RangeInclusive<u64> {
        self.tail_start()..=self.end
    }

    /// Windows shorter than 4 cannot support the asymptotic surrogates.
    pub fn supports_asymptotics(&self) -> bool {
        self.len() >= 4
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    SatisfiedOnWindow,
    ViolatedAt(u64),
    Inconclusive,
}

impl Verdict {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Verdict::SatisfiedOnWindow)
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::ViolatedAt(_))
    }

    /// Conjunction: earliest violation wins, then inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::ViolatedAt(a), Verdict::ViolatedAt(b)) => Verdict::ViolatedAt(a.min(b)),
            (v @ Verdict::ViolatedAt(_), _) | (_, v @ Verdict::ViolatedAt(_)) => v,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::SatisfiedOnWindow,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::SatisfiedOnWindow => f.write_str("satisfied-on-window"),
            Verdict::ViolatedAt(n) => write!(f, "violated-at({n})"),
            Verdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Increasing,
    Nondecreasing,
    Constant,
    Nonincreasing,
    Decreasing,
    Mixed,
    Empty,
}

impl Trend {
    pub fn of(values: &[Fixed]) -> Trend {
        if values.is_empty() {
            return Trend::Empty;
        }
        let pairs: Vec<_> = values.windows(2).map(|w| w[1].cmp(&w[0])).collect();
        use std::cmp::Ordering::*;
        let all = |o: std::cmp::Ordering| pairs.iter().all(|&p| p == o);
        if all(Equal) {
            Trend::Constant
        } else if all(Greater) {
            Trend::Increasing
        } else if all(Less) {
            Trend::Decreasing
        } else if pairs.iter().all(|&p| p != Less) {
            Trend::Nondecreasing
        } else if pairs.iter().all(|&p| p != Greater) {
            Trend::Nonincreasing
        } else {
            Trend::Mixed
        }
    }
}

fn serialize_fixed<S: Serializer>(x: &Fixed, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_decimal(6))
}

/// Signed slack of one inequality at one index, as `log2(rhs / lhs)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Margin {
    pub n: u64,
    /// Which inequality of the hypothesis this margin belongs to.
    pub part: &'static str,
    /// Coefficient sequence (1-based), when the inequality is per sequence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<usize>,
    /// Second sequence of a pairwise inequality.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub against: Option<usize>,
    #[serde(serialize_with = "serialize_fixed")]
    pub log2: Fixed,
    #[serde(skip)]
    pub err: Fixed,
    /// Exact truth of the inequality; `None` when the size budget ran out.
    pub holds: Option<bool>,
}

impl Margin {
    pub(crate) fn from_decision(n: u64, part: &'static str, series: Option<usize>, d: &Decision, strict: bool) -> Margin {
        let holds = d.ordering.map(|o| match o {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => !strict,
            std::cmp::Ordering::Less => false,
        });
        Margin { n, part, series, against: None, log2: d.log2, err: d.err, holds }
    }

    pub fn lower(&self) -> Fixed {
        self.log2 - self.err
    }

    pub fn upper(&self) -> Fixed {
        self.log2 + self.err
    }

    /// The inequality is certified false here.
    pub fn fails(&self) -> bool {
        self.holds == Some(false)
    }
}

/// Outcome of checking one hypothesis on one window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionVerdict {
    pub hypothesis: String,
    pub window: Window,
    pub verdict: Verdict,
    pub trend: Trend,
    pub margins: Vec<Margin>,
    /// Indices where all inequalities hold (Theorem 2 style hypotheses).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConditionVerdict {
    pub(crate) fn new(hypothesis: String, window: Window) -> Self {
        ConditionVerdict {
            hypothesis,
            window,
            verdict: Verdict::Inconclusive,
            trend: Trend::Empty,
            margins: Vec::new(),
            subset: None,
            notes: Vec::new(),
        }
    }

    pub fn margins_for(&self, part: &str) -> impl Iterator<Item = &Margin> {
        let part = part.to_string();
        self.margins.iter().filter(move |m| m.part == part)
    }
}

/// Tunable constants of the window surrogates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriteriaConfig {
    /// A limsup condition needs a log2 margin at least this large.
    pub limsup_threshold: Fixed,
    /// Ratio-vanishing needs the final ratio below this.
    pub ratio_threshold: BigRational,
    pub bit_budget: u64,
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        CriteriaConfig {
            limsup_threshold: Fixed::from_int(64),
            ratio_threshold: BigRational::new(1.into(), 16.into()),
            bit_budget: DEFAULT_BIT_BUDGET,
        }
    }
}

/// A hypothesis family with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypothesisSet {
    Condition1 { delta: BigRational },
    Condition2 { delta: BigRational, epsilon: BigRational },
    Theorem2 { delta: BigRational },
    TheoremA { delta: BigRational },
    GrowthWindow { m: u32 },
    RatioVanishing,
    Hancl7 { alpha: BigRational, epsilon: BigRational },
    Hancl8 { epsilon: BigRational },
    ErdosDn { delta: BigRational },
}

impl HypothesisSet {
    pub fn id(&self) -> String {
        match self {
            HypothesisSet::Condition1 { delta } => format!("condition1(delta={delta})"),
            HypothesisSet::Condition2 { delta, epsilon } => format!("condition2(delta={delta},epsilon={epsilon})"),
            HypothesisSet::Theorem2 { delta } => format!("theorem2(delta={delta})"),
            HypothesisSet::TheoremA { delta } => format!("theoremA(delta={delta})"),
            HypothesisSet::GrowthWindow { m } => format!("growth-window(m={m})"),
            HypothesisSet::RatioVanishing => "ratio-vanishing".to_string(),
            HypothesisSet::Hancl7 { alpha, epsilon } => format!("hancl7(alpha={alpha},epsilon={epsilon})"),
            HypothesisSet::Hancl8 { epsilon } => format!("hancl8(epsilon={epsilon})"),
            HypothesisSet::ErdosDn { delta } => format!("erdos-dn(delta={delta})"),
        }
    }

    /// Same family with `delta` replaced, where the family has one.
    pub fn with_delta(&self, d: &BigRational) -> HypothesisSet {
        let mut h = self.clone();
        match &mut h {
            HypothesisSet::Condition1 { delta }
            | HypothesisSet::Condition2 { delta, .. }
            | HypothesisSet::Theorem2 { delta }
            | HypothesisSet::TheoremA { delta }
            | HypothesisSet::ErdosDn { delta } => *delta = d.clone(),
            _ => {}
        }
        h
    }

    /// Same family with `epsilon` replaced, where the family has one.
    pub fn with_epsilon(&self, e: &BigRational) -> HypothesisSet {
        let mut h = self.clone();
        match &mut h {
            HypothesisSet::Condition2 { epsilon, .. } | HypothesisSet::Hancl7 { epsilon, .. } | HypothesisSet::Hancl8 { epsilon } => {
                *epsilon = e.clone()
            }
            _ => {}
        }
        h
    }

    /// Parameter constraints of the transcendence pipelines for `m` series:
    /// `delta > 1/m` for Condition 1 and `delta*eps/(1+eps) > 1/m` for
    /// Condition 2.
    pub fn check_pipeline(&self, m: usize) -> Result<()> {
        let inv_m = BigRational::new(1.into(), BigInt::from(m));
        match self {
            HypothesisSet::Condition1 { delta } if *delta <= inv_m => {
                Err(Error::Precondition(format!("delta = {delta} must exceed 1/m = {inv_m}")))
            }
            HypothesisSet::Condition2 { delta, epsilon } => {
                let one = BigRational::from_integer(1.into());
                let derived = delta * epsilon / (one + epsilon);
                if derived <= inv_m {
                    Err(Error::Precondition(format!("delta*eps/(1+eps) = {derived} must exceed 1/m = {inv_m}")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

pub(crate) fn require_positive(name: &str, x: &BigRational) -> Result<()> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

/// `b_1..b_upto` and their prefix products as factored integers.
pub(crate) struct Denominators {
    pub b: Vec<Factored>,
    pub prefix: Vec<Factored>,
}

impl Denominators {
    pub fn build(spec: &SequenceSpec, upto: u64) -> Result<Self> {
        let mut b = Vec::with_capacity(upto as usize);
        let mut prefix: Vec<Factored> = Vec::with_capacity(upto as usize);
        for n in 1..=upto {
            let v = spec.factored(n).map_err(|e| match e {
                Error::Domain(_) => Error::Domain(format!("denominator b_{n} must be a positive integer")),
                other => other,
            })?;
            let p = match prefix.last() {
                Some(last) => last.mul(&v)?,
                None => v.clone(),
            };
            b.push(v);
            prefix.push(p);
        }
        Ok(Denominators { b, prefix })
    }

    pub fn b(&self, n: u64) -> &Factored {
        &self.b[(n - 1) as usize]
    }

    pub fn prefix(&self, n: u64) -> &Factored {
        &self.prefix[(n - 1) as usize]
    }
}

/// `|c_n|` for `n` in `lo..=hi`; zero coefficients are a domain error.
pub(crate) fn nonzero_coefficients(c: &SequenceSpec, series: usize, lo: u64, hi: u64) -> Result<Vec<Factored>> {
    (lo..=hi)
        .map(|n| {
            let v = c.value(n)?;
            if v.is_zero() {
                return Err(Error::Domain(format!("coefficient c_{{{series},{n}}} is zero")));
            }
            Factored::from_biguint(v.magnitude())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_halves() {
        let w = Window::new(1, 8).unwrap();
        assert_eq!(w.tail_start(), 5);
        assert_eq!(w.quartile_start(), 7);
        let w = Window::new(1, 10).unwrap();
        assert_eq!(w.tail(), 6..=10);
        assert_eq!(w.quartile_start(), 8);
        assert!(Window::new(3, 2).unwrap().is_empty());
        assert!(Window::new(3, 1).is_err());
    }

    #[test]
    fn verdict_conjunction() {
        use Verdict::*;
        assert_eq!(SatisfiedOnWindow.and(ViolatedAt(3)), ViolatedAt(3));
        assert_eq!(ViolatedAt(5).and(ViolatedAt(3)), ViolatedAt(3));
        assert_eq!(Inconclusive.and(SatisfiedOnWindow), Inconclusive);
        assert_eq!(ViolatedAt(5).to_string(), "violated-at(5)");
    }

    #[test]
    fn trends() {
        let f = |v: &[i64]| Trend::of(&v.iter().map(|&x| Fixed::from_int(x)).collect::<Vec<_>>());
        assert_eq!(f(&[1, 2, 3]), Trend::Increasing);
        assert_eq!(f(&[1, 1, 3]), Trend::Nondecreasing);
        assert_eq!(f(&[3, 1, 3]), Trend::Mixed);
        assert_eq!(f(&[2, 2]), Trend::Constant);
        assert_eq!(f(&[]), Trend::Empty);
    }

    #[test]
    fn pipeline_constraints() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert!(HypothesisSet::Condition1 { delta: r(1, 2) }.check_pipeline(2).is_err());
        assert!(HypothesisSet::Condition1 { delta: r(3, 5) }.check_pipeline(2).is_ok());
        assert!(HypothesisSet::Condition2 { delta: r(2, 5), epsilon: r(2, 1) }.check_pipeline(2).is_err());
        assert!(HypothesisSet::Condition2 { delta: r(1, 1), epsilon: r(2, 1) }.check_pipeline(2).is_ok());
    }
}
