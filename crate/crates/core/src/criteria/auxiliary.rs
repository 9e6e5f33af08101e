//! Hypotheses of the cited independence results (Hančl; Hančl, Kolouch and
//! Novotný; Erdős and Strauss) and the prefix-power comparison.
//!
//! "log" in the Hančl-type bounds is the natural logarithm.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::conditions::tail_verdict;
use super::{require_positive, ConditionVerdict, CriteriaConfig, Denominators, Margin, Trend, Verdict, Window};
use crate::error::{Error, Result};
use crate::exact::{cmp_logmag, compare_product_with_one, scale_logmag, Decision, Factored, Fixed, LogMag, LogOrdering, PowerTerm, Sign};
use crate::sequences::SequenceSpec;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Decides `c < 2^R` given `R` as a log-magnitude, via `log2 log2 c` vs `log2 R`.
/// Returns `(estimate of R - log2 c, holds)`.
fn below_power_of_two(c: &Factored, r: &LogMag) -> (Fixed, Option<bool>) {
    let lc = c.log2();
    let r_est = if r.is_zero() { 0.0 } else { r.log2mag().to_f64().exp2() };
    let estimate = Fixed::from_rational(&BigRational::from_float(r_est - lc.log2mag().to_f64()).unwrap_or_default()).unwrap_or(Fixed::ZERO);
    if c.is_one() {
        // 1 < 2^R iff R > 0.
        return (estimate, Some(r.sign() == Sign::Positive));
    }
    if r.sign() != Sign::Positive {
        return (estimate, Some(false));
    }
    let holds = match lc.log2_of() {
        Ok(llc) => match cmp_logmag(&llc, r) {
            LogOrdering::Less => Some(true),
            LogOrdering::Greater | LogOrdering::Equal => Some(false),
            LogOrdering::Uncertain => None,
        },
        Err(_) => None,
    };
    (estimate, holds)
}

fn growth_margin(n: u64, b: &Factored, epsilon: &BigRational, budget: u64) -> Result<Margin> {
    let terms = [PowerTerm::int(b.clone(), 1), PowerTerm::new(Factored::from_u64(n)?, -(rat(1) + epsilon))];
    let d = compare_product_with_one(&terms, budget);
    Ok(Margin::from_decision(n, "denominator-growth", None, &d, false))
}

fn positive_coefficients(c: &SequenceSpec, series: usize, n: u64) -> Result<Factored> {
    let v = c.value(n)?;
    if !v.is_positive() {
        return Err(Error::Domain(format!("coefficient c_{{{series},{n}}} must be positive")));
    }
    Factored::from_bigint(&v)
}

/// `c_{i,n} < 2^{(ln b_n)^alpha}` and `b_n >= n^{1+eps}` on the tail half.
pub fn check_hancl7(
    c: &[SequenceSpec],
    b: &SequenceSpec,
    alpha: &BigRational,
    epsilon: &BigRational,
    window: Window,
    cfg: &CriteriaConfig,
) -> Result<ConditionVerdict> {
    require_positive("alpha", alpha)?;
    require_positive("epsilon", epsilon)?;
    let mut out = ConditionVerdict::new(format!("hancl7(alpha={alpha},epsilon={epsilon})"), window);
    out.notes.push("log is the natural logarithm".into());
    if !window.supports_asymptotics() {
        return Ok(out);
    }
    let dens = Denominators::build(b, window.end)?;
    for n in window.tail() {
        let bn = dens.b(n);
        let ln_b = bn.log2().ln_of()?;
        let r = if ln_b.is_zero() { LogMag::ZERO } else { scale_logmag(&ln_b, alpha)? };
        for (i, ci) in c.iter().enumerate() {
            let cv = positive_coefficients(ci, i + 1, n)?;
            let (log2, holds) = below_power_of_two(&cv, &r);
            out.margins.push(Margin { n, part: "coefficient-bound", series: Some(i + 1), against: None, log2, err: Fixed::from_raw(1 << 24), holds });
        }
        out.margins.push(growth_margin(n, bn, epsilon, cfg.bit_budget)?);
    }
    out.verdict = tail_verdict(&out.margins, window);
    out.trend = Trend::of(&out.margins.iter().filter(|m| m.part == "denominator-growth").map(|m| m.log2).collect::<Vec<_>>());
    Ok(out)
}

/// `c_{i,n} < b_n^{1/(ln ln b_n)^{1+eps}}` and `b_n >= n^{1+eps}` on the tail
/// half. Indices with `ln ln b_n <= 0` are left undecided.
pub fn check_hancl8(c: &[SequenceSpec], b: &SequenceSpec, epsilon: &BigRational, window: Window, cfg: &CriteriaConfig) -> Result<ConditionVerdict> {
    require_positive("epsilon", epsilon)?;
    let mut out = ConditionVerdict::new(format!("hancl8(epsilon={epsilon})"), window);
    out.notes.push("log is the natural logarithm".into());
    if !window.supports_asymptotics() {
        return Ok(out);
    }
    let dens = Denominators::build(b, window.end)?;
    let power = rat(1) + epsilon;
    for n in window.tail() {
        let bn = dens.b(n);
        let lb = bn.log2();
        // log2 of the bound is Q = log2 b / (ln ln b)^{1+eps}.
        let q = (|| -> Result<Option<LogMag>> {
            let ln_b = lb.ln_of()?;
            if ln_b.sign() != Sign::Positive {
                return Ok(None);
            }
            let lnln = ln_b.ln_of()?;
            if lnln.sign() != Sign::Positive {
                return Ok(None);
            }
            let log2_b = lb.log2_of()?;
            Ok(Some(log2_b.div(scale_logmag(&lnln, &power)?)?))
        })()
        .unwrap_or(None);
        for (i, ci) in c.iter().enumerate() {
            let cv = positive_coefficients(ci, i + 1, n)?;
            let (log2, holds) = match &q {
                Some(q) => below_power_of_two(&cv, q),
                None => (Fixed::ZERO, None),
            };
            out.margins.push(Margin { n, part: "coefficient-bound", series: Some(i + 1), against: None, log2, err: Fixed::from_raw(1 << 24), holds });
        }
        if q.is_none() {
            out.notes.push(format!("ln ln b_{n} <= 0; coefficient bound undefined there"));
        }
        out.margins.push(growth_margin(n, bn, epsilon, cfg.bit_budget)?);
    }
    out.verdict = tail_verdict(&out.margins, window);
    out.trend = Trend::of(&out.margins.iter().filter(|m| m.part == "denominator-growth").map(|m| m.log2).collect::<Vec<_>>());
    Ok(out)
}

/// `|d_n| < n^{1/2 - delta}` on the tail half, plus the count of nonzero terms
/// as the surrogate for "d_n != 0 infinitely often".
pub fn check_erdos_dn(d: &SequenceSpec, delta: &BigRational, window: Window, cfg: &CriteriaConfig) -> Result<ConditionVerdict> {
    if *delta <= BigRational::new(1.into(), 3.into()) {
        return Err(Error::Precondition(format!("delta = {delta} must exceed 1/3")));
    }
    let mut out = ConditionVerdict::new(format!("erdos-dn(delta={delta})"), window);
    if !window.supports_asymptotics() {
        return Ok(out);
    }
    let exponent = BigRational::new(1.into(), 2.into()) - delta;
    let mut nonzero_window = 0u64;
    let mut nonzero_tail = 0u64;
    for n in window.indices() {
        let v = d.value(n)?;
        if v.is_zero() {
            continue;
        }
        nonzero_window += 1;
        if n < window.tail_start() {
            continue;
        }
        nonzero_tail += 1;
        let terms = [PowerTerm::new(Factored::from_u64(n)?, exponent.clone()), PowerTerm::int(Factored::from_biguint(v.magnitude())?, -1)];
        let dec = compare_product_with_one(&terms, cfg.bit_budget);
        out.margins.push(Margin::from_decision(n, "bound", None, &dec, true));
    }
    out.notes.push(format!("nonzero terms: {nonzero_window} in window, {nonzero_tail} in tail half"));
    let bound = tail_verdict(&out.margins, window);
    out.verdict = match bound {
        Verdict::SatisfiedOnWindow if nonzero_tail == 0 => Verdict::Inconclusive,
        v => v,
    };
    out.trend = Trend::of(&out.margins.iter().map(|m| m.log2).collect::<Vec<_>>());
    Ok(out)
}

/// Compares `(b_1 .. b_n)^exponent` with `b_{n+1}`; `Greater` means
/// `b_{n+1}` is larger.
pub fn check_prefix_power_bound(b: &SequenceSpec, exponent: &BigRational, n: u64, budget: u64) -> Result<Decision> {
    if n == 0 {
        return Err(Error::Domain("prefix products start at n = 1".into()));
    }
    let dens = Denominators::build(b, n + 1)?;
    let terms = [PowerTerm::int(dens.b(n + 1).clone(), 1), PowerTerm::new(dens.prefix(n).clone(), -exponent)];
    Ok(compare_product_with_one(&terms, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::DEFAULT_BIT_BUDGET;
    use crate::sequences::corollary_denominator_spec;
    use std::cmp::Ordering;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn w(a: u64, b: u64) -> Window {
        Window::new(a, b).unwrap()
    }

    #[test]
    fn hancl7_examples() {
        let cfg = CriteriaConfig::default();
        let b = corollary_denominator_spec();
        let v = check_hancl7(&[SequenceSpec::constant(1)], &b, &r(1, 2), &r(1, 1), w(1, 10), &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::SatisfiedOnWindow);
        let v = check_hancl7(&[b.clone()], &b, &r(1, 2), &r(1, 1), w(1, 10), &cfg).unwrap();
        assert!(v.verdict.is_violated());
        let v = check_hancl7(&[b.clone()], &b, &r(1, 2), &r(1, 1), Window::empty(), &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn hancl7_direct_oracle() {
        // c = b_5 = 2^54: log2 c = 54 vs (ln 2^54)^{1/2} = sqrt(54 ln 2) ~ 6.1.
        let b = corollary_denominator_spec();
        let c = b.factored(5).unwrap();
        let r_lm = scale_logmag(&c.log2().ln_of().unwrap(), &r(1, 2)).unwrap();
        let (est, holds) = below_power_of_two(&c, &r_lm);
        assert_eq!(holds, Some(false));
        assert!((est.to_f64() - ((54.0 * std::f64::consts::LN_2).sqrt() - 54.0)).abs() < 1e-9);
    }

    #[test]
    fn hancl8_examples() {
        let cfg = CriteriaConfig::default();
        let b = corollary_denominator_spec();
        let v = check_hancl8(&[SequenceSpec::constant(1)], &b, &r(1, 1), w(1, 8), &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::SatisfiedOnWindow);
        let v = check_hancl8(&[b.clone()], &b, &r(1, 1), w(1, 8), &cfg).unwrap();
        assert!(v.verdict.is_violated());
        let n = SequenceSpec::polynomial(&[0, 1]);
        let v = check_hancl8(&[SequenceSpec::constant(1)], &n, &r(1, 1), w(1, 40), &cfg).unwrap();
        assert!(v.verdict.is_violated());
    }

    #[test]
    fn erdos_examples() {
        let cfg = CriteriaConfig::default();
        let v = check_erdos_dn(&SequenceSpec::constant(1), &r(2, 5), w(1024, 2047), &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::SatisfiedOnWindow);
        let v = check_erdos_dn(&SequenceSpec::polynomial(&[0, 1]), &r(2, 5), w(1, 64), &cfg).unwrap();
        assert!(v.verdict.is_violated());
        let v = check_erdos_dn(&SequenceSpec::constant(0), &r(2, 5), w(1, 64), &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
        assert!(v.notes[0].contains("0 in window"));
        assert!(check_erdos_dn(&SequenceSpec::constant(1), &r(1, 3), w(1, 64), &cfg).is_err());
    }

    #[test]
    fn prefix_power_bounds_on_corollary() {
        let b = corollary_denominator_spec();
        for n in 1..=12 {
            let d = check_prefix_power_bound(&b, &r(3, 2), n, DEFAULT_BIT_BUDGET).unwrap();
            assert_eq!(d.ordering, Some(Ordering::Greater));
            let d = check_prefix_power_bound(&b, &r(201, 100), n, DEFAULT_BIT_BUDGET).unwrap();
            assert_eq!(d.ordering, Some(Ordering::Less));
        }
    }
}
