//! Growth-window and ratio-vanishing hypotheses.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::conditions::tail_verdict;
use super::{ConditionVerdict, CriteriaConfig, Margin, Trend, Verdict, Window};
use crate::error::{Error, Result};
use crate::exact::{to_logmag, Fixed, TOLERANCE};
use crate::sequences::SequenceSpec;

/// `g_n = log2 b_n / (m+1)^n` over a window, with the liminf/limsup estimates
/// `2^{min g}` and `2^{max g}` taken over the tail half.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub m: u32,
    /// `(n, g_n)`; exact rationals when `b_n` is a power of two, else six decimals.
    pub exponents: Vec<(u64, String)>,
    pub liminf_estimate: f64,
    pub limsup_estimate: f64,
    /// Absolute error bound on the two estimates.
    pub estimate_tolerance: f64,
    pub check: ConditionVerdict,
}

/// Checks `1 <= liminf b_n^{1/(m+1)^n} < limsup b_n^{1/(m+1)^n} < infinity`.
pub fn check_growth_window(b: &SequenceSpec, m: u32, window: Window) -> Result<GrowthReport> {
    if m < 2 {
        return Err(Error::Precondition(format!("growth window needs m >= 2, got {m}")));
    }
    let mut check = ConditionVerdict::new(format!("growth-window(m={m})"), window);
    let mut exponents = Vec::new();
    // (n, g, radius)
    let mut gs: Vec<(u64, BigRational, BigRational)> = Vec::new();
    for n in window.indices() {
        let f = b.factored(n)?;
        let scale = BigRational::from_integer(num_traits::pow(BigInt::from(m + 1), n as usize));
        let (g, radius, text) = if f.odd().to_u32() == Some(1) {
            let g = BigRational::from_integer(f.twos().into()) / &scale;
            let text = g.to_string();
            (g, BigRational::zero(), text)
        } else {
            let l = f.log2();
            let g = l.log2mag().to_rational() / &scale;
            let radius = l.err().to_rational() / &scale;
            let text = Fixed::from_rational(&g).map(|x| x.to_decimal(6)).unwrap_or_default();
            (g, radius, text)
        };
        exponents.push((n, text));
        gs.push((n, g, radius));
    }
    let tail: Vec<&(u64, BigRational, BigRational)> = gs.iter().filter(|(n, _, _)| *n >= window.tail_start()).collect();
    let (liminf_estimate, limsup_estimate, estimate_tolerance) = match (tail.iter().min_by(|a, b| a.1.cmp(&b.1)), tail.iter().max_by(|a, b| a.1.cmp(&b.1))) {
        (Some(lo), Some(hi)) if window.supports_asymptotics() => {
            let lo_f = lo.1.to_f64().unwrap_or(f64::NAN).exp2();
            let hi_f = hi.1.to_f64().unwrap_or(f64::NAN).exp2();
            let spread = hi.1.clone() - lo.1.clone();
            let gap_radius = lo.2.clone() + hi.2.clone();
            let tol = TOLERANCE.to_rational();
            let margin_value = &spread - &tol;
            let holds = if &spread - &gap_radius > tol {
                Some(true)
            } else if &spread + &gap_radius <= tol {
                Some(false)
            } else {
                None
            };
            let log2 = Fixed::from_rational(&margin_value).unwrap_or(Fixed::ZERO);
            let err = Fixed::ceil_rational(&gap_radius).unwrap_or(Fixed::ZERO);
            check.margins.push(Margin { n: window.end, part: "strict-gap", series: None, against: None, log2, err, holds });
            let liminf_violated = lo.2.is_zero() && lo.1.is_negative();
            let liminf_certain = !(&lo.1 - &lo.2).is_negative();
            check.verdict = if liminf_violated {
                check.margins.push(Margin {
                    n: lo.0,
                    part: "liminf-at-least-one",
                    series: None,
                    against: None,
                    log2: Fixed::from_rational(&lo.1).unwrap_or(Fixed::ZERO),
                    err: Fixed::ZERO,
                    holds: Some(false),
                });
                Verdict::ViolatedAt(lo.0)
            } else {
                match holds {
                    Some(true) if liminf_certain => Verdict::SatisfiedOnWindow,
                    Some(false) => Verdict::ViolatedAt(window.end),
                    _ => Verdict::Inconclusive,
                }
            };
            let max_g = hi.1.to_f64().unwrap_or(0.0).abs().max(1.0);
            (lo_f, hi_f, 1e-12 * max_g.exp2())
        }
        _ => (f64::NAN, f64::NAN, 0.0),
    };
    let g_fixed: Vec<Fixed> = gs.iter().map(|(_, g, _)| Fixed::from_rational(g).unwrap_or(Fixed::ZERO)).collect();
    check.trend = Trend::of(&g_fixed);
    Ok(GrowthReport { m, exponents, liminf_estimate, limsup_estimate, estimate_tolerance, check })
}

/// `c_{i,n}/c_{j,n} -> 0` for `i > j`: the final ratio is below the configured
/// threshold and the ratio is nonincreasing over the tail half.
pub fn check_ratio_vanishing(c: &[SequenceSpec], window: Window, cfg: &CriteriaConfig) -> Result<ConditionVerdict> {
    if c.len() < 2 {
        return Err(Error::Precondition("ratio vanishing needs at least two sequences".into()));
    }
    let mut out = ConditionVerdict::new("ratio-vanishing".into(), window);
    if !window.supports_asymptotics() {
        out.notes.push("window shorter than 4".into());
        return Ok(out);
    }
    let values: Vec<Vec<BigInt>> = c.iter().map(|s| s.window(window.tail_start(), window.end).map(|w| w.values)).collect::<Result<_>>()?;
    let mut verdict = Verdict::SatisfiedOnWindow;
    let mut trend_values = Vec::new();
    for i in 1..c.len() {
        for j in 0..i {
            let mut ratios = Vec::new();
            for (k, n) in window.tail().enumerate() {
                let den = &values[j][k];
                if den.is_zero() {
                    return Err(Error::Domain(format!("c_{{{},{n}}} is zero", j + 1)));
                }
                ratios.push(BigRational::new(values[i][k].abs(), den.abs()));
            }
            let mut margins = Vec::new();
            for (k, n) in window.tail().enumerate().skip(1) {
                let q = if ratios[k].is_zero() {
                    None
                } else {
                    Some(&ratios[k - 1] / &ratios[k])
                };
                let (log2, err) = match &q {
                    Some(q) if !q.is_zero() => {
                        let l = to_logmag(q);
                        (l.log2mag(), l.err())
                    }
                    _ => (Fixed::ZERO, Fixed::ZERO),
                };
                margins.push(Margin {
                    n,
                    part: "nonincreasing",
                    series: Some(i + 1),
                    against: Some(j + 1),
                    log2,
                    err,
                    holds: Some(ratios[k] <= ratios[k - 1]),
                });
            }
            let last = ratios.last().expect("tail is nonempty");
            let below = if last.is_zero() {
                (Fixed::from_int(64), Fixed::ZERO)
            } else {
                let l = to_logmag(&(&cfg.ratio_threshold / last));
                (l.log2mag(), l.err())
            };
            margins.push(Margin {
                n: window.end,
                part: "below-threshold",
                series: Some(i + 1),
                against: Some(j + 1),
                log2: below.0,
                err: below.1,
                holds: Some(*last < cfg.ratio_threshold),
            });
            verdict = verdict.and(tail_verdict(&margins, window));
            if i == 1 && j == 0 {
                trend_values = ratios.iter().map(|r| to_logmag(r).log2mag()).collect();
            }
            out.margins.extend(margins);
        }
    }
    out.trend = Trend::of(&trend_values);
    out.verdict = verdict;
    out.notes.push(format!("threshold {}", cfg.ratio_threshold));
    Ok(out)
}
