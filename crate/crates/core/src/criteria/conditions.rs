//! Condition 1, Condition 2, Theorem A and the Theorem 2 subset check.

use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;

use super::{nonzero_coefficients, require_positive, ConditionVerdict, CriteriaConfig, Denominators, Margin, Trend, Verdict, Window};
use crate::error::{Error, Result};
use crate::exact::{compare_product_with_one, pow_enclosure, Factored, Fixed, PowerTerm};
use crate::sequences::{ArithFn, SequenceSpec};

const LIMSUP: &str = "limsup";
const RATIO: &str = "liminf-ratio";
const ROOT_STEP: &str = "root-step";

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `log2 V_n` with `V_n = b_{n+1} / ((b_1..b_n)^exponent |c_{n+1}|)`.
fn limsup_margin(n: u64, series: usize, d: &Denominators, c_next: &Factored, exponent: &BigRational, budget: u64) -> Margin {
    let terms = [
        PowerTerm::int(d.b(n + 1).clone(), 1),
        PowerTerm::new(d.prefix(n).clone(), -exponent),
        PowerTerm::int(c_next.clone(), -1),
    ];
    // "holds" here records V_n >= 1.
    Margin::from_decision(n, LIMSUP, Some(series), &compare_product_with_one(&terms, budget), false)
}

/// `log2 R_n` with `R_n = (b_{n+1}/b_n)(|c_n|/|c_{n+1}|)`, strict `R_n > 1`.
fn ratio_margin(n: u64, series: usize, d: &Denominators, c_n: &Factored, c_next: &Factored, budget: u64) -> Margin {
    let terms = [
        PowerTerm::int(d.b(n + 1).clone(), 1),
        PowerTerm::int(d.b(n).clone(), -1),
        PowerTerm::int(c_n.clone(), 1),
        PowerTerm::int(c_next.clone(), -1),
    ];
    Margin::from_decision(n, RATIO, Some(series), &compare_product_with_one(&terms, budget), true)
}

/// Window surrogate for `limsup V_n = infinity`: a record in the last quartile
/// above the threshold satisfies it; certified `V_n < 1` across the tail half
/// without a late record violates it.
pub(crate) fn limsup_verdict(margins: &[Margin], window: Window, threshold: Fixed) -> Verdict {
    if !window.supports_asymptotics() || margins.is_empty() {
        return Verdict::Inconclusive;
    }
    let q = window.quartile_start();
    let t = window.tail_start();
    let late: Vec<&Margin> = margins.iter().filter(|m| m.n >= q).collect();
    let early: Vec<&Margin> = margins.iter().filter(|m| m.n < q).collect();
    let late_best = late.iter().map(|m| m.lower()).max();
    let early_best_upper = early.iter().map(|m| m.upper()).max();
    if let Some(best) = late_best {
        let record = early_best_upper.map_or(true, |e| best > e);
        if best >= threshold && record {
            return Verdict::SatisfiedOnWindow;
        }
    }
    let tail: Vec<&Margin> = margins.iter().filter(|m| m.n >= t).collect();
    let all_fail = !tail.is_empty() && tail.iter().all(|m| m.fails());
    let late_max = late.iter().map(|m| m.log2).max();
    let mid_max = tail.iter().filter(|m| m.n < q).map(|m| m.log2).max();
    let no_late_record = match (late_max, mid_max) {
        (Some(l), Some(m)) => l <= m,
        _ => true,
    };
    if all_fail && no_late_record {
        return Verdict::ViolatedAt(t);
    }
    Verdict::Inconclusive
}

/// Pointwise "for all large n" surrogate over the tail half.
pub(crate) fn tail_verdict(margins: &[Margin], window: Window) -> Verdict {
    if !window.supports_asymptotics() {
        return Verdict::Inconclusive;
    }
    let t = window.tail_start();
    let mut undecided = false;
    for m in margins.iter().filter(|m| m.n >= t) {
        match m.holds {
            Some(false) => return Verdict::ViolatedAt(m.n),
            None => undecided = true,
            Some(true) => {}
        }
    }
    if undecided {
        Verdict::Inconclusive
    } else {
        Verdict::SatisfiedOnWindow
    }
}

/// Per-index minimum of the margins labeled `part`, in index order.
pub(crate) fn min_by_index(margins: &[Margin], part: &str) -> Vec<Fixed> {
    let mut out: Vec<(u64, Fixed)> = Vec::new();
    for m in margins.iter().filter(|m| m.part == part) {
        match out.iter_mut().find(|(n, _)| *n == m.n) {
            Some(entry) => entry.1 = entry.1.min(m.log2),
            None => out.push((m.n, m.log2)),
        }
    }
    out.sort_by_key(|(n, _)| *n);
    out.into_iter().map(|(_, v)| v).collect()
}

struct Inputs {
    dens: Denominators,
    coeffs: Vec<Vec<Factored>>,
}

fn gather(c: &[SequenceSpec], b: &SequenceSpec, window: Window) -> Result<Inputs> {
    if c.is_empty() {
        return Err(Error::Domain("at least one coefficient sequence is required".into()));
    }
    let dens = Denominators::build(b, window.end + 1)?;
    let coeffs = c
        .iter()
        .enumerate()
        .map(|(i, s)| nonzero_coefficients(s, i + 1, window.start, window.end + 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(Inputs { dens, coeffs })
}

fn limsup_margins(inp: &Inputs, window: Window, exponent: &BigRational, budget: u64) -> Vec<Margin> {
    let jobs: Vec<(usize, u64)> = (0..inp.coeffs.len()).flat_map(|i| window.indices().map(move |n| (i, n))).collect();
    jobs.par_iter()
        .map(|&(i, n)| {
            let c_next = &inp.coeffs[i][(n + 1 - window.start) as usize];
            limsup_margin(n, i + 1, &inp.dens, c_next, exponent, budget)
        })
        .collect()
}

fn ratio_margins(inp: &Inputs, window: Window, budget: u64) -> Vec<Margin> {
    let jobs: Vec<(usize, u64)> = (0..inp.coeffs.len()).flat_map(|i| window.indices().map(move |n| (i, n))).collect();
    jobs.par_iter()
        .map(|&(i, n)| {
            let j = (n - window.start) as usize;
            ratio_margin(n, i + 1, &inp.dens, &inp.coeffs[i][j], &inp.coeffs[i][j + 1], budget)
        })
        .collect()
}

fn per_series_verdict(margins: &[Margin], m: usize, part: &str, f: impl Fn(&[Margin]) -> Verdict) -> Verdict {
    (1..=m)
        .map(|i| {
            let mine: Vec<Margin> = margins.iter().filter(|x| x.part == part && x.series == Some(i)).cloned().collect();
            f(&mine)
        })
        .fold(Verdict::SatisfiedOnWindow, Verdict::and)
}

fn limsup_with_ratio(
    id: String,
    c: &[SequenceSpec],
    b: &SequenceSpec,
    exponent: &BigRational,
    window: Window,
    cfg: &CriteriaConfig,
) -> Result<ConditionVerdict> {
    let mut out = ConditionVerdict::new(id, window);
    if window.is_empty() {
        out.notes.push("empty window".into());
        return Ok(out);
    }
    let inp = gather(c, b, window)?;
    let mut margins = limsup_margins(&inp, window, exponent, cfg.bit_budget);
    let lim = per_series_verdict(&margins, c.len(), LIMSUP, |m| limsup_verdict(m, window, cfg.limsup_threshold));
    margins.extend(ratio_margins(&inp, window, cfg.bit_budget));
    let ratio = per_series_verdict(&margins, c.len(), RATIO, |m| tail_verdict(m, window));
    out.trend = Trend::of(&min_by_index(&margins, LIMSUP));
    out.verdict = lim.and(ratio);
    out.margins = margins;
    if !window.supports_asymptotics() {
        out.notes.push("window shorter than 4; asymptotic surrogates not evaluated".into());
    }
    Ok(out)
}

/// Condition 1: `limsup V_n = infinity` with exponent `1 + delta`, and
/// `liminf R_n > 1`, for every coefficient sequence.
pub fn check_condition1(
    c: &[SequenceSpec],
    b: &SequenceSpec,
    delta: &BigRational,
    window: Window,
    cfg: &CriteriaConfig,
) -> Result<ConditionVerdict> {
    require_positive("delta", delta)?;
    let exponent = rat(1) + delta;
    limsup_with_ratio(format!("condition1(delta={delta})"), c, b, &exponent, window, cfg)
}

/// Theorem A: as Condition 1 with exponent `2 + delta`.
pub fn check_theorem_a(
    c: &[SequenceSpec],
    b: &SequenceSpec,
    delta: &BigRational,
    window: Window,
    cfg: &CriteriaConfig,
) -> Result<ConditionVerdict> {
    require_positive("delta", delta)?;
    let exponent = rat(2) + delta;
    limsup_with_ratio(format!("theoremA(delta={delta})"), c, b, &exponent, window, cfg)
}

/// log2 of a positive rational given as `num/den` factored integers.
fn log2_quotient(num: &Factored, den: &Factored) -> (Fixed, Fixed) {
    let a = num.log2();
    let b = den.log2();
    (a.log2mag() - b.log2mag(), a.err() + b.err())
}

fn scaled(x: Fixed, err: Fixed, s: &BigRational) -> (Fixed, Fixed) {
    let v = x.mul_rational(s).unwrap_or(x);
    let e = Fixed::ceil_rational(&(err.to_rational() * s.abs())).unwrap_or(err) + Fixed::from_raw(2);
    (v, e)
}

/// `log2(1 + 2^t)`; f64 is accurate far below the reported tolerance.
fn log2_one_plus_pow2(t: Fixed) -> Fixed {
    let tf = t.to_f64();
    if tf > 60.0 {
        return t;
    }
    if tf < -1000.0 {
        return Fixed::ZERO;
    }
    let v = (1.0 + tf.exp2()).log2();
    Fixed::from_rational(&BigRational::from_float(v).unwrap_or_default()).unwrap_or(Fixed::ZERO)
}

fn to_rational(num: &Factored, den: &Factored, budget: u64) -> Result<BigRational> {
    Ok(BigRational::new(num.to_bigint(budget)?, den.to_bigint(budget)?))
}

/// Decides `(x)^s >= (y)^s + 1` for `x = bx/cx`, `y = by/cy`.
pub(crate) fn root_step_margin(n: u64, series: usize, x: (&Factored, &Factored), y: (&Factored, &Factored), s: &BigRational, budget: u64) -> Margin {
    let (lx, ex) = log2_quotient(x.0, x.1);
    let (ly, ey) = log2_quotient(y.0, y.1);
    let (sx, ex) = scaled(lx, ex, s);
    let (sy, ey) = scaled(ly, ey, s);
    let estimate = sx - log2_one_plus_pow2(sy);
    let err = ex + ey + Fixed::from_raw(1 << 24);
    let mk = |holds| Margin { n, part: ROOT_STEP, series: Some(series), against: None, log2: estimate, err, holds };

    // y^s + 1 <= 2 max(y^s, 1) and y^s + 1 > max(y^s, 1).
    if sx - ex >= (sy + ey).max(Fixed::ZERO) + Fixed::ONE {
        return mk(Some(true));
    }
    if sx + ex < (sy - ey).max(Fixed::ZERO) {
        return mk(Some(false));
    }
    let exact = (|| -> Result<Option<bool>> {
        let xr = to_rational(x.0, x.1, budget)?;
        let yr = to_rational(y.0, y.1, budget)?;
        for bits in [64u64, 256, 1024, 4096] {
            let xs = pow_enclosure(&xr, s, bits, budget)?;
            let ys = pow_enclosure(&yr, s, bits, budget)?.shift(&BigRational::one());
            if xs.lower() >= ys.upper() {
                return Ok(Some(true));
            }
            if xs.upper() < ys.lower() {
                return Ok(Some(false));
            }
            if xs.is_point() && ys.is_point() {
                return Ok(Some(xs.lower() >= ys.lower()));
            }
        }
        Ok(None)
    })();
    mk(exact.unwrap_or(None))
}

/// Condition 2: `limsup V_n = infinity` with exponent `1 + delta + 1/eps`,
/// and the root-step inequality on the tail half.
pub fn check_condition2(
    c: &[SequenceSpec],
    b: &SequenceSpec,
    delta: &BigRational,
    epsilon: &BigRational,
    window: Window,
    cfg: &CriteriaConfig,
) -> Result<ConditionVerdict> {
    require_positive("delta", delta)?;
    require_positive("epsilon", epsilon)?;
    let mut out = ConditionVerdict::new(format!("condition2(delta={delta},epsilon={epsilon})"), window);
    if window.is_empty() {
        out.notes.push("empty window".into());
        return Ok(out);
    }
    let inp = gather(c, b, window)?;
    let exponent = rat(1) + delta + epsilon.recip();
    let mut margins = limsup_margins(&inp, window, &exponent, cfg.bit_budget);
    let lim = per_series_verdict(&margins, c.len(), LIMSUP, |m| limsup_verdict(m, window, cfg.limsup_threshold));
    let s = (rat(1) + epsilon).recip();
    let jobs: Vec<(usize, u64)> = (0..c.len()).flat_map(|i| window.tail().map(move |n| (i, n))).collect();
    let steps: Vec<Margin> = jobs
        .par_iter()
        .map(|&(i, n)| {
            let j = (n - window.start) as usize;
            let d = &inp.dens;
            root_step_margin(n, i + 1, (d.b(n + 1), &inp.coeffs[i][j + 1]), (d.b(n), &inp.coeffs[i][j]), &s, cfg.bit_budget)
        })
        .collect();
    margins.extend(steps);
    let step = per_series_verdict(&margins, c.len(), ROOT_STEP, |m| tail_verdict(m, window));
    out.trend = Trend::of(&min_by_index(&margins, LIMSUP));
    out.verdict = lim.and(step);
    out.margins = margins;
    Ok(out)
}

/// The three inequalities `f(N+1) (b_1..b_N)^delta <= b_{N+1}` for
/// `f` in {sigma, phi, d}; reports the subset `T` of the window where all hold.
pub fn check_theorem2_hypotheses(b: &SequenceSpec, delta: &BigRational, window: Window, cfg: &CriteriaConfig) -> Result<ConditionVerdict> {
    if *delta <= BigRational::new(1.into(), 3.into()) {
        return Err(Error::Precondition(format!("delta = {delta} must exceed 1/3")));
    }
    let mut out = ConditionVerdict::new(format!("theorem2(delta={delta})"), window);
    out.subset = Some(Vec::new());
    if window.is_empty() {
        return Ok(out);
    }
    let dens = Denominators::build(b, window.end + 1)?;
    for n in 1..=window.end + 1 {
        if dens.b(n).bits() < 2 {
            return Err(Error::Precondition(format!("b_{n} = 1 violates b_n >= 2")));
        }
    }
    let fns = [(ArithFn::Sigma, "sigma"), (ArithFn::Totient, "phi"), (ArithFn::DivisorCount, "d")];
    let jobs: Vec<(u64, usize)> = window.indices().flat_map(|n| (0..3).map(move |k| (n, k))).collect();
    let margins: Vec<Margin> = jobs
        .par_iter()
        .map(|&(n, k)| -> Result<Margin> {
            let (f, label) = fns[k];
            let fv = Factored::from_u64(f.eval(n + 1)?)?;
            let terms = [
                PowerTerm::int(dens.b(n + 1).clone(), 1),
                PowerTerm::new(dens.prefix(n).clone(), -delta.clone()),
                PowerTerm::int(fv, -1),
            ];
            let d = compare_product_with_one(&terms, cfg.bit_budget);
            Ok(Margin::from_decision(n, label, None, &d, false))
        })
        .collect::<Result<Vec<_>>>()?;
    let subset: Vec<u64> = window
        .indices()
        .filter(|&n| margins.iter().filter(|m| m.n == n).all(|m| m.holds == Some(true)))
        .collect();
    let mut mins: Vec<Fixed> = Vec::new();
    for n in window.indices() {
        mins.push(margins.iter().filter(|m| m.n == n).map(|m| m.log2).min().unwrap_or(Fixed::ZERO));
    }
    out.trend = Trend::of(&mins);
    out.verdict = if !window.supports_asymptotics() {
        Verdict::Inconclusive
    } else if subset.iter().any(|&n| n >= window.quartile_start()) {
        Verdict::SatisfiedOnWindow
    } else if !subset.iter().any(|&n| n >= window.tail_start()) && margins.iter().any(|m| m.n == window.end && m.fails()) {
        Verdict::ViolatedAt(window.end)
    } else {
        Verdict::Inconclusive
    };
    out.notes.push(format!("|T| = {} of {} indices", subset.len(), window.len()));
    out.subset = Some(subset);
    out.margins = margins;
    Ok(out)
}
