//! Exact checks of `z_0 q_N + z_1 p_{1,N} + ... + z_m p_{m,N} = 0` on convergents.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::search::{find_relations, RelationCandidate, RelationStatus, SearchConfig, SearchMethod};
use crate::approx::{value_enclosure, SeriesSpec};
use crate::criteria::Window;
use crate::error::{Error, Result};
use crate::exact::Enclosure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergentStatus {
    /// Zero at two or more orders and never nonzero after the first zero.
    Confirmed,
    /// Nonzero on the whole tail half with nondecreasing `|L_N|`.
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergentCheck {
    pub status: ConvergentStatus,
    pub holds_at: Vec<u64>,
    pub fails_at: Vec<u64>,
}

/// `L_N = z_0 q_N + sum_i z_i p_{i,N}`.
pub fn integer_residual(z: &[i64], spec: &SeriesSpec, order: u64) -> Result<BigInt> {
    let mut l = BigInt::from(z[0]) * spec.q(order)?;
    for (i, &zi) in z.iter().enumerate().skip(1) {
        if zi != 0 {
            l += BigInt::from(zi) * spec.convergent(i, order)?.p;
        }
    }
    Ok(l)
}

pub fn verify_relation_on_convergents(z: &[i64], spec: &SeriesSpec, window: Window) -> Result<ConvergentCheck> {
    if z.iter().all(|&x| x == 0) {
        return Err(Error::Domain("relation vector must be nonzero".into()));
    }
    if z.len() != spec.m() + 1 {
        return Err(Error::Domain(format!("relation has {} entries, expected {}", z.len(), spec.m() + 1)));
    }
    let start = window.start.max(1);
    let mut residuals = Vec::new();
    for n in start..=window.end {
        residuals.push((n, integer_residual(z, spec, n)?));
    }
    let holds_at: Vec<u64> = residuals.iter().filter(|(_, l)| l.is_zero()).map(|(n, _)| *n).collect();
    let fails_at: Vec<u64> = residuals.iter().filter(|(_, l)| !l.is_zero()).map(|(n, _)| *n).collect();
    let first_success = holds_at.first().copied();
    let status = if holds_at.len() >= 2 && fails_at.iter().all(|&n| Some(n) < first_success) {
        ConvergentStatus::Confirmed
    } else {
        let tail: Vec<&BigInt> = residuals.iter().filter(|(n, _)| *n >= window.tail_start()).map(|(_, l)| l).collect();
        let growing = tail.windows(2).all(|w| w[0].abs() <= w[1].abs());
        if !tail.is_empty() && tail.iter().all(|l| !l.is_zero()) && growing {
            ConvergentStatus::Refuted
        } else {
            ConvergentStatus::Inconclusive
        }
    };
    Ok(ConvergentCheck { status, holds_at, fails_at })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesRelationReport {
    pub method: SearchMethod,
    #[serde(rename = "B")]
    pub bound: u64,
    pub precision: u64,
    pub window: Window,
    pub candidates: Vec<RelationCandidate>,
}

/// Encloses `(1, beta_1, ..., beta_m)`, searches, then checks every candidate
/// on convergents over `window`.
pub fn find_series_relations(spec: &SeriesSpec, cfg: &SearchConfig, window: Window) -> Result<SeriesRelationReport> {
    let mut values = vec![Enclosure::point(num_traits::One::one())];
    for i in 1..=spec.m() {
        values.push(value_enclosure(spec, i, cfg.precision_bits)?);
    }
    let mut candidates = find_relations(&values, cfg)?;
    for c in &mut candidates {
        if c.status == RelationStatus::NumericallyPlausible
            && verify_relation_on_convergents(&c.z, spec, window)?.status == ConvergentStatus::Confirmed
        {
            c.status = RelationStatus::ConfirmedOnConvergents;
        }
    }
    Ok(SeriesRelationReport { method: cfg.method, bound: cfg.bound, precision: cfg.precision_bits, window, candidates })
}

/// Default configuration for [`find_series_relations`].
pub fn default_search(bound: u64, precision_bits: u64) -> SearchConfig {
    SearchConfig::new(bound, precision_bits, SearchMethod::Exhaustive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{corollary_series, SeriesMode};
    use crate::sequences::{corollary_denominator_spec, SequenceSpec};

    fn planted() -> SeriesSpec {
        SeriesSpec::new(
            SeriesMode::SumDirect,
            vec![SequenceSpec::constant(1), SequenceSpec::polynomial(&[0, 1]), SequenceSpec::polynomial(&[1, 1])],
            corollary_denominator_spec(),
        )
        .unwrap()
    }

    #[test]
    fn doubled_series_is_confirmed() {
        let twice = SeriesSpec::new(
            SeriesMode::SumDirect,
            vec![SequenceSpec::constant(1), SequenceSpec::constant(2)],
            corollary_denominator_spec(),
        )
        .unwrap();
        let check = verify_relation_on_convergents(&[0, 2, -1], &twice, Window::new(1, 6).unwrap()).unwrap();
        assert_eq!(check.status, ConvergentStatus::Confirmed);
        assert_eq!(check.holds_at, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn corollary_relation_refuted() {
        let check = verify_relation_on_convergents(&[1, -1, 0], &corollary_series(), Window::new(1, 6).unwrap()).unwrap();
        assert_eq!(check.status, ConvergentStatus::Refuted);
        assert!(matches!(verify_relation_on_convergents(&[0, 0, 0], &corollary_series(), Window::new(1, 6).unwrap()), Err(Error::Domain(_))));
    }

    #[test]
    fn planted_relation_recovered() {
        let report = find_series_relations(&planted(), &default_search(1, 128), Window::new(1, 6).unwrap()).unwrap();
        let hit = report.candidates.iter().find(|c| c.z == [0, 1, 1, -1]).expect("planted relation");
        assert_eq!(hit.status, RelationStatus::ConfirmedOnConvergents);
    }
}
