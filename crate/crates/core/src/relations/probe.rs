//! Independence probe for the pair `sum 1/b_n`, `sum d(n)/b_n` over the
//! denominators `b_1 = 2`, `b_{n+1} = (b_1 ... b_n)^2`.
//!
//! With `L_N = q_N (z_0 + z_1 beta_{1,N} + z_2 beta_{2,N})` the convergent
//! recurrences give `L_N - b_N L_{N-1} = (z_1 + z_2 d(N)) q_{N-1}`. A relation
//! forces `L_N = 0` for all large `N`, hence `z_1 + z_2 d(N) = 0` for all large
//! `N`, which two orders with different `d(N)` rule out unless `z_1 = z_2 = 0`,
//! and then `L_N = z_0 q_N != 0`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::search::{enumeration_key, serialize_z};
use crate::approx::corollary_series;
use crate::criteria::Window;
use crate::error::{Error, Result};
use crate::sequences::divisor_count;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPair {
    pub n1: u64,
    pub d1: u64,
    pub n2: u64,
    pub d2: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Unrefuted {
    #[serde(serialize_with = "serialize_z")]
    pub z: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    #[serde(rename = "B")]
    pub bound: u64,
    pub window: Window,
    pub candidates: u64,
    pub refuted: u64,
    /// Candidates whose `L_N` vanishes somewhere in the window.
    pub vanishing_somewhere: u64,
    /// Exact checks of the `L_N - b_N L_{N-1}` identity.
    pub identity_checks: u64,
    pub witness: WitnessPair,
    pub unrefuted: Vec<Unrefuted>,
}

/// Smallest `N >= 2` and then the smallest `N' > N` in the window with `d(N') != d(N)`.
fn witness(window: Window) -> Result<Option<WitnessPair>> {
    let lo = window.start.max(2);
    for n1 in lo..=window.end {
        let d1 = divisor_count(n1)?;
        for n2 in n1 + 1..=window.end {
            let d2 = divisor_count(n2)?;
            if d2 != d1 {
                return Ok(Some(WitnessPair { n1, d1, n2, d2 }));
            }
        }
    }
    Ok(None)
}

/// Refutes every nonzero `(z_0, z_1, z_2)` with `||z||_inf <= B` using exact
/// integer residuals on the window.
pub fn corollary_independence_probe(bound: u64, window: Window) -> Result<ProbeReport> {
    if window.end < 6 {
        return Err(Error::Precondition(format!("probe window must end at 6 or later, got {window}")));
    }
    if bound == 0 {
        return Err(Error::Domain("coefficient bound B must be at least 1".into()));
    }
    let Some(w) = witness(window)? else {
        return Err(Error::refused("no change of d(N) inside the window"));
    };
    let spec = corollary_series();
    let start = window.start.max(1);
    let orders: Vec<u64> = (start..=window.end).collect();
    let mut q = Vec::new();
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut b = Vec::new();
    let mut d = Vec::new();
    for &n in &orders {
        q.push(spec.q(n)?);
        p1.push(spec.convergent(1, n)?.p);
        p2.push(spec.convergent(2, n)?.p);
        b.push(spec.b_factored(n)?.to_bigint(crate::exact::DEFAULT_BIT_BUDGET)?);
        d.push(divisor_count(n)? as i64);
    }
    let bi = bound as i64;
    let mut zs: Vec<Vec<i64>> = Vec::new();
    for z0 in -bi..=bi {
        for z1 in -bi..=bi {
            for z2 in -bi..=bi {
                if (z0, z1, z2) != (0, 0, 0) {
                    zs.push(vec![z0, z1, z2]);
                }
            }
        }
    }
    zs.sort_by_key(|z| enumeration_key(z));

    struct Outcome {
        refuted: bool,
        vanishes: bool,
        checks: u64,
    }
    let outcomes: Vec<Result<Outcome>> = zs
        .par_iter()
        .map(|z| {
            let (z0, z1, z2) = (BigInt::from(z[0]), BigInt::from(z[1]), BigInt::from(z[2]));
            let mut prev: Option<BigInt> = None;
            let mut vanishes = false;
            let mut checks = 0;
            for k in 0..orders.len() {
                let l = &z0 * &q[k] + &z1 * &p1[k] + &z2 * &p2[k];
                vanishes |= l.is_zero();
                if let Some(prev) = &prev {
                    let terminal = BigInt::from(z[1] + z[2] * d[k]);
                    if &l - &b[k] * prev != terminal * &q[k - 1] {
                        return Err(Error::Domain(format!("recurrence identity fails at N = {} for z = {z:?}", orders[k])));
                    }
                    checks += 1;
                }
                prev = Some(l);
            }
            let t1 = z[1] + z[2] * w.d1 as i64;
            let t2 = z[1] + z[2] * w.d2 as i64;
            let refuted = if z[1] == 0 && z[2] == 0 { !q.last().expect("nonempty").is_zero() } else { t1 != 0 || t2 != 0 };
            Ok(Outcome { refuted, vanishes, checks })
        })
        .collect();
    let mut report = ProbeReport {
        bound,
        window,
        candidates: zs.len() as u64,
        refuted: 0,
        vanishing_somewhere: 0,
        identity_checks: 0,
        witness: w,
        unrefuted: Vec::new(),
    };
    for (z, o) in zs.iter().zip(outcomes) {
        let o = o?;
        report.identity_checks += o.checks;
        report.vanishing_somewhere += o.vanishes as u64;
        if o.refuted {
            report.refuted += 1;
        } else {
            report.unrefuted.push(Unrefuted { z: z.clone() });
        }
    }
    debug_assert!(p1.iter().chain(&p2).all(|p| p.is_positive()));
    Ok(report)
}
