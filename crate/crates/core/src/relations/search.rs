//! Integer relation search over value enclosures.
//!
//! Non-point enclosures are rounded outward to integers at scale
//! `2^(precision + GUARD_BITS)`; residual brackets are then integer sums.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::lll::lll_reduce;
use crate::error::{Error, Result};
use crate::exact::{Enclosure, EnclosureRecord};

const GUARD_BITS: u64 = 32;
/// Upper limit on the number of grid points an exhaustive search visits.
pub const MAX_GRID: u64 = 1 << 28;
/// At most `1 + m` values with `m <= 7`.
pub const MAX_VALUES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationStatus {
    /// All inputs are rational and the residual is exactly zero.
    Exact,
    /// The integer identity holds on convergents at two or more orders.
    ConfirmedOnConvergents,
    /// The residual enclosure contains zero.
    NumericallyPlausible,
    /// The residual enclosure excludes zero.
    Refuted,
}

impl fmt::Display for RelationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationStatus::Exact => "exact",
            RelationStatus::ConfirmedOnConvergents => "confirmed-on-convergents",
            RelationStatus::NumericallyPlausible => "numerically-plausible",
            RelationStatus::Refuted => "refuted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCandidate {
    #[serde(serialize_with = "serialize_z")]
    pub z: Vec<i64>,
    #[serde(serialize_with = "serialize_enclosure")]
    pub residual: Enclosure,
    pub status: RelationStatus,
}

pub(crate) fn serialize_z<S: Serializer>(z: &[i64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(z.iter().map(|x| x.to_string()))
}

fn serialize_enclosure<S: Serializer>(e: &Enclosure, s: S) -> std::result::Result<S::Ok, S::Error> {
    EnclosureRecord::from(e).serialize(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    Exhaustive,
    Lattice,
}

impl SearchMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(SearchMethod::Exhaustive),
            "lattice" => Ok(SearchMethod::Lattice),
            other => Err(Error::Domain(format!("unknown search method `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SearchMethod::Exhaustive => "exhaustive",
            SearchMethod::Lattice => "lattice",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// `B`: search `||z||_inf <= B`.
    pub bound: u64,
    /// Enclosures must have width at most `2^-precision_bits`.
    pub precision_bits: u64,
    pub method: SearchMethod,
    /// LLL quality parameter.
    pub lll_delta: BigRational,
}

impl SearchConfig {
    pub fn new(bound: u64, precision_bits: u64, method: SearchMethod) -> Self {
        SearchConfig { bound, precision_bits, method, lll_delta: BigRational::new(3.into(), 4.into()) }
    }
}

/// Orders by infinity norm, then lexicographically.
pub fn enumeration_key(z: &[i64]) -> (u64, Vec<i64>) {
    (z.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0), z.to_vec())
}

enum Scaled {
    /// Exact rationals (every input a point).
    Exact(Vec<BigRational>),
    /// Integer brackets at scale `2^shift`.
    Rounded { lo: Vec<BigInt>, hi: Vec<BigInt>, shift: u64 },
}

impl Scaled {
    fn new(values: &[Enclosure], precision_bits: u64) -> Self {
        if values.iter().all(Enclosure::is_point) {
            return Scaled::Exact(values.iter().map(|v| v.lower().clone()).collect());
        }
        let shift = precision_bits + GUARD_BITS;
        let scale = BigInt::one() << shift;
        let lo = values.iter().map(|v| (v.lower().numer() * &scale).div_floor(v.lower().denom())).collect();
        let hi = values.iter().map(|v| (v.upper().numer() * &scale).div_ceil(v.upper().denom())).collect();
        Scaled::Rounded { lo, hi, shift }
    }

    fn residual(&self, z: &[i64]) -> Enclosure {
        match self {
            Scaled::Exact(xs) => {
                let r = z.iter().zip(xs).fold(BigRational::zero(), |acc, (&zi, x)| acc + x * BigInt::from(zi));
                Enclosure::point(r)
            }
            Scaled::Rounded { lo, hi, shift } => {
                let mut a = BigInt::zero();
                let mut b = BigInt::zero();
                for (i, &zi) in z.iter().enumerate() {
                    let zi = BigInt::from(zi);
                    if zi.is_negative() {
                        a += &zi * &hi[i];
                        b += &zi * &lo[i];
                    } else {
                        a += &zi * &lo[i];
                        b += &zi * &hi[i];
                    }
                }
                let den = BigInt::one() << *shift;
                Enclosure::new(BigRational::new(a, den.clone()), BigRational::new(b, den)).expect("ordered")
            }
        }
    }

    fn is_exact(&self) -> bool {
        matches!(self, Scaled::Exact(_))
    }
}

fn candidate(scaled: &Scaled, z: &[i64]) -> Option<RelationCandidate> {
    let residual = scaled.residual(z);
    if !residual.contains_zero() {
        return None;
    }
    let status = if scaled.is_exact() { RelationStatus::Exact } else { RelationStatus::NumericallyPlausible };
    Some(RelationCandidate { z: z.to_vec(), residual, status })
}

/// Residual enclosure of `z . values` (outward rounded at the search scale).
pub fn residual_enclosure(values: &[Enclosure], z: &[i64], precision_bits: u64) -> Enclosure {
    Scaled::new(values, precision_bits).residual(z)
}

/// Nonzero `z` with `||z||_inf <= B` whose residual enclosure contains zero,
/// sorted by infinity norm and then lexicographically.
pub fn find_relations(values: &[Enclosure], cfg: &SearchConfig) -> Result<Vec<RelationCandidate>> {
    if cfg.bound == 0 {
        return Err(Error::Domain("coefficient bound B must be at least 1".into()));
    }
    if values.is_empty() || values.len() > MAX_VALUES {
        return Err(Error::Precondition(format!("relation search takes 1 to {MAX_VALUES} values, got {}", values.len())));
    }
    let target = BigRational::new(BigInt::one(), BigInt::one() << cfg.precision_bits);
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.width() > target) {
        return Err(Error::refused_with_hint(
            format!("value {i} has enclosure width above 2^-{}", cfg.precision_bits),
            format!(
                "supply enclosures of width <= 2^-{} (width now about 2^{})",
                cfg.precision_bits,
                crate::exact::to_logmag(&v.width()).log2mag().to_decimal(1)
            ),
        ));
    }
    let scaled = Scaled::new(values, cfg.precision_bits);
    let mut out = match cfg.method {
        SearchMethod::Exhaustive => exhaustive(&scaled, values.len(), cfg.bound)?,
        SearchMethod::Lattice => lattice(&scaled, values, cfg)?,
    };
    out.sort_by_key(|c| enumeration_key(&c.z));
    Ok(out)
}

fn exhaustive(scaled: &Scaled, k: usize, bound: u64) -> Result<Vec<RelationCandidate>> {
    let side = 2 * bound + 1;
    let total = side.checked_pow(k as u32).filter(|&t| t <= MAX_GRID);
    let Some(total) = total else {
        return Err(Error::refused_with_hint(format!("grid of {side}^{k} points is too large"), "lower B or use the lattice method"));
    };
    let b = bound as i64;
    // Slabs by first coordinate; each slab is scanned in lexicographic order.
    let per_slab = total / side;
    let found: Vec<Vec<RelationCandidate>> = (-b..=b)
        .into_par_iter()
        .map(|z0| {
            let mut hits = Vec::new();
            let mut z = vec![0i64; k];
            z[0] = z0;
            for idx in 0..per_slab {
                let mut rest = idx;
                for slot in (1..k).rev() {
                    z[slot] = (rest % side) as i64 - b;
                    rest /= side;
                }
                if z.iter().all(|&x| x == 0) {
                    continue;
                }
                if let Some(c) = candidate(scaled, &z) {
                    hits.push(c);
                }
            }
            hits
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

fn lattice(scaled: &Scaled, values: &[Enclosure], cfg: &SearchConfig) -> Result<Vec<RelationCandidate>> {
    let k = values.len();
    let scale = BigInt::one() << cfg.precision_bits;
    let two = BigRational::from_integer(2.into());
    let mut basis: Vec<Vec<BigInt>> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mid = (v.lower() + v.upper()) / &two;
            let mut row = vec![BigInt::zero(); k + 1];
            row[i] = BigInt::one();
            row[k] = (mid * BigRational::from_integer(scale.clone())).round().to_integer();
            row
        })
        .collect();
    lll_reduce(&mut basis, &cfg.lll_delta)?;
    let b = cfg.bound as i64;
    let mut out: Vec<RelationCandidate> = Vec::new();
    for row in &basis {
        let z: Option<Vec<i64>> = row[..k].iter().map(|x| i64::try_from(x).ok().filter(|v| v.abs() <= b)).collect();
        let Some(z) = z else { continue };
        if z.iter().all(|&x| x == 0) {
            continue;
        }
        for sign in [1i64, -1] {
            let zs: Vec<i64> = z.iter().map(|x| x * sign).collect();
            if out.iter().any(|c| c.z == zs) {
                continue;
            }
            if let Some(c) = candidate(scaled, &zs) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn points(xs: &[(i64, i64)]) -> Vec<Enclosure> {
        xs.iter().map(|&(n, d)| Enclosure::point(r(n, d))).collect()
    }

    #[test]
    fn rational_values_give_exact_relations() {
        let v = points(&[(1, 1), (1, 2), (1, 4)]);
        let found = find_relations(&v, &SearchConfig::new(2, 64, SearchMethod::Exhaustive)).unwrap();
        let hit = found.iter().find(|c| c.z == [0, 1, -2]).expect("(0, 1, -2)");
        assert_eq!(hit.status, RelationStatus::Exact);
        assert!(found.iter().all(|c| c.residual.lower().is_zero()));
        // Ordering: norm 1 before norm 2.
        assert!(found.windows(2).all(|w| enumeration_key(&w[0].z) < enumeration_key(&w[1].z)));
        assert_eq!(found[0].z, [-1, 1, 2]);
    }

    #[test]
    fn exhaustive_matches_brute_force_on_points() {
        let v = points(&[(1, 1), (2, 3), (5, 6)]);
        let found = find_relations(&v, &SearchConfig::new(3, 64, SearchMethod::Exhaustive)).unwrap();
        let mut oracle = Vec::new();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    if (a, b, c) != (0, 0, 0) && 6 * a + 4 * b + 5 * c == 0 {
                        oracle.push(vec![a, b, c]);
                    }
                }
            }
        }
        oracle.sort_by_key(|z| enumeration_key(z));
        let got: Vec<Vec<i64>> = found.into_iter().map(|c| c.z).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn wide_enclosures_refuse() {
        let v = vec![Enclosure::point(r(1, 1)), Enclosure::new(r(0, 1), r(1, 1)).unwrap()];
        let err = find_relations(&v, &SearchConfig::new(2, 10, SearchMethod::Exhaustive)).unwrap_err();
        assert!(matches!(err, Error::Refused { hint: Some(_), .. }));
        assert!(matches!(find_relations(&v, &SearchConfig::new(0, 0, SearchMethod::Exhaustive)), Err(Error::Domain(_))));
    }

    #[test]
    fn lattice_is_subset_of_exhaustive() {
        // 1, x, 1 + x with x a narrow bracket around 0.3183...
        let x = Enclosure::new(r(3183098861, 10_000_000_000), r(3183098862, 10_000_000_000)).unwrap();
        let v = vec![Enclosure::point(r(1, 1)), x.clone(), x.shift(&r(1, 1))];
        let lat = find_relations(&v, &SearchConfig::new(3, 30, SearchMethod::Lattice)).unwrap();
        let exh = find_relations(&v, &SearchConfig::new(3, 30, SearchMethod::Exhaustive)).unwrap();
        assert!(lat.iter().any(|c| c.z == [1, 1, -1] || c.z == [-1, -1, 1]));
        for c in &lat {
            assert!(exh.iter().any(|e| e.z == c.z));
            assert_eq!(c.status, RelationStatus::NumericallyPlausible);
        }
    }
}
