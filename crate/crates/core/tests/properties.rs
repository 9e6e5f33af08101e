//! Property tests for the exact kernels, checked against direct computation.

use dioph_core::approx::{height, SeriesMode, SeriesSpec};
use dioph_core::exact::{
    cmp_logmag, compare_product_with_one, pow_enclosure, scale_logmag, to_logmag, Enclosure, Factored, LogOrdering, PowerTerm,
    DEFAULT_BIT_BUDGET,
};
use dioph_core::relations::{find_relations, RelationStatus, SearchConfig, SearchMethod};
use dioph_core::sequences::{sieve, ArithFn, SequenceSpec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ln2_of(n: i64, d: i64) -> f64 {
    (n as f64).log2() - (d as f64).log2()
}

#[test]
fn log2_of_three_quarters() {
    let l = to_logmag(&rat(3, 4));
    let (lo, hi) = l.log2_bounds();
    let truth = 0.75f64.log2();
    assert!(lo.to_f64() <= truth + 1e-15 && truth - 1e-15 <= hi.to_f64());
    assert!((l.to_f64() - 0.75).abs() < 1e-12);
}

proptest! {
    #[test]
    fn logmag_brackets_true_log(n in 1i64..1_000_000, d in 1i64..1_000_000) {
        let (lo, hi) = to_logmag(&rat(n, d)).log2_bounds();
        let truth = ln2_of(n, d);
        prop_assert!(lo.to_f64() <= truth + 1e-12);
        prop_assert!(truth - 1e-12 <= hi.to_f64());
    }

    #[test]
    fn logmag_compare_agrees_with_exact(a in 1i64..100_000, b in 1i64..100_000, c in 1i64..100_000, d in 1i64..100_000) {
        let x = rat(a, b);
        let y = rat(c, d);
        let got = cmp_logmag(&to_logmag(&x), &to_logmag(&y));
        if got != LogOrdering::Uncertain {
            prop_assert_eq!(got.to_ordering(), Some(x.cmp(&y)));
        }
    }

    #[test]
    fn scale_composes(n in 2i64..10_000, e1 in 1i64..40, e2 in 1i64..40, d1 in 1i64..7, d2 in 1i64..7) {
        let a = to_logmag(&rat(n, 1));
        let f1 = rat(e1, d1);
        let f2 = rat(e2, d2);
        let nested = scale_logmag(&scale_logmag(&a, &f1).unwrap(), &f2).unwrap();
        let direct = scale_logmag(&a, &(&f1 * &f2)).unwrap();
        let (nl, nh) = nested.log2_bounds();
        let (dl, dh) = direct.log2_bounds();
        prop_assert!(nl <= dh && dl <= nh);
        let truth = (n as f64).log2() * (e1 * e2) as f64 / (d1 * d2) as f64;
        prop_assert!(dl.to_f64() <= truth + 1e-9 && truth - 1e-9 <= dh.to_f64());
    }

    #[test]
    fn product_decision_matches_integers(bases in prop::collection::vec(1u64..50, 1..4), exps in prop::collection::vec(-6i64..7, 1..4)) {
        let k = bases.len().min(exps.len());
        let terms: Vec<PowerTerm> = (0..k).map(|j| PowerTerm::int(Factored::from_u64(bases[j]).unwrap(), exps[j])).collect();
        let d = compare_product_with_one(&terms, DEFAULT_BIT_BUDGET);
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for j in 0..k {
            let p = num_traits::pow(BigInt::from(bases[j]), exps[j].unsigned_abs() as usize);
            if exps[j] >= 0 { num *= p } else { den *= p }
        }
        prop_assert_eq!(d.ordering, Some(num.cmp(&den)));
    }

    #[test]
    fn arithmetic_functions_are_multiplicative(m in 1u64..300, n in 1u64..300) {
        prop_assume!(m.gcd(&n) == 1);
        for f in [ArithFn::DivisorCount, ArithFn::Sigma, ArithFn::Totient] {
            prop_assert_eq!(f.eval(m * n).unwrap(), f.eval(m).unwrap() * f.eval(n).unwrap());
        }
    }

    #[test]
    fn totients_of_divisors_sum_to_n(n in 1u64..5_000) {
        let s: u64 = (1..=n).filter(|d| n % d == 0).map(|d| ArithFn::Totient.eval(d).unwrap()).sum();
        prop_assert_eq!(s, n);
    }

    #[test]
    fn convergent_matches_reverse_summation(k in 2i64..9, c0 in 0i64..5, c1 in 1i64..5, order in 1u64..8) {
        let spec = SeriesSpec::new(SeriesMode::SumDirect, vec![SequenceSpec::polynomial(&[c0, c1])], SequenceSpec::power(k)).unwrap();
        let conv = spec.convergent(1, order).unwrap();
        let mut total = BigRational::zero();
        for n in (1..=order).rev() {
            let b = num_traits::pow(BigInt::from(k), n as usize);
            total += BigRational::new(BigInt::from(c0 + c1 * n as i64), b);
        }
        prop_assert_eq!(conv.value(), total);
        prop_assert_eq!(conv.q, spec.q(order).unwrap());
    }

    #[test]
    fn exact_search_is_complete(vals in prop::collection::vec((-6i64..7, 1i64..5), 2..4), bound in 1u64..3) {
        let values: Vec<Enclosure> = vals.iter().map(|&(n, d)| Enclosure::point(rat(n, d))).collect();
        let cfg = SearchConfig::new(bound, 32, SearchMethod::Exhaustive);
        let found = find_relations(&values, &cfg).unwrap();
        prop_assert!(found.iter().all(|c| c.status == RelationStatus::Exact));
        let mut got: Vec<Vec<i64>> = found.into_iter().map(|c| c.z).collect();
        got.sort();
        let b = bound as i64;
        let k = values.len();
        let mut expected = Vec::new();
        let total = (2 * b + 1).pow(k as u32);
        for code in 0..total {
            let mut z = Vec::with_capacity(k);
            let mut rest = code;
            for _ in 0..k {
                z.push(rest % (2 * b + 1) - b);
                rest /= 2 * b + 1;
            }
            if z.iter().all(|&x| x == 0) {
                continue;
            }
            let s = z.iter().zip(&vals).fold(BigRational::zero(), |acc, (&zi, &(n, d))| acc + rat(zi * n, d));
            if s.is_zero() {
                expected.push(z);
            }
        }
        expected.sort();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn root_enclosures_tighten_with_precision(k in 2i64..200, p in 8u64..40) {
        let x = rat(k * k, 1);
        let half = rat(1, 2);
        let coarse = pow_enclosure(&x, &half, p, DEFAULT_BIT_BUDGET).unwrap();
        let fine = pow_enclosure(&x, &half, p + 16, DEFAULT_BIT_BUDGET).unwrap();
        let truth = rat(k, 1);
        prop_assert!(coarse.contains(&truth) && fine.contains(&truth));
        prop_assert!(fine.width() <= coarse.width());
    }

    #[test]
    fn height_is_max_abs(xs in prop::collection::vec(-1_000_000i64..1_000_000, 1..6)) {
        let point: Vec<BigInt> = xs.iter().map(|&x| BigInt::from(x)).collect();
        let expected = xs.iter().map(|x| x.unsigned_abs()).max().unwrap();
        prop_assert_eq!(height(&point).to_u64(), Some(expected));
        prop_assert!(!height(&point).is_negative());
    }

    #[test]
    fn enclosure_product_contains_samples(a in -50i64..50, w1 in 0i64..20, b in -50i64..50, w2 in 0i64..20, t1 in 0i64..=10, t2 in 0i64..=10) {
        let x = Enclosure::new(rat(a, 1), rat(a + w1, 1)).unwrap();
        let y = Enclosure::new(rat(b, 1), rat(b + w2, 1)).unwrap();
        let sx = rat(a * 10 + w1 * t1, 10);
        let sy = rat(b * 10 + w2 * t2, 10);
        prop_assert!(x.mul(&y).contains(&(sx * sy)));
    }
}

#[test]
fn sieve_matches_pointwise_evaluation() {
    for f in [ArithFn::DivisorCount, ArithFn::Sigma, ArithFn::Totient] {
        let values = sieve(f, 2_000).unwrap();
        for (i, v) in values.iter().enumerate() {
            assert_eq!(Some(*v), f.eval(i as u64 + 1).ok());
        }
    }
}
