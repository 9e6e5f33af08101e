//! End-to-end acceptance checks. Each criterion prints one pass/fail line;
//! run with `cargo test -p dioph-core --test acceptance -- --nocapture`.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use dioph_core::approx::{
    build_subspace_instance, corollary_series, error_enclosure, geometric_tail_bound, measured_exponent, power_tail_bound,
    product_tail_bound, SeriesMode, SeriesSpec,
};
use dioph_core::criteria::{check_condition1, check_growth_window, check_prefix_power_bound, check_theorem_a, CriteriaConfig, Window};
use dioph_core::exact::{Method, DEFAULT_BIT_BUDGET};
use dioph_core::relations::{corollary_independence_probe, default_search, find_series_relations, RelationStatus};
use dioph_core::scenario::{builtin, run_scenario};
use dioph_core::sequences::{corollary_denominator_spec, sieve, ArithFn, SequenceSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Exponents of two in the corollary denominators: `e_1 = 1`, `e_{n+1} = 2 (e_1 + ... + e_n)`.
fn corollary_exponents(n: usize) -> Vec<i128> {
    let mut e = vec![1i128];
    while e.len() < n {
        let s: i128 = e.iter().sum();
        e.push(2 * s);
    }
    e
}

fn pow2_rat(k: i128) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::one() << k as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

fn log2_rat(x: &BigRational) -> f64 {
    let shift = x.numer().bits() as i64 - x.denom().bits() as i64;
    let scaled = if shift > 0 { x / pow2_rat(shift as i128) } else { x * pow2_rat(-shift as i128) };
    scaled.to_f64().unwrap().log2() + shift as f64
}

fn criterion_1() -> Outcome {
    let b = corollary_denominator_spec();
    let e = corollary_exponents(13);
    for n in 1..=12u64 {
        let prefix: i128 = e[..n as usize].iter().sum();
        let next = e[n as usize];
        // (3/2) prefix <= next, (2 + delta) prefix > next.
        let oracle_low = 3 * prefix <= 2 * next;
        let d = check_prefix_power_bound(&b, &rat(3, 2), n, DEFAULT_BIT_BUDGET).map_err(|e| e.to_string())?;
        ensure(d.method == Method::TwoAdicExponents, || format!("N={n}: method {:?}", d.method))?;
        let holds = matches!(d.ordering, Some(Ordering::Greater | Ordering::Equal));
        ensure(holds && oracle_low, || format!("N={n}: exponent 3/2 gave {:?}", d.ordering))?;
        for (num, den) in [(201, 100), (3, 1)] {
            let oracle_high = num as i128 * prefix > den as i128 * next;
            let d = check_prefix_power_bound(&b, &rat(num, den), n, DEFAULT_BIT_BUDGET).map_err(|e| e.to_string())?;
            ensure(d.ordering == Some(Ordering::Less) && oracle_high, || format!("N={n}: exponent {num}/{den} gave {:?}", d.ordering))?;
        }
    }
    Ok("N = 1..12, exponents 3/2, 201/100, 3".into())
}

fn criterion_2() -> Outcome {
    let s = corollary_series();
    let d1 = measured_exponent(&s, 1, 3).map_err(|e| e.to_string())?.delta.to_f64().unwrap();
    let d2 = measured_exponent(&s, 2, 3).map_err(|e| e.to_string())?.delta.to_f64().unwrap();
    // Exact error at N = 3: c_4/b_4 + c_5/b_5 + ..., q_3 = 2^9.
    let e = corollary_exponents(6);
    let b = |n: usize| pow2_rat(e[n - 1]);
    let d = |n: i64| (1..=n).filter(|k| n % k == 0).count() as i64;
    let err1: BigRational = (4..=6).map(|n| b(n).recip()).fold(BigRational::zero(), |a, x| a + x);
    let err2: BigRational = (4..=6).map(|n| rat(d(n as i64), 1) / b(n)).fold(BigRational::zero(), |a, x| a + x);
    let oracle = |err: &BigRational| -log2_rat(err) / 9.0 - 1.0;
    ensure((d1 - 1.0).abs() <= 1e-4 && (d1 - oracle(&err1)).abs() <= 1e-6, || format!("delta_3(c=1) = {d1}"))?;
    ensure((d2 - 0.824).abs() <= 1e-3 && (d2 - oracle(&err2)).abs() <= 1e-6, || format!("delta_3(c=d) = {d2}"))?;
    let mut min = f64::INFINITY;
    for i in 1..=2 {
        for n in 2..=8 {
            let m = measured_exponent(&s, i, n).map_err(|e| e.to_string())?.delta.to_f64().unwrap();
            ensure(m >= 0.51, || format!("delta_{n} for series {i} = {m}"))?;
            min = min.min(m);
        }
    }
    Ok(format!("delta_3 = {d1:.6}, {d2:.6}; min over N=2..8 = {min:.6}"))
}

enum BoundKind {
    Geometric,
    Power,
    Product,
}

fn random_bound_case(kind: &BoundKind, rng: &mut ChaCha8Rng) -> Option<(BigRational, BigRational)> {
    let order = rng.gen_range(1..=6u64);
    let k = rng.gen_range(2..=9i64);
    let b = if rng.gen_bool(0.2) { corollary_denominator_spec() } else { SequenceSpec::power(k) };
    match kind {
        BoundKind::Geometric => {
            let c = if rng.gen_bool(0.5) {
                SequenceSpec::constant(rng.gen_range(1..=20))
            } else {
                SequenceSpec::polynomial(&[rng.gen_range(0..=3), rng.gen_range(1..=3)])
            };
            let spec = SeriesSpec::new(SeriesMode::SumDirect, vec![c], b).ok()?;
            let a = rat(rng.gen_range(11..=(10 * k.max(2))), 10);
            let bound = geometric_tail_bound(&spec, 1, order, &a, 6).ok()?;
            let err = error_enclosure(&spec, 1, order, 2).ok()?;
            Some((bound.upper, err.upper().clone()))
        }
        BoundKind::Power => {
            let c = SequenceSpec::constant(rng.gen_range(1..=k));
            let spec = SeriesSpec::new(SeriesMode::SumDirect, vec![c], b).ok()?;
            let eps = rat(rng.gen_range(1..=3), 1);
            let bound = power_tail_bound(&spec, 1, order, &eps, 6).ok()?;
            let err = error_enclosure(&spec, 1, order, 2).ok()?;
            Some((bound.upper, err.upper().clone()))
        }
        BoundKind::Product => {
            let c = if rng.gen_bool(0.5) { SequenceSpec::constant(rng.gen_range(0..=2)) } else { SequenceSpec::divisor_count() };
            let spec = SeriesSpec::new(SeriesMode::Product, vec![c], b).ok()?;
            let order = order + 2;
            let bound = product_tail_bound(&spec, 1, order, 6).ok()?;
            let err = error_enclosure(&spec, 1, order, 2).ok()?;
            Some((bound.upper, err.upper().clone()))
        }
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
    let mut summary = Vec::new();
    for (name, kind) in [("geometric", BoundKind::Geometric), ("power", BoundKind::Power), ("product", BoundKind::Product)] {
        let mut certified = 0;
        let mut tries = 0;
        while certified < 100 && tries < 5000 {
            tries += 1;
            if let Some((bound, err)) = random_bound_case(&kind, &mut rng) {
                ensure(bound >= err, || format!("{name} bound {bound} below error upper end {err}"))?;
                certified += 1;
            }
        }
        ensure(certified >= 100, || format!("{name}: only {certified} certified specs in {tries} draws"))?;
        summary.push(format!("{name} {certified}/{tries}"));
    }
    Ok(summary.join(", "))
}

fn criterion_4() -> Outcome {
    let s = corollary_series();
    let mut at3 = 0.0;
    for n in 3..=8 {
        let inst = build_subspace_instance(&s, n, 64).map_err(|e| e.to_string())?;
        let d = inst.delta_prime_max.to_f64();
        ensure(d >= 0.5, || format!("N={n}: delta'_max = {d}"))?;
        if n == 3 {
            at3 = d;
        }
    }
    // Oracle at N = 3 from exact partial sums and a three-term tail.
    let e = corollary_exponents(6);
    let q = |n: usize| pow2_rat(e[..n].iter().sum());
    let b = |n: usize| pow2_rat(e[n - 1]);
    let dcount = |n: i64| (1..=n).filter(|k| n % k == 0).count() as i64;
    let q3 = q(3);
    let mut point = Vec::new();
    let mut product = q3.clone();
    for c in [|_: i64| 1i64, dcount] {
        let partial: BigRational = (1..=3).map(|n| rat(c(n as i64), 1) / b(n)).fold(BigRational::zero(), |a, x| a + x);
        let tail: BigRational = (4..=6).map(|n| rat(c(n as i64), 1) / b(n)).fold(BigRational::zero(), |a, x| a + x);
        point.push((&partial * &q3).to_integer());
        product *= &tail * &q3;
    }
    point.push(q3.to_integer());
    let h = point.iter().map(|x| x.magnitude().clone()).max().unwrap();
    let oracle = -log2_rat(&product) / log2_rat(&BigRational::from_integer(h.into()));
    ensure((at3 - 0.82).abs() <= 0.02 && (at3 - oracle).abs() <= 1e-5, || format!("N=3: delta'_max = {at3}, oracle {oracle}"))?;
    Ok(format!("N = 3..8 all >= 0.5; N=3 delta'_max = {at3:.6} (oracle {oracle:.6})"))
}

fn criterion_5() -> Outcome {
    let planted = SeriesSpec::new(
        SeriesMode::SumDirect,
        vec![SequenceSpec::constant(1), SequenceSpec::polynomial(&[0, 1]), SequenceSpec::polynomial(&[1, 1])],
        corollary_denominator_spec(),
    )
    .map_err(|e| e.to_string())?;
    let report = find_series_relations(&planted, &default_search(1, 128), Window::new(1, 6).unwrap()).map_err(|e| e.to_string())?;
    let hit = report.candidates.iter().find(|c| c.z == [0, 1, 1, -1]).ok_or("planted relation not found")?;
    ensure(hit.status == RelationStatus::ConfirmedOnConvergents, || format!("planted status {}", hit.status))?;

    let report = find_series_relations(&corollary_series(), &default_search(20, 332), Window::new(1, 8).unwrap()).map_err(|e| e.to_string())?;
    ensure(report.candidates.is_empty(), || format!("{} candidates for the corollary pair", report.candidates.len()))?;

    let probe = corollary_independence_probe(10, Window::new(1, 8).unwrap()).map_err(|e| e.to_string())?;
    // Nonzero (z0, z1, z2) with entries in [-10, 10].
    let expected = 21u64.pow(3) - 1;
    ensure(probe.candidates == expected && probe.refuted == expected, || format!("probe refuted {}/{}", probe.refuted, probe.candidates))?;
    let w = &probe.witness;
    ensure((w.n1, w.d1, w.n2, w.d2) == (2, 2, 4, 3), || format!("witness {w:?}"))?;
    Ok(format!("planted recovered; 0 candidates at B=20; probe refuted {expected}"))
}

fn brute_divisors(n: u64) -> (u64, u64) {
    let mut count = 0;
    let mut sum = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            count += 1;
            sum += d;
            if d * d != n {
                count += 1;
                sum += n / d;
            }
        }
        d += 1;
    }
    (count, sum)
}

fn brute_totient(n: u64) -> u64 {
    let mut m = n;
    let mut phi = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

fn criterion_6() -> Outcome {
    const N: u64 = 10_000;
    let d = sieve(ArithFn::DivisorCount, N).map_err(|e| e.to_string())?;
    let s = sieve(ArithFn::Sigma, N).map_err(|e| e.to_string())?;
    let phi = sieve(ArithFn::Totient, N).map_err(|e| e.to_string())?;
    ensure(d.len() == N as usize && s.len() == N as usize && phi.len() == N as usize, || "sieve lengths".into())?;
    for n in 1..=N {
        let (count, sum) = brute_divisors(n);
        let i = (n - 1) as usize;
        ensure(d[i] == count && s[i] == sum && phi[i] == brute_totient(n), || format!("mismatch at n = {n}"))?;
    }
    Ok(format!("d, sigma, phi agree for n <= {N}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    let cfg = CriteriaConfig::default();
    let window = Window::new(1, 8).unwrap();
    let deltas = [rat(1, 100), rat(1, 2), rat(3, 5), rat(1, 1), rat(2, 1)];
    let mut both = 0;
    for k in 0..50 {
        let b = SequenceSpec::prefix_power(rng.gen_range(2..=5), rng.gen_range(2..=4));
        let c = if rng.gen_bool(0.5) { SequenceSpec::constant(rng.gen_range(1..=5)) } else { SequenceSpec::divisor_count() };
        let delta = &deltas[rng.gen_range(0..deltas.len())];
        let a = check_theorem_a(std::slice::from_ref(&c), &b, delta, window, &cfg).map_err(|e| e.to_string())?;
        let one = check_condition1(std::slice::from_ref(&c), &b, delta, window, &cfg).map_err(|e| e.to_string())?;
        if a.verdict.is_satisfied() {
            ensure(one.verdict.is_satisfied(), || format!("spec {k}: theoremA satisfied but condition1 {:?}", one.verdict))?;
            both += 1;
        }
    }
    let g = check_growth_window(&corollary_denominator_spec(), 2, Window::new(1, 12).unwrap()).map_err(|e| e.to_string())?;
    let expected = (2.0f64 / 9.0).exp2();
    ensure((g.liminf_estimate - expected).abs() <= 1e-6 && (g.limsup_estimate - expected).abs() <= 1e-6, || {
        format!("growth liminf {} limsup {}", g.liminf_estimate, g.limsup_estimate)
    })?;
    Ok(format!("{both}/50 theoremA-satisfied specs also satisfy condition1; growth {:.6}", g.liminf_estimate))
}

fn criterion_8() -> Outcome {
    let config = builtin("corollary").map_err(|e| e.to_string())?;
    let first = run_scenario(&config).map_err(|e| e.to_string())?.to_json();
    let second = run_scenario(&config).map_err(|e| e.to_string())?.to_json();
    ensure(first == second, || "reports differ".into())?;
    Ok(format!("{} bytes identical", first.len()))
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome, Option<Duration>); 8] = [
        (1, criterion_1, Some(Duration::from_secs(1))),
        (2, criterion_2, Some(Duration::from_secs(1))),
        (3, criterion_3, Some(Duration::from_secs(30))),
        (4, criterion_4, Some(Duration::from_secs(5))),
        (5, criterion_5, Some(Duration::from_secs(60))),
        (6, criterion_6, Some(Duration::from_secs(5))),
        (7, criterion_7, Some(Duration::from_secs(10))),
        (8, criterion_8, None),
    ];
    let mut failures = Vec::new();
    for (id, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(detail), Some(limit)) if elapsed > limit => Err(format!("{detail}; took {elapsed:?}, limit {limit:?}")),
            (o, _) => o,
        };
        match &outcome {
            Ok(detail) => println!("criterion {id}: PASS ({} ms) {detail}", elapsed.as_millis()),
            Err(why) => {
                println!("criterion {id}: FAIL ({} ms) {why}", elapsed.as_millis());
                failures.push(id);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
