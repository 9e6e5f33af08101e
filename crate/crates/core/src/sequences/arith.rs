//! Divisor count, divisor sum and Euler's totient, pointwise and sieved.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArithFn {
    DivisorCount,
    Sigma,
    Totient,
}

impl ArithFn {
    pub fn name(self) -> &'static str {
        match self {
            ArithFn::DivisorCount => "divisor-count",
            ArithFn::Sigma => "sigma",
            ArithFn::Totient => "totient",
        }
    }

    pub fn eval(self, n: u64) -> Result<u64> {
        match self {
            ArithFn::DivisorCount => divisor_count(n),
            ArithFn::Sigma => sigma(n),
            ArithFn::Totient => totient(n),
        }
    }

    /// Value at the prime power `p^k`.
    fn at_prime_power(self, p: u64, k: u32, pk: u64) -> u64 {
        match self {
            ArithFn::DivisorCount => k as u64 + 1,
            ArithFn::Sigma => (pk * p - 1) / (p - 1),
            ArithFn::Totient => pk - pk / p,
        }
    }
}

fn require_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("arithmetic functions are defined for n >= 1".into()));
    }
    Ok(())
}

/// Prime factorization by trial division, as `(p, k)` pairs in increasing order.
fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn multiplicative(f: ArithFn, n: u64) -> Result<u64> {
    require_positive(n)?;
    let mut acc: u64 = 1;
    for (p, k) in factorize(n) {
        let pk = p.checked_pow(k).expect("p^k divides n");
        let v = if f == ArithFn::Sigma {
            // (p^{k+1} - 1)/(p - 1) may overflow through p^{k+1}; sum the powers instead.
            let mut s: u64 = 0;
            let mut t: u64 = 1;
            for _ in 0..=k {
                s = s.checked_add(t).ok_or_else(|| Error::TooLarge(format!("sigma({n})")))?;
                t = t.saturating_mul(p);
            }
            s
        } else {
            f.at_prime_power(p, k, pk)
        };
        acc = acc.checked_mul(v).ok_or_else(|| Error::TooLarge(format!("{}({n})", f.name())))?;
    }
    Ok(acc)
}

/// Number of positive divisors of `n`.
pub fn divisor_count(n: u64) -> Result<u64> {
    multiplicative(ArithFn::DivisorCount, n)
}

/// Sum of positive divisors of `n`.
pub fn sigma(n: u64) -> Result<u64> {
    multiplicative(ArithFn::Sigma, n)
}

/// Euler's totient of `n`.
pub fn totient(n: u64) -> Result<u64> {
    multiplicative(ArithFn::Totient, n)
}

/// Values `f(1), ..., f(n_max)` from a smallest-prime-factor sieve.
pub fn sieve(f: ArithFn, n_max: u64) -> Result<Vec<u64>> {
    require_positive(n_max)?;
    let len = usize::try_from(n_max).map_err(|_| Error::TooLarge(format!("sieve bound {n_max}")))? + 1;
    let mut spf = vec![0u64; len];
    let mut primes: Vec<u64> = Vec::new();
    for i in 2..len {
        if spf[i] == 0 {
            spf[i] = i as u64;
            primes.push(i as u64);
        }
        for &p in &primes {
            let ip = i as u64 * p;
            if p > spf[i] || ip >= len as u64 {
                break;
            }
            spf[ip as usize] = p;
        }
    }
    let mut values = vec![0u64; len];
    values[1] = 1;
    for i in 2..len {
        let p = spf[i];
        let mut m = i as u64;
        let mut k = 0u32;
        let mut pk = 1u64;
        while m % p == 0 {
            m /= p;
            k += 1;
            pk *= p;
        }
        values[i] = values[m as usize] * f.at_prime_power(p, k, pk);
    }
    values.remove(0);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_examples() {
        assert_eq!(divisor_count(1).unwrap(), 1);
        assert_eq!(divisor_count(7).unwrap(), 2);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert_eq!(sigma(1).unwrap(), 1);
        assert_eq!(sigma(6).unwrap(), 12);
        assert_eq!(sigma(13).unwrap(), 14);
        assert_eq!(totient(1).unwrap(), 1);
        assert_eq!(totient(6).unwrap(), 2);
        assert_eq!(totient(13).unwrap(), 12);
    }

    #[test]
    fn zero_is_a_domain_error() {
        for f in [ArithFn::DivisorCount, ArithFn::Sigma, ArithFn::Totient] {
            assert!(matches!(f.eval(0), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve(ArithFn::DivisorCount, 6).unwrap(), vec![1, 2, 2, 3, 2, 4]);
        assert_eq!(sieve(ArithFn::Sigma, 4).unwrap(), vec![1, 3, 4, 7]);
        assert_eq!(sieve(ArithFn::Totient, 1).unwrap(), vec![1]);
    }

    #[test]
    fn large_prime_power() {
        assert_eq!(sigma(1 << 40).unwrap(), (1u64 << 41) - 1);
        assert_eq!(totient(1_000_000_007).unwrap(), 1_000_000_006);
    }
}
