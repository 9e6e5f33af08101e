//! Integral LLL reduction: all Gram-Schmidt data kept as integers
//! (`d_i` and `lambda_{k,j}`), so no rational arithmetic is needed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rounds `a / b` to nearest (`b > 0`), ties toward +infinity.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * two))
}

/// Reduces the rows of `basis` in place with quality parameter `delta` in (1/4, 1].
///
/// Rows must be linearly independent.
pub fn lll_reduce(basis: &mut [Vec<BigInt>], delta: &BigRational) -> Result<()> {
    let quarter = BigRational::new(1.into(), 4.into());
    if *delta <= quarter || *delta > BigRational::from_integer(1.into()) {
        return Err(Error::Domain(format!("LLL parameter {delta} must lie in (1/4, 1]")));
    }
    let n = basis.len();
    if n <= 1 {
        return Ok(());
    }
    let (a, b) = (delta.numer().clone(), delta.denom().clone());
    // d[0] = 1, d[i] = Gram determinant of the first i rows.
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::from(1);
    d[1] = dot(&basis[0], &basis[0]);
    if d[1].is_zero() {
        return Err(Error::Domain("zero vector in LLL basis".into()));
    }
    let mut k = 1usize;
    let mut kmax = 0usize;

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&basis[k], &basis[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(Error::Domain("LLL basis is linearly dependent".into()));
                    }
                    d[k + 1] = u;
                }
            }
        }
        reduce(basis, &mut lam, &d, k, k - 1);
        // Lovasz: b d_{k+1} d_{k-1} < a d_k^2 - b lam^2 triggers a swap.
        let lhs = &b * &d[k + 1] * &d[k - 1];
        let rhs = &a * &d[k] * &d[k] - &b * &lam[k][k - 1] * &lam[k][k - 1];
        if lhs < rhs {
            swap(basis, &mut lam, &mut d, k, kmax);
            k = k.saturating_sub(1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(basis, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
    Ok(())
}

fn reduce(basis: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
    let two_abs = lam[k][l].abs() * 2;
    if two_abs <= d[l + 1] {
        return;
    }
    let q = round_div(&lam[k][l], &d[l + 1]);
    let row_l = basis[l].clone();
    for (x, y) in basis[k].iter_mut().zip(&row_l) {
        *x -= &q * y;
    }
    lam[k][l] -= &q * &d[l + 1];
    for i in 0..l {
        let t = &q * &lam[l][i];
        lam[k][i] -= t;
    }
}

fn swap(basis: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &mut [BigInt], k: usize, kmax: usize) {
    basis.swap(k, k - 1);
    for j in 0..k - 1 {
        let t = std::mem::take(&mut lam[k][j]);
        lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
    }
    let l = lam[k][k - 1].clone();
    let bb = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
        lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k + 1];
    }
    d[k] = bb;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn three_quarters() -> BigRational {
        BigRational::new(3.into(), 4.into())
    }

    /// Oracle: rational Gram-Schmidt and the textbook size and Lovasz conditions.
    fn is_reduced(basis: &[Vec<BigInt>], delta: &BigRational) -> bool {
        let n = basis.len();
        let to_q = |v: &Vec<BigInt>| v.iter().map(|x| BigRational::from_integer(x.clone())).collect::<Vec<_>>();
        let qdot = |a: &[BigRational], b: &[BigRational]| a.iter().zip(b).map(|(x, y)| x * y).fold(BigRational::zero(), |s, t| s + t);
        let mut star: Vec<Vec<BigRational>> = Vec::new();
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            let mut v = to_q(&basis[i]);
            for j in 0..i {
                mu[i][j] = qdot(&to_q(&basis[i]), &star[j]) / qdot(&star[j], &star[j]);
                for (x, y) in v.iter_mut().zip(&star[j]) {
                    *x -= &mu[i][j] * y;
                }
            }
            star.push(v);
        }
        let half = BigRational::new(1.into(), 2.into());
        for i in 1..n {
            for j in 0..i {
                if mu[i][j].abs() > half {
                    return false;
                }
            }
            let lhs = qdot(&star[i], &star[i]);
            let rhs = (delta - &mu[i][i - 1] * &mu[i][i - 1]) * qdot(&star[i - 1], &star[i - 1]);
            if lhs < rhs {
                return false;
            }
        }
        true
    }

    #[test]
    fn reduces_textbook_example() {
        let mut b = rows(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]);
        lll_reduce(&mut b, &three_quarters()).unwrap();
        assert!(is_reduced(&b, &three_quarters()));
        assert_eq!(b[0], rows(&[&[0, 1, 0]])[0]);
    }

    #[test]
    fn finds_planted_integer_relation() {
        // x = (1, sqrt2 ~ 1.41421356, 1 + sqrt2): relation (1, 1, -1).
        let scale = 1i64 << 30;
        let v = [1.0f64, 2f64.sqrt(), 1.0 + 2f64.sqrt()];
        let mut b: Vec<Vec<BigInt>> = (0..3)
            .map(|i| {
                let mut row = vec![BigInt::zero(); 4];
                row[i] = BigInt::from(1);
                row[3] = BigInt::from((v[i] * scale as f64).round() as i64);
                row
            })
            .collect();
        lll_reduce(&mut b, &three_quarters()).unwrap();
        assert!(is_reduced(&b, &three_quarters()));
        let first: Vec<i64> = b[0][..3].iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert!(first == [1, 1, -1] || first == [-1, -1, 1], "{first:?}");
    }

    #[test]
    fn rejects_bad_input() {
        let mut b = rows(&[&[1, 2], &[2, 4]]);
        assert!(lll_reduce(&mut b, &three_quarters()).is_err());
        let mut b = rows(&[&[1, 0], &[0, 1]]);
        assert!(lll_reduce(&mut b, &BigRational::new(1.into(), 5.into())).is_err());
    }
}
