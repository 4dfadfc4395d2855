//! Exact dense linear algebra over the integers and the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let pivot = a[c][c].clone();
        d *= &pivot;
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &pivot;
            for j in c..n {
                let v = &f * &a[c][j];
                a[i][j] -= v;
            }
        }
    }
    d
}

/// Solves `A x = b` when the solution exists and is unique; `A` is given by columns.
pub fn solve_unique(cols: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = cols.len();
    let m = rhs.len();
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut r = 0;
    let mut pivots = Vec::with_capacity(k);
    for c in 0..k {
        let p = (r..m).find(|&i| !a[i][c].is_zero())?;
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in c..=k {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..m {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..=k {
                    let v = &f * &a[r][j];
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(r);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&p| a[p][k].clone()).collect())
}

/// Greatest common divisor of a list of integers (non-negative, zero for an empty list).
pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::zero(), |g, v| g.gcd(v))
        .abs()
}
