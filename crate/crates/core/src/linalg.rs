//! Exact rank by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

/// Rank of an integer matrix. Each pivot step keeps entries integral by
/// dividing exactly by the previous pivot.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                debug_assert!((&v % &prev).is_zero());
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Scales each row of a rational matrix to integers and returns its rank.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let int_rows = rows
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    bareiss_rank(int_rows)
}

pub fn small_rational_rank(rows: &[Vec<Rational64>]) -> usize {
    let big: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| crate::rational::big(*x)).collect())
        .collect();
    rational_rank(&big)
}

pub fn int_rank(rows: &[Vec<i64>]) -> usize {
    bareiss_rank(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if piv != k {
            a.swap(k, piv);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * a[n - 1][n - 1].clone()
    }
}

/// Rank from singular values with a relative threshold (floating-point oracle).
pub fn numeric_rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| s.abs() > rel_tol * max).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn ranks_of_small_matrices() {
        assert_eq!(bareiss_rank(m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(bareiss_rank(m(&[&[0, 1, 2], &[1, 0, 3], &[1, 1, 5]])), 2);
        assert_eq!(bareiss_rank(m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(bareiss_rank(m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]])), 3);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = m(&[&[2, -1, 0], &[1, 3, 1], &[0, 1, 4]]);
        // 2(12-1) - (-1)(4-0) + 0 = 26
        assert_eq!(bareiss_det(a), BigInt::from(26));
        assert_eq!(bareiss_det(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
    }

    #[test]
    fn numeric_rank_agrees() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 1.0]];
        assert_eq!(numeric_rank(&rows, 1e-9), 2);
    }

    #[test]
    fn rational_rows_are_cleared() {
        let r = |n, d| BigRational::new(BigInt::from(n), BigInt::from(d));
        let rows = vec![vec![r(1, 60), r(-11, 60)], vec![r(-11, 60), r(1, 60)]];
        assert_eq!(rational_rank(&rows), 2);
        assert!(!bareiss_det(m(&[&[1, -11], &[-11, 1]])).abs().is_zero());
    }
}
