//! Fraction-free elimination on dense integer matrices.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub(crate) type IntMatrix = Vec<Vec<BigInt>>;

/// Runs Bareiss elimination in place and returns `(rank, sign)` where `sign`
/// is the parity of the row swaps performed. For a square full-rank input the
/// last pivot is the determinant up to `sign`.
fn bareiss(a: &mut IntMatrix) -> (usize, i32) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut sign = 1;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if piv != r {
            a.swap(piv, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    (r, sign)
}

pub(crate) fn rank(m: &IntMatrix) -> usize {
    let mut a = m.clone();
    bareiss(&mut a).0
}

/// Determinant of a square matrix; 1 for the empty matrix.
pub(crate) fn det(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n));
    let mut a = m.clone();
    let (r, sign) = bareiss(&mut a);
    if r < n {
        return BigInt::zero();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}
