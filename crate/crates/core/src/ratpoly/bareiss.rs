//! Fraction-free (Bareiss) elimination over the integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{denominator_lcm, Rational};

/// Forward Bareiss elimination in place. Returns the sign of the row
/// permutation, or `None` when the leading square block is singular.
fn eliminate(a: &mut [Vec<BigInt>], n: usize) -> Option<i32> {
    let mut sign = 1;
    let mut prev = BigInt::one();
    let width = a.first().map_or(0, Vec::len);
    for k in 0..n {
        let pivot_row = (k..n).find(|&r| !a[r][k].is_zero())?;
        if pivot_row != k {
            a.swap(pivot_row, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..width {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    Some(sign)
}

/// Exact determinant of a square integer matrix.
pub fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    match eliminate(&mut a, n) {
        Some(sign) => {
            let d = a[n - 1][n - 1].clone();
            if sign < 0 {
                -d
            } else {
                d
            }
        }
        None => BigInt::zero(),
    }
}

/// Row-scaled integer matrix and the product of the row scales.
fn integerize(m: &[Vec<Rational>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let rows = m
        .iter()
        .map(|row| {
            let l = denominator_lcm(row);
            let lr = Rational::from_integer(l.clone());
            scale *= &l;
            row.iter().map(|c| (c * &lr).to_integer()).collect()
        })
        .collect();
    (rows, scale)
}

/// Exact determinant of a rational matrix: each row is scaled to integers,
/// the integer determinant is taken fraction-free, then the scales divided out.
pub fn det_rational(m: &[Vec<Rational>]) -> Rational {
    let (ints, scale) = integerize(m);
    Rational::new(bareiss_det(&ints), scale)
}

/// Classical adjoint of a square rational matrix, `M * adj(M) = det(M) I`.
///
/// Non-singular inputs are handled with one fraction-free elimination of
/// `[M | I]` followed by integral back substitution (Cramer); singular
/// inputs fall back to cofactors.
pub fn adjugate(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![Rational::one()]];
    }
    // A common scale keeps the integer matrix a multiple of M itself.
    let l = denominator_lcm(m.iter().flatten());
    let lr = Rational::from_integer(l.clone());
    let ints: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|c| (c * &lr).to_integer()).collect())
        .collect();
    // adj(L M) = L^(n-1) adj(M)
    let back = Rational::from_integer(num_traits::pow(l, n - 1));
    let adj_int = adjugate_int(&ints);
    adj_int
        .into_iter()
        .map(|row| row.into_iter().map(|v| Rational::from_integer(v) / &back).collect())
        .collect()
}

fn adjugate_int(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    let mut aug: Vec<Vec<BigInt>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let Some(sign) = eliminate(&mut aug, n) else {
        return cofactor_adjugate(m);
    };
    let det = if sign < 0 {
        -aug[n - 1][n - 1].clone()
    } else {
        aug[n - 1][n - 1].clone()
    };
    let mut adj = vec![vec![BigInt::zero(); n]; n];
    for col in 0..n {
        // column `col` of adj(M) = det * M^{-1} e_col
        let mut x = vec![BigInt::zero(); n];
        for i in (0..n).rev() {
            let mut acc = &det * &aug[i][n + col];
            for k in i + 1..n {
                acc -= &aug[i][k] * &x[k];
            }
            x[i] = acc / &aug[i][i];
        }
        for i in 0..n {
            adj[i][col] = x[i].clone();
        }
    }
    adj
}

fn cofactor_adjugate(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    let mut adj = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<BigInt>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
                .collect();
            let d = bareiss_det(&minor);
            // adj is the transposed cofactor matrix
            adj[j][i] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    adj
}
