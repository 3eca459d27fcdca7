//! Exact integer linear algebra over small matrices (fraction-free
//! elimination in `i128`, every operation overflow-checked).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::gcd;

fn overflow() -> Error {
    Error::Overflow { entry: i128::MAX }
}

fn mul_sub_div(a: i128, b: i128, c: i128, d: i128, div: i128) -> Result<i128> {
    let ab = a.checked_mul(b).ok_or_else(overflow)?;
    let cd = c.checked_mul(d).ok_or_else(overflow)?;
    let num = ab.checked_sub(cd).ok_or_else(overflow)?;
    debug_assert_eq!(num % div, 0, "Bareiss division must be exact");
    Ok(num / div)
}

/// Fraction-free row echelon reduction in place. Returns the rank and the
/// sign/value of the last pivot (the determinant when the matrix is square
/// and of full rank).
fn bareiss(m: &mut [Vec<i128>]) -> Result<(usize, i128)> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev: i128 = 1;
    let mut sign: i128 = 1;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        if p != rank {
            m.swap(p, rank);
            sign = -sign;
        }
        let piv = m[rank][col];
        for i in rank + 1..rows {
            let lead = m[i][col];
            for j in col + 1..cols {
                m[i][j] = mul_sub_div(m[i][j], piv, lead, m[rank][j], prev)?;
            }
            m[i][col] = 0;
        }
        prev = piv;
        rank += 1;
    }
    Ok((rank, sign * prev))
}

fn to_i128_rows<V: AsRef<[i64]>>(rows: &[V]) -> Vec<Vec<i128>> {
    rows.iter().map(|r| r.as_ref().iter().map(|&v| v as i128).collect()).collect()
}

/// Determinant of a square integer matrix given by rows (or columns; the
/// value is the same).
pub fn determinant<V: AsRef<[i64]>>(rows: &[V]) -> Result<i128> {
    let n = rows.len();
    if rows.iter().any(|r| r.as_ref().len() != n) {
        return Err(Error::InvalidInput("determinant of a non-square matrix".into()));
    }
    if n == 0 {
        return Ok(1);
    }
    let mut m = to_i128_rows(rows);
    let (rank, det) = bareiss(&mut m)?;
    Ok(if rank < n { 0 } else { det })
}

/// Rank over the rationals.
pub fn rank<V: AsRef<[i64]>>(rows: &[V]) -> Result<usize> {
    if rows.is_empty() {
        return Ok(0);
    }
    let mut m = to_i128_rows(rows);
    Ok(bareiss(&mut m)?.0)
}

/// Whether `vectors` (independent, `k` of them in dimension `n`) extend to a
/// basis of `Z^n`: the gcd of all maximal minors is 1.
pub fn is_primitive<V: AsRef<[i64]>>(vectors: &[V]) -> Result<bool> {
    let k = vectors.len();
    if k == 0 {
        return Ok(true);
    }
    let n = vectors[0].as_ref().len();
    let mut g: i128 = 0;
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let minor: Vec<Vec<i64>> = vectors.iter().map(|v| cols.iter().map(|&c| v.as_ref()[c]).collect()).collect();
        g = gcd(g, determinant(&minor)?);
        if g == 1 {
            return Ok(true);
        }
        // next k-subset of 0..n in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(false);
            }
            i -= 1;
            if cols[i] < n - k + i {
                break;
            }
        }
        cols[i] += 1;
        for j in i + 1..k {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

/// Inverse of a unimodular matrix given by its columns; returned row-major so
/// that `inv[i]` dotted with a vector gives coordinate `i` in the basis.
pub fn unimodular_inverse<V: AsRef<[i64]>>(columns: &[V]) -> Result<Vec<Vec<i128>>> {
    let n = columns.len();
    // matrix M with M[r][c] = columns[c][r]
    let m: Vec<Vec<i64>> = (0..n).map(|r| columns.iter().map(|c| c.as_ref()[r]).collect()).collect();
    let det = determinant(&m)?;
    if det != 1 && det != -1 {
        return Err(Error::NotUnimodular { det });
    }
    let mut inv = vec![vec![0i128; n]; n];
    for r in 0..n {
        for c in 0..n {
            // cofactor C[r][c]; adj = C^T so inv[c][r] = det * C[r][c]
            let minor: Vec<Vec<i64>> =
                (0..n).filter(|&i| i != r).map(|i| (0..n).filter(|&j| j != c).map(|j| m[i][j]).collect()).collect();
            let sign = if (r + c) % 2 == 0 { 1 } else { -1 };
            inv[c][r] = det * sign * determinant(&minor)?;
        }
    }
    Ok(inv)
}
