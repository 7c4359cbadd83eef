//! Exact linear algebra over the integers and the rationals.
//!
//! Integer routines use unimodular row operations only, so kernels come out
//! saturated. Rational nullspaces go through fraction-free (Bareiss)
//! elimination on integer rows; no floating point is involved anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Integer basis of `{c in Z^n : sum_k c_k vectors[k] = 0}`, in row Hermite
/// normal form.
///
/// `vectors` holds `n` integer vectors of a common length.
pub fn integer_kernel(vectors: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let n = vectors.len();
    let dim = vectors.first().map_or(0, Vec::len);
    // rows: [v_k | e_k]
    let mut rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let mut row: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
            row.extend((0..n).map(|j| if j == k { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let rank = integer_echelon(&mut rows, dim);
    let kernel: Vec<Vec<BigInt>> = rows[rank..].iter().map(|r| r[dim..].to_vec()).collect();
    hermite_normal_form(kernel)
}

/// Brings the first `cols` columns of `rows` into echelon form with
/// unimodular row operations; returns the number of pivots.
fn integer_echelon(rows: &mut [Vec<BigInt>], cols: usize) -> usize {
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row == rows.len() {
            break;
        }
        loop {
            // smallest nonzero |entry| at or below pivot_row
            let best = (pivot_row..rows.len())
                .filter(|&r| !rows[r][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..rows.len() {
                if rows[r][c].is_zero() {
                    continue;
                }
                let q = rows[r][c].div_floor(&rows[pivot_row][c]);
                let pivot = rows[pivot_row].clone();
                for (x, p) in rows[r].iter_mut().zip(&pivot) {
                    *x -= &q * p;
                }
                if !rows[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !rows[pivot_row][c].is_zero() {
            pivot_row += 1;
        }
    }
    pivot_row
}

/// Row Hermite normal form: positive pivots, entries above each pivot reduced
/// into `[0, pivot)`, zero rows dropped.
pub fn hermite_normal_form(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let cols = rows.first().map_or(0, Vec::len);
    let rank = integer_echelon(&mut rows, cols);
    rows.truncate(rank);
    let mut pivot_cols = Vec::with_capacity(rank);
    for row in rows.iter_mut() {
        let c = row.iter().position(|x| !x.is_zero()).expect("nonzero echelon row");
        if row[c].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        pivot_cols.push(c);
    }
    for i in 0..rows.len() {
        let c = pivot_cols[i];
        let pivot_row = rows[i].clone();
        for row in rows.iter_mut().take(i) {
            let q = row[c].div_floor(&pivot_row[c]);
            if q.is_zero() {
                continue;
            }
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &q * p;
            }
        }
    }
    rows
}

/// Determinant of a square integer matrix (Bareiss).
pub fn determinant(mat: &[Vec<i64>]) -> BigInt {
    let n = mat.len();
    let mut a: Vec<Vec<BigInt>> = mat
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
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
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(mat: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let cols = mat.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == mat.len() {
            break;
        }
        let Some(p) = (r..mat.len()).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][c].recip();
        for x in mat[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = mat[r].clone();
        for (i, row) in mat.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    mat.truncate(r);
    pivots
}

pub fn rank(mat: &[Vec<Rational>]) -> usize {
    let mut m = mat.to_vec();
    rref(&mut m).len()
}

/// Solves `sum_i x_i columns[i] = target`; `None` when inconsistent.
/// With dependent columns the free coordinates are set to zero.
pub fn solve_columns(columns: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let k = columns.len();
    let rows = target.len();
    let mut aug: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut x = vec![Rational::zero(); k];
    for (row, &c) in aug.iter().zip(&pivots) {
        x[c] = row[k].clone();
    }
    Some(x)
}

pub fn inverse(mat: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = mat.len();
    let mut aug: Vec<Vec<Rational>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of the right nullspace `{x : mat x = 0}`, computed by fraction-free
/// elimination. One vector per free column, with that coordinate set to 1.
pub fn nullspace(mat: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    // clear denominators row by row
    let mut rows: Vec<Vec<BigInt>> = mat
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            r.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let pivots = bareiss_echelon(&mut rows, cols);
    let pivot_set: Vec<bool> = (0..cols).map(|c| pivots.contains(&c)).collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !pivot_set[c]) {
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        for (i, &p) in pivots.iter().enumerate().rev() {
            let mut acc = Rational::zero();
            for j in p + 1..cols {
                if !rows[i][j].is_zero() && !x[j].is_zero() {
                    acc += Rational::from_integer(rows[i][j].clone()) * &x[j];
                }
            }
            x[p] = -acc / Rational::from_integer(rows[i][p].clone());
        }
        basis.push(x);
    }
    basis
}

/// Fraction-free forward elimination; keeps only the nonzero echelon rows.
fn bareiss_echelon(rows: &mut Vec<Vec<BigInt>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot_row[c].clone();
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}
