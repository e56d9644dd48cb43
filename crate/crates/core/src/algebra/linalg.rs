//! Dense exact linear algebra over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{Monomial, Poly, Rational};

/// Gauss–Jordan inverse of a square matrix; `None` if singular.
pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Reduced row echelon form restricted to pivoting in the first `pivot_cols`
/// columns. Returns the pivot column of each pivot row.
fn rref(a: &mut [Vec<Rational>], pivot_cols: usize) -> Vec<usize> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pv = a[r][col].clone();
        for v in a[r].iter_mut() {
            *v /= &pv;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let (src, dst) = if i < r {
                    let (lo, hi) = a.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = a.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &f * s;
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Solves `a x = b`, returning one solution (free unknowns set to zero) or
/// `None` when the system is inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), b.len());
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, cols);
    if aug[pivots.len()..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = aug[row][cols].clone();
    }
    Some(x)
}

/// Writes each target as a rational linear combination of `basis`, matching
/// coefficients monomial by monomial. Returns one coefficient vector per
/// target, or `None` if some target lies outside the span.
pub fn express_in_span(basis: &[Poly], targets: &[Poly]) -> Option<Vec<Vec<Rational>>> {
    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in basis.iter().chain(targets) {
        for (m, _) in p.terms() {
            let next = rows.len();
            rows.entry(m.clone()).or_insert(next);
        }
    }
    let k = basis.len();
    let width = k + targets.len();
    let mut a = vec![vec![Rational::zero(); width]; rows.len()];
    for (col, p) in basis.iter().chain(targets).enumerate() {
        for (m, c) in p.terms() {
            a[rows[m]][col] = c.clone();
        }
    }
    let pivots = rref(&mut a, k);
    let mut out = Vec::with_capacity(targets.len());
    for t in 0..targets.len() {
        let col = k + t;
        if a[pivots.len()..].iter().any(|row| !row[col].is_zero()) {
            return None;
        }
        let mut x = vec![Rational::zero(); k];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = a[row][col].clone();
        }
        out.push(x);
    }
    Some(out)
}

/// Sylvester inertia `(positive, negative, zero)` of a symmetric matrix by
/// exact congruence diagonalization.
pub fn inertia(m: &[Vec<Rational>]) -> (usize, usize, usize) {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // row_k += row_j, col_k += col_j makes the pivot 2 a_kj
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[k][c] += t;
                }
                for row in a.iter_mut() {
                    let t = row[j].clone();
                    row[k] += t;
                }
            } else {
                zero += 1;
                continue;
            }
        }
        let p = a[k][k].clone();
        if p > Rational::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for c in 0..n {
                let t = &f * &a[k][c];
                a[i][c] -= t;
            }
            for row in a.iter_mut() {
                let t = &f * &row[k];
                row[i] -= t;
            }
        }
    }
    (pos, neg, zero)
}
