//! Exact linear algebra over the rationals, and coordinates of algebra
//! elements in the basis `∂_t, D^x, D^t, ∂_x` plus the monomials of `h`.

use num_traits::{One, Zero};

use crate::expr::{Expr, Rational};

use super::{ClassifyError, Element};

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let k = a[r][col].clone();
                for c in 0..cols {
                    let d = &k * &a[row][c];
                    a[r][c] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    (a, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Basis of `{y : y·M = 0}`, i.e. of the linear relations among the rows.
pub fn row_relations(m: &Matrix) -> Vec<Vec<Rational>> {
    null_space(&transpose(m), m.len())
}

/// Basis of `{x : M x = 0}` for `M` with `n` columns.
pub fn null_space(m: &Matrix, n: usize) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(m);
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Rational::zero(); n];
        x[free] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = -r[i][free].clone();
        }
        out.push(x);
    }
    out
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|c| m.iter().map(|row| row[c].clone()).collect())
        .collect()
}

/// Coordinates `c` with `Σ c_i rows_i = target`, if any.
pub fn solve_rows(rows: &Matrix, target: &[Rational]) -> Option<Vec<Rational>> {
    let mut aug = transpose(rows);
    for (r, t) in aug.iter_mut().zip(target) {
        r.push(t.clone());
    }
    let n = rows.len();
    let (r, pivots) = rref(&aug);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[i][n].clone();
    }
    Some(x)
}

pub fn inverse2(m: [[Rational; 2]; 2]) -> Option<[[Rational; 2]; 2]> {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if det.is_zero() {
        return None;
    }
    let d = det.recip();
    Some([
        [&m[1][1] * &d, -&m[0][1] * &d],
        [-&m[1][0] * &d, &m[0][0] * &d],
    ])
}

/// Term of `h` with its rational coefficient removed.
pub(crate) fn split_term(t: &Expr) -> (Expr, Rational) {
    let k = t.coefficient();
    (t / &Expr::rational(k.clone()), k)
}

fn rational_of(e: &Expr) -> Result<Rational, ClassifyError> {
    e.as_rational().cloned().ok_or(ClassifyError::NonRational)
}

/// Rows of coordinates of the elements over a shared key list.
pub fn vectorize(elems: &[Element]) -> Result<(Vec<Expr>, Matrix), ClassifyError> {
    let mut keys: Vec<Expr> = Vec::new();
    for e in elems {
        for t in e.h.terms() {
            let (k, _) = split_term(&t);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
    }
    let mut rows = Vec::new();
    for e in elems {
        let mut row = Vec::with_capacity(4 + keys.len());
        for a in [&e.a0, &e.a1, &e.a2, &e.a3] {
            row.push(rational_of(a)?);
        }
        let mut hs = vec![Rational::zero(); keys.len()];
        for t in e.h.terms() {
            let (k, c) = split_term(&t);
            let i = keys
                .iter()
                .position(|x| *x == k)
                .expect("key collected above");
            hs[i] += c;
        }
        row.extend(hs);
        rows.push(row);
    }
    Ok((keys, rows))
}
