//! Dense row reduction over a finite field.

use crate::ff::{Elem, Field};

/// Reduced row echelon form with leftmost-nonzero pivoting. Zero rows are
/// dropped; returns the reduced rows and their pivot columns.
#[allow(clippy::needless_range_loop)]
pub fn rref(field: &Field, rows: &[Vec<Elem>]) -> (Vec<Vec<Elem>>, Vec<usize>) {
    let mut m: Vec<Vec<Elem>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = field.inv(m[r][c]).expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c];
            for j in c..ncols {
                let t = field.mul(factor, m[r][j]);
                m[i][j] = field.sub(m[i][j], t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(field: &Field, rows: &[Vec<Elem>]) -> usize {
    rref(field, rows).1.len()
}

/// Basis of `{v : rows . v = 0}`, one vector per free column in ascending
/// order, each with a 1 in its free column.
pub fn nullspace(field: &Field, rows: &[Vec<Elem>], ncols: usize) -> Vec<Vec<Elem>> {
    let (reduced, pivots) = rref(field, rows);
    nullspace_of_rref(field, &reduced, &pivots, ncols)
}

pub fn nullspace_of_rref(
    field: &Field,
    reduced: &[Vec<Elem>],
    pivots: &[usize],
    ncols: usize,
) -> Vec<Vec<Elem>> {
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Elem::ZERO; ncols];
            v[free] = Elem::ONE;
            for (row, &pc) in reduced.iter().zip(pivots) {
                v[pc] = field.neg(row[free]);
            }
            v
        })
        .collect()
}

pub fn dot(field: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .fold(Elem::ZERO, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// `sum_i coeffs[i] * rows[i]`.
pub fn combine(field: &Field, coeffs: &[Elem], rows: &[Vec<Elem>]) -> Vec<Elem> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut out = vec![Elem::ZERO; ncols];
    for (&c, row) in coeffs.iter().zip(rows) {
        if c.is_zero() {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(row) {
            *o = field.add(*o, field.mul(c, x));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    #[test]
    fn rref_drops_dependent_rows() {
        let f = make_field(3, 1).unwrap();
        let e = |v: &[i64]| v.iter().map(|&c| f.from_int(c)).collect::<Vec<_>>();
        let rows = vec![e(&[0, 2, 1]), e(&[0, 1, 2]), e(&[1, 1, 1])];
        let (r, piv) = rref(&f, &rows);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, vec![e(&[1, 0, 2]), e(&[0, 1, 2])]);
        let ns = nullspace(&f, &rows, 3);
        assert_eq!(ns, vec![e(&[1, 1, 1])]);
        for v in &ns {
            for row in &rows {
                assert!(dot(&f, row, v).is_zero());
            }
        }
    }
}
