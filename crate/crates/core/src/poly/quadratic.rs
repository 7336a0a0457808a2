//! Quadratic forms in odd characteristic: Gram matrix, rank and the square
//! class of the discriminant.

use serde::Serialize;

use super::HomogeneousPolynomial;
use crate::error::{Error, Result};
use crate::ff::{Elem, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareClass {
    Square,
    Nonsquare,
    /// Rank zero: there is no nondegenerate block.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFormInfo {
    pub gram: Vec<Vec<Elem>>,
    pub rank: usize,
    /// Square class of the signed discriminant `(-1)^{r(r-1)/2} det` of a
    /// maximal nondegenerate block, r = rank. For rank 2 the form splits
    /// into two rational linear factors iff this class is `Square`.
    pub disc_class: SquareClass,
    /// Nonzero entries of a congruent diagonal form.
    pub diagonal: Vec<Elem>,
}

pub fn quadratic_form_info(field: &Field, f: &HomogeneousPolynomial) -> Result<QuadraticFormInfo> {
    if field.p() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    if f.degree() != 2 {
        return Err(Error::NotQuadratic(f.degree()));
    }
    let n = f.nvars();
    let half = field.inv(field.from_int(2))?;
    let mut gram = vec![vec![Elem::ZERO; n]; n];
    for (e, c) in f.terms() {
        let idx: Vec<usize> = e
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| std::iter::repeat_n(i, a as usize))
            .collect();
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            gram[i][i] = c;
        } else {
            let h = field.mul(c, half);
            gram[i][j] = h;
            gram[j][i] = h;
        }
    }
    let diagonal = diagonalize(field, gram.clone());
    let rank = diagonal.len();
    let disc_class = if rank == 0 {
        SquareClass::Zero
    } else {
        let mut det = diagonal.iter().fold(Elem::ONE, |acc, &d| field.mul(acc, d));
        if (rank * (rank - 1) / 2) % 2 == 1 {
            det = field.neg(det);
        }
        if field.is_square(det) {
            SquareClass::Square
        } else {
            SquareClass::Nonsquare
        }
    };
    Ok(QuadraticFormInfo {
        gram,
        rank,
        disc_class,
        diagonal,
    })
}

/// Symmetric congruence diagonalization (odd characteristic). Returns the
/// nonzero diagonal entries.
#[allow(clippy::needless_range_loop)]
fn diagonalize(field: &Field, mut a: Vec<Vec<Elem>>) -> Vec<Elem> {
    let n = a.len();
    let mut out = Vec::new();
    for i in 0..n {
        if let Some(j) = (i..n).find(|&j| !a[j][j].is_zero()) {
            swap_sym(&mut a, i, j);
        } else if let Some((j, l)) = (i..n)
            .flat_map(|j| (j + 1..n).map(move |l| (j, l)))
            .find(|&(j, l)| !a[j][l].is_zero())
        {
            // x_j -> x_j + x_l turns the diagonal entry into 2 a_jl != 0
            for r in 0..n {
                a[j][r] = field.add(a[j][r], a[l][r]);
            }
            for r in 0..n {
                a[r][j] = field.add(a[r][j], a[r][l]);
            }
            swap_sym(&mut a, i, j);
        } else {
            break;
        }
        let pivot = a[i][i];
        let inv = field.inv(pivot).expect("nonzero pivot");
        for r in i + 1..n {
            if a[r][i].is_zero() {
                continue;
            }
            let factor = field.mul(a[r][i], inv);
            for c in 0..n {
                let t = field.mul(factor, a[i][c]);
                a[r][c] = field.sub(a[r][c], t);
            }
            for c in 0..n {
                let t = field.mul(factor, a[c][i]);
                a[c][r] = field.sub(a[c][r], t);
            }
        }
        out.push(pivot);
    }
    out
}

fn swap_sym(a: &mut [Vec<Elem>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}
