//! Sparse homogeneous polynomials over a finite field.
//!
//! Coefficients are [`Elem`]s interpreted in whatever field is passed to
//! each operation. Polynomials parsed from text have prime-field
//! coefficients and are valid over every field of that characteristic.

mod quadratic;
mod text;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ff::{Elem, Field};

pub use quadratic::{quadratic_form_info, QuadraticFormInfo, SquareClass};

/// Exponent vector of a monomial.
pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomogeneousPolynomial {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Exponents, Elem>,
}

impl HomogeneousPolynomial {
    /// The zero polynomial; `degree` is kept as metadata.
    pub fn zero(nvars: usize, degree: u32) -> Self {
        Self {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Sums the given terms, dropping zero coefficients.
    pub fn from_terms<I>(field: &Field, nvars: usize, degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Elem)>,
    {
        let mut out = Self::zero(nvars, degree);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::InvalidDimension(format!(
                    "monomial with {} exponents in {} variables",
                    exps.len(),
                    nvars
                )));
            }
            let d: u32 = exps.iter().sum();
            if d != degree {
                return Err(Error::InvalidArgument(format!(
                    "monomial of degree {d} in a polynomial of degree {degree}"
                )));
            }
            out.add_term(field, exps, c);
        }
        Ok(out)
    }

    /// The coordinate function `x_i`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self {
            nvars,
            degree: 1,
            terms: BTreeMap::from([(exps, Elem::ONE)]),
        }
    }

    /// The linear form `sum_i coeffs[i] x_i`.
    pub fn linear(field: &Field, coeffs: &[Elem]) -> Self {
        let n = coeffs.len();
        let terms = coeffs.iter().enumerate().map(|(i, &c)| {
            let mut e = vec![0; n];
            e[i] = 1;
            (e, c)
        });
        Self::from_terms(field, n, 1, terms).expect("well-formed linear form")
    }

    fn add_term(&mut self, field: &Field, exps: Exponents, c: Elem) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lexicographic order, largest monomial first.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, Elem)> {
        self.terms.iter().rev().map(|(e, &c)| (e, c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> Elem {
        self.terms.get(exps).copied().unwrap_or(Elem::ZERO)
    }

    /// Whether every coefficient lies in the prime subfield.
    pub fn has_prime_coefficients(&self, p: u32) -> bool {
        self.terms.values().all(|c| c.index() < p)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::InvalidDimension(format!(
                "{} vs {} variables",
                self.nvars, other.nvars
            )));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "adding degree {} to degree {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, field: &Field, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = if self.is_zero() {
            other.clone()
        } else {
            self.clone()
        };
        if !self.is_zero() {
            for (e, &c) in &other.terms {
                out.add_term(field, e.clone(), c);
            }
        }
        Ok(out)
    }

    pub fn neg(&self, field: &Field) -> Self {
        self.scale(field, field.neg(Elem::ONE))
    }

    pub fn sub(&self, field: &Field, other: &Self) -> Result<Self> {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &Field, c: Elem) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        for (e, &x) in &self.terms {
            out.add_term(field, e.clone(), field.mul(x, c));
        }
        out
    }

    pub fn mul(&self, field: &Field, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::InvalidDimension(format!(
                "{} vs {} variables",
                self.nvars, other.nvars
            )));
        }
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(field, e, field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// `f(x)` for a coordinate vector of length `nvars`.
    pub fn evaluate(&self, field: &Field, x: &[Elem]) -> Elem {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = Elem::ZERO;
        for (e, &c) in &self.terms {
            let mut t = c;
            for (&xi, &ai) in x.iter().zip(e) {
                if ai > 0 {
                    t = field.mul(t, field.pow(xi, ai as u64));
                    if t.is_zero() {
                        break;
                    }
                }
            }
            acc = field.add(acc, t);
        }
        acc
    }

    /// `g(t_0..t_s) = f(sum_i t_i * basis[i])`. The result has the same
    /// degree, or is the zero polynomial (degree kept) when the span of
    /// `basis` lies inside `V(f)`.
    pub fn substitute_linear(&self, field: &Field, basis: &[Vec<Elem>]) -> Result<Self> {
        if basis.iter().any(|row| row.len() != self.nvars) {
            return Err(Error::InvalidDimension(format!(
                "basis rows must have {} entries",
                self.nvars
            )));
        }
        let s = basis.len();
        // Image of x_j as a linear form in t.
        let images: Vec<Self> = (0..self.nvars)
            .map(|j| {
                let coeffs: Vec<Elem> = basis.iter().map(|row| row[j]).collect();
                Self::linear(field, &coeffs)
            })
            .collect();
        let mut out = Self::zero(s, self.degree);
        for (e, &c) in &self.terms {
            let mut prod = Self::constant(s, c);
            for (j, &a) in e.iter().enumerate() {
                for _ in 0..a {
                    prod = prod.mul(field, &images[j])?;
                }
            }
            for (pe, pc) in prod.terms {
                out.add_term(field, pe, pc);
            }
        }
        Ok(out)
    }

    fn constant(nvars: usize, c: Elem) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Self {
            nvars,
            degree: 0,
            terms,
        }
    }
}
