//! Plain-text polynomial format: terms `c*x0^a0*...*xn^an` joined by `+`,
//! coefficients as integers mod p. The parser also accepts `-`, omitted
//! coefficients and omitted `^1`.

use std::fmt;

use super::{Exponents, HomogeneousPolynomial};
use crate::error::{Error, Result};
use crate::ff::Field;

impl HomogeneousPolynomial {
    pub fn parse(text: &str, nvars: usize, field: &Field) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<(Exponents, i64)> = Vec::new();
        for (sign, body) in split_terms(&compact)? {
            let (exps, c) = parse_term(body, nvars)?;
            terms.push((exps, sign * c));
        }
        let degree = terms
            .iter()
            .map(|(e, _)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0);
        if let Some((e, _)) = terms.iter().find(|(e, _)| e.iter().sum::<u32>() != degree) {
            return Err(Error::Parse(format!(
                "inhomogeneous: monomial {:?} has degree {} but polynomial has degree {degree}",
                e,
                e.iter().sum::<u32>()
            )));
        }
        Self::from_terms(
            field,
            nvars,
            degree,
            terms.into_iter().map(|(e, c)| (e, field.from_int(c))),
        )
    }

    /// Canonical text: graded-lex order, largest monomial first, every term
    /// with an explicit coefficient and explicit exponents.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(e, c)| {
                let mut s = c.index().to_string();
                for (i, &a) in e.iter().enumerate() {
                    if a > 0 {
                        s.push_str(&format!("*x{i}^{a}"));
                    }
                }
                s
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Display for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn split_terms(s: &str) -> Result<Vec<(i64, &str)>> {
    let mut out = Vec::new();
    let mut sign = 1i64;
    let mut start = 0usize;
    let bytes = s.as_bytes();
    let mut i = 0;
    if matches!(bytes.first(), Some(b'+') | Some(b'-')) {
        sign = if bytes[0] == b'-' { -1 } else { 1 };
        start = 1;
        i = 1;
    }
    while i < bytes.len() {
        if bytes[i] == b'+' || bytes[i] == b'-' {
            // exponent signs are not allowed, so any +/- separates terms
            let body = &s[start..i];
            if body.is_empty() {
                return Err(Error::Parse(format!("empty term in `{s}`")));
            }
            out.push((sign, body));
            sign = if bytes[i] == b'-' { -1 } else { 1 };
            start = i + 1;
        }
        i += 1;
    }
    let body = &s[start..];
    if body.is_empty() {
        return Err(Error::Parse(format!("empty term in `{s}`")));
    }
    out.push((sign, body));
    Ok(out)
}

fn parse_term(body: &str, nvars: usize) -> Result<(Exponents, i64)> {
    let mut exps = vec![0u32; nvars];
    let mut coeff = 1i64;
    for factor in body.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in `{body}`")));
        }
        if let Some(var) = factor.strip_prefix('x') {
            let (idx, pow) = match var.split_once('^') {
                Some((i, e)) => (i, e),
                None => (var, "1"),
            };
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable `{factor}`")))?;
            let pow: u32 = pow
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
            if idx >= nvars {
                return Err(Error::Parse(format!(
                    "variable x{idx} out of range for {nvars} variables"
                )));
            }
            exps[idx] += pow;
        } else {
            let c: i64 = factor
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{factor}`")))?;
            coeff = coeff
                .checked_mul(c)
                .ok_or_else(|| Error::Parse("coefficient overflow".into()))?;
        }
    }
    Ok((exps, coeff))
}
