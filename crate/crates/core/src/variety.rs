//! Projective varieties given by equations: point counts over F_q and its
//! extensions, slices by linear subspaces, and the Lang–Weil style
//! component estimate.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ff::{make_field, Elem, Field};
use crate::geometry::{projective_count, LinearSubspace, PointSpace, ProjectivePoint};
use crate::poly::{quadratic_form_info, HomogeneousPolynomial, SquareClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveVariety {
    n: usize,
    p: u32,
    generators: Vec<HomogeneousPolynomial>,
    declared_dim: usize,
}

impl ProjectiveVariety {
    pub fn new(
        n: usize,
        p: u32,
        generators: Vec<HomogeneousPolynomial>,
        declared_dim: usize,
    ) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.nvars() != n + 1) {
            return Err(Error::InvalidDimension(format!(
                "generator in {} variables for P^{n}",
                g.nvars()
            )));
        }
        if declared_dim > n {
            return Err(Error::InvalidDimension(format!(
                "declared dimension {declared_dim} exceeds ambient {n}"
            )));
        }
        Ok(Self {
            n,
            p,
            generators,
            declared_dim,
        })
    }

    /// Parses generator strings with integer coefficients reduced mod p.
    pub fn from_equations(n: usize, r: usize, field: &Field, equations: &[&str]) -> Result<Self> {
        let gens = equations
            .iter()
            .map(|e| HomogeneousPolynomial::parse(e, n + 1, field))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, field.p(), gens, r)
    }

    /// Reads the variety file format: a header line `n=<n> r=<r> p=<p>`
    /// followed by one polynomial per line. Blank lines and lines starting
    /// with `#` are ignored.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))?;
        let (mut n, mut r, mut p) = (None, None, None);
        for kv in header.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field `{kv}`")))?;
            let v: u64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad header value `{kv}`")))?;
            match k {
                "n" => n = Some(v as usize),
                "r" => r = Some(v as usize),
                "p" => p = Some(v),
                _ => return Err(Error::Parse(format!("unknown header field `{k}`"))),
            }
        }
        let (Some(n), Some(r), Some(p)) = (n, r, p) else {
            return Err(Error::Parse("header needs n, r and p".into()));
        };
        let field = make_field(p, 1)?;
        let eqs: Vec<&str> = lines.collect();
        Self::from_equations(n, r, &field, &eqs)
    }

    pub fn to_file_text(&self) -> String {
        let mut s = format!("n={} r={} p={}\n", self.n, self.declared_dim, self.p);
        for g in &self.generators {
            let _ = writeln!(s, "{}", g.to_text());
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn generators(&self) -> &[HomogeneousPolynomial] {
        &self.generators
    }

    pub fn declared_dim(&self) -> usize {
        self.declared_dim
    }

    pub fn with_declared_dim(mut self, r: usize) -> Result<Self> {
        if r > self.n {
            return Err(Error::InvalidDimension(format!(
                "dimension {r} > {}",
                self.n
            )));
        }
        self.declared_dim = r;
        Ok(self)
    }

    /// True when every generator is the zero polynomial (X = P^n).
    pub fn is_whole_space(&self) -> bool {
        self.generators.iter().all(HomogeneousPolynomial::is_zero)
    }

    pub fn has_prime_coefficients(&self) -> bool {
        self.generators
            .iter()
            .all(|g| g.has_prime_coefficients(self.p))
    }

    pub fn check_field(&self, field: &Field) -> Result<()> {
        if field.p() != self.p {
            return Err(Error::FieldMismatch {
                expected: self.p,
                got: field.p(),
            });
        }
        Ok(())
    }

    pub fn vanishes_at(&self, field: &Field, x: &[Elem]) -> bool {
        self.generators
            .iter()
            .all(|g| g.evaluate(field, x).is_zero())
    }

    /// Exact `#X(F_q)` by enumeration of P^n(F_q).
    pub fn count_points(&self, field: &Field, budget: Budget) -> Result<u64> {
        self.check_field(field)?;
        budget.check(&projective_count(self.n, field.order()))?;
        let space = PointSpace::new(self.n, field)?;
        Ok(space.par_count(|x| self.vanishes_at(field, x)))
    }

    /// The F_q-points of X in enumeration order.
    pub fn points(&self, field: &Field, budget: Budget) -> Result<Vec<ProjectivePoint>> {
        self.check_field(field)?;
        budget.check(&projective_count(self.n, field.order()))?;
        let space = PointSpace::new(self.n, field)?;
        Ok(space.par_filter(|x| self.vanishes_at(field, x)))
    }

    /// Exact `#X(F_{q^m})` where `base = F_q`, counting over GF(p^{e m}).
    pub fn count_points_extension(&self, base: &Field, m: u32, budget: Budget) -> Result<u64> {
        self.check_field(base)?;
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        if m == 1 {
            return self.count_points(base, budget);
        }
        if !self.has_prime_coefficients() {
            return Err(Error::InvalidArgument(
                "extension counting needs prime-field coefficients".into(),
            ));
        }
        let order = BigUint::from(base.order()).pow(m);
        let order = order.to_u64().ok_or_else(|| Error::BudgetExceeded {
            needed: format!("#P^{}(F_{order})", self.n),
            budget: budget.0,
        })?;
        budget.check(&projective_count(self.n, order))?;
        let ext = make_field(self.p as u64, base.m() * m)?;
        self.count_points(&ext, budget)
    }

    /// `X ∩ H` in the intrinsic coordinates of H, a variety in P^{n-k}.
    pub fn slice(&self, field: &Field, h: &LinearSubspace) -> Result<Self> {
        self.check_field(field)?;
        if h.n() != self.n {
            return Err(Error::InvalidDimension(format!(
                "subspace of P^{} slicing a variety in P^{}",
                h.n(),
                self.n
            )));
        }
        if h.dim() < 0 {
            return Err(Error::InvalidDimension("empty subspace".into()));
        }
        let basis = h.parametrize(field);
        let gens = self
            .generators
            .iter()
            .map(|g| g.substitute_linear(field, &basis))
            .collect::<Result<Vec<_>>>()?;
        let s = h.dim() as usize;
        Ok(Self {
            n: s,
            p: self.p,
            generators: gens,
            declared_dim: self.declared_dim.saturating_sub(h.codim()).min(s),
        })
    }

    /// Applies the coordinate change `x = sum_i t_i * matrix[i]`.
    pub fn transform(&self, field: &Field, matrix: &[Vec<Elem>]) -> Result<Self> {
        self.check_field(field)?;
        if matrix.len() != self.n + 1 || crate::linalg::rank(field, matrix) != self.n + 1 {
            return Err(Error::InvalidArgument(
                "coordinate change must be an invertible square matrix".into(),
            ));
        }
        let gens = self
            .generators
            .iter()
            .map(|g| g.substitute_linear(field, matrix))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.n, self.p, gens, self.declared_dim)
    }

    /// Loose sanity check of the declared dimension:
    /// `q^r / 4 <= #X(F_q) <= 4 deg q^r`, with deg the product of the
    /// generator degrees. Logs a warning on mismatch.
    pub fn dimension_consistent(&self, field: &Field, budget: Budget) -> Result<bool> {
        let n1 = BigUint::from(self.count_points(field, budget)?);
        let qr = BigUint::from(field.order()).pow(self.declared_dim as u32);
        let deg: u64 = self
            .generators
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| g.degree() as u64)
            .product();
        let ok = &n1 * 4u32 >= qr && n1 <= qr * (4 * deg.max(1));
        if !ok {
            log::warn!(
                "declared dimension {} looks inconsistent with #X(F_{}) = {}",
                self.declared_dim,
                field.order(),
                n1
            );
        }
        Ok(ok)
    }

    pub fn estimate_components(
        &self,
        field: &Field,
        degrees: &[u32],
        tau: &BigRational,
        budget: Budget,
    ) -> Result<ComponentEstimate> {
        estimate_components(self, field, degrees, tau, budget)
    }
}

/// Extension point counts and the component counts they suggest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentEstimate {
    pub q: u64,
    pub r: usize,
    /// `(m, #X(F_{q^m}))`, always including m = 1.
    pub counts: Vec<(u32, u64)>,
    /// `N_m / q^{r m}`.
    pub ratios: Vec<BigRational>,
    /// Distance from each ratio to its nearest integer.
    pub residuals: Vec<BigRational>,
    /// Nearest integer to `N_1 / q^r`.
    pub a_est: u64,
    /// Nearest integer to the ratio at the largest m whose residual is
    /// within tolerance; `None` when no ratio is.
    pub g_est: Option<u64>,
}

impl ComponentEstimate {
    pub fn is_conclusive(&self) -> bool {
        self.g_est.is_some()
    }
}

/// Default tolerance for "close to an integer".
pub fn default_tau() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(4))
}

fn nearest_integer(x: &BigRational) -> BigInt {
    (x + BigRational::new(BigInt::one(), BigInt::from(2)))
        .floor()
        .to_integer()
}

pub fn estimate_components(
    x: &ProjectiveVariety,
    field: &Field,
    degrees: &[u32],
    tau: &BigRational,
    budget: Budget,
) -> Result<ComponentEstimate> {
    if degrees.is_empty() {
        return Err(Error::InvalidArgument("no extension degrees".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) || degrees[0] == 0 {
        return Err(Error::InvalidArgument(
            "extension degrees must be positive and strictly ascending".into(),
        ));
    }
    let mut ms = degrees.to_vec();
    if ms[0] != 1 {
        ms.insert(0, 1);
    }
    let q = field.order();
    let r = x.declared_dim();
    let mut counts = Vec::with_capacity(ms.len());
    let mut ratios = Vec::with_capacity(ms.len());
    let mut residuals = Vec::with_capacity(ms.len());
    for &m in &ms {
        let n_m = x.count_points_extension(field, m, budget)?;
        let scale = BigInt::from(q).pow(r as u32 * m);
        let ratio = BigRational::new(BigInt::from(n_m), scale);
        let residual = (&ratio - BigRational::from_integer(nearest_integer(&ratio))).abs();
        counts.push((m, n_m));
        ratios.push(ratio);
        residuals.push(residual);
    }
    let a_est = nearest_integer(&ratios[0]).to_u64().expect("nonnegative");
    let g_est = (0..ms.len())
        .rev()
        .find(|&i| residuals[i] <= *tau)
        .map(|i| nearest_integer(&ratios[i]).to_u64().expect("nonnegative"));
    Ok(ComponentEstimate {
        q,
        r,
        counts,
        ratios,
        residuals,
        a_est,
        g_est,
    })
}

/// Geometric type of a quadric `V(g)` in P^s (reduced structure).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QuadricClass {
    /// Rank >= 3: geometrically irreducible.
    Irreducible,
    /// Two distinct rational hyperplanes.
    SplitPair,
    /// Two hyperplanes conjugate over F_{q^2}.
    ConjugatePair,
    /// A hyperplane counted twice.
    DoubleHyperplane,
    /// `g = 0`: the slice is the whole linear space.
    WholeSpace,
}

impl QuadricClass {
    /// Split and conjugate pairs are not geometrically irreducible.
    pub fn is_bad(self) -> bool {
        matches!(self, QuadricClass::SplitPair | QuadricClass::ConjugatePair)
    }
}

pub fn classify_quadric_slice(field: &Field, g: &HomogeneousPolynomial) -> Result<QuadricClass> {
    if field.p() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    if g.is_zero() {
        return Ok(QuadricClass::WholeSpace);
    }
    let info = quadratic_form_info(field, g)?;
    Ok(match info.rank {
        0 => QuadricClass::WholeSpace,
        1 => QuadricClass::DoubleHyperplane,
        2 => match info.disc_class {
            SquareClass::Square => QuadricClass::SplitPair,
            _ => QuadricClass::ConjugatePair,
        },
        _ => QuadricClass::Irreducible,
    })
}
