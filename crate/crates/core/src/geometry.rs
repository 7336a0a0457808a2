//! Points of P^n(F_q), linear subspaces in canonical RREF form, and the
//! Grassmannian of codimension-k subspaces.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{Elem, Field};
use crate::linalg;

/// `#P^n(F_q) = (q^{n+1} - 1)/(q - 1)`.
pub fn projective_count(n: usize, q: u64) -> BigUint {
    let q = BigUint::from(q);
    (q.pow(n as u32 + 1) - 1u32) / (q - 1u32)
}

/// Number of b-dimensional subspaces of an a-dimensional vector space over
/// F_q: `prod_{i<b} (q^{a-i} - 1)/(q^{i+1} - 1)`.
pub fn gaussian_binomial(a: usize, b: usize, q: u64) -> BigUint {
    assert!(b <= a, "gaussian_binomial needs b <= a");
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..b {
        num *= q.pow((a - i) as u32) - 1u32;
        den *= q.pow(i as u32 + 1) - 1u32;
    }
    num / den
}

/// `dim G(n-k, n) = (n-k+1) k`.
pub fn grassmannian_dimension(n: usize, k: usize) -> usize {
    (n - k + 1) * k
}

/// A normalized point of projective space: first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProjectivePoint {
    coords: Vec<Elem>,
}

impl ProjectivePoint {
    pub fn new(field: &Field, coords: Vec<Elem>) -> Result<Self> {
        let Some(lead) = coords.iter().copied().find(|c| !c.is_zero()) else {
            return Err(Error::InvalidArgument("all coordinates are zero".into()));
        };
        let inv = field.inv(lead)?;
        let coords = coords.into_iter().map(|c| field.mul(c, inv)).collect();
        Ok(Self { coords })
    }

    /// Point from integer coordinates (reduced into the prime subfield).
    pub fn from_ints(field: &Field, coords: &[i64]) -> Result<Self> {
        Self::new(field, coords.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    /// Ambient dimension n (the point has n+1 coordinates).
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }
}

/// Index-addressable enumeration of P^n(F_q).
///
/// Order: by position of the leading 1 (leftmost first), then by the
/// remaining coordinates read as a base-q number, last coordinate least
/// significant.
#[derive(Clone, Debug)]
pub struct PointSpace {
    n: usize,
    field: Field,
    /// Start index of each leading-position block, plus the total.
    offsets: Vec<u64>,
}

impl PointSpace {
    /// Fails when the point count does not fit in a u64.
    pub fn new(n: usize, field: &Field) -> Result<Self> {
        let q = field.order();
        let mut offsets = Vec::with_capacity(n + 2);
        let mut acc = 0u64;
        offsets.push(0);
        for lead in 0..=n {
            let block = q
                .checked_pow((n - lead) as u32)
                .ok_or_else(|| Error::BudgetExceeded {
                    needed: projective_count(n, q).to_string(),
                    budget: u64::MAX,
                })?;
            acc = acc
                .checked_add(block)
                .ok_or_else(|| Error::BudgetExceeded {
                    needed: projective_count(n, q).to_string(),
                    budget: u64::MAX,
                })?;
            offsets.push(acc);
        }
        Ok(Self {
            n,
            field: field.clone(),
            offsets,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> u64 {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes the coordinates of point number `i` into `buf` (length n+1).
    pub fn unrank_into(&self, i: u64, buf: &mut [Elem]) {
        debug_assert!(i < self.len());
        let lead = self.offsets.partition_point(|&o| o <= i) - 1;
        let mut rest = i - self.offsets[lead];
        let q = self.field.order();
        for c in buf[..lead].iter_mut() {
            *c = Elem::ZERO;
        }
        buf[lead] = Elem::ONE;
        for j in (lead + 1..=self.n).rev() {
            buf[j] = self.field.elem(rest % q);
            rest /= q;
        }
    }

    pub fn point(&self, i: u64) -> ProjectivePoint {
        let mut buf = vec![Elem::ZERO; self.n + 1];
        self.unrank_into(i, &mut buf);
        ProjectivePoint { coords: buf }
    }

    pub fn iter(&self) -> impl Iterator<Item = ProjectivePoint> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Number of points satisfying `pred`, evaluated in parallel.
    pub fn par_count<F>(&self, pred: F) -> u64
    where
        F: Fn(&[Elem]) -> bool + Sync,
    {
        (0..self.len() as usize)
            .into_par_iter()
            .with_min_len(1024)
            .map_init(
                || vec![Elem::ZERO; self.n + 1],
                |buf, i| {
                    self.unrank_into(i as u64, buf);
                    pred(buf) as u64
                },
            )
            .sum()
    }

    /// Points satisfying `pred`, in enumeration order.
    pub fn par_filter<F>(&self, pred: F) -> Vec<ProjectivePoint>
    where
        F: Fn(&[Elem]) -> bool + Sync,
    {
        (0..self.len() as usize)
            .into_par_iter()
            .with_min_len(1024)
            .map_init(
                || vec![Elem::ZERO; self.n + 1],
                |buf, i| {
                    self.unrank_into(i as u64, buf);
                    pred(buf).then(|| ProjectivePoint {
                        coords: buf.to_vec(),
                    })
                },
            )
            .flatten()
            .collect()
    }
}

/// All points of P^n(F_q) in canonical order.
pub fn enumerate_projective_points(n: usize, field: &Field) -> Result<Vec<ProjectivePoint>> {
    let space = PointSpace::new(n, field)?;
    Ok(space.iter().collect())
}

/// A projective linear subspace of P^n, stored as the RREF of its defining
/// equations. `codim()` equations cut out a subspace of dimension n - codim.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearSubspace {
    n: usize,
    eqs: Vec<Vec<Elem>>,
    #[serde(skip)]
    pivots: Vec<usize>,
}

impl LinearSubspace {
    /// The subspace cut out by `rows` (any spanning set of equations).
    pub fn from_equations(field: &Field, n: usize, rows: &[Vec<Elem>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n + 1) {
            return Err(Error::InvalidDimension(format!(
                "equations must have {} coefficients",
                n + 1
            )));
        }
        let (eqs, pivots) = linalg::rref(field, rows);
        Ok(Self { n, eqs, pivots })
    }

    /// The projective span of the given vectors (which need not be independent).
    pub fn span(field: &Field, n: usize, vectors: &[Vec<Elem>]) -> Result<Self> {
        if vectors.iter().any(|r| r.len() != n + 1) {
            return Err(Error::InvalidDimension(format!(
                "vectors must have {} coordinates",
                n + 1
            )));
        }
        let annihilator = linalg::nullspace(field, vectors, n + 1);
        Self::from_equations(field, n, &annihilator)
    }

    pub fn whole(n: usize) -> Self {
        Self {
            n,
            eqs: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_point(field: &Field, point: &ProjectivePoint) -> Self {
        Self::span(field, point.n(), std::slice::from_ref(&point.coords)).expect("dimensions agree")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of independent equations.
    pub fn codim(&self) -> usize {
        self.eqs.len()
    }

    /// Projective dimension; -1 for the empty subspace.
    pub fn dim(&self) -> isize {
        self.n as isize - self.eqs.len() as isize
    }

    pub fn equations(&self) -> &[Vec<Elem>] {
        &self.eqs
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn contains_vector(&self, field: &Field, v: &[Elem]) -> bool {
        self.eqs
            .iter()
            .all(|row| linalg::dot(field, row, v).is_zero())
    }

    pub fn contains(&self, field: &Field, x: &ProjectivePoint) -> bool {
        self.contains_vector(field, &x.coords)
    }

    /// Basis of the underlying vector space: one row per non-pivot column.
    pub fn parametrize(&self, field: &Field) -> Vec<Vec<Elem>> {
        linalg::nullspace_of_rref(field, &self.eqs, &self.pivots, self.n + 1)
    }

    pub fn contains_subspace(&self, field: &Field, other: &LinearSubspace) -> bool {
        other
            .parametrize(field)
            .iter()
            .all(|v| self.contains_vector(field, v))
    }

    pub fn join(&self, field: &Field, other: &LinearSubspace) -> Result<Self> {
        self.check_ambient(other.n)?;
        let mut basis = self.parametrize(field);
        basis.extend(other.parametrize(field));
        Self::span(field, self.n, &basis)
    }

    pub fn join_point(&self, field: &Field, point: &ProjectivePoint) -> Result<Self> {
        self.check_ambient(point.n())?;
        let mut basis = self.parametrize(field);
        basis.push(point.coords.clone());
        Self::span(field, self.n, &basis)
    }

    pub fn intersect(&self, field: &Field, other: &LinearSubspace) -> Result<Self> {
        self.check_ambient(other.n)?;
        let mut rows = self.eqs.clone();
        rows.extend(other.eqs.iter().cloned());
        Self::from_equations(field, self.n, &rows)
    }

    fn check_ambient(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::InvalidDimension(format!(
                "ambient P^{} vs P^{}",
                self.n, n
            )));
        }
        Ok(())
    }

    /// Number of F_q-points.
    pub fn point_count(&self, q: u64) -> BigUint {
        match self.dim() {
            d if d < 0 => BigUint::zero(),
            d => projective_count(d as usize, q),
        }
    }

    /// The points of the subspace, as normalized ambient points.
    pub fn points(&self, field: &Field) -> Vec<ProjectivePoint> {
        let basis = self.parametrize(field);
        if basis.is_empty() {
            return Vec::new();
        }
        let intrinsic = PointSpace::new(basis.len() - 1, field).expect("subspace fits");
        let mut out: Vec<ProjectivePoint> = intrinsic
            .iter()
            .map(|t| {
                ProjectivePoint::new(field, linalg::combine(field, t.coords(), &basis))
                    .expect("basis rows are independent")
            })
            .collect();
        out.sort();
        out
    }
}

/// G(n-k, n)(F_q): the codimension-k subspaces of P^n.
#[derive(Clone, Debug)]
pub struct Grassmannian {
    n: usize,
    k: usize,
    field: Field,
}

impl Grassmannian {
    pub fn new(n: usize, k: usize, field: &Field) -> Result<Self> {
        if k < 1 || k > n {
            return Err(Error::InvalidDimension(format!(
                "need 1 <= k <= n, got n={n} k={k}"
            )));
        }
        Ok(Self {
            n,
            k,
            field: field.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dimension(&self) -> usize {
        grassmannian_dimension(self.n, self.k)
    }

    pub fn cardinality(&self) -> BigUint {
        gaussian_binomial(self.n + 1, self.k, self.field.order())
    }

    pub fn subspaces(&self) -> SubspaceIter {
        SubspaceIter::new(&self.field, self.n, self.k)
    }

    /// All subspaces, enumerated in parallel by pivot pattern; the returned
    /// order equals the serial enumeration order.
    pub fn par_subspaces(&self) -> Vec<LinearSubspace> {
        pivot_patterns(self.n + 1, self.k)
            .into_par_iter()
            .flat_map_iter(|pivots| SubspaceIter::with_pattern(&self.field, self.n, pivots))
            .collect()
    }

    /// A uniformly random subspace: draw k x (n+1) matrices until one has
    /// rank k, then canonicalize. Every row space has the same number of
    /// rank-k generator matrices, so the result is uniform.
    pub fn random_subspace<R: Rng + ?Sized>(&self, rng: &mut R) -> LinearSubspace {
        loop {
            let rows: Vec<Vec<Elem>> = (0..self.k)
                .map(|_| (0..=self.n).map(|_| self.field.random(rng)).collect())
                .collect();
            let (eqs, pivots) = linalg::rref(&self.field, &rows);
            if pivots.len() == self.k {
                return LinearSubspace {
                    n: self.n,
                    eqs,
                    pivots,
                };
            }
        }
    }

    /// Number of subspaces through one point or through two distinct points,
    /// by enumeration.
    pub fn count_through_points(&self, points: &[ProjectivePoint]) -> Result<u64> {
        match points {
            [a] => self.check_point(a)?,
            [a, b] => {
                self.check_point(a)?;
                self.check_point(b)?;
                if a == b {
                    return Err(Error::CoincidentPoints);
                }
            }
            _ => return Err(Error::InvalidArgument("expected one or two points".into())),
        }
        Ok(self
            .par_subspaces()
            .par_iter()
            .filter(|h| points.iter().all(|x| h.contains(&self.field, x)))
            .count() as u64)
    }

    fn check_point(&self, x: &ProjectivePoint) -> Result<()> {
        if x.n() != self.n {
            return Err(Error::InvalidDimension(format!(
                "point in P^{} but Grassmannian over P^{}",
                x.n(),
                self.n
            )));
        }
        Ok(())
    }
}

/// All k-element subsets of `0..cols`, in lexicographic order.
fn pivot_patterns(cols: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > cols {
        return out;
    }
    loop {
        out.push(cur.clone());
        if !next_combination(&mut cur, cols) {
            return out;
        }
    }
}

fn next_combination(cur: &mut [usize], cols: usize) -> bool {
    let k = cur.len();
    for i in (0..k).rev() {
        if cur[i] < cols - k + i {
            cur[i] += 1;
            for j in i + 1..k {
                cur[j] = cur[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Canonical enumeration of the codimension-k subspaces of P^n: pivot
/// patterns in lexicographic order, then free entries as a base-q counter
/// over row-major positions, last position least significant.
pub struct SubspaceIter {
    field: Field,
    n: usize,
    k: usize,
    pivots: Option<Vec<usize>>,
    slots: Vec<(usize, usize)>,
    counter: Vec<u64>,
    single_pattern: bool,
}

impl SubspaceIter {
    pub fn new(field: &Field, n: usize, k: usize) -> Self {
        let pivots = (k <= n + 1).then(|| (0..k).collect::<Vec<_>>());
        let mut it = Self {
            field: field.clone(),
            n,
            k,
            pivots: None,
            slots: Vec::new(),
            counter: Vec::new(),
            single_pattern: false,
        };
        it.set_pattern(pivots);
        it
    }

    fn with_pattern(field: &Field, n: usize, pivots: Vec<usize>) -> Self {
        let mut it = Self::new(field, n, pivots.len());
        it.set_pattern(Some(pivots));
        it.single_pattern = true;
        it
    }

    fn set_pattern(&mut self, pivots: Option<Vec<usize>>) {
        self.slots.clear();
        if let Some(p) = &pivots {
            for (i, &c) in p.iter().enumerate() {
                for j in c + 1..=self.n {
                    if !p.contains(&j) {
                        self.slots.push((i, j));
                    }
                }
            }
        }
        self.counter = vec![0; self.slots.len()];
        self.pivots = pivots;
    }

    fn current(&self, pivots: &[usize]) -> LinearSubspace {
        let mut eqs = vec![vec![Elem::ZERO; self.n + 1]; self.k];
        for (i, &c) in pivots.iter().enumerate() {
            eqs[i][c] = Elem::ONE;
        }
        for (&(i, j), &v) in self.slots.iter().zip(&self.counter) {
            eqs[i][j] = self.field.elem(v);
        }
        LinearSubspace {
            n: self.n,
            eqs,
            pivots: pivots.to_vec(),
        }
    }
}

impl Iterator for SubspaceIter {
    type Item = LinearSubspace;

    fn next(&mut self) -> Option<LinearSubspace> {
        let pivots = self.pivots.clone()?;
        let out = self.current(&pivots);
        let q = self.field.order();
        let mut carried = true;
        for c in self.counter.iter_mut().rev() {
            *c += 1;
            if *c < q {
                carried = false;
                break;
            }
            *c = 0;
        }
        if carried {
            let mut next = pivots;
            let advanced = !self.single_pattern && next_combination(&mut next, self.n + 1);
            self.set_pattern(advanced.then_some(next));
        }
        Some(out)
    }
}
