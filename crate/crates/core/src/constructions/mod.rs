//! Cones over curves with a coordinate vertex, and the loci used to show
//! that the bad-locus dimension bound is attained.
//!
//! For a cone X over a curve C ⊆ P^m with vertex L = {x_0 = ... = x_m = 0}:
//! U collects hyperplanes H ⊇ L for which H ∩ C has a rational point P off
//! L, `X ∩ H` has dimension r-1, and H ∩ C has at least two geometric
//! points. For H in U, M_H is the set of codimension-k subspaces inside H;
//! a generic M in M_H meets X in a reducible slice containing `N ∩ M`,
//! where N is the span of L and P.

mod catalog;

pub use catalog::{lookup, standard_catalog, CatalogEntry};

use num_bigint::BigUint;
use serde::Serialize;

use crate::budget::Budget;
use crate::census::{classify_slice, full_census, Classifier};
use crate::error::{Error, Result};
use crate::ff::{Elem, Field};
use crate::geometry::{
    gaussian_binomial, projective_count, Grassmannian, LinearSubspace, PointSpace, ProjectivePoint,
    SubspaceIter,
};
use crate::poly::HomogeneousPolynomial;
use crate::variety::{classify_quadric_slice, ProjectiveVariety, QuadricClass};

/// A cone in P^n of dimension r over a curve in P^m, m = n - r + 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeSpec {
    /// Equations of C in x_0..x_m.
    pub base_eqs: Vec<String>,
    pub n: usize,
    pub r: usize,
}

impl ConeSpec {
    pub fn new(base_eqs: &[&str], n: usize, r: usize) -> Result<Self> {
        if r < 2 || r > n {
            return Err(Error::InvalidDimension(format!(
                "cone needs 2 <= r <= n, got r={r}, n={n}"
            )));
        }
        if n - r + 1 < 2 {
            return Err(Error::InvalidDimension("base curve needs m >= 2".into()));
        }
        if base_eqs.is_empty() {
            return Err(Error::InvalidArgument("cone base has no equations".into()));
        }
        Ok(Self {
            base_eqs: base_eqs.iter().map(|s| s.to_string()).collect(),
            n,
            r,
        })
    }

    /// Ambient dimension of the base curve.
    pub fn m(&self) -> usize {
        self.n - self.r + 1
    }

    /// The vertex `{x_0 = ... = x_m = 0}`, of dimension r - 2.
    pub fn vertex(&self, field: &Field) -> LinearSubspace {
        let rows: Vec<Vec<Elem>> = (0..=self.m())
            .map(|i| {
                let mut row = vec![Elem::ZERO; self.n + 1];
                row[i] = Elem::ONE;
                row
            })
            .collect();
        LinearSubspace::from_equations(field, self.n, &rows).expect("coordinate rows")
    }

    /// C as a curve in P^m.
    pub fn base(&self, field: &Field) -> Result<ProjectiveVariety> {
        let eqs: Vec<&str> = self.base_eqs.iter().map(String::as_str).collect();
        let c = ProjectiveVariety::from_equations(self.m(), 1, field, &eqs)?;
        if c.generators().len() + 1 < self.m() {
            return Err(Error::InvalidArgument(format!(
                "a curve in P^{} needs at least {} equations",
                self.m(),
                self.m() - 1
            )));
        }
        if c.generators().iter().any(|g| g.degree() < 2) {
            return Err(Error::InvalidArgument(
                "cone base must be a curve of degree at least 2".into(),
            ));
        }
        Ok(c)
    }
}

/// The cone over C with vertex L: the base equations read in n+1
/// variables, with declared dimension r.
pub fn build_cone(spec: &ConeSpec, field: &Field) -> Result<ProjectiveVariety> {
    spec.base(field)?;
    let eqs: Vec<&str> = spec.base_eqs.iter().map(String::as_str).collect();
    ProjectiveVariety::from_equations(spec.n, spec.r, field, &eqs)
}

/// `#C(F_q) q^{r-1} + #P^{r-2}(F_q)`: each point of C contributes the
/// affine part of its join with L, and L itself lies on X.
pub fn expected_cone_count(base_count: u64, r: usize, q: u64) -> BigUint {
    BigUint::from(base_count) * BigUint::from(q).pow(r as u32 - 1) + projective_count(r - 2, q)
}

/// A cone together with its field, base and vertex.
#[derive(Clone, Debug)]
pub struct Cone {
    pub spec: ConeSpec,
    pub field: Field,
    pub base: ProjectiveVariety,
    pub variety: ProjectiveVariety,
    pub vertex: LinearSubspace,
}

impl Cone {
    pub fn new(spec: &ConeSpec, field: &Field) -> Result<Self> {
        Ok(Self {
            spec: spec.clone(),
            field: field.clone(),
            base: spec.base(field)?,
            variety: build_cone(spec, field)?,
            vertex: spec.vertex(field),
        })
    }

    /// Whether the exact quadric classifier applies.
    pub fn is_quadric(&self) -> bool {
        self.field.p() != 2
            && self.base.generators().len() == 1
            && self.base.generators()[0].degree() == 2
    }

    /// Points of C, embedded in P^n with zeros after x_m.
    fn base_points(&self) -> Vec<ProjectivePoint> {
        let m = self.spec.m();
        let space = PointSpace::new(m, &self.field).expect("valid base ambient");
        space
            .par_filter(|x| self.base.vanishes_at(&self.field, x))
            .into_iter()
            .map(|p| {
                let mut v = p.coords().to_vec();
                v.resize(self.spec.n + 1, Elem::ZERO);
                ProjectivePoint::new(&self.field, v).expect("nonzero")
            })
            .collect()
    }

    /// Geometric points of `H ∩ C` visible over the extensions `F_{q^e}`,
    /// e in `degrees`: the largest count seen.
    fn visible_points(&self, h: &LinearSubspace, degrees: &[u32], budget: Budget) -> Result<u64> {
        let eq = HomogeneousPolynomial::linear(&self.field, &h.equations()[0][..=self.spec.m()]);
        let mut gens = self.base.generators().to_vec();
        gens.push(eq);
        let cut = ProjectiveVariety::new(self.spec.m(), self.field.p(), gens, 0)?;
        let mut best = 0;
        for &e in degrees {
            best = best.max(cut.count_points_extension(&self.field, e, budget)?);
        }
        Ok(best)
    }
}

/// Extension degrees used when a cone is not a quadric.
pub const APPROXIMATE_DEGREES: [u32; 3] = [1, 2, 3];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UFilter {
    pub in_u: bool,
    pub contains_vertex: bool,
    /// A rational point of H ∩ C off L, the first in enumeration order.
    pub witness: Option<ProjectivePoint>,
    /// N = join(L, P).
    pub span: Option<LinearSubspace>,
    /// Slice type for quadric cones.
    pub slice_class: Option<QuadricClass>,
    /// Set when properties 2 and 3 were judged from point counts.
    pub approximate: bool,
}

/// Tests a hyperplane H for membership in U.
pub fn locus_u_filter(cone: &Cone, h: &LinearSubspace, budget: Budget) -> Result<UFilter> {
    let f = &cone.field;
    if h.codim() != 1 || h.n() != cone.spec.n {
        return Err(Error::InvalidDimension(
            "U consists of hyperplanes of P^n".into(),
        ));
    }
    let mut out = UFilter {
        in_u: false,
        contains_vertex: h.contains_subspace(f, &cone.vertex),
        witness: None,
        span: None,
        slice_class: None,
        approximate: !cone.is_quadric(),
    };
    if !out.contains_vertex {
        return Ok(out);
    }
    out.witness = cone
        .base_points()
        .into_iter()
        .find(|p| h.contains(f, p) && !cone.vertex.contains(f, p));
    if let Some(p) = &out.witness {
        out.span = Some(cone.vertex.join_point(f, p)?);
    }
    let slice = cone.variety.slice(f, h)?;
    let (dim_ok, several) = if cone.is_quadric() {
        let class = match slice.generators().iter().find(|g| !g.is_zero()) {
            None => QuadricClass::WholeSpace,
            Some(g) => classify_quadric_slice(f, g)?,
        };
        out.slice_class = Some(class);
        (class != QuadricClass::WholeSpace, class.is_bad())
    } else {
        let dim_ok = !slice.is_whole_space();
        (
            dim_ok,
            dim_ok && cone.visible_points(h, &APPROXIMATE_DEGREES, budget)? >= 2,
        )
    };
    out.in_u = out.witness.is_some() && dim_ok && several;
    Ok(out)
}

/// Codimension-k subspaces of P^n contained in the hyperplane H, in the
/// order of the codimension-(k-1) subspaces of H ≅ P^{n-1}.
pub fn enumerate_m_h(field: &Field, h: &LinearSubspace, k: usize) -> Result<Vec<LinearSubspace>> {
    let n = h.n();
    if h.codim() != 1 {
        return Err(Error::InvalidDimension("M_H needs a hyperplane".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidDimension(format!(
            "need 1 <= k <= n, got k={k}"
        )));
    }
    let basis = h.parametrize(field);
    SubspaceIter::new(field, n - 1, k - 1)
        .map(|s| {
            let vecs: Vec<Vec<Elem>> = s
                .parametrize(field)
                .iter()
                .map(|c| crate::linalg::combine(field, c, &basis))
                .collect();
            LinearSubspace::span(field, n, &vecs)
        })
        .collect()
}

/// `#M_H(F_q)`: codimension-(k-1) subspaces of P^{n-1}.
pub fn m_h_count(n: usize, k: usize, q: u64) -> BigUint {
    gaussian_binomial(n, k - 1, q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MProperties {
    /// `dim(X ∩ M) = r - k = dim(N ∩ M)`.
    pub dimensions: bool,
    /// `X ∩ M` has degree at least 2 as a reduced scheme.
    pub degree: bool,
    /// `join(M, L) = H`.
    pub spans_h: bool,
    pub approximate: bool,
}

impl MProperties {
    pub fn all(&self) -> bool {
        self.dimensions && self.degree && self.spans_h
    }
}

/// Evaluates the three properties making M ∈ M_H a bad witness. `span` is
/// N = join(L, P) from the U filter.
pub fn generic_m_properties(
    cone: &Cone,
    h: &LinearSubspace,
    span: &LinearSubspace,
    m: &LinearSubspace,
    budget: Budget,
) -> Result<MProperties> {
    let f = &cone.field;
    let k = m.codim();
    let r = cone.spec.r;
    if k > r {
        return Err(Error::InvalidDimension(format!("k={k} exceeds r={r}")));
    }
    let target = r as isize - k as isize;
    let n_cap_m = span.intersect(f, m)?;
    let slice = cone.variety.slice(f, m)?;
    let (x_dim_ok, degree, approximate) = if cone.is_quadric() {
        let class = match slice.generators().iter().find(|g| !g.is_zero()) {
            None => QuadricClass::WholeSpace,
            Some(g) => classify_quadric_slice(f, g)?,
        };
        let degree = matches!(
            class,
            QuadricClass::Irreducible | QuadricClass::SplitPair | QuadricClass::ConjugatePair
        );
        // a nonzero restriction of a hypersurface is proper in M
        (class != QuadricClass::WholeSpace, degree, false)
    } else {
        let whole = slice.is_whole_space();
        // X ∩ M ⊋ N ∩ M over some extension
        let mut extra = false;
        for &e in &APPROXIMATE_DEGREES {
            let x_count = slice.count_points_extension(f, e, budget)?;
            let ext = crate::ff::make_field(f.p() as u64, f.m() * e)?;
            let lin = n_cap_m.point_count(ext.order());
            if BigUint::from(x_count) > lin {
                extra = true;
                break;
            }
        }
        // a component of dimension r-k+1 would contribute about q^{r-k+1} points
        let n1 = slice.count_points(f, budget)?;
        let proper = BigUint::from(n1) < BigUint::from(f.order()).pow(target as u32 + 1);
        (!whole && proper, extra, true)
    };
    let dimensions = x_dim_ok && n_cap_m.dim() == target;
    let spans_h = m.join(f, &cone.vertex)? == *h;
    Ok(MProperties {
        dimensions,
        degree,
        spans_h,
        approximate,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpnessResult {
    pub q: u64,
    pub hyperplanes_through_vertex: u64,
    pub u_count: u64,
    /// `sum over H in U of #M_H(F_q)`.
    pub m_candidates: u64,
    /// M passing all three properties, over all H in U.
    pub m_witnesses: u64,
    /// Every witness arises from exactly one H, namely `join(M, L)`.
    pub witnesses_unique: bool,
    /// Every witness is classified bad.
    pub witnesses_bad: bool,
    pub bad_count: u64,
    pub very_bad_count: u64,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpnessExperiment {
    pub cone: ConeSpec,
    pub k: usize,
    pub classifier: Classifier,
    pub results: Vec<SharpnessResult>,
}

/// Runs the U / M_H scan and the bad-locus census for each prime.
pub fn run_sharpness(
    spec: &ConeSpec,
    k: usize,
    primes: &[u64],
    budget: Budget,
) -> Result<SharpnessExperiment> {
    if k == 0 || k > spec.r || k >= spec.n {
        return Err(Error::InvalidDimension(format!(
            "sharpness needs 1 <= k <= r and k < n, got k={k}"
        )));
    }
    let mut results = Vec::new();
    let mut classifier = Classifier::QuadricExact;
    for &p in primes {
        let field = crate::ff::make_field(p, 1)?;
        let cone = Cone::new(spec, &field)?;
        classifier = if cone.is_quadric() {
            Classifier::QuadricExact
        } else {
            Classifier::ComponentEstimate {
                ext_degrees: vec![1, 2],
            }
        };
        results.push(sharpness_at(&cone, k, &classifier, budget)?);
    }
    Ok(SharpnessExperiment {
        cone: spec.clone(),
        k,
        classifier,
        results,
    })
}

fn sharpness_at(
    cone: &Cone,
    k: usize,
    classifier: &Classifier,
    budget: Budget,
) -> Result<SharpnessResult> {
    let f = &cone.field;
    let hyperplanes = Grassmannian::new(cone.spec.n, 1, f)?;
    budget.check(&hyperplanes.cardinality())?;
    let through: Vec<LinearSubspace> = hyperplanes
        .par_subspaces()
        .into_iter()
        .filter(|h| h.contains_subspace(f, &cone.vertex))
        .collect();
    let mut u_count = 0;
    let mut m_candidates = 0;
    let mut witnesses: Vec<(LinearSubspace, LinearSubspace)> = Vec::new();
    for h in &through {
        let u = locus_u_filter(cone, h, budget)?;
        if !u.in_u {
            continue;
        }
        u_count += 1;
        let span = u.span.expect("U members carry a span");
        let ms = enumerate_m_h(f, h, k)?;
        m_candidates += ms.len() as u64;
        for m in ms {
            if generic_m_properties(cone, h, &span, &m, budget)?.all() {
                witnesses.push((m, h.clone()));
            }
        }
    }
    let mut ms: Vec<&LinearSubspace> = witnesses.iter().map(|w| &w.0).collect();
    let before = ms.len();
    ms.sort_by(|a, b| a.equations().cmp(b.equations()));
    ms.dedup();
    let mut witnesses_unique = ms.len() == before;
    let mut witnesses_bad = true;
    for (m, h) in &witnesses {
        witnesses_unique &= m.join(f, &cone.vertex)? == *h;
        witnesses_bad &= classify_slice(&cone.variety, f, m, classifier, budget)?
            .bad
            .unwrap_or(false);
    }
    let census = full_census(&cone.variety, f, k, classifier, budget)?;
    Ok(SharpnessResult {
        q: f.order(),
        hyperplanes_through_vertex: through.len() as u64,
        u_count,
        m_candidates,
        m_witnesses: witnesses.len() as u64,
        witnesses_unique,
        witnesses_bad,
        bad_count: census.bad_count,
        very_bad_count: census.very_bad_count,
        total: census.total,
    })
}
