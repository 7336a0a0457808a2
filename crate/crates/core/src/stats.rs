//! Exact statistics of `Z = #(X ∩ H)(F_q)` for H uniform on G(n-k, n)(F_q).
//!
//! Everything here is an exact rational. The mean and the pair term
//! `B = E[#{(x, y) in (X∩H)^2 : x != y}]` have closed forms in terms of
//! `#X`, `#P^{n-k}` and `#P^n`; `verify_lemma` checks them against the
//! exhaustive histogram together with `B <= mu^2`, `sigma^2 <= mu` and
//! `sigma^2 = B - mu^2 + mu`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::geometry::{projective_count, Grassmannian, LinearSubspace, ProjectivePoint};
use crate::rational::{integer, ratio, ExactRational};
use crate::sampling::stream_rng;
use crate::variety::ProjectiveVariety;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceDistribution {
    pub n: usize,
    pub k: usize,
    pub field: String,
    pub q: u64,
    /// Z value -> number of subspaces H with `#(X∩H)(F_q) = Z`.
    pub histogram: BTreeMap<u64, u64>,
    pub total: u64,
}

impl SliceDistribution {
    pub fn from_values(n: usize, k: usize, field: &Field, values: &[u64]) -> Self {
        let mut histogram = BTreeMap::new();
        for &z in values {
            *histogram.entry(z).or_insert(0u64) += 1;
        }
        Self {
            n,
            k,
            field: field.name(),
            q: field.order(),
            histogram,
            total: values.len() as u64,
        }
    }

    pub fn mean(&self) -> BigRational {
        let s: BigInt = self
            .histogram
            .iter()
            .map(|(&z, &c)| BigInt::from(z) * c)
            .sum();
        ratio(s, self.total)
    }

    pub fn second_moment(&self) -> BigRational {
        let s: BigInt = self
            .histogram
            .iter()
            .map(|(&z, &c)| BigInt::from(z) * z * c)
            .sum();
        ratio(s, self.total)
    }

    pub fn variance(&self) -> BigRational {
        let mu = self.mean();
        self.second_moment() - &mu * &mu
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceStatistics {
    pub mu: BigRational,
    pub second_moment: BigRational,
    pub sigma2: BigRational,
    /// Mean number of ordered pairs of distinct points of X∩H.
    pub b: BigRational,
    pub x_count: u64,
    pub v_count: u64,
}

/// The subspaces of G(n-k, n)(F_q) in canonical order, the slice count
/// `Z(H)` for each, and the F_q-points of X.
#[derive(Clone, Debug)]
pub struct SliceCounts {
    pub subspaces: Vec<LinearSubspace>,
    pub values: Vec<u64>,
    pub points: Vec<ProjectivePoint>,
}

/// Enumerates G(n-k, n)(F_q) and counts `#(X ∩ H)(F_q)` for every H by
/// membership tests against the points of X. Work is bounded by
/// `#V(F_q) * max(#X(F_q), 1)` membership tests.
pub fn slice_counts(
    x: &ProjectiveVariety,
    field: &Field,
    k: usize,
    budget: Budget,
) -> Result<SliceCounts> {
    let g = Grassmannian::new(x.n(), k, field)?;
    let points = x.points(field, budget)?;
    let work = g.cardinality() * BigUint::from(points.len().max(1));
    budget.check(&work)?;
    let subspaces = g.par_subspaces();
    let values = subspaces
        .par_iter()
        .map(|h| points.iter().filter(|pt| h.contains(field, pt)).count() as u64)
        .collect();
    Ok(SliceCounts {
        subspaces,
        values,
        points,
    })
}

pub fn slice_distribution(
    x: &ProjectiveVariety,
    field: &Field,
    k: usize,
    budget: Budget,
) -> Result<SliceDistribution> {
    let counts = slice_counts(x, field, k, budget)?;
    Ok(SliceDistribution::from_values(
        x.n(),
        k,
        field,
        &counts.values,
    ))
}

pub fn exact_statistics(dist: &SliceDistribution, x_count: u64) -> SliceStatistics {
    let mu = dist.mean();
    let second_moment = dist.second_moment();
    let sigma2 = &second_moment - &mu * &mu;
    let b = &second_moment - &mu;
    SliceStatistics {
        mu,
        second_moment,
        sigma2,
        b,
        x_count,
        v_count: dist.total,
    }
}

fn big(v: BigUint) -> BigInt {
    BigInt::from(v)
}

/// `#X · #P^{n-k} / #P^n`.
pub fn closed_form_mean(x_count: u64, n: usize, k: usize, q: u64) -> BigRational {
    let slice = big(projective_count(n - k, q));
    let ambient = big(projective_count(n, q));
    ratio(BigInt::from(x_count) * slice, ambient)
}

/// `#X(#X-1) · #P^{n-k}(#P^{n-k}-1) / (#P^n(#P^n-1))`.
pub fn closed_form_b(x_count: u64, n: usize, k: usize, q: u64) -> BigRational {
    let x = BigInt::from(x_count);
    let s = big(projective_count(n - k, q));
    let a = big(projective_count(n, q));
    let one = BigInt::from(1);
    let num: BigInt = &x * (&x - &one) * &s * (&s - &one);
    let den: BigInt = &a * (&a - &one);
    if den.is_zero() {
        // P^0: a single point, no distinct pairs
        return BigRational::zero();
    }
    ratio(num, den)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub relation: String,
    pub lhs: ExactRational,
    pub rhs: ExactRational,
    pub passed: bool,
}

impl IdentityCheck {
    fn eq(name: &str, lhs: &BigRational, rhs: &BigRational) -> Self {
        Self {
            name: name.into(),
            relation: "=".into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            passed: lhs == rhs,
        }
    }

    fn le(name: &str, lhs: &BigRational, rhs: &BigRational) -> Self {
        Self {
            name: name.into(),
            relation: "<=".into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            passed: lhs <= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub field: String,
    pub q: u64,
    pub x_count: u64,
    pub v_count: u64,
    pub histogram: BTreeMap<u64, u64>,
    pub mu: ExactRational,
    pub sigma2: ExactRational,
    pub b: ExactRational,
    /// `mu q^k / #X`, which tends to 1 as q grows.
    pub normalized_mean: Option<f64>,
    pub checks: Vec<IdentityCheck>,
    pub passed: bool,
}

impl LemmaReport {
    /// Fails naming the first identity that does not hold.
    pub fn ensure(&self) -> Result<()> {
        match self.checks.iter().find(|c| !c.passed) {
            Some(c) => Err(Error::IdentityFailed(c.name.clone())),
            None => Ok(()),
        }
    }
}

pub fn verify_lemma(
    x: &ProjectiveVariety,
    field: &Field,
    k: usize,
    budget: Budget,
) -> Result<LemmaReport> {
    let counts = slice_counts(x, field, k, budget)?;
    let dist = SliceDistribution::from_values(x.n(), k, field, &counts.values);
    let x_count = counts.points.len() as u64;
    let st = exact_statistics(&dist, x_count);
    let q = field.order();
    let mean_cf = closed_form_mean(x_count, x.n(), k, q);
    let b_cf = closed_form_b(x_count, x.n(), k, q);
    let mu_sq = &st.mu * &st.mu;
    let checks = vec![
        IdentityCheck::eq("mean_closed_form", &st.mu, &mean_cf),
        IdentityCheck::eq("pair_term_closed_form", &st.b, &b_cf),
        IdentityCheck::le("pair_term_at_most_mean_squared", &st.b, &mu_sq),
        IdentityCheck::le("variance_at_most_mean", &st.sigma2, &st.mu),
        IdentityCheck::eq(
            "variance_decomposition",
            &st.sigma2,
            &(&st.b - &mu_sq + &st.mu),
        ),
    ];
    let passed = checks.iter().all(|c| c.passed);
    let normalized_mean = (x_count > 0).then(|| {
        (&st.mu * integer(BigInt::from(q).pow(k as u32)) / integer(x_count))
            .to_f64()
            .unwrap_or(f64::NAN)
    });
    Ok(LemmaReport {
        n: x.n(),
        k,
        r: x.declared_dim(),
        field: field.name(),
        q,
        x_count,
        v_count: dist.total,
        histogram: dist.histogram,
        mu: (&st.mu).into(),
        sigma2: (&st.sigma2).into(),
        b: (&st.b).into(),
        normalized_mean,
        checks,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebyshevTail {
    /// Exact `Prob(|Z - mu| >= t sigma)`.
    pub probability: BigRational,
    /// `1 / t^2`.
    pub bound: BigRational,
    pub holds: bool,
}

/// Exact tail `Prob(|Z - mu| >= t sigma)` against Chebyshev's `1/t^2`.
/// With `sigma^2 = 0` the tail is reported as 0.
pub fn chebyshev_tail(dist: &SliceDistribution, t: &BigRational) -> Result<ChebyshevTail> {
    if !t.is_positive() {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let bound = t.recip() * t.recip();
    let sigma2 = dist.variance();
    if sigma2.is_zero() {
        return Ok(ChebyshevTail {
            probability: BigRational::zero(),
            bound,
            holds: true,
        });
    }
    let mu = dist.mean();
    // |Z - mu| >= t sigma  <=>  (Z - mu)^2 >= t^2 sigma^2
    let threshold = t * t * &sigma2;
    let hits: u64 = dist
        .histogram
        .iter()
        .filter(|(&z, _)| {
            let d = integer(z) - &mu;
            &d * &d >= threshold
        })
        .map(|(_, &c)| c)
        .sum();
    let probability = ratio(hits, dist.total);
    let holds = probability <= bound;
    Ok(ChebyshevTail {
        probability,
        bound,
        holds,
    })
}

/// Sample mean and unbiased sample variance of Z over random subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledMoments {
    pub samples: u64,
    pub mean: BigRational,
    pub sample_variance: BigRational,
}

impl SampledMoments {
    /// Whether `|mean - mu| <= z * sqrt(sample_variance / samples)`, exactly.
    pub fn within_standard_errors(&self, mu: &BigRational, z: u64) -> bool {
        let d = &self.mean - mu;
        &d * &d <= integer(z * z) * &self.sample_variance / integer(self.samples)
    }
}

/// Draws `samples` subspaces (sample i uses `stream_rng(seed, i)`).
pub fn sample_slice_moments(
    x: &ProjectiveVariety,
    field: &Field,
    k: usize,
    samples: u64,
    seed: u64,
    budget: Budget,
) -> Result<SampledMoments> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let g = Grassmannian::new(x.n(), k, field)?;
    let points = x.points(field, budget)?;
    let values: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let h = g.random_subspace(&mut stream_rng(seed, i));
            points.iter().filter(|pt| h.contains(field, pt)).count() as u64
        })
        .collect();
    let sum: BigInt = values.iter().map(|&v| BigInt::from(v)).sum();
    let sum_sq: BigInt = values.iter().map(|&v| BigInt::from(v) * v).sum();
    let n = BigInt::from(samples);
    let mean = BigRational::new(sum.clone(), n.clone());
    let sample_variance = BigRational::new(&n * &sum_sq - &sum * &sum, &n * (&n - 1));
    Ok(SampledMoments {
        samples,
        mean,
        sample_variance,
    })
}
