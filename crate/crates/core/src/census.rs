//! Bad-locus censuses over G(n-k, n)(F_q).
//!
//! Every H is classified by one of two explicitly chosen classifiers:
//! the exact quadric classifier (hypersurfaces of degree <= 2, odd q) or
//! the component estimator built on extension point counts. Alongside the
//! classification each census counts the H whose slice size deviates from
//! the mean by at least `q^{r-k} / 2` and compares that count with
//! Chebyshev's bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::geometry::{Grassmannian, LinearSubspace};
use crate::rational::{integer, ratio, serialize_exact, serialize_exact_opt};
use crate::sampling::{stream_rng, wilson_interval, Z95};
use crate::stats::{exact_statistics, slice_counts, SliceDistribution};
use crate::variety::{
    classify_quadric_slice, default_tau, estimate_components, ProjectiveVariety, QuadricClass,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classifier {
    QuadricExact,
    ComponentEstimate { ext_degrees: Vec<u32> },
}

impl Classifier {
    pub fn name(&self) -> &'static str {
        match self {
            Classifier::QuadricExact => "quadric-exact",
            Classifier::ComponentEstimate { .. } => "component-estimate",
        }
    }

    /// Checks that the classifier applies to X over `field` with slices of
    /// codimension k.
    pub fn check(&self, x: &ProjectiveVariety, field: &Field, k: usize) -> Result<()> {
        x.check_field(field)?;
        if k == 0 || k >= x.n() {
            return Err(Error::InvalidDimension(format!(
                "census needs 1 <= k <= n-1, got k={k}, n={}",
                x.n()
            )));
        }
        match self {
            Classifier::QuadricExact => {
                if field.p() == 2 {
                    return Err(Error::ClassifierPrecondition(
                        "quadric-exact needs odd characteristic".into(),
                    ));
                }
                let gens: Vec<_> = x.generators().iter().filter(|g| !g.is_zero()).collect();
                if gens.len() > 1 || gens.iter().any(|g| g.degree() > 2) {
                    return Err(Error::ClassifierPrecondition(
                        "quadric-exact needs a single generator of degree <= 2".into(),
                    ));
                }
            }
            Classifier::ComponentEstimate { ext_degrees } => {
                if x.declared_dim() < k {
                    return Err(Error::ClassifierPrecondition(format!(
                        "slice dimension r-k = {}-{} is negative",
                        x.declared_dim(),
                        k
                    )));
                }
                if ext_degrees.iter().any(|&m| m > 1) && !field.is_prime_field() {
                    return Err(Error::ClassifierPrecondition(
                        "component-estimate with extensions needs a prime base field".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of classifying one slice `X ∩ H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SliceVerdict {
    /// Quadric type, for the exact classifier.
    pub class: Option<QuadricClass>,
    /// Number of geometrically irreducible top-dimensional components
    /// differs from 1.
    pub very_bad: bool,
    /// Not geometrically irreducible; `None` when undecided.
    pub bad: Option<bool>,
}

/// Classifies `X ∩ H`. Assumes `classifier.check` has passed.
pub fn classify_slice(
    x: &ProjectiveVariety,
    field: &Field,
    h: &LinearSubspace,
    classifier: &Classifier,
    budget: Budget,
) -> Result<SliceVerdict> {
    let slice = x.slice(field, h)?;
    match classifier {
        Classifier::QuadricExact => {
            let class = match slice.generators().iter().find(|g| !g.is_zero()) {
                None => QuadricClass::WholeSpace,
                Some(g) if g.degree() == 1 => QuadricClass::Irreducible,
                Some(g) => classify_quadric_slice(field, g)?,
            };
            Ok(SliceVerdict {
                class: Some(class),
                very_bad: class.is_bad(),
                bad: Some(class.is_bad()),
            })
        }
        Classifier::ComponentEstimate { ext_degrees } => {
            if slice.is_whole_space() {
                return Ok(SliceVerdict {
                    class: None,
                    very_bad: false,
                    bad: Some(false),
                });
            }
            let est = estimate_components(&slice, field, ext_degrees, &default_tau(), budget)?;
            Ok(SliceVerdict {
                class: None,
                very_bad: est.a_est != 1,
                bad: est.g_est.map(|g| g != 1),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassTally {
    pub irreducible: u64,
    pub split: u64,
    pub conjugate: u64,
    pub double: u64,
    pub whole: u64,
}

impl ClassTally {
    fn add(&mut self, c: QuadricClass) {
        match c {
            QuadricClass::Irreducible => self.irreducible += 1,
            QuadricClass::SplitPair => self.split += 1,
            QuadricClass::ConjugatePair => self.conjugate += 1,
            QuadricClass::DoubleHyperplane => self.double += 1,
            QuadricClass::WholeSpace => self.whole += 1,
        }
    }
}

/// `q^{r-k} / 2`.
pub fn deviation_threshold(r: usize, k: usize, q: u64) -> Result<BigRational> {
    if r < k {
        return Err(Error::ThresholdUndefined { r, k });
    }
    Ok(ratio(BigInt::from(q).pow((r - k) as u32), 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BadLocusCensus {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub q: u64,
    pub field: String,
    pub classifier: Classifier,
    pub total: u64,
    pub x_count: u64,
    pub very_bad_count: u64,
    /// Slices decided to be not geometrically irreducible.
    pub bad_count: u64,
    /// Slices the estimator could not decide.
    pub inconclusive_count: u64,
    pub classes: ClassTally,
    #[serde(serialize_with = "serialize_exact")]
    pub mu: BigRational,
    #[serde(serialize_with = "serialize_exact")]
    pub sigma2: BigRational,
    /// `q^{r-k} / 2`.
    #[serde(serialize_with = "serialize_exact")]
    pub threshold: BigRational,
    /// `#{H : |Z - mu| >= threshold}`.
    pub deviation_count: u64,
    /// `t^2` with `threshold = t sigma`; `None` when `sigma^2 = 0`.
    #[serde(serialize_with = "serialize_exact_opt")]
    pub t_squared: Option<BigRational>,
    /// `total / t^2`; zero when `sigma^2 = 0`.
    #[serde(serialize_with = "serialize_exact")]
    pub chebyshev_bound: BigRational,
}

pub fn full_census(
    x: &ProjectiveVariety,
    field: &Field,
    k: usize,
    classifier: &Classifier,
    budget: Budget,
) -> Result<BadLocusCensus> {
    classifier.check(x, field, k)?;
    let r = x.declared_dim();
    let q = field.order();
    let threshold = deviation_threshold(r, k, q)?;
    let counts = slice_counts(x, field, k, budget)?;
    let verdicts = counts
        .subspaces
        .par_iter()
        .map(|h| classify_slice(x, field, h, classifier, budget))
        .collect::<Result<Vec<_>>>()?;

    let mut classes = ClassTally::default();
    let (mut very_bad_count, mut bad_count, mut inconclusive_count) = (0, 0, 0);
    for v in &verdicts {
        if let Some(c) = v.class {
            classes.add(c);
        }
        very_bad_count += v.very_bad as u64;
        match v.bad {
            Some(b) => bad_count += b as u64,
            None => inconclusive_count += 1,
        }
    }

    let dist = SliceDistribution::from_values(x.n(), k, field, &counts.values);
    let st = exact_statistics(&dist, counts.points.len() as u64);
    let thr_sq = &threshold * &threshold;
    let deviation_count = counts
        .values
        .iter()
        .filter(|&&z| {
            let d = integer(z) - &st.mu;
            &d * &d >= thr_sq
        })
        .count() as u64;
    let total = dist.total;
    let (t_squared, chebyshev_bound) = if st.sigma2.is_zero() {
        (None, BigRational::zero())
    } else {
        let t2 = &thr_sq / &st.sigma2;
        let bound = integer(total) / &t2;
        (Some(t2), bound)
    };
    Ok(BadLocusCensus {
        n: x.n(),
        k,
        r,
        q,
        field: field.name(),
        classifier: classifier.clone(),
        total,
        x_count: st.x_count,
        very_bad_count,
        bad_count,
        inconclusive_count,
        classes,
        mu: st.mu,
        sigma2: st.sigma2,
        threshold,
        deviation_count,
        t_squared,
        chebyshev_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChebyshevReport {
    #[serde(serialize_with = "serialize_exact")]
    pub deviation_fraction: BigRational,
    /// `1 / t^2`, absent when `sigma^2 = 0`.
    #[serde(serialize_with = "serialize_exact_opt")]
    pub bound: Option<BigRational>,
    pub holds: bool,
    /// `deviation_fraction * q^{r-k}`, for inspection only.
    pub scaled_fraction: f64,
    pub note: Option<String>,
}

pub fn chebyshev_check(c: &BadLocusCensus) -> ChebyshevReport {
    let deviation_fraction = ratio(c.deviation_count, c.total);
    let scale = integer(BigInt::from(c.q).pow((c.r - c.k) as u32));
    let scaled_fraction = (&deviation_fraction * scale).to_f64().unwrap_or(f64::NAN);
    match &c.t_squared {
        Some(t2) => {
            let bound = t2.recip();
            ChebyshevReport {
                holds: deviation_fraction <= bound,
                deviation_fraction,
                bound: Some(bound),
                scaled_fraction,
                note: None,
            }
        }
        None => ChebyshevReport {
            holds: c.deviation_count == 0,
            deviation_fraction,
            bound: None,
            scaled_fraction,
            note: Some("sigma^2 = 0: Z is constant, the bound holds vacuously".into()),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    /// `(q, count)` pairs used in the fit.
    pub samples: Vec<(u64, u64)>,
    /// Inputs dropped because their count was zero.
    pub excluded: Vec<u64>,
    pub exponent: f64,
    pub predicted: i64,
    pub residual: f64,
}

/// `dim G(n-k, n) - r + k = (n-k+1)k - r + k`.
pub fn predicted_exponent(n: usize, k: usize, r: usize) -> i64 {
    ((n - k + 1) * k) as i64 - r as i64 + k as i64
}

/// Least-squares slope of `log count` against `log q`.
pub fn fit_exponent(samples: &[(u64, u64)], predicted: i64) -> Result<ScalingFit> {
    let mut excluded = Vec::new();
    let mut used = Vec::new();
    for &(q, c) in samples {
        if c == 0 {
            log::warn!("excluding q={q} from the scaling fit: zero count");
            excluded.push(q);
        } else {
            used.push((q, c));
        }
    }
    let mut qs: Vec<u64> = used.iter().map(|s| s.0).collect();
    qs.sort_unstable();
    qs.dedup();
    if qs.len() < 2 {
        return Err(Error::ScalingFit(format!(
            "need nonzero counts at two distinct q, have {}",
            qs.len()
        )));
    }
    let pts: Vec<(f64, f64)> = used
        .iter()
        .map(|&(q, c)| ((q as f64).ln(), (c as f64).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let exponent = sxy / sxx;
    Ok(ScalingFit {
        samples: used,
        excluded,
        exponent,
        predicted,
        residual: (exponent - predicted as f64).abs(),
    })
}

/// Runs `census_at(p)` for each prime and fits the growth of the very-bad
/// count.
pub fn scaling_fit<F>(census_at: F, primes: &[u64]) -> Result<(Vec<BadLocusCensus>, ScalingFit)>
where
    F: Fn(u64) -> Result<BadLocusCensus>,
{
    let censuses = primes
        .iter()
        .map(|&p| census_at(p))
        .collect::<Result<Vec<_>>>()?;
    let first = censuses
        .first()
        .ok_or_else(|| Error::ScalingFit("no fields given".into()))?;
    let predicted = predicted_exponent(first.n, first.k, first.r);
    let samples: Vec<(u64, u64)> = censuses.iter().map(|c| (c.q, c.very_bad_count)).collect();
    let fit = fit_exponent(&samples, predicted)?;
    Ok((censuses, fit))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloCensus {
    pub n: usize,
    pub k: usize,
    pub q: u64,
    pub classifier: Classifier,
    pub samples: u64,
    pub seed: u64,
    pub very_bad: u64,
    pub inconclusive: u64,
    pub fraction: f64,
    /// Wilson 95% interval for the very-bad fraction.
    pub interval: (f64, f64),
}

impl MonteCarloCensus {
    pub fn half_width(&self) -> f64 {
        (self.interval.1 - self.interval.0) / 2.0
    }
}

/// Classifies `samples` uniform random subspaces; sample i draws from
/// `stream_rng(seed, i)`.
pub fn monte_carlo_census(
    x: &ProjectiveVariety,
    field: &Field,
    k: usize,
    classifier: &Classifier,
    samples: u64,
    seed: u64,
    budget: Budget,
) -> Result<MonteCarloCensus> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo census needs at least 100 samples, got {samples}"
        )));
    }
    classifier.check(x, field, k)?;
    let g = Grassmannian::new(x.n(), k, field)?;
    let verdicts = (0..samples)
        .into_par_iter()
        .map(|i| {
            let h = g.random_subspace(&mut stream_rng(seed, i));
            classify_slice(x, field, &h, classifier, budget)
        })
        .collect::<Result<Vec<_>>>()?;
    let very_bad = verdicts.iter().filter(|v| v.very_bad).count() as u64;
    let inconclusive = verdicts.iter().filter(|v| v.bad.is_none()).count() as u64;
    Ok(MonteCarloCensus {
        n: x.n(),
        k,
        q: field.order(),
        classifier: classifier.clone(),
        samples,
        seed,
        very_bad,
        inconclusive,
        fraction: very_bad as f64 / samples as f64,
        interval: wilson_interval(very_bad, samples, Z95),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    fn cone(p: u64) -> (ProjectiveVariety, Field) {
        let f = make_field(p, 1).unwrap();
        (
            ProjectiveVariety::from_equations(3, 2, &f, &["x0*x2 - x1^2"]).unwrap(),
            f,
        )
    }

    #[test]
    fn thresholds() {
        assert_eq!(deviation_threshold(2, 1, 3).unwrap(), ratio(3, 2));
        assert_eq!(deviation_threshold(3, 2, 5).unwrap(), ratio(5, 2));
        assert_eq!(deviation_threshold(4, 4, 7).unwrap(), ratio(1, 2));
        assert_eq!(
            deviation_threshold(0, 1, 3),
            Err(Error::ThresholdUndefined { r: 0, k: 1 })
        );
    }

    #[test]
    fn cone_census_q3() {
        let (x, f) = cone(3);
        let c = full_census(&x, &f, 1, &Classifier::QuadricExact, Budget::default()).unwrap();
        assert_eq!((c.total, c.very_bad_count, c.bad_count), (40, 9, 9));
        assert_eq!(c.classes.split + c.classes.conjugate, 9);
        assert_eq!(c.x_count, 13);
        let rep = chebyshev_check(&c);
        assert!(rep.holds);
    }

    #[test]
    fn projective_space_census() {
        let f = make_field(3, 1).unwrap();
        let x = ProjectiveVariety::from_equations(3, 3, &f, &[]).unwrap();
        let c = full_census(&x, &f, 1, &Classifier::QuadricExact, Budget::default()).unwrap();
        assert_eq!(c.very_bad_count, 0);
        assert_eq!(c.classes.whole, 40);
        assert!(c.t_squared.is_none());
        let rep = chebyshev_check(&c);
        assert!(rep.holds && rep.note.is_some());
    }

    #[test]
    fn preconditions() {
        let (x, _) = cone(3);
        let f2 = make_field(2, 1).unwrap();
        let x2 = ProjectiveVariety::from_equations(3, 2, &f2, &["x0*x2 - x1^2"]).unwrap();
        assert!(matches!(
            full_census(&x2, &f2, 1, &Classifier::QuadricExact, Budget::default()),
            Err(Error::ClassifierPrecondition(_))
        ));
        let f3 = make_field(3, 1).unwrap();
        assert!(matches!(
            full_census(&x, &f3, 3, &Classifier::QuadricExact, Budget::default()),
            Err(Error::InvalidDimension(_))
        ));
        let two = ProjectiveVariety::from_equations(2, 0, &f3, &["x2", "x0*x1"]).unwrap();
        assert!(matches!(
            full_census(&two, &f3, 1, &Classifier::QuadricExact, Budget::default()),
            Err(Error::ClassifierPrecondition(_))
        ));
        let est = Classifier::ComponentEstimate {
            ext_degrees: vec![1, 2],
        };
        assert!(matches!(
            full_census(&two, &f3, 1, &est, Budget::default()),
            Err(Error::ClassifierPrecondition(_))
        ));
    }

    #[test]
    fn classifiers_agree_on_cone() {
        let est = Classifier::ComponentEstimate {
            ext_degrees: vec![1, 2],
        };
        for p in [3u64, 5] {
            let (x, f) = cone(p);
            let g = Grassmannian::new(3, 1, &f).unwrap();
            for h in g.subspaces() {
                let a = classify_slice(&x, &f, &h, &Classifier::QuadricExact, Budget::default())
                    .unwrap();
                let b = classify_slice(&x, &f, &h, &est, Budget::default()).unwrap();
                assert_eq!(a.very_bad, b.very_bad, "{h:?}");
                assert_eq!(a.bad, b.bad, "{h:?}");
            }
        }
    }

    #[test]
    fn fits() {
        let fit = fit_exponent(&[(3, 9), (5, 25), (7, 49)], 2).unwrap();
        assert!(fit.residual < 1e-9);
        let flat = fit_exponent(&[(3, 4), (5, 4), (7, 4)], 0).unwrap();
        assert!(flat.exponent.abs() < 1e-12);
        let partial = fit_exponent(&[(3, 0), (5, 25), (7, 49)], 2).unwrap();
        assert_eq!(partial.excluded, vec![3]);
        assert!(fit_exponent(&[(3, 0), (5, 0)], 2).is_err());
        assert!(fit_exponent(&[(5, 3), (5, 3)], 2).is_err());
        assert_eq!(predicted_exponent(3, 1, 2), 2);
        assert_eq!(predicted_exponent(4, 2, 3), 5);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let (x, f) = cone(5);
        let a = monte_carlo_census(
            &x,
            &f,
            1,
            &Classifier::QuadricExact,
            500,
            3,
            Budget::default(),
        )
        .unwrap();
        let b = monte_carlo_census(
            &x,
            &f,
            1,
            &Classifier::QuadricExact,
            500,
            3,
            Budget::default(),
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_census(
            &x,
            &f,
            1,
            &Classifier::QuadricExact,
            99,
            3,
            Budget::default()
        )
        .is_err());
    }
}
