//! Exact finite-field laboratory for the statistics of linear slices of
//! projective varieties: slice-count distributions over Grassmannians,
//! bad-locus censuses with Chebyshev bounds, and cone constructions whose
//! bad loci have extremal dimension.

pub mod budget;
pub mod census;
pub mod constructions;
pub mod error;
pub mod ff;
pub mod geometry;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod sampling;
pub mod stats;
pub mod variety;

pub use budget::{Budget, DEFAULT_BUDGET};
pub use census::{BadLocusCensus, Classifier, ScalingFit};
pub use error::{Error, Result};
pub use ff::{make_field, parse_field, Elem, Field, FieldSpec};
pub use geometry::{Grassmannian, LinearSubspace, ProjectivePoint};
pub use poly::HomogeneousPolynomial;
pub use stats::{SliceDistribution, SliceStatistics};
pub use variety::{ProjectiveVariety, QuadricClass};
