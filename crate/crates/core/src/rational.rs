//! Exact rationals in reports.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

/// A rational as numerator/denominator strings plus a decimal rendering.
/// The decimal is for reading only; comparisons use the exact value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactRational {
    pub num: String,
    pub den: String,
    pub decimal: f64,
}

impl From<&BigRational> for ExactRational {
    fn from(r: &BigRational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            decimal: r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self::from(&r)
    }
}

pub fn ratio<A: Into<BigInt>, B: Into<BigInt>>(num: A, den: B) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn integer<A: Into<BigInt>>(v: A) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `serialize_with` adapter rendering a `BigRational` as [`ExactRational`].
pub fn serialize_exact<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    ExactRational::from(r).serialize(s)
}

pub fn serialize_exact_opt<S: serde::Serializer>(
    r: &Option<BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    r.as_ref().map(ExactRational::from).serialize(s)
}
