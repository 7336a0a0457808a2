use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on enumerated items (points, or membership tests).
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Upper bound on the number of items an exhaustive enumeration may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn check(&self, needed: &BigUint) -> Result<u64> {
        match u64::try_from(needed) {
            Ok(n) if n <= self.0 => Ok(n),
            _ => Err(Error::BudgetExceeded {
                needed: needed.to_string(),
                budget: self.0,
            }),
        }
    }
}
