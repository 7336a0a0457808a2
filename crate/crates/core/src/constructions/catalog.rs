use serde::Serialize;

use super::{build_cone, ConeSpec};
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::variety::ProjectiveVariety;

/// A named test variety, instantiated per field from integer equations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub n: usize,
    pub r: usize,
    pub equations: &'static [&'static str],
    /// Set for cones built from a base curve.
    #[serde(skip)]
    cone: Option<(&'static [&'static str], usize, usize)>,
}

impl CatalogEntry {
    pub fn instantiate(&self, field: &Field) -> Result<ProjectiveVariety> {
        match self.cone_spec() {
            Some(spec) => build_cone(&spec, field),
            None => ProjectiveVariety::from_equations(self.n, self.r, field, self.equations),
        }
    }

    pub fn cone_spec(&self) -> Option<ConeSpec> {
        self.cone
            .map(|(eqs, n, r)| ConeSpec::new(eqs, n, r).expect("catalog cone"))
    }

    pub fn is_cone(&self) -> bool {
        self.cone.is_some()
    }
}

const CONIC: &[&str] = &["x0*x2 - x1^2"];

pub fn standard_catalog() -> Vec<CatalogEntry> {
    let plain = |name, description, n, r, equations| CatalogEntry {
        name,
        description,
        n,
        r,
        equations,
        cone: None,
    };
    vec![
        plain("conic-p2", "smooth conic x0*x2 = x1^2", 2, 1, CONIC),
        plain(
            "split-pair-p2",
            "two rational lines x0*x1 = 0",
            2,
            1,
            &["x0*x1"],
        ),
        plain(
            "conjugate-pair-p2",
            "x0^2 + x1^2 = 0, two conjugate lines when -1 is a nonsquare",
            2,
            1,
            &["x0^2 + x1^2"],
        ),
        CatalogEntry {
            name: "quadric-cone-p3",
            description: "cone over the conic with vertex (0:0:0:1)",
            n: 3,
            r: 2,
            equations: CONIC,
            cone: Some((CONIC, 3, 2)),
        },
        CatalogEntry {
            name: "quadric-cone-p4",
            description: "cone over the conic with vertex line x0 = x1 = x2 = 0",
            n: 4,
            r: 3,
            equations: CONIC,
            cone: Some((CONIC, 4, 3)),
        },
        plain(
            "plane-cubic-p2",
            "irreducible plane cubic x0^3 + x1^3 = x0*x2^2",
            2,
            1,
            &["x0^3 + x1^3 - x0*x2^2"],
        ),
        plain(
            "two-points-p2",
            "the points (1:0:0) and (0:1:0)",
            2,
            0,
            &["x2", "x0*x1"],
        ),
        plain("projective-space-p3", "all of P^3", 3, 3, &[]),
    ]
}

pub fn lookup(name: &str) -> Result<CatalogEntry> {
    standard_catalog()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalog(name.to_string()))
}
