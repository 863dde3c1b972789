//! Violation records shared by the scanners and the verifier.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// Where a check was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    X { x: f64 },
    T { t: f64 },
    Point { x: f64, y: f64 },
    Index { k: usize },
    /// An adjacent grid pair `[x0, x1]`.
    Interval { x0: f64, x1: f64 },
}

impl Location {
    fn sort_key(&self) -> (u8, f64, f64) {
        match *self {
            Location::X { x } => (0, x, 0.0),
            Location::T { t } => (1, t, 0.0),
            Location::Point { x, y } => (2, x, y),
            Location::Index { k } => (3, k as f64, 0.0),
            Location::Interval { x0, x1 } => (4, x0, x1),
        }
    }
}

/// One failed (or grazing) evaluation of a registered check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub check_id: String,
    pub n: Option<u32>,
    pub c: Option<f64>,
    pub family: Option<String>,
    pub location: Location,
    /// Signed, normalised margin; negative means violated.
    pub margin: f64,
    /// Exact rational margin, when the check runs in exact arithmetic.
    pub exact_margin: Option<String>,
    pub conditional: bool,
}

impl ViolationReport {
    pub fn new(check_id: &str, location: Location, margin: f64, conditional: bool) -> Self {
        Self {
            check_id: check_id.to_string(),
            n: None,
            c: None,
            family: None,
            location,
            margin,
            exact_margin: None,
            conditional,
        }
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = Some(family.into());
        self
    }

    pub fn with_exact_margin(mut self, exact: impl Into<String>) -> Self {
        self.exact_margin = Some(exact.into());
        self
    }

    /// Total order on `(check_id, n, c, family, location)`.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let loc = |r: &Self| r.location.sort_key();
        self.check_id
            .cmp(&other.check_id)
            .then(self.n.cmp(&other.n))
            .then(
                self.c
                    .unwrap_or(f64::NEG_INFINITY)
                    .total_cmp(&other.c.unwrap_or(f64::NEG_INFINITY)),
            )
            .then(self.family.cmp(&other.family))
            .then_with(|| {
                let (a, b) = (loc(self), loc(other));
                a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2))
            })
            .then(self.margin.total_cmp(&other.margin))
    }
}

pub fn sort_reports(reports: &mut [ViolationReport]) {
    reports.sort_by(|a, b| a.canonical_cmp(b));
}
