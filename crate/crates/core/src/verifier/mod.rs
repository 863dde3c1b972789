//! Orchestrated inequality suites and conjecture scans.
//!
//! Every check produces *evaluations*: one signed, normalised margin per sampled
//! point, negative meaning the stated inequality failed there. Evaluations are
//! then classified. A margin below `-hard_tol` is a violation for an
//! unconditional check and a finding for a conditional one, and a margin with
//! `|margin| <= 10 hard_tol` is also logged as grazing. Checks run in exact
//! arithmetic are classified by the sign of the exact margin instead.

mod inequalities;
mod registry;
mod scans;

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::multivariate::check_step;
use crate::report::{sort_reports, Location, ViolationReport};

pub use registry::{CheckId, CheckInfo, Status, SuiteSelector, REGISTRY};
pub use scans::{
    default_synchronicity_targets, scan_durrmeyer_convexity, scan_logconvexity, scan_synchronicity,
    SynchronicityTarget,
};

/// Margins within this multiple of `hard_tol` are listed as grazing.
pub const GRAZING_FACTOR: f64 = 10.0;

/// Parameters shared by every check. Defaults reproduce the standard scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n_min: u32,
    pub n_max: u32,
    /// Shape parameters for the log-convexity and synchronicity scans.
    pub c_values: Vec<f64>,
    /// Points per grid (x grids and t grids alike).
    pub grid_points: usize,
    /// Right end of the x window for families on `[0, inf)`.
    pub x_max: f64,
    /// Right end of the x window for the Szász and Bessel bounds.
    pub bound_x_max: f64,
    /// Right end of the Legendre `t` window `[1, t_max]`.
    pub t_max: f64,
    pub hard_tol: f64,
    pub durrmeyer_n_max: u32,
    pub multivariate_n_max: u32,
    pub multivariate_step: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            n_min: 1,
            n_max: 30,
            c_values: vec![-1.0, 0.0, 1.0],
            grid_points: 129,
            x_max: 4.0,
            bound_x_max: 20.0,
            t_max: 10.0,
            hard_tol: 1e-9,
            durrmeyer_n_max: 40,
            multivariate_n_max: 15,
            multivariate_step: 0.0625,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(invalid(format!(
                "degree range must satisfy 1 <= n_min <= n_max, got [{}, {}]",
                self.n_min, self.n_max
            )));
        }
        if self.c_values.is_empty() {
            return Err(invalid("c_values must not be empty"));
        }
        for &c in &self.c_values {
            crate::basis::OperatorParams::new(1, c)?;
        }
        if self.grid_points < 3 {
            return Err(invalid(format!("grid_points must be at least 3, got {}", self.grid_points)));
        }
        if !(self.hard_tol > 0.0 && self.hard_tol.is_finite()) {
            return Err(invalid(format!("hard_tol must be positive, got {}", self.hard_tol)));
        }
        if !(self.x_max > crate::ode::BOUNDARY_EXCLUSION && self.x_max.is_finite()) {
            return Err(invalid(format!("x_max must exceed 1/128, got {}", self.x_max)));
        }
        if !(self.bound_x_max > 0.0 && self.bound_x_max.is_finite()) {
            return Err(invalid(format!("bound_x_max must be positive, got {}", self.bound_x_max)));
        }
        if !(self.t_max > 1.0 && self.t_max.is_finite()) {
            return Err(invalid(format!("t_max must exceed 1, got {}", self.t_max)));
        }
        if self.durrmeyer_n_max == 0 || self.multivariate_n_max == 0 {
            return Err(invalid("durrmeyer_n_max and multivariate_n_max must be at least 1"));
        }
        check_step(self.multivariate_step, 0.0625)
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<u32> {
        self.n_min..=self.n_max
    }
}

/// A check that could not be evaluated at some point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericalFailure {
    pub check_id: String,
    pub n: Option<u32>,
    pub c: Option<f64>,
    pub location: Option<Location>,
    pub message: String,
}

/// Classified results of a suite run. Every list is in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    /// Failures of unconditional checks.
    pub violations: Vec<ViolationReport>,
    /// Failures of conditional checks and conjectures.
    pub findings: Vec<ViolationReport>,
    /// Evaluations with `|margin| <= 10 hard_tol`, kept for manual review.
    pub grazing: Vec<ViolationReport>,
    pub numerical_failures: Vec<NumericalFailure>,
    /// Number of evaluations performed.
    pub evaluations: usize,
}

impl SuiteReport {
    pub fn has_unconditional_violations(&self) -> bool {
        !self.violations.is_empty()
    }

    fn merge(&mut self, other: SuiteReport) {
        self.violations.extend(other.violations);
        self.findings.extend(other.findings);
        self.grazing.extend(other.grazing);
        self.numerical_failures.extend(other.numerical_failures);
        self.evaluations += other.evaluations;
    }

    fn finish(mut self) -> Self {
        sort_reports(&mut self.violations);
        sort_reports(&mut self.findings);
        sort_reports(&mut self.grazing);
        self.numerical_failures.sort_by(|a, b| {
            a.check_id
                .cmp(&b.check_id)
                .then(a.n.cmp(&b.n))
                .then(a.c.partial_cmp(&b.c).unwrap_or(Ordering::Equal))
                .then(a.message.cmp(&b.message))
        });
        self
    }
}

/// One sampled margin before classification.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub report: ViolationReport,
    /// Sign of the exact margin, for checks run in rational arithmetic.
    pub exact_sign: Option<Ordering>,
}

impl Evaluation {
    pub fn new(report: ViolationReport) -> Self {
        Self { report, exact_sign: None }
    }

    pub fn exact(report: ViolationReport, sign: Ordering) -> Self {
        Self { report, exact_sign: Some(sign) }
    }
}

/// Output of one check over one parameter cell.
#[derive(Debug, Default)]
pub(crate) struct CellResult {
    pub evaluations: Vec<Evaluation>,
    pub failures: Vec<NumericalFailure>,
}

impl CellResult {
    pub fn push(&mut self, e: Evaluation) {
        self.evaluations.push(e);
    }

    pub fn fail(&mut self, check: CheckId, n: Option<u32>, c: Option<f64>, location: Option<Location>, err: impl ToString) {
        self.failures.push(NumericalFailure {
            check_id: check.name().to_string(),
            n,
            c,
            location,
            message: err.to_string(),
        });
    }

    pub fn extend(&mut self, other: CellResult) {
        self.evaluations.extend(other.evaluations);
        self.failures.extend(other.failures);
    }
}

/// `(rhs - lhs) / max(|lhs|, |rhs|)` for a claimed `lhs <= rhs`; zero when both sides vanish.
pub fn relative_margin(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (rhs - lhs) / scale
    }
}

fn classify(cell: CellResult, hard_tol: f64) -> SuiteReport {
    let mut out = SuiteReport {
        evaluations: cell.evaluations.len(),
        numerical_failures: cell.failures,
        ..SuiteReport::default()
    };
    for e in cell.evaluations {
        let (failed, grazing) = match e.exact_sign {
            Some(sign) => (sign == Ordering::Less, sign == Ordering::Equal),
            None => {
                let m = e.report.margin;
                (m < -hard_tol || m.is_nan(), m.abs() <= GRAZING_FACTOR * hard_tol)
            }
        };
        if grazing {
            out.grazing.push(e.report.clone());
        }
        if failed {
            if e.report.conditional {
                out.findings.push(e.report);
            } else {
                out.violations.push(e.report);
            }
        }
    }
    out
}

pub(crate) fn evaluate_cell(check: CheckId, config: &ScanConfig) -> CellResult {
    match check {
        CheckId::LogConvexity | CheckId::EnvelopeEquivalence => scans::logconvexity_cell(check, config),
        CheckId::DurrmeyerConvexity | CheckId::DurrmeyerSymmetry => scans::durrmeyer_cell(check, config),
        CheckId::AxialConvexity => scans::axial_cell(config),
        CheckId::SquareEquivalence => scans::equivalence_cell(config),
        CheckId::Synchronicity => scans::synchronicity_cell(config),
        _ => inequalities::evaluate(check, config),
    }
}

/// Every sampled margin of one check, unclassified. Useful for inspecting
/// equality points, where margins are expected to be zero.
pub fn evaluate_check(check: CheckId, config: &ScanConfig) -> Result<Vec<ViolationReport>> {
    config.validate()?;
    let cell = evaluate_cell(check, config);
    let mut reports: Vec<ViolationReport> = cell.evaluations.into_iter().map(|e| e.report).collect();
    sort_reports(&mut reports);
    Ok(reports)
}

/// Runs the selected checks and classifies every evaluation.
pub fn run_suite(selector: &SuiteSelector, config: &ScanConfig) -> Result<SuiteReport> {
    config.validate()?;
    let parts: Vec<SuiteReport> = selector
        .checks()
        .par_iter()
        .map(|&check| classify(evaluate_cell(check, config), config.hard_tol))
        .collect();
    let mut out = SuiteReport::default();
    for p in parts {
        out.merge(p);
    }
    Ok(out.finish())
}

/// Every registered inequality (bounds, comparisons, and the crossover pattern)
/// on its stated domain.
pub fn run_inequality_suite(config: &ScanConfig) -> Result<SuiteReport> {
    let selector = SuiteSelector::only(CheckId::all().filter(|c| inequalities::is_inequality(*c)));
    run_suite(&selector, config)
}
