//! Conjecture scans: log-convexity with its envelope cross-check, Durrmeyer
//! coefficient convexity, the simplex checks, and synchronicity.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{classify, CellResult, CheckId, Evaluation, ScanConfig, SuiteReport};
use crate::basis::OperatorParams;
use crate::catalog::{durrmeyer_coeffs, profile, ConvolutionKernel, Grid, OperatorDescriptor};
use crate::error::{invalid, Result};
use crate::multivariate::{axial_convexity_scan, equivalence_check};
use crate::ode::{envelope, s_derivatives, s_derivatives_bernstein, SDerivatives, BOUNDARY_EXCLUSION};
use crate::quadrature::QuadratureSpec;
use crate::report::{Location, ViolationReport};
use crate::special::uniform_grid;

/// Points with `|X'|` below this are too close to the envelope singularity to
/// compare verdicts (e.g. `x = 1/2` for `c = -1`).
pub const ENVELOPE_SINGULAR_TOL: f64 = 1e-9;

/// Relative size below which a grid increment counts as zero.
pub const SYNCHRONICITY_ZERO_TOL: f64 = 1e-12;

fn merge(cells: Vec<CellResult>) -> CellResult {
    let mut out = CellResult::default();
    for c in cells {
        out.extend(c);
    }
    out
}

fn logconvexity_window(params: &OperatorParams, config: &ScanConfig) -> Vec<f64> {
    let hi = if params.is_bernstein() {
        1.0 - BOUNDARY_EXCLUSION
    } else {
        config.x_max
    };
    uniform_grid(BOUNDARY_EXCLUSION, hi, config.grid_points)
}

fn derivatives(params: &OperatorParams, x: f64, quad: &QuadratureSpec) -> Result<SDerivatives> {
    if params.is_bernstein() {
        s_derivatives_bernstein(params.n(), x)
    } else {
        s_derivatives(params, x, quad)
    }
}

/// Evaluations for `conj-C` and/or the envelope consistency check, one per
/// `(n, c, x)` of the log-convexity grid.
pub(super) fn logconvexity_cell(check: CheckId, config: &ScanConfig) -> CellResult {
    logconvexity_cells(config, check == CheckId::LogConvexity, check == CheckId::EnvelopeEquivalence)
}

fn logconvexity_cells(config: &ScanConfig, margins: bool, consistency: bool) -> CellResult {
    let quad = QuadratureSpec::default();
    let cells: Vec<(u32, f64)> = config
        .degrees()
        .flat_map(|n| config.c_values.iter().map(move |&c| (n, c)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(n, c)| {
            let mut cell = CellResult::default();
            let params = match OperatorParams::new(n, c) {
                Ok(p) => p,
                Err(e) => {
                    cell.fail(CheckId::LogConvexity, Some(n), Some(c), None, e);
                    return cell;
                }
            };
            for x in logconvexity_window(&params, config) {
                let location = Location::X { x };
                let d = match derivatives(&params, x, &quad) {
                    Ok(d) => d,
                    Err(e) => {
                        cell.fail(CheckId::LogConvexity, Some(n), Some(c), Some(location), e);
                        continue;
                    }
                };
                let m = d.logconv_margin / d.margin_scale();
                if margins {
                    let r = ViolationReport::new(CheckId::LogConvexity.name(), location, m, true)
                        .with_n(n)
                        .with_c(c);
                    cell.push(Evaluation::new(r));
                }
                if consistency && params.big_x_prime(x).abs() > ENVELOPE_SINGULAR_TOL {
                    match envelope(&params, x) {
                        Ok(env) => {
                            let p = env.membership_product(d.a) / env.membership_scale(d.a);
                            // agreement of the two verdicts, signed by whether they agree
                            let strength = m.abs().min(p.abs());
                            let agree = (m >= 0.0) == (p >= 0.0);
                            let margin = if agree { strength } else { -strength };
                            let r = ViolationReport::new(CheckId::EnvelopeEquivalence.name(), location, margin, false)
                                .with_n(n)
                                .with_c(c);
                            cell.push(Evaluation::new(r));
                        }
                        Err(e) => cell.fail(CheckId::EnvelopeEquivalence, Some(n), Some(c), Some(location), e),
                    }
                }
            }
            cell
        })
        .collect();
    merge(results)
}

/// Scans `(log S_{n,c})''` over `n` in the configured range, every `c` in
/// `c_values`, and a grid that stays `1/128` away from the degenerate points.
///
/// Negative margins are findings. Disagreement between the sign of the margin
/// and envelope membership of `S'/S` is a violation: the two verdicts are
/// algebraically equivalent, so a disagreement signals a numerical defect.
pub fn scan_logconvexity(config: &ScanConfig) -> Result<SuiteReport> {
    config.validate()?;
    Ok(classify(logconvexity_cells(config, true, true), config.hard_tol).finish())
}

pub(super) fn durrmeyer_cell(check: CheckId, config: &ScanConfig) -> CellResult {
    durrmeyer_cells(config.durrmeyer_n_max, check == CheckId::DurrmeyerConvexity, check == CheckId::DurrmeyerSymmetry)
}

fn durrmeyer_cells(n_max: u32, convexity: bool, symmetry: bool) -> CellResult {
    let results = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut cell = CellResult::default();
            let seq = match durrmeyer_coeffs(n) {
                Ok(s) => s,
                Err(e) => {
                    cell.fail(CheckId::DurrmeyerConvexity, Some(n), None, None, e);
                    return cell;
                }
            };
            let family = format!("durrmeyer(n={n})");
            if symmetry {
                let len = seq.coeffs.len();
                let first_bad = (0..len).find(|&k| seq.coeffs[k] != seq.coeffs[len - 1 - k]);
                let (k, margin, sign) = match first_bad {
                    None => (0, 1.0, Ordering::Greater),
                    Some(k) => (k, -1.0, Ordering::Less),
                };
                let r = ViolationReport::new(CheckId::DurrmeyerSymmetry.name(), Location::Index { k }, margin, false)
                    .with_n(n)
                    .with_family(family.clone());
                cell.push(Evaluation::exact(r, sign));
            }
            if convexity {
                for (k, d) in seq.second_differences() {
                    let sign = if d.is_zero() {
                        Ordering::Equal
                    } else if d.is_negative() {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    };
                    let approx = num_traits::ToPrimitive::to_f64(&d).unwrap_or(f64::NAN);
                    let r = ViolationReport::new(CheckId::DurrmeyerConvexity.name(), Location::Index { k }, approx, true)
                        .with_n(n)
                        .with_family(family.clone())
                        .with_exact_margin(d.to_string());
                    cell.push(Evaluation::exact(r, sign));
                }
            }
            cell
        })
        .collect();
    merge(results)
}

/// Exact second differences of the Durrmeyer coefficients for every `n <= n_max`,
/// with the symmetry pre-check. Negative differences are findings carrying the
/// exact rational margin; an asymmetric sequence is a violation.
pub fn scan_durrmeyer_convexity(n_max: u32) -> Result<SuiteReport> {
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    Ok(classify(durrmeyer_cells(n_max, true, true), 0.0).finish())
}

pub(super) fn axial_cell(config: &ScanConfig) -> CellResult {
    let results = (1..=config.multivariate_n_max)
        .into_par_iter()
        .map(|n| {
            let mut cell = CellResult::default();
            match axial_convexity_scan(n, config.multivariate_step) {
                Ok(reports) => reports.into_iter().for_each(|r| cell.push(Evaluation::new(r))),
                Err(e) => cell.fail(CheckId::AxialConvexity, Some(n), None, None, e),
            }
            cell
        })
        .collect();
    merge(results)
}

pub(super) fn equivalence_cell(config: &ScanConfig) -> CellResult {
    let results = (1..=config.multivariate_n_max)
        .into_par_iter()
        .map(|n| {
            let mut cell = CellResult::default();
            match equivalence_check(n, config.multivariate_step) {
                Ok(rep) => {
                    for p in rep.disagreements {
                        let r = ViolationReport::new(
                            CheckId::SquareEquivalence.name(),
                            Location::Point { x: p.x, y: p.y },
                            -1.0,
                            true,
                        )
                        .with_n(n);
                        cell.push(Evaluation::new(r));
                    }
                }
                Err(e) => cell.fail(CheckId::SquareEquivalence, Some(n), None, None, e),
            }
            cell
        })
        .collect();
    merge(results)
}

/// One family and grid for the synchronicity check.
#[derive(Debug, Clone)]
pub struct SynchronicityTarget {
    pub descriptor: OperatorDescriptor,
    pub grid: Grid,
    /// Set for families whose claim rests on an open conjecture.
    pub conditional: bool,
}

/// Baskakov-type families for every configured `(n, c)`, plus Kantorovich,
/// Post-Widder and Durrmeyer for every `n`, and two convolution kernels.
/// The Durrmeyer targets are conditional.
pub fn default_synchronicity_targets(config: &ScanConfig) -> Result<Vec<SynchronicityTarget>> {
    let pts = config.grid_points;
    let unit = Grid::new(0.0, 1.0, pts)?;
    let half_line = Grid::new(0.0, config.x_max, pts)?;
    let target = |descriptor, grid, conditional| SynchronicityTarget { descriptor, grid, conditional };
    let mut out = Vec::new();
    for n in config.degrees() {
        for &c in &config.c_values {
            let p = OperatorParams::new(n, c)?;
            let grid = if p.is_bernstein() { unit } else { half_line };
            out.push(target(OperatorDescriptor::Baskakov(p), grid, false));
        }
        out.push(target(OperatorDescriptor::Kantorovich { n }, unit, false));
        out.push(target(
            OperatorDescriptor::PostWidder { n },
            Grid::new(0.25, config.x_max.max(0.5), pts)?,
            false,
        ));
        out.push(target(OperatorDescriptor::Durrmeyer { n }, unit, true));
    }
    let line = Grid::new(-2.0, 2.0, pts)?;
    out.push(target(OperatorDescriptor::GaussWeierstrass { r: 0.25 }, line, false));
    out.push(target(OperatorDescriptor::Convolution(ConvolutionKernel::uniform(1.0)?), line, false));
    Ok(out)
}

/// Sign of an increment, or zero when it is within `SYNCHRONICITY_ZERO_TOL` of the scale.
fn increment_sign(a: f64, b: f64) -> f64 {
    let d = b - a;
    if d.abs() <= SYNCHRONICITY_ZERO_TOL * a.abs().max(b.abs()) {
        0.0
    } else {
        d.signum()
    }
}

fn synchronicity_target(t: &SynchronicityTarget) -> CellResult {
    let mut cell = CellResult::default();
    let family = t.descriptor.label();
    let n = match &t.descriptor {
        OperatorDescriptor::Baskakov(p) => Some(p.n()),
        OperatorDescriptor::Kantorovich { n }
        | OperatorDescriptor::PostWidder { n }
        | OperatorDescriptor::Durrmeyer { n }
        | OperatorDescriptor::GenuineBernsteinDurrmeyer { n } => Some(*n),
        _ => None,
    };
    let rows = match profile(&t.descriptor, &t.grid) {
        Ok(p) => p.rows,
        Err(e) => {
            cell.fail(CheckId::Synchronicity, n, None, None, format!("{family}: {e}"));
            return cell;
        }
    };
    for w in rows.windows(2) {
        let (p0, p1) = (&w[0].point, &w[1].point);
        let dv = increment_sign(p0.v, p1.v);
        // 1 - S and -log S both move opposite to S
        let dt = increment_sign(p1.s, p0.s);
        let dr = increment_sign(p0.renyi, p1.renyi);
        let location = Location::Interval { x0: p0.x, x1: p1.x };
        for (a, b) in [(dv, dt), (dt, dr)] {
            if a == 0.0 || b == 0.0 {
                continue;
            }
            let mut r = ViolationReport::new(CheckId::Synchronicity.name(), location, a * b, t.conditional)
                .with_family(family.clone());
            if let Some(n) = n {
                r = r.with_n(n);
            }
            cell.push(Evaluation::new(r));
        }
    }
    cell
}

pub(super) fn synchronicity_cell(config: &ScanConfig) -> CellResult {
    match default_synchronicity_targets(config) {
        Ok(targets) => merge(targets.par_iter().map(synchronicity_target).collect()),
        Err(e) => {
            let mut cell = CellResult::default();
            cell.fail(CheckId::Synchronicity, None, None, None, e);
            cell
        }
    }
}

/// Adjacent-pair sign agreement of `dV` with `d(1-S)`, and of `d(1-S)` with
/// `d(-log S)`. Increments that vanish relative to their values are skipped, so
/// constant families pass vacuously.
pub fn scan_synchronicity(targets: &[SynchronicityTarget]) -> Result<SuiteReport> {
    for t in targets {
        t.descriptor.validate()?;
        if let Some(bad) = t.grid.points().into_iter().find(|&x| !t.descriptor.contains(x)) {
            return Err(invalid(format!("grid point {bad} lies outside the domain of {}", t.descriptor.label())));
        }
    }
    let cell = merge(targets.par_iter().map(synchronicity_target).collect());
    Ok(classify(cell, ScanConfig::default().hard_tol).finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_max: u32) -> ScanConfig {
        ScanConfig { n_max, grid_points: 33, ..ScanConfig::default() }
    }

    #[test]
    fn logconvexity_small_scan_is_consistent() {
        let r = scan_logconvexity(&cfg(6)).unwrap();
        assert!(r.violations.is_empty(), "{:#?}", r.violations);
        assert!(r.findings.is_empty(), "{:#?}", r.findings);
        assert!(r.numerical_failures.is_empty());
        // 6 degrees x 3 shapes x 33 points, minus the skipped envelope point at x = 1/2
        assert_eq!(r.evaluations, 2 * 6 * 3 * 33 - 6);
    }

    #[test]
    fn bernstein_envelope_skips_the_midpoint() {
        let cell = logconvexity_cells(&ScanConfig { c_values: vec![-1.0], ..cfg(2) }, false, true);
        assert!(cell
            .evaluations
            .iter()
            .all(|e| e.report.location != Location::X { x: 0.5 }));
        let cell = logconvexity_cells(&ScanConfig { c_values: vec![-1.0], ..cfg(2) }, true, false);
        assert!(cell
            .evaluations
            .iter()
            .any(|e| e.report.location == Location::X { x: 0.5 }));
    }

    #[test]
    fn durrmeyer_scan() {
        let r = scan_durrmeyer_convexity(12).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.findings.is_empty());
        // one symmetry evaluation per n and 2n - 1 second differences
        assert_eq!(r.evaluations, (1..=12).map(|n| 2 * n).sum::<usize>());
        assert!(scan_durrmeyer_convexity(0).is_err());
        let cell = durrmeyer_cells(1, true, false);
        assert_eq!(cell.evaluations.len(), 1);
        assert_eq!(cell.evaluations[0].report.exact_margin.as_deref(), Some("4/3"));
    }

    #[test]
    fn synchronicity_examples() {
        let targets = vec![
            SynchronicityTarget {
                descriptor: OperatorDescriptor::GaussWeierstrass { r: 0.7 },
                grid: Grid::new(-1.0, 1.0, 9).unwrap(),
                conditional: false,
            },
            SynchronicityTarget {
                descriptor: OperatorDescriptor::PostWidder { n: 1 },
                grid: Grid::new(1.0, 2.0, 9).unwrap(),
                conditional: false,
            },
            SynchronicityTarget {
                descriptor: OperatorDescriptor::Baskakov(OperatorParams::bernstein(7).unwrap()),
                grid: Grid::new(0.0, 1.0, 33).unwrap(),
                conditional: false,
            },
        ];
        let r = scan_synchronicity(&targets).unwrap();
        assert!(r.violations.is_empty() && r.findings.is_empty());
        // constants contribute nothing; the other two contribute two pairs per interval
        assert_eq!(r.evaluations, 2 * 8 + 2 * 32);
    }

    #[test]
    fn increment_signs_ignore_rounding_level_changes() {
        assert_eq!(increment_sign(1.0, 2.0), 1.0);
        assert_eq!(increment_sign(2.0, 1.0), -1.0);
        assert_eq!(increment_sign(1.0, 1.0 + 1e-15), 0.0);
    }

    #[test]
    fn synchronicity_rejects_grids_outside_the_domain() {
        let t = SynchronicityTarget {
            descriptor: OperatorDescriptor::Kantorovich { n: 2 },
            grid: Grid::new(0.0, 2.0, 5).unwrap(),
            conditional: false,
        };
        assert!(scan_synchronicity(&[t]).is_err());
    }

    #[test]
    fn default_targets_pass() {
        let config = cfg(5);
        let cell = synchronicity_cell(&config);
        assert!(cell.failures.is_empty(), "{:?}", cell.failures);
        let r = classify(cell, config.hard_tol);
        assert!(r.violations.is_empty(), "{:#?}", r.violations);
        assert!(r.findings.is_empty(), "{:#?}", r.findings);
    }
}
