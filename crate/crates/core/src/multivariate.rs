//! Squared Bernstein sums on the triangle and the square.
//!
//! On the simplex `x, y >= 0, x + y <= 1`:
//! `R_n(x,y) = sum_{i+j<=n} (n!/(i! j! (n-i-j)!))^2 x^(2i) y^(2j) (1-x-y)^(2(n-i-j))`,
//! which for fixed `y < 1` reduces to
//! `sum_j C(n,j)^2 y^(2j) (1-y)^(2(n-j)) F_{n-j}(x/(1-y))`.
//! On the square `Q_n(x,y) = F_n(x) F_n(y)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{s_series, OperatorParams, DEFAULT_SERIES_TOL};
use crate::error::{domain, invalid, Result};
use crate::report::{sort_reports, Location, ViolationReport};
use crate::special::binomial;

pub const AXIAL_CHECK_ID: &str = "axial-convexity";
pub const EQUIVALENCE_CHECK_ID: &str = "equivalence-3";
pub const FULL_CONVEXITY_ID: &str = "simplex-full-convexity";

/// Second differences below this are reported as axial-convexity violations.
pub const SECOND_DIFFERENCE_TOL: f64 = 1e-9;
/// Finite-difference step of the numerical Hessian.
pub const HESSIAN_STEP: f64 = 1e-4;
/// Relative tolerance of the 2x2 PSD test.
pub const HESSIAN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    x: f64,
    y: f64,
}

impl SimplexPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x >= 0.0 && y >= 0.0 && x + y <= 1.0 + 1e-12) || !x.is_finite() || !y.is_finite() {
            return Err(domain(format!("({x}, {y}) is outside the canonical triangle")));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// `1 - x - y`, clamped at zero.
    pub fn slack(&self) -> f64 {
        (1.0 - self.x - self.y).max(0.0)
    }
}

fn check_degree(n: u32) -> Result<()> {
    if n == 0 {
        Err(invalid("degree n must be at least 1"))
    } else {
        Ok(())
    }
}

/// `R_n` by direct summation of the squared trinomial weights.
pub fn r_n(n: u32, p: SimplexPoint) -> Result<f64> {
    check_degree(n)?;
    Ok(r_n_unchecked(n as u64, p.x, p.y, p.slack()))
}

fn r_n_unchecked(n: u64, x: f64, y: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    for j in 0..=n {
        let cj = binomial(n, j);
        for i in 0..=n - j {
            let w = cj
                * binomial(n - j, i)
                * x.powi(i as i32)
                * y.powi(j as i32)
                * z.powi((n - i - j) as i32);
            sum += w * w;
        }
    }
    sum
}

fn f_univariate(n: u64, x: f64) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    s_series(&OperatorParams::bernstein(n as u32)?, x, DEFAULT_SERIES_TOL)
}

/// `R_n` through its reduction to univariate `F_{n-j}`.
pub fn r_n_reduction(n: u32, p: SimplexPoint) -> Result<f64> {
    check_degree(n)?;
    if p.y >= 1.0 {
        return Err(domain("reduction needs y < 1"));
    }
    let n = n as u64;
    let u = (p.x / (1.0 - p.y)).clamp(0.0, 1.0);
    let mut sum = 0.0;
    for j in 0..=n {
        let w = binomial(n, j) * p.y.powi(j as i32) * (1.0 - p.y).powi((n - j) as i32);
        sum += w * w * f_univariate(n - j, u)?;
    }
    Ok(sum)
}

/// Number of grid intervals per unit length for a requested step.
fn subdivisions(step: f64) -> usize {
    let m = (1.0 / step).round();
    if (m * step - 1.0).abs() < 1e-9 {
        m as usize
    } else {
        (1.0 / step).ceil() as usize
    }
}

pub(crate) fn check_step(step: f64, max: f64) -> Result<()> {
    if step > 0.0 && step <= max {
        Ok(())
    } else {
        Err(invalid(format!("grid step must lie in (0, {max}], got {step}")))
    }
}

/// Second differences of `R_n` along every grid segment parallel to a side of the
/// triangle; returns those below `-1e-9`.
pub fn axial_convexity_scan(n: u32, step: f64) -> Result<Vec<ViolationReport>> {
    check_degree(n)?;
    check_step(step, 0.125)?;
    let m = subdivisions(step);
    let h = 1.0 / m as f64;
    let n64 = n as u64;
    // table[j][i] = R_n(i h, j h) for i + j <= m
    let table: Vec<Vec<f64>> = (0..=m)
        .into_par_iter()
        .map(|j| {
            (0..=m - j)
                .map(|i| {
                    let (x, y) = (i as f64 * h, j as f64 * h);
                    r_n_unchecked(n64, x, y, (1.0 - x - y).max(0.0))
                })
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut check = |vals: &[f64], at: &dyn Fn(usize) -> (usize, usize)| {
        for (k, d2) in concave_positions(vals) {
            let (i, j) = at(k);
            out.push(
                ViolationReport::new(
                    AXIAL_CHECK_ID,
                    Location::Point { x: i as f64 * h, y: j as f64 * h },
                    d2,
                    false,
                )
                .with_n(n),
            );
        }
    };
    // parallel to Ox
    for (j, row) in table.iter().enumerate() {
        check(row, &|k| (k, j));
    }
    // parallel to Oy
    for i in 0..=m {
        let col: Vec<f64> = table[..=m - i].iter().map(|row| row[i]).collect();
        check(&col, &|k| (i, k));
    }
    // parallel to the hypotenuse: i + j = s
    for s in 0..=m {
        let diag: Vec<f64> = (0..=s).map(|i| table[s - i][i]).collect();
        check(&diag, &|k| (k, s - k));
    }
    sort_reports(&mut out);
    Ok(out)
}

/// Interior indices of a segment whose second difference is below `-1e-9`.
/// Segments with fewer than three points have none.
fn concave_positions(vals: &[f64]) -> Vec<(usize, f64)> {
    (1..vals.len().saturating_sub(1))
        .map(|k| (k, vals[k - 1] - 2.0 * vals[k] + vals[k + 1]))
        .filter(|&(_, d2)| d2 < -SECOND_DIFFERENCE_TOL)
        .collect()
}

/// Points of the interior simplex grid where the finite-difference Hessian of `R_n`
/// is not positive semidefinite. Informational only.
pub fn full_convexity_findings(n: u32, step: f64) -> Result<Vec<ViolationReport>> {
    check_degree(n)?;
    check_step(step, 0.125)?;
    let m = subdivisions(step);
    let g = 1.0 / m as f64;
    let hs = HESSIAN_STEP;
    let n64 = n as u64;
    let r = |x: f64, y: f64| r_n_unchecked(n64, x, y, (1.0 - x - y).max(0.0));
    let mut out: Vec<ViolationReport> = (1..m)
        .into_par_iter()
        .flat_map_iter(|j| {
            (1..m - j).filter_map(move |i| {
                let (x, y) = (i as f64 * g, j as f64 * g);
                let psd = hessian_margin(&r, x, y, hs);
                (psd < 0.0).then(|| {
                    ViolationReport::new(FULL_CONVEXITY_ID, Location::Point { x, y }, psd, true).with_n(n)
                })
            })
        })
        .collect();
    sort_reports(&mut out);
    Ok(out)
}

/// Smallest normalised PSD margin of the central-difference Hessian of `f` at `(x, y)`;
/// negative when one of the 2x2 criteria fails beyond [`HESSIAN_TOL`].
fn hessian_margin(f: &dyn Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    let f0 = f(x, y);
    let hxx = (f(x + h, y) - 2.0 * f0 + f(x - h, y)) / (h * h);
    let hyy = (f(x, y + h) - 2.0 * f0 + f(x, y - h)) / (h * h);
    let hxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
    let scale = (hxx.abs() + hyy.abs() + hxy.abs()).max(1.0);
    let det = hxx * hyy - hxy * hxy;
    let margins = [
        hxx / scale + HESSIAN_TOL,
        hyy / scale + HESSIAN_TOL,
        det / (scale * scale) + HESSIAN_TOL,
    ];
    margins.into_iter().fold(f64::INFINITY, f64::min)
}

fn check_unit_square(x: f64, y: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
        Ok(())
    } else {
        Err(domain(format!("({x}, {y}) outside the unit square")))
    }
}

/// `Q_n(x,y) = F_n(x) F_n(y)`.
pub fn q_n(n: u32, x: f64, y: f64) -> Result<f64> {
    check_degree(n)?;
    check_unit_square(x, y)?;
    Ok(f_univariate(n as u64, x)? * f_univariate(n as u64, y)?)
}

/// `Q_n` as the expanded double sum over `(i, j)`.
pub fn q_n_expanded(n: u32, x: f64, y: f64) -> Result<f64> {
    check_degree(n)?;
    check_unit_square(x, y)?;
    let n = n as u64;
    let mut sum = 0.0;
    for i in 0..=n {
        let wi = binomial(n, i) * x.powi(i as i32) * (1.0 - x).powi((n - i) as i32);
        for j in 0..=n {
            let wj = binomial(n, j) * y.powi(j as i32) * (1.0 - y).powi((n - j) as i32);
            sum += (wi * wj).powi(2);
        }
    }
    Ok(sum)
}

/// Per-point outcome of the three convexity scanners on the square grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalencePoint {
    pub x: f64,
    pub y: f64,
    pub log_f_convex: bool,
    pub q_convex: bool,
    pub log_q_convex: bool,
}

impl EquivalencePoint {
    pub fn agrees(&self) -> bool {
        self.log_f_convex == self.q_convex && self.q_convex == self.log_q_convex
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub n: u32,
    pub step: f64,
    /// (i): `log F_n` convex at every interior grid point.
    pub log_f_convex: bool,
    /// (ii): numerical Hessian of `Q_n` PSD at every interior grid point.
    pub q_convex: bool,
    /// (iii): `log Q_n` has nonnegative second differences along the grid directions.
    pub log_q_convex: bool,
    pub interior_points: usize,
    pub disagreements: Vec<EquivalencePoint>,
}

impl EquivalenceReport {
    pub fn consistent(&self) -> bool {
        self.disagreements.is_empty()
            && self.log_f_convex == self.q_convex
            && self.q_convex == self.log_q_convex
    }
}

/// Evaluates the three equivalent convexity statements for `F_n` / `Q_n` on one grid.
pub fn equivalence_check(n: u32, step: f64) -> Result<EquivalenceReport> {
    check_degree(n)?;
    check_step(step, 0.0625)?;
    let m = subdivisions(step);
    let h = 1.0 / m as f64;
    let xs: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
    let f: Vec<f64> = xs
        .iter()
        .map(|&x| f_univariate(n as u64, x))
        .collect::<Result<_>>()?;
    let log_f: Vec<f64> = f.iter().map(|v| v.ln()).collect();
    let d2_log_f = |i: usize| log_f[i - 1] - 2.0 * log_f[i] + log_f[i + 1];
    let params = OperatorParams::bernstein(n)?;
    let q = |x: f64, y: f64| {
        let fx = s_series(&params, x.clamp(0.0, 1.0), DEFAULT_SERIES_TOL).unwrap_or(f64::NAN);
        let fy = s_series(&params, y.clamp(0.0, 1.0), DEFAULT_SERIES_TOL).unwrap_or(f64::NAN);
        fx * fy
    };
    let log_q = |i: usize, j: usize| log_f[i] + log_f[j];

    let points: Vec<EquivalencePoint> = (1..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let (q, xs, d2_log_f, log_q) = (&q, &xs, &d2_log_f, &log_q);
            (1..m).map(move |j| {
                let log_f_convex =
                    d2_log_f(i) >= -SECOND_DIFFERENCE_TOL && d2_log_f(j) >= -SECOND_DIFFERENCE_TOL;
                let q_convex = hessian_margin(q, xs[i], xs[j], HESSIAN_STEP) >= 0.0;
                let dirs = [
                    log_q(i - 1, j) - 2.0 * log_q(i, j) + log_q(i + 1, j),
                    log_q(i, j - 1) - 2.0 * log_q(i, j) + log_q(i, j + 1),
                    log_q(i - 1, j - 1) - 2.0 * log_q(i, j) + log_q(i + 1, j + 1),
                    log_q(i - 1, j + 1) - 2.0 * log_q(i, j) + log_q(i + 1, j - 1),
                ];
                let log_q_convex = dirs.iter().all(|&d| d >= -SECOND_DIFFERENCE_TOL);
                EquivalencePoint {
                    x: xs[i],
                    y: xs[j],
                    log_f_convex,
                    q_convex,
                    log_q_convex,
                }
            })
        })
        .collect();

    Ok(EquivalenceReport {
        n,
        step: h,
        log_f_convex: points.iter().all(|p| p.log_f_convex),
        q_convex: points.iter().all(|p| p.q_convex),
        log_q_convex: points.iter().all(|p| p.log_q_convex),
        interior_points: points.len(),
        disagreements: points.into_iter().filter(|p| !p.agrees()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::uniform_grid;

    fn pt(x: f64, y: f64) -> SimplexPoint {
        SimplexPoint::new(x, y).unwrap()
    }

    #[test]
    fn simplex_domain() {
        assert!(SimplexPoint::new(0.6, 0.6).is_err());
        assert!(SimplexPoint::new(-0.1, 0.2).is_err());
        assert_eq!(pt(0.25, 0.25).slack(), 0.5);
    }

    #[test]
    fn r_n_examples() {
        let third = 1.0 / 3.0;
        assert!((r_n(1, pt(third, third)).unwrap() - third).abs() < 1e-15);
        assert_eq!(r_n(4, pt(0.0, 0.0)).unwrap(), 1.0);
        // brute force over the six trinomial terms at (1/2, 1/2): only (1,1,0), (2,0,0), (0,2,0)
        // survive: (2 * 1/4)^2 + (1/4)^2 + (1/4)^2 = 6/16
        assert!((r_n(2, pt(0.5, 0.5)).unwrap() - 6.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn reduction_examples() {
        let third = 1.0 / 3.0;
        assert!((r_n_reduction(1, pt(third, third)).unwrap() - third).abs() < 1e-15);
        let f = s_series(&OperatorParams::bernstein(5).unwrap(), 0.3, 1e-16).unwrap();
        assert!((r_n_reduction(5, pt(0.3, 0.0)).unwrap() - f).abs() < 1e-15);
        let a = r_n(3, pt(0.2, 0.5)).unwrap();
        let b = r_n_reduction(3, pt(0.2, 0.5)).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
        assert!(r_n_reduction(3, pt(0.0, 1.0)).is_err());
    }

    #[test]
    fn barycentric_symmetry() {
        for n in [1u32, 4, 9] {
            for (x, y) in [(0.1, 0.2), (0.3, 0.6), (0.05, 0.05)] {
                let z = 1.0 - x - y;
                let base = r_n(n, pt(x, y)).unwrap();
                for (a, b) in [(y, x), (z, y), (x, z), (y, z), (z, x)] {
                    assert!((r_n(n, pt(a, b)).unwrap() - base).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn axial_scan_examples() {
        assert!(axial_convexity_scan(1, 1.0 / 16.0).unwrap().is_empty());
        assert!(axial_convexity_scan(2, 1.0 / 16.0).unwrap().is_empty());
        assert!(axial_convexity_scan(2, 0.5).is_err());
        assert!(axial_convexity_scan(2, 0.0).is_err());
    }

    #[test]
    fn segment_second_differences() {
        assert_eq!(concave_positions(&[0.0, 1.0, 0.0]), vec![(1, -2.0)]);
        assert!(concave_positions(&[1.0, 0.0, 1.0, 4.0]).is_empty());
        assert!(concave_positions(&[0.0, 5.0]).is_empty());
        assert!(concave_positions(&[3.0]).is_empty());
        // grazing second differences are tolerated
        assert!(concave_positions(&[0.0, 0.5e-9, 0.0]).is_empty());
        assert!(axial_convexity_scan(3, 0.125).unwrap().is_empty());
    }

    #[test]
    fn q_n_examples() {
        assert!((q_n(1, 0.5, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(q_n(6, 0.0, 0.0).unwrap(), 1.0);
        assert!((q_n(2, 0.25, 0.5).unwrap() - 59.0 / 128.0 * 3.0 / 8.0).abs() < 1e-15);
        for n in 1..=10u32 {
            for x in uniform_grid(0.0, 1.0, 9) {
                for y in uniform_grid(0.0, 1.0, 9) {
                    let a = q_n(n, x, y).unwrap();
                    let b = q_n_expanded(n, x, y).unwrap();
                    assert!((a - b).abs() <= 1e-12 * a);
                }
            }
        }
        assert!(q_n(1, 1.5, 0.0).is_err());
    }

    #[test]
    fn hessian_margin_detects_saddles() {
        assert!(hessian_margin(&|x, y| x * x + y * y, 0.3, 0.3, HESSIAN_STEP) >= 0.0);
        assert!(hessian_margin(&|x, y| x * x - y * y, 0.3, 0.3, HESSIAN_STEP) < 0.0);
        assert!(hessian_margin(&|x, y| x * y, 0.3, 0.3, HESSIAN_STEP) < 0.0);
    }

    #[test]
    fn equivalence_examples() {
        let rep = equivalence_check(1, 1.0 / 16.0).unwrap();
        assert!(rep.log_f_convex && rep.q_convex && rep.log_q_convex);
        assert!(rep.consistent());
        assert_eq!(rep.interior_points, 15 * 15);
        let rep = equivalence_check(6, 1.0 / 16.0).unwrap();
        assert!(rep.consistent());
        assert!(equivalence_check(2, 0.125).is_err());
    }
}
