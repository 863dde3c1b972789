//! Pointwise evaluation of the registered inequalities and comparisons.

use rayon::prelude::*;

use super::{relative_margin, CellResult, CheckId, Evaluation, ScanConfig};
use crate::basis::{s_series, OperatorParams, DEFAULT_SERIES_TOL};
use crate::error::Result;
use crate::legendre::{
    crossover_t, legendre_p, log_derivative, poly_upper_2_16, poly_upper_2_17, ratio_lower_bound,
    ratio_upper_2_11, ratio_upper_2_14, ratio_upper_2_15,
};
use crate::ode::{envelope, s_derivatives, s_derivatives_bernstein};
use crate::quadrature::{bessel_i0_scaled, QuadratureSpec};
use crate::report::{Location, ViolationReport};
use crate::special::uniform_grid;

pub(super) fn is_inequality(check: CheckId) -> bool {
    !matches!(
        check,
        CheckId::LogConvexity
            | CheckId::EnvelopeEquivalence
            | CheckId::DurrmeyerConvexity
            | CheckId::DurrmeyerSymmetry
            | CheckId::AxialConvexity
            | CheckId::SquareEquivalence
            | CheckId::Synchronicity
    )
}

/// How the sample points of a check are laid out.
#[derive(Clone, Copy)]
enum Axis {
    /// `x` on `[0, bound_x_max]`.
    SzaszX,
    /// `x` on `[0, 1/2]`.
    HalfUnit,
    /// `t` on `[1, t_max]`.
    T,
}

struct Plan {
    axis: Axis,
    drop_first: bool,
    drop_last: bool,
    per_degree: bool,
    min_degree: u32,
}

fn plan(check: CheckId) -> Plan {
    use CheckId::*;
    let (axis, drop_first, drop_last, per_degree, min_degree) = match check {
        SzaszEnergyBound | SzaszEnergySquaredBound | SzaszSquaredBoundSharper => (Axis::SzaszX, false, false, true, 1),
        SzaszLogDerivativeEnvelope => (Axis::SzaszX, true, false, true, 1),
        BesselBound | BesselSquaredBound | BesselSquaredBoundSharper => (Axis::SzaszX, false, false, false, 1),
        BernsteinLogDerivativeUpper => (Axis::HalfUnit, true, true, true, 1),
        BernsteinLogDerivativeLower => (Axis::HalfUnit, false, false, true, 1),
        LegendreRatioConditionalUpper | ConditionalUpperSharper | CrossoverSignPattern => (Axis::T, true, false, true, 1),
        LegendreRatioLower | LegendreRatioUpperA | LegendreRatioUpperB | LegendrePolyBoundA => (Axis::T, false, false, true, 1),
        LegendrePolyBoundB | LegendrePolyBoundOrdering => (Axis::T, false, false, true, 2),
        other => unreachable!("{other} is not a pointwise inequality"),
    };
    Plan { axis, drop_first, drop_last, per_degree, min_degree }
}

fn sample_points(p: &Plan, config: &ScanConfig) -> Vec<f64> {
    let (lo, hi) = match p.axis {
        Axis::SzaszX => (0.0, config.bound_x_max),
        Axis::HalfUnit => (0.0, 0.5),
        Axis::T => (1.0, config.t_max),
    };
    let mut pts = uniform_grid(lo, hi, config.grid_points);
    if p.drop_last {
        pts.pop();
    }
    if p.drop_first {
        pts.remove(0);
    }
    pts
}

/// Offsets around `t*` at which the crossover sign pattern is also sampled.
const CROSSOVER_BRACKETS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Points closer than this (relative) to `t*` carry no sign information.
const CROSSOVER_EXCLUSION: f64 = 1e-9;

pub(super) fn evaluate(check: CheckId, config: &ScanConfig) -> CellResult {
    let p = plan(check);
    let base = sample_points(&p, config);
    let degrees: Vec<Option<u32>> = if p.per_degree {
        config.degrees().filter(|&n| n >= p.min_degree).map(Some).collect()
    } else {
        vec![None]
    };
    let conditional = check.status().is_conditional();
    let quad = QuadratureSpec::default();
    let cells: Vec<CellResult> = degrees
        .par_iter()
        .map(|&n| {
            let mut cell = CellResult::default();
            let pts = match (check, n) {
                (CheckId::CrossoverSignPattern, Some(n)) => crossover_points(&base, n, config.t_max),
                _ => base.clone(),
            };
            for &at in &pts {
                let location = match p.axis {
                    Axis::T => Location::T { t: at },
                    _ => Location::X { x: at },
                };
                match margin_at(check, n, at, &quad) {
                    Ok(margin) => {
                        let mut r = ViolationReport::new(check.name(), location, margin, conditional);
                        if let Some(n) = n {
                            r = r.with_n(n);
                        }
                        if let Some(c) = family_shape(check) {
                            r = r.with_c(c);
                        }
                        cell.push(Evaluation::new(r));
                    }
                    Err(e) => cell.fail(check, n, family_shape(check), Some(location), e),
                }
            }
            cell
        })
        .collect();
    let mut out = CellResult::default();
    for c in cells {
        out.extend(c);
    }
    out
}

fn family_shape(check: CheckId) -> Option<f64> {
    match plan(check).axis {
        Axis::SzaszX if plan(check).per_degree => Some(0.0),
        Axis::HalfUnit => Some(-1.0),
        _ => None,
    }
}

fn crossover_points(base: &[f64], n: u32, t_max: f64) -> Vec<f64> {
    let ts = crossover_t(n);
    let mut pts: Vec<f64> = base.to_vec();
    for d in CROSSOVER_BRACKETS {
        pts.push(ts * (1.0 - d));
        pts.push(ts * (1.0 + d));
    }
    pts.retain(|&t| t > 1.0 && t <= t_max && (t - ts).abs() > CROSSOVER_EXCLUSION * ts);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `2 exp(sqrt(1+u^2) - 1 - u) / (sqrt(1+u^2) + 1)`, with the difference
/// `sqrt(1+u^2) - u` rationalized to avoid cancellation.
fn squared_bound(u: f64) -> f64 {
    let r = (1.0 + u * u).sqrt();
    2.0 * (1.0 / (r + u) - 1.0).exp() / (r + 1.0)
}

fn margin_at(check: CheckId, n: Option<u32>, at: f64, quad: &QuadratureSpec) -> Result<f64> {
    use CheckId::*;
    let deg = || n.expect("per-degree check");
    Ok(match check {
        SzaszEnergyBound => {
            let n = deg();
            let k = s_series(&OperatorParams::szasz(n)?, at, DEFAULT_SERIES_TOL)?;
            relative_margin(k, 1.0 / (4.0 * n as f64 * at + 1.0).sqrt())
        }
        SzaszEnergySquaredBound => {
            let n = deg();
            let k = s_series(&OperatorParams::szasz(n)?, at, DEFAULT_SERIES_TOL)?;
            relative_margin(k * k, squared_bound(4.0 * n as f64 * at))
        }
        SzaszSquaredBoundSharper => {
            let u = 4.0 * deg() as f64 * at;
            relative_margin(squared_bound(u), 1.0 / (u + 1.0))
        }
        SzaszLogDerivativeEnvelope => {
            let params = OperatorParams::szasz(deg())?;
            let a = s_derivatives(&params, at, quad)?.a;
            let env = envelope(&params, at)?;
            relative_margin(env.z1, a).min(relative_margin(a, env.z2))
        }
        // Bessel checks compare e^{-x} I0(x) against the bounds scaled by e^{-x}.
        BesselBound => relative_margin(bessel_i0_scaled(at)?, 1.0 / (2.0 * at + 1.0).sqrt()),
        BesselSquaredBound => {
            let i = bessel_i0_scaled(at)?;
            relative_margin(i * i, squared_bound(2.0 * at))
        }
        BesselSquaredBoundSharper => relative_margin(squared_bound(2.0 * at), 1.0 / (2.0 * at + 1.0)),
        BernsteinLogDerivativeUpper => {
            let n = deg();
            let a = s_derivatives_bernstein(n, at)?.a;
            let env = envelope(&OperatorParams::bernstein(n)?, at)?;
            relative_margin(a, env.z2)
        }
        BernsteinLogDerivativeLower => {
            let n = deg();
            let params = OperatorParams::bernstein(n)?;
            let (bx, bxp) = (params.big_x(at), params.big_x_prime(at));
            let lower = -2.0 * n as f64 * bxp / (1.0 + (n as f64 - 3.0) * bx);
            relative_margin(lower, s_derivatives_bernstein(n, at)?.a)
        }
        LegendreRatioConditionalUpper => relative_margin(log_derivative(deg(), at)?, ratio_upper_2_11(deg(), at)?),
        LegendreRatioLower => relative_margin(ratio_lower_bound(deg(), at)?, log_derivative(deg(), at)?),
        LegendreRatioUpperA => relative_margin(log_derivative(deg(), at)?, ratio_upper_2_14(deg(), at)?),
        LegendreRatioUpperB => relative_margin(log_derivative(deg(), at)?, ratio_upper_2_15(deg(), at)?),
        LegendrePolyBoundA => relative_margin(legendre_p(deg(), at)?, poly_upper_2_16(deg(), at)?),
        LegendrePolyBoundB => relative_margin(legendre_p(deg(), at)?, poly_upper_2_17(deg(), at)?),
        LegendrePolyBoundOrdering => relative_margin(poly_upper_2_16(deg(), at)?, poly_upper_2_17(deg(), at)?),
        ConditionalUpperSharper => relative_margin(ratio_upper_2_11(deg(), at)?, ratio_upper_2_14(deg(), at)?),
        CrossoverSignPattern => {
            let n = deg();
            let (b11, b15) = (ratio_upper_2_11(n, at)?, ratio_upper_2_15(n, at)?);
            if at <= crossover_t(n) {
                relative_margin(b11, b15)
            } else {
                relative_margin(b15, b11)
            }
        }
        other => unreachable!("{other} is not a pointwise inequality"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::bessel_i0;

    fn cfg() -> ScanConfig {
        ScanConfig { n_max: 8, grid_points: 33, ..ScanConfig::default() }
    }

    fn margins(check: CheckId, config: &ScanConfig) -> Vec<ViolationReport> {
        let cell = evaluate(check, config);
        assert!(cell.failures.is_empty(), "{check}: {:?}", cell.failures);
        cell.evaluations.into_iter().map(|e| e.report).collect()
    }

    #[test]
    fn squared_bound_matches_the_direct_formula() {
        for u in [0.0, 0.3, 2.0, 17.0] {
            let r = (1.0f64 + u * u).sqrt();
            let direct = 2.0 * (r - 1.0 - u).exp() / (r + 1.0);
            assert!((squared_bound(u) - direct).abs() <= 1e-14 * direct);
        }
        assert_eq!(squared_bound(0.0), 1.0);
    }

    #[test]
    fn bessel_bounds_against_unscaled_values() {
        for x in [0.5, 3.0, 9.0] {
            let i0 = bessel_i0(x).unwrap();
            let r = (1.0f64 + 4.0 * x * x).sqrt();
            assert!(i0 <= x.exp() / (2.0 * x + 1.0).sqrt());
            assert!(i0 * i0 <= 2.0 * (r - 1.0).exp() / (r + 1.0) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn equality_points_have_zero_margin() {
        let config = cfg();
        let at_start = |check: CheckId| -> Vec<f64> {
            margins(check, &config)
                .into_iter()
                .filter(|r| match r.location {
                    Location::X { x } => x == 0.0,
                    Location::T { t } => t == 1.0,
                    _ => false,
                })
                .map(|r| r.margin)
                .collect()
        };
        for check in [
            CheckId::SzaszEnergyBound,
            CheckId::BesselBound,
            CheckId::LegendreRatioLower,
            CheckId::BernsteinLogDerivativeLower,
            CheckId::LegendrePolyBoundA,
            CheckId::LegendrePolyBoundB,
            CheckId::SzaszSquaredBoundSharper,
            CheckId::BesselSquaredBoundSharper,
        ] {
            let ms = at_start(check);
            assert!(!ms.is_empty(), "{check}");
            for m in ms {
                assert!((-1e-9..=1e-12).contains(&m), "{check}: {m}");
            }
        }
    }

    #[test]
    fn unconditional_margins_are_nonnegative() {
        let config = cfg();
        for check in CheckId::all().filter(|c| is_inequality(*c) && !c.status().is_conditional()) {
            for r in margins(check, &config) {
                assert!(r.margin >= -1e-9, "{check}: {r:?}");
            }
        }
    }

    #[test]
    fn conditional_margins_are_nonnegative_on_small_grids() {
        let config = cfg();
        for check in CheckId::all().filter(|c| is_inequality(*c) && c.status().is_conditional()) {
            for r in margins(check, &config) {
                assert!(r.margin >= -1e-9, "{check}: {r:?}");
            }
        }
    }

    #[test]
    fn crossover_points_bracket_t_star() {
        let pts = crossover_points(&[1.5, 2.0], 1, 10.0);
        let ts = crossover_t(1);
        assert!(pts.iter().any(|&t| t < ts && t > ts * (1.0 - 2e-6)));
        assert!(pts.iter().any(|&t| t > ts && t < ts * (1.0 + 2e-6)));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn degree_restrictions() {
        let r = margins(CheckId::LegendrePolyBoundB, &cfg());
        assert!(r.iter().all(|r| r.n.unwrap() >= 2));
        let r = margins(CheckId::BesselBound, &cfg());
        assert!(r.iter().all(|r| r.n.is_none()));
        assert_eq!(r.len(), 33);
    }
}
