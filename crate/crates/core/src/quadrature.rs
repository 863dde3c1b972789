//! Composite Gauss-Legendre quadrature, the trigonometric integral form of the
//! kernel energy, and the modified Bessel function `I_0`.
//!
//! For `c != 0` the kernel energy is
//! `S(x) = (1/pi) int_0^pi (1 + c g(phi) X)^(-n/c) dphi` and for `c = 0`
//! `S(x) = (1/pi) int_0^pi exp(-n g(phi) x) dphi`, where `g(phi) = 4 sin^2(phi/2)`
//! and `X = x(1 + cx)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::basis::{s_series, OperatorParams, DEFAULT_SERIES_TOL};
use crate::error::{invalid, Error, Result};
use crate::special::ln_factorial;
use serde::{Deserialize, Serialize};

/// Nodes per Gauss-Legendre panel.
pub const GL_ORDER: usize = 16;

/// Panel-doubling controls for the composite rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub initial_panels: usize,
    pub max_doublings: u32,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            initial_panels: 4,
            max_doublings: 14,
            rel_tol: 1e-13,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.initial_panels == 0 {
            return Err(invalid("initial_panels must be positive"));
        }
        if self.max_doublings == 0 {
            return Err(invalid("max_doublings must be positive"));
        }
        if !(self.rel_tol >= 100.0 * f64::EPSILON) || !self.rel_tol.is_finite() {
            return Err(invalid(format!(
                "rel_tol must be at least 100 * machine epsilon, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Nodes and weights of the 16-point rule on `[-1, 1]`.
pub fn gauss_legendre_rule() -> &'static [(f64, f64); GL_ORDER] {
    static RULE: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut rule = [(0.0, 0.0); GL_ORDER];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            rule[i] = (-z, w);
            rule[n - 1 - i] = (z, w);
        }
        rule
    })
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// One composite pass with `panels` equal panels; returns integrals and integrals of `|f|`.
fn composite_pass<const K: usize, F>(f: &F, a: f64, b: f64, panels: usize) -> ([f64; K], [f64; K])
where
    F: Fn(f64) -> [f64; K],
{
    let rule = gauss_legendre_rule();
    let h = (b - a) / panels as f64;
    let mut total = [0.0; K];
    let mut abs_total = [0.0; K];
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(node, weight) in rule.iter() {
            let vals = f(mid + 0.5 * h * node);
            for k in 0..K {
                total[k] += weight * vals[k];
                abs_total[k] += weight * vals[k].abs();
            }
        }
    }
    for k in 0..K {
        total[k] *= 0.5 * h;
        abs_total[k] *= 0.5 * h;
    }
    (total, abs_total)
}

/// Integrates every component of `f` over `[a, b]`, doubling the panel count until two
/// successive estimates agree to `rel_tol` relative to the integral of `|f_k|`.
pub fn integrate_components<const K: usize, F>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<[f64; K]>
where
    F: Fn(f64) -> [f64; K],
{
    spec.validate()?;
    let mut panels = spec.initial_panels;
    let (mut prev, _) = composite_pass(&f, a, b, panels);
    for _ in 0..spec.max_doublings {
        panels *= 2;
        let (cur, abs) = composite_pass(&f, a, b, panels);
        let converged = (0..K).all(|k| (cur[k] - prev[k]).abs() <= spec.rel_tol * abs[k]);
        if converged {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        what: "composite Gauss-Legendre quadrature",
        iterations: spec.max_doublings as usize,
    })
}

pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_components(|t| [f(t)], a, b, spec).map(|[v]| v)
}

/// The `phi`-integrand of the kernel energy and its first two `x`-derivatives.
pub(crate) fn energy_integrand(params: &OperatorParams, x: f64) -> impl Fn(f64) -> [f64; 3] {
    let n = params.n() as f64;
    let c = params.c();
    let big_x = params.big_x(x);
    let xp = params.big_x_prime(x);
    move |phi: f64| {
        let s = (0.5 * phi).sin();
        let g = 4.0 * s * s;
        if c == 0.0 {
            let h = (-n * g * x).exp();
            [h, -n * g * h, n * n * g * g * h]
        } else {
            let u = (1.0 + c * g * big_x).max(0.0);
            let h = ((-n / c) * (c * g * big_x).ln_1p()).exp();
            if h == 0.0 {
                return [0.0; 3];
            }
            let d1 = -n * g * xp * h / u;
            let d2 = -n * g * (2.0 * c * h / u - (n + c) * g * xp * xp * h / (u * u));
            [h, d1, d2]
        }
    }
}

/// Kernel energy from its trigonometric integral representation.
pub fn s_integral(params: &OperatorParams, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.check_domain(x)?;
    let f = energy_integrand(params, x);
    integrate(|phi| f(phi)[0], 0.0, PI, spec).map(|v| v / PI)
}

/// `[S, S', S'']` by differentiation under the integral sign.
pub fn s_integral_with_derivatives(
    params: &OperatorParams,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<[f64; 3]> {
    params.check_domain(x)?;
    let v = integrate_components(energy_integrand(params, x), 0.0, PI, spec)?;
    Ok(v.map(|c| c / PI))
}

const I0_TAYLOR_LIMIT: f64 = 30.0;

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(invalid(format!("I0 argument must be nonnegative, got {x}")));
    }
    if x <= I0_TAYLOR_LIMIT {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut j = 0.0;
        loop {
            j += 1.0;
            term *= q / (j * j);
            sum += term;
            if term <= 1e-17 * sum && j * j > q {
                break;
            }
        }
        Ok(sum)
    } else {
        Ok(x.exp() * bessel_i0_scaled(x)?)
    }
}

/// `e^(-x) I_0(x)`, summed outward from the largest series term.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(invalid(format!("I0 argument must be nonnegative, got {x}")));
    }
    if x <= I0_TAYLOR_LIMIT {
        return Ok(bessel_i0(x)? * (-x).exp());
    }
    let half = 0.5 * x;
    let ln_term = |j: u64| 2.0 * (j as f64) * half.ln() - 2.0 * ln_factorial(j) - x;
    let mode = half.floor() as u64;
    let peak = ln_term(mode).exp();
    let q = half * half;
    let mut sum = peak;
    let (mut j, mut t) = (mode, peak);
    loop {
        t *= q / ((j + 1) as f64 * (j + 1) as f64);
        j += 1;
        sum += t;
        let rho = q / ((j + 1) as f64 * (j + 1) as f64);
        if rho < 1.0 && t * rho / (1.0 - rho) <= 1e-17 * sum {
            break;
        }
    }
    let (mut j, mut t) = (mode, peak);
    while j > 0 {
        t *= (j as f64 * j as f64) / q;
        j -= 1;
        sum += t;
        if t * j as f64 <= 1e-17 * sum {
            break;
        }
    }
    Ok(sum)
}

/// `|e^x S_{n,0}(x/(2n)) - I_0(x)| / I_0(x)`.
pub fn bessel_identity_residual(n: u32, x: f64) -> Result<f64> {
    let params = OperatorParams::szasz(n)?;
    if !(x >= 0.0) {
        return Err(invalid(format!("argument must be nonnegative, got {x}")));
    }
    let k = s_series(&params, x / (2.0 * n as f64), DEFAULT_SERIES_TOL)?;
    let i0 = bessel_i0(x)?;
    Ok((x.exp() * k - i0).abs() / i0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{binomial_u128, uniform_grid};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs())
    }

    #[test]
    fn rule_is_exact_for_degree_31() {
        let rule = gauss_legendre_rule();
        let wsum: f64 = rule.iter().map(|r| r.1).sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        for deg in 0..=31i32 {
            let approx: f64 = rule.iter().map(|&(z, w)| w * z.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
            assert!((approx - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        let bad = QuadratureSpec { rel_tol: 1e-16, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = QuadratureSpec { initial_panels: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = QuadratureSpec { initial_panels: 1, max_doublings: 1, rel_tol: 1e-13 };
        let r = integrate(|t| (200.0 * t).sin().abs(), 0.0, 10.0, &spec);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn integral_examples() {
        let spec = QuadratureSpec::default();
        let b2 = OperatorParams::bernstein(2).unwrap();
        assert!(rel(s_integral(&b2, 0.5, &spec).unwrap(), 3.0 / 8.0) < 1e-14);
        let b3 = OperatorParams::bernstein(3).unwrap();
        // sum_k C(3,k)^2 (1/4)^(2k) (3/4)^(2(3-k)) = (729 + 729 + 81 + 1) / 4096
        let brute: f64 = (0..=3u64)
            .map(|k| {
                (binomial_u128(3, k) as f64).powi(2)
                    * 0.25f64.powi(2 * k as i32)
                    * 0.75f64.powi(2 * (3 - k) as i32)
            })
            .sum();
        assert!(rel(brute, 1540.0 / 4096.0) < 1e-15);
        assert!(rel(s_integral(&b3, 0.25, &spec).unwrap(), brute) < 1e-14);
        for c in [-1.0, 0.0, 1.0, 2.0] {
            let p = OperatorParams::new(5, c).unwrap();
            assert!(rel(s_integral(&p, 0.0, &spec).unwrap(), 1.0) < 1e-15);
        }
    }

    #[test]
    fn central_bernstein_value_is_central_binomial() {
        let spec = QuadratureSpec::default();
        for n in 1..=30u32 {
            let p = OperatorParams::bernstein(n).unwrap();
            let expected = binomial_u128(2 * n as u64, n as u64) as f64 / 4f64.powi(n as i32);
            assert!(rel(s_integral(&p, 0.5, &spec).unwrap(), expected) < 1e-13);
        }
    }

    #[test]
    fn integral_matches_series() {
        let spec = QuadratureSpec::default();
        for n in [1u32, 2, 7, 30] {
            for c in [-1.0, 0.0, 1.0, 2.0] {
                let p = OperatorParams::new(n, c).unwrap();
                let hi = if c == -1.0 { 1.0 } else { 4.0 };
                for x in uniform_grid(0.0, hi, 17) {
                    let a = s_integral(&p, x, &spec).unwrap();
                    let b = s_series(&p, x, 1e-16).unwrap();
                    assert!(rel(a, b) <= 1e-10, "n={n} c={c} x={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let spec = QuadratureSpec::default();
        for (n, c, x) in [(3u32, -1.0, 0.3), (2, 0.0, 1.0), (4, 1.0, 0.8), (1, 2.0, 2.0)] {
            let p = OperatorParams::new(n, c).unwrap();
            let [_, d1, d2] = s_integral_with_derivatives(&p, x, &spec).unwrap();
            let h = 1e-4;
            let f = |t: f64| s_series(&p, t, 1e-17).unwrap();
            let fd1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let fd2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            assert!((d1 - fd1).abs() <= 1e-7 * d1.abs().max(1.0), "{n} {c} {x}");
            assert!((d2 - fd2).abs() <= 1e-4 * d2.abs().max(1.0), "{n} {c} {x}");
        }
    }

    #[test]
    fn bessel_values() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!(bessel_i0(-1.0).is_err());
        // reference values of I0
        assert!(rel(bessel_i0(1.0).unwrap(), 1.266_065_877_752_008_4) < 1e-15);
        assert!(rel(bessel_i0(10.0).unwrap(), 2_815.716_628_466_254) < 1e-14);
        // e^2 K_1(1) with K_1 the c = 0 kernel energy
        let k1 = s_series(&OperatorParams::szasz(1).unwrap(), 1.0, 1e-17).unwrap();
        assert!(rel(bessel_i0(2.0).unwrap(), 2f64.exp() * k1) < 1e-14);
    }

    #[test]
    fn scaled_series_continues_taylor_branch() {
        for x in [30.0, 30.5, 45.0, 100.0] {
            let direct: f64 = {
                let q = 0.25 * x * x;
                let mut term = 1.0f64;
                let mut sum = 1.0f64;
                for j in 1..400 {
                    term *= q / (j as f64 * j as f64);
                    sum += term;
                }
                sum
            };
            assert!(rel(bessel_i0(x).unwrap(), direct) < 1e-13, "x={x}");
        }
        let a = bessel_i0_scaled(29.999_999).unwrap();
        let b = bessel_i0_scaled(30.000_001).unwrap();
        assert!(rel(a, b) < 1e-7);
    }

    #[test]
    fn bessel_bound_and_identity() {
        for x in uniform_grid(0.0, 20.0, 81) {
            let i0 = bessel_i0(x).unwrap();
            assert!(i0 <= x.exp() / (2.0 * x + 1.0).sqrt() * (1.0 + 1e-12));
        }
        assert_eq!(bessel_identity_residual(1, 0.0).unwrap(), 0.0);
        assert!(bessel_identity_residual(5, 3.0).unwrap() <= 1e-10);
        let via = |n: u32| {
            let k = s_series(&OperatorParams::szasz(n).unwrap(), 3.0 / (2.0 * n as f64), 1e-16)
                .unwrap();
            3f64.exp() * k
        };
        assert!(rel(via(1), via(20)) <= 1e-10);
    }
}
