//! Derivatives of `S_{n,c}`, the second-order ODE it satisfies, the Riccati
//! equation for `A = S'/S`, and the quadratic envelope that characterises
//! log-convexity.
//!
//! With `X = x(1+cx)` and `X' = 1+2cx`:
//!
//! ```text
//! X X' S'' + (4(n+c)X + 1) S' + 2n X' S = 0
//! X X' (A' + A^2) + (4(n+c)X + 1) A + 2n X' = 0
//! ```
//!
//! Substituting the ODE into `(log S)'' = S''/S - A^2` gives
//! `(log S)'' = (A - z1)(z2 - A)`, where `z1 <= z2` are the roots of
//! `X X' z^2 + (4(n+c)X + 1) z + 2n X' = 0`.

use crate::basis::{bernstein_weight, OperatorParams};
use crate::error::{domain, Result};
use crate::quadrature::{s_integral_with_derivatives, QuadratureSpec};
use serde::{Deserialize, Serialize};

/// Distance kept from the degenerate points of the ODE coefficients.
pub const BOUNDARY_EXCLUSION: f64 = 1.0 / 128.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SDerivatives {
    pub x: f64,
    pub s: f64,
    pub ds: f64,
    pub d2s: f64,
    /// `S'/S`
    pub a: f64,
    /// `(S'' S - S'^2) / S^2`, i.e. `(log S)''`
    pub logconv_margin: f64,
}

impl SDerivatives {
    pub fn from_values(x: f64, s: f64, ds: f64, d2s: f64) -> Self {
        let a = ds / s;
        Self {
            x,
            s,
            ds,
            d2s,
            a,
            logconv_margin: (d2s * s - ds * ds) / (s * s),
        }
    }

    /// Scale of `(log S)''` used to normalise margins: `A^2 + |S''/S|`.
    pub fn margin_scale(&self) -> f64 {
        self.a * self.a + (self.d2s / self.s).abs()
    }
}

/// `S, S', S''` by differentiating the trigonometric integrand under the integral sign.
///
/// Defined on the closed domain; one-sided at the endpoints.
pub fn s_derivatives(params: &OperatorParams, x: f64, spec: &QuadratureSpec) -> Result<SDerivatives> {
    let [s, ds, d2s] = s_integral_with_derivatives(params, x, spec)?;
    Ok(SDerivatives::from_values(x, s, ds, d2s))
}

/// Exact derivatives of the polynomial `F_n = S_{n,-1}` from the Bernstein form.
pub fn s_derivatives_bernstein(n: u32, x: f64) -> Result<SDerivatives> {
    let params = OperatorParams::bernstein(n)?;
    params.check_domain(x)?;
    let n = n as u64;
    let nf = n as f64;
    let b = |m: u64, j: i64| -> f64 {
        if j < 0 {
            0.0
        } else {
            bernstein_weight(m, j as u64, x)
        }
    };
    let (mut s, mut ds, mut d2s) = (0.0, 0.0, 0.0);
    for j in 0..=n as i64 {
        let w = b(n, j);
        let w1 = nf * (b(n - 1, j - 1) - b(n - 1, j));
        let w2 = if n >= 2 {
            nf * (nf - 1.0) * (b(n - 2, j - 2) - 2.0 * b(n - 2, j - 1) + b(n - 2, j))
        } else {
            0.0
        };
        s += w * w;
        ds += 2.0 * w * w1;
        d2s += 2.0 * (w1 * w1 + w * w2);
    }
    Ok(SDerivatives::from_values(x, s, ds, d2s))
}

fn check_interior(params: &OperatorParams, x: f64) -> Result<()> {
    params.check_domain(x)?;
    if params.is_interior(x) {
        Ok(())
    } else {
        Err(domain(format!("x = {x} is not interior to the domain")))
    }
}

fn normalized(terms: &[f64]) -> f64 {
    let sum: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if scale == 0.0 {
        0.0
    } else {
        sum.abs() / scale
    }
}

/// Normalised residual of the ODE for given derivative values.
pub fn ode_residual_of(params: &OperatorParams, d: &SDerivatives) -> f64 {
    let n = params.n() as f64;
    let c = params.c();
    let bx = params.big_x(d.x);
    let xp = params.big_x_prime(d.x);
    normalized(&[
        bx * xp * d.d2s,
        (4.0 * (n + c) * bx + 1.0) * d.ds,
        2.0 * n * xp * d.s,
    ])
}

/// `|X X' S'' + (4(n+c)X+1) S' + 2n X' S|` over the sum of the three term magnitudes.
pub fn ode_residual(params: &OperatorParams, x: f64) -> Result<f64> {
    check_interior(params, x)?;
    let d = s_derivatives(params, x, &QuadratureSpec::default())?;
    Ok(ode_residual_of(params, &d))
}

/// Normalised residual of the Riccati equation with `A' = (S'' S - S'^2)/S^2`.
pub fn riccati_residual_of(params: &OperatorParams, d: &SDerivatives) -> f64 {
    let n = params.n() as f64;
    let c = params.c();
    let x = d.x;
    let bx = x * (1.0 + c * x);
    let xp = 1.0 + 2.0 * c * x;
    let lead = bx * xp;
    normalized(&[
        lead * d.logconv_margin,
        lead * d.a * d.a,
        (4.0 * (n + c) * bx + 1.0) * d.a,
        2.0 * n * xp,
    ])
}

pub fn riccati_residual(params: &OperatorParams, x: f64) -> Result<f64> {
    check_interior(params, x)?;
    let d = s_derivatives(params, x, &QuadratureSpec::default())?;
    Ok(riccati_residual_of(params, &d))
}

/// Roots of the envelope quadratic at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub x: f64,
    pub z1: f64,
    pub z2: f64,
    pub big_x: f64,
    pub big_x_prime: f64,
    n: f64,
    c: f64,
}

impl Envelope {
    /// Normalised residual of `z` in `X X' z^2 + (4(n+c)X+1) z + 2n X'`.
    pub fn quadratic_residual(&self, z: f64) -> f64 {
        normalized(&[
            self.big_x * self.big_x_prime * z * z,
            (4.0 * (self.n + self.c) * self.big_x + 1.0) * z,
            2.0 * self.n * self.big_x_prime,
        ])
    }

    pub fn contains(&self, a: f64) -> bool {
        self.z1 <= a && a <= self.z2
    }

    /// `(A - z1)(z2 - A)`: nonnegative exactly when `A` lies in `[z1, z2]`.
    pub fn membership_product(&self, a: f64) -> f64 {
        (a - self.z1) * (self.z2 - a)
    }

    /// Scale of [`Self::membership_product`]: `(|A| + |z1|)(|A| + |z2|)`.
    pub fn membership_scale(&self, a: f64) -> f64 {
        (a.abs() + self.z1.abs()) * (a.abs() + self.z2.abs())
    }

    /// `|X'^2 - (1 + 4cX)|`.
    pub fn identity_defect(&self) -> f64 {
        (self.big_x_prime * self.big_x_prime - (1.0 + 4.0 * self.c * self.big_x)).abs()
    }
}

/// `z1, z2 = (-/+ sqrt((1+4cX)^2 + (4nX)^2) - (1+4cX) - 4nX) / (2 X X')`, ordered so `z1 <= z2`.
pub fn envelope(params: &OperatorParams, x: f64) -> Result<Envelope> {
    params.check_domain(x)?;
    let n = params.n() as f64;
    let c = params.c();
    let bx = params.big_x(x);
    let xp = params.big_x_prime(x);
    if bx == 0.0 || xp == 0.0 {
        return Err(domain(format!("envelope is singular at x = {x} (X X' = 0)")));
    }
    let b = 1.0 + 4.0 * c * bx + 4.0 * n * bx;
    let disc = ((1.0 + 4.0 * c * bx).powi(2) + (4.0 * n * bx).powi(2)).sqrt();
    let minus_root = (-disc - b) / (2.0 * bx * xp);
    // (disc - b)/(2XX') rationalized: disc^2 - b^2 = -8nX X'^2
    let plus_root = -4.0 * n * xp / (disc + b);
    let (z1, z2) = if minus_root <= plus_root {
        (minus_root, plus_root)
    } else {
        (plus_root, minus_root)
    };
    Ok(Envelope {
        x,
        z1,
        z2,
        big_x: bx,
        big_x_prime: xp,
        n,
        c,
    })
}

/// `(log S)''(x)`, predicted nonnegative by the log-convexity conjecture.
pub fn logconvexity_margin(params: &OperatorParams, x: f64) -> Result<f64> {
    check_interior(params, x)?;
    Ok(s_derivatives(params, x, &QuadratureSpec::default())?.logconv_margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::s_series;
    use crate::special::uniform_grid;

    fn p(n: u32, c: f64) -> OperatorParams {
        OperatorParams::new(n, c).unwrap()
    }

    #[test]
    fn first_bernstein_degree_closed_form() {
        let spec = QuadratureSpec::default();
        for x in uniform_grid(0.0, 1.0, 17) {
            let exact = s_derivatives_bernstein(1, x).unwrap();
            assert!((exact.s - (1.0 - 2.0 * x + 2.0 * x * x)).abs() < 1e-15);
            assert!((exact.ds - (4.0 * x - 2.0)).abs() < 1e-15);
            assert!((exact.d2s - 4.0).abs() < 1e-15);
            let quad = s_derivatives(&p(1, -1.0), x, &spec).unwrap();
            assert!((quad.ds - exact.ds).abs() < 1e-12);
            assert!((quad.d2s - exact.d2s).abs() < 1e-12);
        }
        let mid = s_derivatives(&p(1, -1.0), 0.5, &spec).unwrap();
        assert_eq!(mid.ds, 0.0);
    }

    #[test]
    fn exact_and_quadrature_paths_agree() {
        let spec = QuadratureSpec::default();
        for n in [2u32, 5, 13, 30] {
            for x in uniform_grid(BOUNDARY_EXCLUSION, 1.0 - BOUNDARY_EXCLUSION, 33) {
                let e = s_derivatives_bernstein(n, x).unwrap();
                let q = s_derivatives(&p(n, -1.0), x, &spec).unwrap();
                let scale = e.d2s.abs() + e.ds.abs() + e.s;
                assert!((e.s - q.s).abs() <= 1e-10 * scale);
                assert!((e.ds - q.ds).abs() <= 1e-10 * scale, "n={n} x={x}");
                assert!((e.d2s - q.d2s).abs() <= 1e-10 * scale, "n={n} x={x}");
                assert!((e.s - s_series(&p(n, -1.0), x, 1e-16).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn szasz_is_decreasing() {
        let d = s_derivatives(&p(2, 0.0), 1.0, &QuadratureSpec::default()).unwrap();
        assert!(d.ds < 0.0);
    }

    #[test]
    fn residual_examples() {
        assert!(ode_residual(&p(1, -1.0), 0.25).unwrap() <= 1e-8);
        assert!(ode_residual(&p(3, 0.0), 2.0).unwrap() <= 1e-8);
        assert!(ode_residual(&p(2, 1.0), 1.0).unwrap() <= 1e-8);
        assert!(riccati_residual(&p(1, -1.0), 0.25).unwrap() <= 1e-8);
        assert!(riccati_residual(&p(1, 0.0), 1.0).unwrap() <= 1e-8);
        assert_eq!(riccati_residual(&p(2, -1.0), 0.5).unwrap(), 0.0);
        let exact = s_derivatives_bernstein(1, 0.25).unwrap();
        assert!(ode_residual_of(&p(1, -1.0), &exact) <= 1e-15);
        assert!(ode_residual(&p(1, -1.0), 0.0).is_err());
        assert!(ode_residual(&p(1, -1.0), 1.0).is_err());
    }

    #[test]
    fn envelope_examples() {
        let e = envelope(&p(1, 0.0), 1.0).unwrap();
        assert!((e.z1 * e.z2 - 2.0).abs() < 1e-14);
        assert!((e.z1 + e.z2 + 5.0).abs() < 1e-14);
        assert!(envelope(&p(1, 0.0), 0.0).is_err());
        assert!(envelope(&p(1, -1.0), 0.5).is_err());

        // c = -1, x = 1/4, X = 3/16, X' = 1/2
        let e = envelope(&p(1, -1.0), 0.25).unwrap();
        let bx: f64 = 3.0 / 16.0;
        let xp = 0.5;
        let printed = (((1.0 - 4.0 * bx).powi(2) + (4.0 * bx).powi(2)).sqrt() - (1.0 - 4.0 * bx)
            - 4.0 * bx)
            / (2.0 * bx * xp);
        assert!((e.z2 - printed).abs() < 1e-14);
        assert_eq!(e.big_x, bx);
    }

    #[test]
    fn envelope_roots_and_identity() {
        for n in [1u32, 4, 30] {
            for c in [-1.0, 0.0, 1.0, 2.0] {
                let hi = if c == -1.0 { 1.0 - BOUNDARY_EXCLUSION } else { 4.0 };
                for x in uniform_grid(BOUNDARY_EXCLUSION, hi, 40) {
                    let Ok(e) = envelope(&p(n, c), x) else { continue };
                    assert!(e.z1 <= e.z2);
                    assert!(e.quadratic_residual(e.z1) <= 1e-12);
                    assert!(e.quadratic_residual(e.z2) <= 1e-12);
                    assert!(e.identity_defect() <= 1e-14 * (1.0 + e.big_x_prime.powi(2)));
                }
            }
        }
    }

    #[test]
    fn margin_equals_membership_product() {
        let spec = QuadratureSpec::default();
        for (n, c) in [(3u32, -1.0), (3, 0.0), (3, 1.0)] {
            let hi = if c == -1.0 { 0.9 } else { 3.0 };
            for x in uniform_grid(0.1, hi, 9) {
                let d = s_derivatives(&p(n, c), x, &spec).unwrap();
                let Ok(e) = envelope(&p(n, c), x) else { continue };
                let prod = e.membership_product(d.a);
                assert!((prod - d.logconv_margin).abs() <= 1e-9 * e.membership_scale(d.a));
            }
        }
    }

    #[test]
    fn logconvexity_examples() {
        assert!((logconvexity_margin(&p(1, -1.0), 0.5).unwrap() - 8.0).abs() < 1e-12);
        for x in uniform_grid(0.01, 0.99, 50) {
            let f = 1.0 - 2.0 * x + 2.0 * x * x;
            let exact = (4.0 * f - (4.0 * x - 2.0).powi(2)) / (f * f);
            assert!(exact > 0.0);
            assert!((s_derivatives_bernstein(1, x).unwrap().logconv_margin - exact).abs() < 1e-13);
        }
        assert!(logconvexity_margin(&p(2, 0.0), 0.1).unwrap() >= 0.0);
    }
}
