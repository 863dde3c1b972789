//! Legendre polynomials on `t >= 1`, the substitution linking them to the
//! Bernstein kernel energy, and the bounds on `P_n'/P_n` and `P_n`.
//!
//! For `x in [0, 1/2)` put `t = (2x^2 - 2x + 1)/(1 - 2x)`. Then
//! `F_n(x) = (t - sqrt(t^2 - 1))^n P_n(t)` where `F_n = S_{n,-1}`.

use crate::error::{domain, invalid, Result};
use serde::{Deserialize, Serialize};

/// Default distance kept from the singular point `x = 1/2` of the substitution.
pub const DEFAULT_SINGULAR_GUARD: f64 = 1.0 / 64.0;

/// Both sides of the `x <-> t` change of variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TSubstitution {
    pub x: f64,
    pub t: f64,
    /// `X = x(1 - x)`
    pub big_x: f64,
    /// `X' = 1 - 2x`
    pub big_x_prime: f64,
    /// `sqrt(t^2 - 1)`
    pub root: f64,
}

impl TSubstitution {
    /// `dt/dx = 4X / (1 - 4X)`.
    pub fn dt_dx(&self) -> f64 {
        4.0 * self.big_x / (self.big_x_prime * self.big_x_prime)
    }
}

pub fn x_to_t(x: f64) -> Result<TSubstitution> {
    if !(0.0..0.5).contains(&x) {
        return Err(domain(format!("substitution needs x in [0, 1/2), got {x}")));
    }
    let big_x = x * (1.0 - x);
    let xp = 1.0 - 2.0 * x;
    Ok(TSubstitution {
        x,
        t: (1.0 - 2.0 * big_x) / xp,
        big_x,
        big_x_prime: xp,
        root: 2.0 * big_x / xp,
    })
}

pub fn t_to_x(t: f64) -> Result<TSubstitution> {
    if !(t >= 1.0) || !t.is_finite() {
        return Err(domain(format!("substitution needs finite t >= 1, got {t}")));
    }
    let root = ((t - 1.0) * (t + 1.0)).sqrt();
    // 1 - t + root = 1 - 1/(t + root)
    let x = 0.5 * (1.0 - 1.0 / (t + root));
    Ok(TSubstitution {
        x,
        t,
        big_x: x * (1.0 - x),
        big_x_prime: 1.0 - 2.0 * x,
        root,
    })
}

fn check_t(t: f64) -> Result<()> {
    if t >= 1.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("Legendre evaluation needs finite t >= 1, got {t}")))
    }
}

/// `P_n(t)` by the upward three-term recurrence.
pub fn legendre_p(n: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(legendre_pair(n, t).0)
}

/// `(P_n(t), P_{n-1}(t))`, with `P_{-1} := 0`.
fn legendre_pair(n: u32, t: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut prev, mut cur) = (1.0, t);
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * t * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `(P_n(t), P_n'(t))`.
///
/// The derivative comes from `P'_{k+1} = P'_{k-1} + (2k+1) P_k`, which is exact and
/// free of the `t -> 1` cancellation in `(t^2-1) P_n' = n (t P_n - P_{n-1})`.
pub fn legendre_p_and_derivative(n: u32, t: f64) -> Result<(f64, f64)> {
    check_t(t)?;
    if n == 0 {
        return Ok((1.0, 0.0));
    }
    let (mut p_prev, mut p_cur) = (1.0, t);
    let (mut d_prev, mut d_cur) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * t * p_cur - kf * p_prev) / (kf + 1.0);
        let d_next = d_prev + (2.0 * kf + 1.0) * p_cur;
        p_prev = p_cur;
        p_cur = p_next;
        d_prev = d_cur;
        d_cur = d_next;
    }
    Ok((p_cur, d_cur))
}

/// `P_n'(t)/P_n(t)`.
pub fn log_derivative(n: u32, t: f64) -> Result<f64> {
    let (p, d) = legendre_p_and_derivative(n, t)?;
    Ok(d / p)
}

/// `P_n'(t)` from `(t^2 - 1) P_n'(t) = n (t P_n(t) - P_{n-1}(t))`, with `n(n+1)/2` at `t = 1`.
pub fn legendre_derivative_closed(n: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    if t == 1.0 {
        return Ok(n as f64 * (n as f64 + 1.0) / 2.0);
    }
    let (p, p_prev) = legendre_pair(n, t);
    Ok(n as f64 * (t * p - p_prev) / ((t - 1.0) * (t + 1.0)))
}

/// `F_n(x) = (t - sqrt(t^2-1))^n P_n(t)`.
pub fn f_via_legendre(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("degree n must be at least 1"));
    }
    let sub = x_to_t(x)?;
    // t - sqrt(t^2 - 1) = 1/(t + sqrt(t^2 - 1))
    let root = ((sub.t - 1.0) * (sub.t + 1.0)).sqrt();
    let factor = 1.0 / (sub.t + root);
    Ok(factor.powi(n as i32) * legendre_p(n, sub.t)?)
}

fn root_of(t: f64) -> f64 {
    ((t - 1.0) * (t + 1.0)).sqrt()
}

/// Lower bound `n(n+1) / (2t + (n-1) sqrt(t^2-1))` for `P_n'/P_n`, `t >= 1`.
pub fn ratio_lower_bound(n: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    let n = n as f64;
    Ok(n * (n + 1.0) / (2.0 * t + (n - 1.0) * root_of(t)))
}

/// Upper bound `2n^2 / (t + (2n-1) sqrt(t^2-1))` for `P_n'/P_n`, `t >= 1`.
pub fn ratio_upper_2_14(n: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    let n = n as f64;
    Ok(2.0 * n * n / (t + (2.0 * n - 1.0) * root_of(t)))
}

/// Upper bound `n^2(2n+1) / ((n+1)t + (2n^2-1) sqrt(t^2-1))` for `P_n'/P_n`, `t >= 1`.
pub fn ratio_upper_2_15(n: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    let n = n as f64;
    Ok(n * n * (2.0 * n + 1.0) / ((n + 1.0) * t + (2.0 * n * n - 1.0) * root_of(t)))
}

/// Upper bound for `P_n'/P_n` implied by log-convexity of `F_n`, `t > 1`:
/// `(sqrt(4n^2(t^2-1) + w^2) - w) / (2(t^2-1))` with `w = t - sqrt(t^2-1)`.
///
/// Evaluated in the rationalized form `2n^2 / (sqrt(4n^2(t^2-1) + w^2) + w)`.
pub fn ratio_upper_2_11(n: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    if t == 1.0 {
        return Err(domain("bound is undefined at t = 1"));
    }
    let n = n as f64;
    let root = root_of(t);
    let w = 1.0 / (t + root);
    let t2m1 = (t - 1.0) * (t + 1.0);
    Ok(2.0 * n * n / ((4.0 * n * n * t2m1 + w * w).sqrt() + w))
}

/// Upper bound for `P_n(t)` obtained by integrating [`ratio_upper_2_15`].
pub fn poly_upper_2_16(n: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    if n == 0 {
        return Err(invalid("degree n must be at least 1"));
    }
    let nf = n as f64;
    let root = root_of(t);
    let denom = 2.0 * nf * nf - nf - 2.0;
    let e1 = nf * (2.0 * nf * nf - 1.0) / denom;
    let e2 = -nf * (nf + 1.0) / denom;
    let inner = t + (2.0 * nf * nf - 1.0) / (nf + 1.0) * root;
    Ok((e1 * (t + root).ln() + e2 * inner.ln()).exp())
}

/// Upper bound for `P_n(t)` obtained by integrating [`ratio_upper_2_14`], `n >= 2`.
pub fn poly_upper_2_17(n: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    if n < 2 {
        return Err(invalid("bound requires n >= 2"));
    }
    let nf = n as f64;
    let root = root_of(t);
    let e1 = nf * (2.0 * nf - 1.0) / (2.0 * (nf - 1.0));
    let e2 = -nf / (2.0 * (nf - 1.0));
    Ok((e1 * (t + root).ln() + e2 * (t + (2.0 * nf - 1.0) * root).ln()).exp())
}

/// The unique `t* > 1` with `t/(t + sqrt(t^2-1)) = (3n+2)/(4n+3)`.
///
/// With `r = (3n+2)/(4n+3) > 1/2`, squaring gives `t*^2 = r^2 / (2r - 1)`.
/// [`ratio_upper_2_11`] `<=` [`ratio_upper_2_15`] holds on `(1, t*]` and fails beyond.
pub fn crossover_t(n: u32) -> f64 {
    let r = (3.0 * n as f64 + 2.0) / (4.0 * n as f64 + 3.0);
    r / (2.0 * r - 1.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{s_series, OperatorParams};
    use crate::special::uniform_grid;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs())
    }

    #[test]
    fn polynomial_examples() {
        assert_eq!(legendre_p(1, 3.5).unwrap(), 3.5);
        assert_eq!(legendre_p(2, 1.25).unwrap(), 1.84375);
        for n in 0..40 {
            assert_eq!(legendre_p(n, 1.0).unwrap(), 1.0);
        }
        // P_3(t) = (5t^3 - 3t)/2
        assert_eq!(legendre_p(3, 2.0).unwrap(), 17.0);
        assert!(legendre_p(3, 0.5).is_err());
    }

    #[test]
    fn derivative_routes_agree() {
        for n in 1..=30 {
            assert_eq!(
                legendre_p_and_derivative(n, 1.0).unwrap().1,
                (n * (n + 1)) as f64 / 2.0
            );
            for t in uniform_grid(1.01, 10.0, 40) {
                let a = legendre_p_and_derivative(n, t).unwrap().1;
                let b = legendre_derivative_closed(n, t).unwrap();
                assert!(rel(a, b) < 1e-11, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn substitution_examples() {
        let s = x_to_t(0.0).unwrap();
        assert_eq!(s.t, 1.0);
        let s = x_to_t(0.25).unwrap();
        assert_eq!(s.t, 1.25);
        assert_eq!(s.root, 0.75);
        let t = 5.0 / 21f64.sqrt();
        let back = t_to_x(t).unwrap();
        let expected_x = (1.0 - t + (t * t - 1.0).sqrt()) / 2.0;
        assert!((back.x - expected_x).abs() < 1e-12);
        assert!((x_to_t(back.x).unwrap().t - t).abs() < 1e-12);
        assert!(x_to_t(0.5).is_err());
        assert!(t_to_x(0.99).is_err());
    }

    #[test]
    fn f_via_legendre_examples() {
        assert_eq!(f_via_legendre(1, 0.25).unwrap(), 0.625);
        assert_eq!(f_via_legendre(2, 0.25).unwrap(), 59.0 / 128.0);
        for n in 1..10 {
            assert_eq!(f_via_legendre(n, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn f_via_legendre_matches_series() {
        for n in 1..=50u32 {
            let p = OperatorParams::bernstein(n).unwrap();
            for x in uniform_grid(0.0, 0.5 - DEFAULT_SINGULAR_GUARD, 64) {
                let a = f_via_legendre(n, x).unwrap();
                let b = s_series(&p, x, 1e-16).unwrap();
                assert!(rel(a, b) <= 1e-9, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn bound_examples() {
        for n in 1..20 {
            let nf = n as f64;
            assert_eq!(ratio_lower_bound(n, 1.0).unwrap(), nf * (nf + 1.0) / 2.0);
            assert_eq!(poly_upper_2_16(n, 1.0).unwrap(), 1.0);
            if n >= 2 {
                assert_eq!(poly_upper_2_17(n, 1.0).unwrap(), 1.0);
            }
        }
        assert_eq!(ratio_upper_2_14(1, 1.0).unwrap(), 2.0);
        assert!(ratio_upper_2_11(2, 1.0).is_err());
        assert!(poly_upper_2_17(1, 2.0).is_err());
        // P_2'/P_2 at 1.25 = 3t / ((3t^2 - 1)/2)
        let exact = 3.0 * 1.25 / 1.84375;
        assert!(rel(log_derivative(2, 1.25).unwrap(), exact) < 1e-15);
        assert!(ratio_upper_2_11(2, 1.25).unwrap() >= exact);
        assert!(poly_upper_2_16(3, 2.0).unwrap() >= legendre_p(3, 2.0).unwrap());
        assert!(poly_upper_2_16(2, 1.5).unwrap() <= poly_upper_2_17(2, 1.5).unwrap());
    }

    #[test]
    fn rationalized_bound_matches_printed_form() {
        for n in 1..=30u32 {
            for t in uniform_grid(1.5, 10.0, 20) {
                let nf = n as f64;
                let r = (t * t - 1.0).sqrt();
                let w = t - r;
                let printed = ((4.0 * nf * nf * (t * t - 1.0) + w * w).sqrt() - w) / (2.0 * (t * t - 1.0));
                assert!(rel(printed, ratio_upper_2_11(n, t).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn crossover_examples() {
        assert!((crossover_t(1) - 5.0 / 21f64.sqrt()).abs() < 1e-15);
        for n in [1u32, 2, 5, 30] {
            let t = crossover_t(n);
            let r = (3.0 * n as f64 + 2.0) / (4.0 * n as f64 + 3.0);
            assert!((t / (t + (t * t - 1.0).sqrt()) - r).abs() < 1e-14);
        }
        // ratio tends to 3/4 so t* tends to 3/sqrt(8) * ... i.e. r/sqrt(2r-1) at r = 3/4
        assert!((crossover_t(1_000_000) - 0.75 / 0.5f64.sqrt()).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn substitution_round_trip(x in 0.0f64..0.49) {
            let s = x_to_t(x).unwrap();
            let back = t_to_x(s.t).unwrap();
            prop_assert!((back.x - x).abs() <= 1e-12);
            prop_assert!((s.root - (s.t * s.t - 1.0).sqrt()).abs() <= 1e-12 * s.t.max(1.0));
            prop_assert!((s.t - (1.0 - 2.0 * s.big_x) / s.big_x_prime).abs() <= 1e-12 * s.t);
            prop_assert!(s.t >= 1.0);
            prop_assert_eq!(s.t == 1.0, x == 0.0);
        }
    }
}
