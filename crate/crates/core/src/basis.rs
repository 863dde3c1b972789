//! Fundamental weights of the Bernstein / Szász-Mirakjan / Baskakov family, the
//! squared-sum kernel energy `S_{n,c}`, the variance and the quadratic entropies.
//!
//! The family is indexed by a shape parameter `c`:
//!
//! * `c = -1`: Bernstein, `p_j(x) = C(n,j) x^j (1-x)^(n-j)`, `j = 0..=n`, on `[0, 1]`;
//! * `c = 0`: Szász-Mirakjan, `p_j(x) = e^(-nx) (nx)^j / j!`, on `[0, inf)`;
//! * `c > 0`: Baskakov, `p_j(x) = (n/c)_j / j! (cx)^j (1+cx)^(-n/c-j)`, on `[0, inf)`,
//!   with `(a)_j` the rising factorial.

use crate::error::{domain, invalid, Error, Result};
use crate::special::{binomial, ln_factorial, ln_gamma};
use serde::{Deserialize, Serialize};

/// Hard cap on the number of series terms for the infinite families.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

/// Default relative truncation tolerance for [`s_series`].
pub const DEFAULT_SERIES_TOL: f64 = 1e-16;

/// Degree `n` and shape `c` of one member of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    n: u32,
    c: f64,
}

impl OperatorParams {
    pub fn new(n: u32, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("operator degree n must be at least 1"));
        }
        if !(c == -1.0 || c >= 0.0) || !c.is_finite() {
            return Err(invalid(format!("shape parameter c must be -1 or >= 0, got {c}")));
        }
        Ok(Self { n, c })
    }

    pub fn bernstein(n: u32) -> Result<Self> {
        Self::new(n, -1.0)
    }

    pub fn szasz(n: u32) -> Result<Self> {
        Self::new(n, 0.0)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_bernstein(&self) -> bool {
        self.c == -1.0
    }

    /// Right end of `I_c`: `1` for Bernstein, `+inf` otherwise.
    pub fn domain_end(&self) -> f64 {
        if self.is_bernstein() {
            1.0
        } else {
            f64::INFINITY
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= 0.0 && x <= self.domain_end() && !x.is_nan()
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if self.contains(x) && x.is_finite() {
            Ok(())
        } else {
            Err(domain(format!(
                "x = {x} outside [0, {}] for n = {}, c = {}",
                self.domain_end(),
                self.n,
                self.c
            )))
        }
    }

    /// Interior of `I_c`.
    pub fn is_interior(&self, x: f64) -> bool {
        x > 0.0 && x < self.domain_end()
    }

    /// `X = x(1 + cx)`.
    pub fn big_x(&self, x: f64) -> f64 {
        x * (1.0 + self.c * x)
    }

    /// `X' = 1 + 2cx`.
    pub fn big_x_prime(&self, x: f64) -> f64 {
        1.0 + 2.0 * self.c * x
    }
}

/// One grid point of an entropy profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyPoint {
    pub x: f64,
    pub s: f64,
    pub v: f64,
    pub renyi: f64,
    pub tsallis: f64,
}

impl EntropyPoint {
    pub fn new(x: f64, s: f64, v: f64) -> Result<Self> {
        Ok(Self {
            x,
            s,
            v,
            renyi: renyi_entropy(s)?,
            tsallis: tsallis_entropy(s)?,
        })
    }
}

/// Quadratic Rényi entropy `-log S`.
pub fn renyi_entropy(s: f64) -> Result<f64> {
    if s > 0.0 {
        Ok(-s.ln())
    } else {
        Err(invalid(format!("kernel energy must be positive, got {s}")))
    }
}

/// Quadratic Tsallis entropy `1 - S`.
pub fn tsallis_entropy(s: f64) -> Result<f64> {
    if s > 0.0 {
        Ok(1.0 - s)
    } else {
        Err(invalid(format!("kernel energy must be positive, got {s}")))
    }
}

/// `V_{n,c}(x) = x(1 + cx)/n`.
pub fn variance(params: &OperatorParams, x: f64) -> Result<f64> {
    params.check_domain(x)?;
    Ok(params.big_x(x) / params.n as f64)
}

/// The weight `p_{n,j}^{[c]}(x)`.
pub fn basis_weight(params: &OperatorParams, j: u64, x: f64) -> Result<f64> {
    params.check_domain(x)?;
    let n = params.n as u64;
    if params.is_bernstein() {
        if j > n {
            return Err(domain(format!("index j = {j} exceeds degree n = {n}")));
        }
        return Ok(bernstein_weight(n, j, x));
    }
    if x == 0.0 {
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    Ok(InfiniteFamily::new(params, x).ln_weight(j).exp())
}

pub(crate) fn bernstein_weight(n: u64, j: u64, x: f64) -> f64 {
    if j > n {
        return 0.0;
    }
    binomial(n, j) * x.powi(j as i32) * (1.0 - x).powi((n - j) as i32)
}

/// `S_{n,c}(x) = sum_j p_{n,j}^{[c]}(x)^2`.
///
/// Exact finite sum for Bernstein. For the infinite families the sum runs outward
/// from the modal index and stops once a rigorous bound on the remaining tail is
/// below `tol` times the partial sum.
pub fn s_series(params: &OperatorParams, x: f64, tol: f64) -> Result<f64> {
    weight_power_sum(params, x, tol, 2)
}

/// `sum_j p_{n,j}^{[c]}(x)`, which equals one up to truncation.
pub fn weight_sum(params: &OperatorParams, x: f64, tol: f64) -> Result<f64> {
    weight_power_sum(params, x, tol, 1)
}

fn weight_power_sum(params: &OperatorParams, x: f64, tol: f64, power: i32) -> Result<f64> {
    params.check_domain(x)?;
    if !(tol > 0.0) {
        return Err(invalid(format!("series tolerance must be positive, got {tol}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if params.is_bernstein() {
        let n = params.n as u64;
        return Ok((0..=n).map(|j| bernstein_weight(n, j, x).powi(power)).sum());
    }
    InfiniteFamily::new(params, x).power_sum(tol, power)
}

/// Szász-Mirakjan (`c = 0`) or Baskakov (`c > 0`) weights at a fixed `x > 0`.
struct InfiniteFamily {
    n: f64,
    c: f64,
    x: f64,
    /// `n/c` for Baskakov.
    a: f64,
    /// `cx/(1+cx)` for Baskakov.
    p: f64,
}

impl InfiniteFamily {
    fn new(params: &OperatorParams, x: f64) -> Self {
        let n = params.n as f64;
        let c = params.c;
        let (a, p) = if c > 0.0 {
            (n / c, c * x / (1.0 + c * x))
        } else {
            (f64::INFINITY, 0.0)
        };
        Self { n, c, x, a, p }
    }

    fn ln_weight(&self, j: u64) -> f64 {
        let jf = j as f64;
        if self.c == 0.0 {
            let nx = self.n * self.x;
            jf * nx.ln() - nx - ln_factorial(j)
        } else {
            let cx = self.c * self.x;
            ln_gamma(self.a + jf) - ln_gamma(self.a) - ln_factorial(j) + jf * cx.ln()
                - (self.a + jf) * cx.ln_1p()
        }
    }

    /// `p_{j+1} / p_j`.
    fn ratio(&self, j: u64) -> f64 {
        let jf = j as f64;
        if self.c == 0.0 {
            self.n * self.x / (jf + 1.0)
        } else {
            (self.a + jf) / (jf + 1.0) * self.p
        }
    }

    /// Upper bound for every ratio `p_{k+1}/p_k` with `k >= j`.
    ///
    /// The ratios are monotone in `k` and converge to `0` (Szász) or `p` (Baskakov).
    fn ratio_bound_from(&self, j: u64) -> f64 {
        self.ratio(j).max(self.p)
    }

    /// Index of the largest weight: smallest `j >= nx - cx - 1`.
    fn mode(&self) -> u64 {
        let m = (self.n * self.x - self.c * self.x - 1.0).ceil();
        if m > 0.0 {
            m as u64
        } else {
            0
        }
    }

    fn power_sum(&self, tol: f64, power: i32) -> Result<f64> {
        let mode = self.mode();
        let peak = self.ln_weight(mode).exp();
        let mut sum = peak.powi(power);
        let mut iterations = 1usize;

        // upward: ratios stay below one beyond the mode
        let mut j = mode;
        let mut w = peak;
        loop {
            w *= self.ratio(j);
            j += 1;
            iterations += 1;
            let term = w.powi(power);
            sum += term;
            let rho = self.ratio_bound_from(j).powi(power);
            if rho < 1.0 && term * rho / (1.0 - rho) <= tol * sum {
                break;
            }
            if iterations >= MAX_SERIES_TERMS {
                return Err(Error::NonConvergence {
                    what: "kernel energy series",
                    iterations,
                });
            }
        }

        // downward: weights decrease monotonically toward j = 0 below the mode
        let mut j = mode;
        let mut w = peak;
        while j > 0 {
            w /= self.ratio(j - 1);
            j -= 1;
            iterations += 1;
            let term = w.powi(power);
            sum += term;
            if term * j as f64 <= tol * sum {
                break;
            }
            if iterations >= MAX_SERIES_TERMS {
                return Err(Error::NonConvergence {
                    what: "kernel energy series",
                    iterations,
                });
            }
        }
        Ok(sum)
    }
}
