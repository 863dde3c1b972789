//! Binomial coefficients and log-gamma helpers shared by the basis and catalog modules.

/// Largest `n` for which binomials are formed with exact integer arithmetic.
pub const EXACT_BINOMIAL_LIMIT: u64 = 60;

/// Exact `C(n, k)` as a `u128`; `0` when `k > n`. Exact for `n <= 120`.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[inline]
pub fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// `C(n, k)` as a float: exact integers for `n <= 60`, log-gamma above.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_BINOMIAL_LIMIT {
        return binomial_u128(n, k) as f64;
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp()
}

/// `C(2m, m) / 4^m`, accumulated as a product of `(2k-1)/(2k)` factors.
pub fn central_binomial_over_four_pow(m: u64) -> f64 {
    (1..=m).fold(1.0, |acc, k| acc * (2 * k - 1) as f64 / (2 * k) as f64)
}

/// Closed uniform grid of `steps` points on `[lo, hi]`; a single point when `steps == 1`.
pub fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (steps - 1) as f64;
            (0..steps)
                .map(|i| if i + 1 == steps { hi } else { lo + i as f64 * h })
                .collect()
        }
    }
}
