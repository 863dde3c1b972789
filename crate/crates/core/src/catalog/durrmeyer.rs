//! Exact Bernstein-form coefficients of the Durrmeyer kernel energy.
//!
//! `S_n(x) = sum_{k=0}^{2n} c_{n,k} C(2n,k) x^k (1-x)^(2n-k)` with
//! `c_{n,k} = (n+1)^2/(2n+1) C(2n,k)^(-2) sum_j C(n,j)^2 C(n,k-j)^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::special::binomial;

fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSequence {
    pub n: u32,
    pub coeffs: Vec<BigRational>,
}

impl CoeffSequence {
    pub fn is_symmetric(&self) -> bool {
        let m = self.coeffs.len();
        (0..m).all(|k| self.coeffs[k] == self.coeffs[m - 1 - k])
    }

    pub fn all_positive(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_positive())
    }

    /// `c_{k-1} - 2 c_k + c_{k+1}` for `k = 1..2n-1`, paired with `k`.
    pub fn second_differences(&self) -> Vec<(usize, BigRational)> {
        let two = BigRational::from_integer(BigInt::from(2));
        self.coeffs
            .windows(3)
            .enumerate()
            .map(|(i, w)| (i + 1, &w[0] - &two * &w[1] + &w[2]))
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

pub fn durrmeyer_coeffs(n: u32) -> Result<CoeffSequence> {
    if n == 0 {
        return Err(invalid("Durrmeyer degree n must be at least 1"));
    }
    let n64 = n as u64;
    let row: Vec<BigInt> = (0..=n64).map(|j| big_binomial(n64, j).pow(2)).collect();
    let prefactor = BigRational::new(BigInt::from((n64 + 1).pow(2)), BigInt::from(2 * n64 + 1));
    let coeffs = (0..=2 * n64)
        .map(|k| {
            let lo = k.saturating_sub(n64);
            let hi = k.min(n64);
            let conv: BigInt = (lo..=hi).map(|j| &row[j as usize] * &row[(k - j) as usize]).sum();
            let denom = big_binomial(2 * n64, k).pow(2);
            &prefactor * BigRational::new(conv, denom)
        })
        .collect();
    Ok(CoeffSequence { n, coeffs })
}

/// Durrmeyer kernel energy with its coefficients converted once to floats.
#[derive(Debug, Clone)]
pub struct DurrmeyerEnergy {
    n: u32,
    weights: Vec<f64>,
}

impl DurrmeyerEnergy {
    pub fn new(n: u32) -> Result<Self> {
        let seq = durrmeyer_coeffs(n)?;
        let m = 2 * n as u64;
        let weights = seq
            .to_f64()
            .into_iter()
            .enumerate()
            .map(|(k, c)| c * binomial(m, k as u64))
            .collect();
        Ok(Self { n, weights })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn eval(&self, x: f64) -> f64 {
        let m = 2 * self.n as i32;
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * x.powi(k as i32) * (1.0 - x).powi(m - k as i32))
            .sum()
    }
}
