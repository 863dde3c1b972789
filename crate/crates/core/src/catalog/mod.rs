//! Closed-form kernel energy `S` and variance `V` for a catalog of positive linear
//! operators, and entropy profiles assembled over grids.

mod durrmeyer;

pub use durrmeyer::{durrmeyer_coeffs, CoeffSequence, DurrmeyerEnergy};

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{s_series, variance, EntropyPoint, OperatorParams, DEFAULT_SERIES_TOL};
use crate::error::{domain, invalid, Result};
use crate::ode::s_derivatives;
use crate::quadrature::{integrate_components, QuadratureSpec};
use crate::special::{binomial, central_binomial_over_four_pow, uniform_grid};

/// Largest accepted mass deficit `|1 - int phi|` of a convolution kernel.
pub const KERNEL_MASS_TOL: f64 = 1e-9;

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(format!("x = {x} outside [0, 1]")))
    }
}

fn check_degree(n: u32) -> Result<()> {
    if n == 0 {
        Err(invalid("operator degree n must be at least 1"))
    } else {
        Ok(())
    }
}

/// Kernel energy and variance at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelStats {
    pub s: f64,
    pub v: f64,
}

/// `S = (n+1) F_n(x)`, `V = (n x(1-x) + 1/12) / (n+1)^2`.
pub fn kantorovich_sv(n: u32, x: f64) -> Result<KernelStats> {
    check_degree(n)?;
    check_unit(x)?;
    let nf = n as f64;
    let f = s_series(&OperatorParams::bernstein(n)?, x, DEFAULT_SERIES_TOL)?;
    Ok(KernelStats {
        s: (nf + 1.0) * f,
        v: (nf * x * (1.0 - x) + 1.0 / 12.0) / ((nf + 1.0) * (nf + 1.0)),
    })
}

/// Heat-kernel convolution: `S = (8 pi r)^(-1/2)`, `V = 2r`.
pub fn gauss_weierstrass_sv(r: f64) -> Result<KernelStats> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid(format!("Gauss-Weierstrass parameter r must be positive, got {r}")));
    }
    Ok(KernelStats {
        s: (8.0 * PI * r).powf(-0.5),
        v: 2.0 * r,
    })
}

/// A probability density for a convolution operator, truncated to a finite window.
#[derive(Clone)]
pub struct ConvolutionKernel {
    label: String,
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    window: (f64, f64),
}

impl fmt::Debug for ConvolutionKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvolutionKernel")
            .field("label", &self.label)
            .field("window", &self.window)
            .finish()
    }
}

impl ConvolutionKernel {
    pub fn new<F>(label: impl Into<String>, window: (f64, f64), density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(window.0 < window.1) || !window.0.is_finite() || !window.1.is_finite() {
            return Err(invalid("kernel window must be a finite interval"));
        }
        Ok(Self {
            label: label.into(),
            density: Arc::new(density),
            window,
        })
    }

    /// Uniform density on `[-w/2, w/2]`.
    pub fn uniform(width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(invalid(format!("uniform kernel width must be positive, got {width}")));
        }
        let half = 0.5 * width;
        Self::new(format!("uniform(width={width})"), (-half, half), move |s| {
            if s.abs() <= half {
                1.0 / width
            } else {
                0.0
            }
        })
    }

    /// `(4 pi r)^(-1/2) exp(-s^2/(4r))`, truncated at 40 standard deviations.
    pub fn gauss_weierstrass(r: f64) -> Result<Self> {
        gauss_weierstrass_sv(r)?;
        let half = 40.0 * (2.0 * r).sqrt();
        let norm = (4.0 * PI * r).powf(-0.5);
        Self::new(format!("gauss-weierstrass(r={r})"), (-half, half), move |s| {
            norm * (-s * s / (4.0 * r)).exp()
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn density(&self, s: f64) -> f64 {
        (self.density)(s)
    }
}

/// Moments of a convolution kernel over its window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionStats {
    pub s: f64,
    pub v: f64,
    pub mass: f64,
    pub mean: f64,
}

/// `V = int s^2 phi - (int s phi)^2`, `S = int phi^2`, both constant in `x`.
pub fn convolution_sv(kernel: &ConvolutionKernel, quad: &QuadratureSpec) -> Result<ConvolutionStats> {
    let (a, b) = kernel.window;
    let [mass, first, second, energy] = integrate_components(
        |s| {
            let p = kernel.density(s);
            [p, s * p, s * s * p, p * p]
        },
        a,
        b,
        quad,
    )?;
    if (1.0 - mass).abs() > KERNEL_MASS_TOL {
        return Err(invalid(format!(
            "kernel {} is not normalised on its window: mass deficit {:e}",
            kernel.label,
            1.0 - mass
        )));
    }
    Ok(ConvolutionStats {
        s: energy,
        v: second - first * first,
        mass,
        mean: first,
    })
}

/// `S = C(2n-2, n-1) 2^(1-2n) n / x`, `V = x^2/n`, for `x > 0`.
pub fn post_widder_sv(n: u32, x: f64) -> Result<KernelStats> {
    check_degree(n)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("Post-Widder operators need x > 0, got {x}")));
    }
    let nf = n as f64;
    // C(2m, m) 2^(-2m-1) with m = n - 1
    let coeff = central_binomial_over_four_pow(n as u64 - 1) * 0.5;
    Ok(KernelStats {
        s: coeff * nf / x,
        v: x * x / nf,
    })
}

/// `S` in Bernstein form with exact coefficients, `V = (n+1)(2n x(1-x) + 1)/((n+2)^2 (n+3))`.
pub fn durrmeyer_sv(n: u32, x: f64) -> Result<KernelStats> {
    check_unit(x)?;
    let energy = DurrmeyerEnergy::new(n)?;
    Ok(KernelStats {
        s: energy.eval(x),
        v: durrmeyer_variance(n, x),
    })
}

fn durrmeyer_variance(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    (nf + 1.0) * (2.0 * nf * x * (1.0 - x) + 1.0) / ((nf + 2.0).powi(2) * (nf + 3.0))
}

/// Genuine Bernstein-Durrmeyer: `V = 2x(1-x)/(n+1)` and
/// `S = (1-x)^(2n) + x^(2n) + (n-1)^2/(2n-3) sum_{k,j=1}^{n-1} C(n-2,k-1) C(n-2,j-1) C(n,k) C(n,j)
/// / C(2n-4, k+j-2) x^(k+j) (1-x)^(2n-k-j)`.
pub fn genuine_bd_sv(n: u32, x: f64) -> Result<KernelStats> {
    check_degree(n)?;
    check_unit(x)?;
    let nf = n as f64;
    let n64 = n as u64;
    let m = 2 * n as i32;
    let mut s = (1.0 - x).powi(m) + x.powi(m);
    // empty inner sum for n = 1; skip before forming (n-1)^2/(2n-3)
    if n >= 2 {
        let mut inner = 0.0;
        for k in 1..n64 {
            for j in 1..n64 {
                let c = binomial(n64 - 2, k - 1) * binomial(n64 - 2, j - 1) * binomial(n64, k)
                    * binomial(n64, j)
                    / binomial(2 * n64 - 4, k + j - 2);
                inner += c * x.powi((k + j) as i32) * (1.0 - x).powi(m - (k + j) as i32);
            }
        }
        s += (nf - 1.0).powi(2) / (2.0 * nf - 3.0) * inner;
    }
    Ok(KernelStats {
        s,
        v: 2.0 * x * (1.0 - x) / (nf + 1.0),
    })
}

/// Identifies one operator of the catalog.
#[derive(Debug, Clone)]
pub enum OperatorDescriptor {
    Baskakov(OperatorParams),
    Kantorovich { n: u32 },
    GaussWeierstrass { r: f64 },
    Convolution(ConvolutionKernel),
    PostWidder { n: u32 },
    Durrmeyer { n: u32 },
    GenuineBernsteinDurrmeyer { n: u32 },
}

impl OperatorDescriptor {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Baskakov(_) => Ok(()),
            Self::GaussWeierstrass { r } => gauss_weierstrass_sv(*r).map(|_| ()),
            Self::Convolution(_) => Ok(()),
            Self::Kantorovich { n }
            | Self::PostWidder { n }
            | Self::Durrmeyer { n }
            | Self::GenuineBernsteinDurrmeyer { n } => check_degree(*n),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Baskakov(p) if p.is_bernstein() => format!("bernstein(n={})", p.n()),
            Self::Baskakov(p) if p.c() == 0.0 => format!("szasz(n={})", p.n()),
            Self::Baskakov(p) => format!("baskakov(n={},c={})", p.n(), p.c()),
            Self::Kantorovich { n } => format!("kantorovich(n={n})"),
            Self::GaussWeierstrass { r } => format!("gauss-weierstrass(r={r})"),
            Self::Convolution(k) => format!("convolution({})", k.label()),
            Self::PostWidder { n } => format!("post-widder(n={n})"),
            Self::Durrmeyer { n } => format!("durrmeyer(n={n})"),
            Self::GenuineBernsteinDurrmeyer { n } => format!("genuine-bd(n={n})"),
        }
    }

    /// Whether `x` lies in the operator's domain.
    pub fn contains(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self {
            Self::Baskakov(p) => p.contains(x),
            Self::Kantorovich { .. } | Self::Durrmeyer { .. } | Self::GenuineBernsteinDurrmeyer { .. } => {
                (0.0..=1.0).contains(&x)
            }
            Self::GaussWeierstrass { .. } | Self::Convolution(_) => true,
            Self::PostWidder { .. } => x > 0.0,
        }
    }

    /// Whether analytic `S'`, `S''` are available.
    pub fn has_derivatives(&self) -> bool {
        matches!(self, Self::Baskakov(_))
    }
}

/// One row of an entropy profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    #[serde(flatten)]
    pub point: EntropyPoint,
    pub ds: Option<f64>,
    pub d2s: Option<f64>,
    pub logconv_margin: Option<f64>,
}

/// Closed uniform grid specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(invalid("grid needs at least one point"));
        }
        if !(x_min <= x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(invalid(format!("invalid grid range [{x_min}, {x_max}]")));
        }
        if steps == 1 && x_min != x_max {
            return Err(invalid("a one-point grid needs x_min == x_max"));
        }
        if steps > 1 && x_min == x_max {
            return Err(invalid("grid with several points needs x_min < x_max"));
        }
        Ok(Self { x_min, x_max, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        uniform_grid(self.x_min, self.x_max, self.steps)
    }
}

#[derive(Debug, Clone)]
pub struct EntropyProfile {
    pub descriptor: OperatorDescriptor,
    pub rows: Vec<ProfileRow>,
}

/// Evaluates `S`, `V` and both entropies (plus derivatives where available) over a grid.
pub fn profile(descriptor: &OperatorDescriptor, grid: &Grid) -> Result<EntropyProfile> {
    descriptor.validate()?;
    let xs = grid.points();
    if let Some(bad) = xs.iter().find(|&&x| !descriptor.contains(x)) {
        return Err(domain(format!("grid point {bad} outside the domain of {}", descriptor.label())));
    }
    let quad = QuadratureSpec::default();
    // x-independent families are evaluated once
    let constant = match descriptor {
        OperatorDescriptor::GaussWeierstrass { r } => Some(gauss_weierstrass_sv(*r)?),
        OperatorDescriptor::Convolution(k) => {
            let st = convolution_sv(k, &quad)?;
            Some(KernelStats { s: st.s, v: st.v })
        }
        _ => None,
    };
    let durrmeyer = match descriptor {
        OperatorDescriptor::Durrmeyer { n } => Some(DurrmeyerEnergy::new(*n)?),
        _ => None,
    };
    let rows = xs
        .par_iter()
        .map(|&x| -> Result<ProfileRow> {
            let stats = match (descriptor, constant) {
                (_, Some(st)) => st,
                (OperatorDescriptor::Baskakov(p), _) => KernelStats {
                    s: s_series(p, x, DEFAULT_SERIES_TOL)?,
                    v: variance(p, x)?,
                },
                (OperatorDescriptor::Kantorovich { n }, _) => kantorovich_sv(*n, x)?,
                (OperatorDescriptor::PostWidder { n }, _) => post_widder_sv(*n, x)?,
                (OperatorDescriptor::Durrmeyer { n }, _) => KernelStats {
                    s: durrmeyer.as_ref().map(|d| d.eval(x)).unwrap_or(f64::NAN),
                    v: durrmeyer_variance(*n, x),
                },
                (OperatorDescriptor::GenuineBernsteinDurrmeyer { n }, _) => genuine_bd_sv(*n, x)?,
                (OperatorDescriptor::GaussWeierstrass { .. } | OperatorDescriptor::Convolution(_), None) => {
                    unreachable!("constant families are evaluated above")
                }
            };
            let point = EntropyPoint::new(x, stats.s, stats.v)?;
            let (ds, d2s, logconv_margin) = match descriptor {
                OperatorDescriptor::Baskakov(p) => {
                    let d = s_derivatives(p, x, &quad)?;
                    (Some(d.ds), Some(d.d2s), Some(d.logconv_margin))
                }
                _ => (None, None, None),
            };
            Ok(ProfileRow {
                point,
                ds,
                d2s,
                logconv_margin,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyProfile {
        descriptor: descriptor.clone(),
        rows,
    })
}
