//! Kernel energy `S(x)`, variance `V(x)` and the quadratic Rényi / Tsallis
//! entropies of positive linear operators, computed through several independent
//! representations and checked against a registry of analytic inequalities.

// Negated comparisons such as `!(x > 0.0)` are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod formats;
pub mod legendre;
pub mod multivariate;
pub mod ode;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod verifier;

pub use basis::{EntropyPoint, OperatorParams};
pub use error::{Error, Result};
