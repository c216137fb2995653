//! Boundedness and compactness criteria for weighted Laplace, Stieltjes and
//! Hardy operators acting from `L^p(0, ∞)` to `L^q(0, ∞)`, together with the
//! numerical machinery used to cross-check them: adaptive quadrature on the
//! half-line, log-grid Nyström discretizations, `ℓ^p → ℓ^q` norm estimation
//! and compactness diagnostics.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled (the default) and plain iterators otherwise.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod diagnostics;
pub mod discretize;
pub mod error;
pub mod ext;
pub mod matrix;
pub mod normest;
pub mod num;
pub mod par;
pub mod params;
pub mod quadrature;
pub mod weights;

pub use error::{Error, Result};
pub use params::{Exponent, Exponents, OperatorKind};
pub use weights::Weight;
