//! Simulation and verification toolkit for the eigenvalues of products of
//! independent spherical-ensemble random matrices.
//!
//! Two sampling routes are provided for the moduli of the scaled eigenvalues
//! `|z_j|^{1/m}`:
//!
//! * the matrix route ([`ensembles`]), which builds `X_1 X_2 ... X_m` from
//!   `A^{-1} B` factors and computes its eigenvalues with [`linalg`];
//! * the radial route ([`radial`]), which draws the moduli directly as
//!   products of independent beta-prime variables in log space.
//!
//! [`weightfn`] evaluates the radial weight functions and all closed-form
//! limiting laws, and [`stats`] turns samples into empirical measures and
//! Kolmogorov-Smirnov verdicts.
//!
//! Numerical code is generic over a [`Real`] scalar (`f32` or `f64`); the
//! aliases below fix the common `f64` instantiations.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::excessive_precision
)]

pub mod distributions;
pub mod ensembles;
mod error;
pub mod linalg;
pub mod parallel;
pub mod quadrature;
pub mod radial;
pub mod rng;
mod scalar;
pub mod special;
pub mod stats;
pub mod weightfn;

pub use error::{Error, Result};
pub use scalar::Real;

pub use distributions::MomentPair;
pub use ensembles::{EnsembleConfig, MRule, ProductSample};
pub use linalg::{Spectrum, SquareComplexMatrix};
pub use radial::{GnMode, RadialConfig};
pub use rng::RandomStream;
pub use stats::{EmpiricalCdf, KsResult, ScaledSpectrum};
pub use weightfn::{DensityTable, WeightFunction, WeightTable};

/// Complex scalar over `f64`.
pub type Complex64 = num_complex::Complex<f64>;
/// Dense complex matrix over `f64`.
pub type Matrix64 = SquareComplexMatrix<f64>;
/// Dense complex matrix over `f32`.
pub type Matrix32 = SquareComplexMatrix<f32>;
/// Spectrum over `f64`.
pub type Spectrum64 = Spectrum<f64>;
/// Scaled spectrum over `f64`.
pub type ScaledSpectrum64 = ScaledSpectrum<f64>;
/// Empirical CDF over `f64`.
pub type EmpiricalCdf64 = EmpiricalCdf<f64>;
/// Ensemble configuration over `f64`.
pub type EnsembleConfig64 = EnsembleConfig<f64>;
/// Product sample over `f64`.
pub type ProductSample64 = ProductSample<f64>;
/// Weight function evaluator over `f64`.
pub type WeightFunction64 = WeightFunction<f64>;
/// Exact moment pair over rationals, e.g. `s_mean_var::<Ratio64>(1, 4)`.
pub type Ratio64 = num_rational::Ratio<i64>;
