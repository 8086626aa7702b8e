//! Spectral and dynamical tools for the (generalized) KdV equation on a large torus.

pub mod bottom;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod lax;
pub mod linalg;
pub mod metrics;
pub mod scalar;
pub mod smoothing;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision grid.
pub type Grid = spectral::TorusGrid<f64>;
/// Double-precision field samples.
pub type Field = spectral::RealField<f64>;
/// Double-precision spectral parameter.
pub type Kappa = spectral::KappaParam<f64>;
/// Double-precision Fourier multiplier.
pub type Multiplier = spectral::FourierMultiplier<f64>;
/// Double-precision dense integral operator.
pub type Operator = lax::DenseOperator<f64>;
/// Double-precision Lax resolvent.
pub type Resolvent = lax::LaxResolvent<f64>;
/// Double-precision Green's function data.
pub type Greens = lax::GreensData<f64>;
/// Double-precision gKdV coefficients.
pub type Coefficients = dynamics::CoefficientSet<f64>;
/// Double-precision stored solution.
pub type Solution = dynamics::Trajectory<f64>;
/// Double-precision bottom profile.
pub type Bottom = bottom::BottomProfile<f64>;
