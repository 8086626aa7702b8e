//! Pseudospectral gKdV integration with conservation monitors.

mod coefficients;
mod equation;
mod integrator;
mod monitors;
mod soliton;
mod trajectory;

pub use coefficients::{translate, Coefficient, CoefficientDescriptor, CoefficientMeta, CoefficientSet, Sampler};
pub use equation::{airy_dispersion, gkdv_rhs, Evolution, GkdvEquation};
pub use integrator::{default_dt, solve, solve_with, step, step_count, step_with, Ifrk4, SolveOptions, DIVERGENCE_THRESHOLD};
pub use monitors::{
    alpha_drift, alpha_series, integrate_uniform, integrated_microlaw, l2_growth_rate, l2_identity_residual,
    microlaw_rates, perturbation,
};
pub use soliton::soliton;
pub use trajectory::{DiagnosticRecord, Trajectory};

pub(crate) use equation::add_scaled;
