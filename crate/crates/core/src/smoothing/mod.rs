//! Local smoothing norm, local energy, coefficient-hypothesis checks and the bootstrap quantity.

mod bootstrap;
mod hypothesis;
mod local;
mod weights;

pub use bootstrap::{apriori_horizon, bootstrap_audit, horizon_slope, BootstrapRecord, HorizonRecord, HORIZON_FACTOR};
pub use hypothesis::{
    hypothesis_check, nonperiodic_derivative, CoefficientCheck, HypothesisMode, HypothesisReport,
};
pub use local::{local_mass, ls_density, ls_norm, sup_h1k_sq};
pub use weights::{localized_psi, SwitchFunction, WeightFamily, DEFAULT_CENTER_STRIDE};
