//! Hilbert-Schmidt and weighted operator norms, and kappa-scaling audits of commutator estimates.

mod audit;
mod fit;
mod hs;
mod weighted;

pub use audit::{
    commutator_scaling_audit, psi_weight, schur_norms, weight_admissibility, CommutatorVariant, ScalingReport,
    WeightCheck, AUDIT_MAX_ITER, AUDIT_TOL, MAX_CI_WIDTH, MAX_KAPPA_DX, SLOPE_TOLERANCE,
};
pub use fit::{fit_power_law, PowerLawFit};
pub use hs::{hs_norm, sandwiched_potential, trace_product, verify_hs_identity};
pub use weighted::{weighted_op_norm, weighted_op_norm_with, LinearOperator, WeightedSpace};
