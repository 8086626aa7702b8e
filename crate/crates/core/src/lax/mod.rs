//! Lax resolvent, diagonal Green's function and the density/current pair built from it.

mod admissible;
mod density;
mod free;
mod microlaw;
mod operator;
mod resolvent;
mod series;

pub use admissible::{admissibility_margin, is_admissible, minimal_admissible_kappa, DEFAULT_ADMISSIBILITY};
pub use density::{
    current_j, density_from_greens, greens_data_from, rho_alpha, rho_alpha_with, GreensData, GreensMethod,
    GreensSummary, DENSITY_FLOOR,
};
pub use free::{circulant_column, circular_convolve, h1_field, periodic_free_kernel};
pub use microlaw::microlaw_residual;
pub use operator::DenseOperator;
pub use resolvent::{
    build_lax_resolvent, dg_directional, drho_directional, greens_diagonal_direct, LaxResolvent, SINGULARITY_RATIO,
};
pub use series::{collocation_series_terms, contraction_ratio, greens_diagonal_series, DEFAULT_MAX_TERMS};
