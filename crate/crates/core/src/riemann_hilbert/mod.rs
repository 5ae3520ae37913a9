//! Equilibrium measures of a general quartic potential on one or two cuts.

pub mod density;
pub mod residuals;
pub mod series;
pub mod support;

pub use density::{
    borel_transform, build_one_cut_density, build_two_cut_density, density_moment, Cut,
    SpectralDensity,
};
pub use residuals::{
    boundary_residuals, expansion_moments, gap_integral, moment_extraction,
    one_cut_boundary_residuals, two_cut_boundary_residuals,
};
pub use series::{one_cut_coefficients, two_cut_coefficients};
pub use support::{OneCutSupport, QuarticPotential, Support, TwoCutSupport};
