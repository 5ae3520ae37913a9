//! Large-N spectral densities of quartic fuzzy-geometry matrix models.

pub mod closed_form;
pub mod compare;
pub mod dirac;
pub mod error;
pub mod free_energy;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod riemann_hilbert;
pub mod self_consistent;

pub use error::{Error, Result};
pub use model::{EigenvalueConfig, GeometryModel, Moments, PowerSums};
pub use riemann_hilbert::{OneCutSupport, QuarticPotential, SpectralDensity, Support, TwoCutSupport};
pub use free_energy::{EquilibriumSolution, PhaseReport, Selection};
pub use self_consistent::{Ansatz, CandidateParams};
pub use montecarlo::{McConfig, McInit, McRun, McTrace};
pub use dirac::{DiracDensity, DiracSign};
pub use compare::{CompareMetrics, DensityTable};
