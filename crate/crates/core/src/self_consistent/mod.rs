//! Self-consistent equilibria: the effective potential depends on the moments
//! of the measure it produces.

pub mod newton;
pub mod scan;
pub mod systems;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{GeometryModel, Moments};
use crate::riemann_hilbert::{OneCutSupport, QuarticPotential, Support, TwoCutSupport};

pub use newton::{newton_solve, NewtonOptions, NewtonReport};
pub use scan::{branch_scan, seed, BranchScan, BranchTracker};
pub use systems::{
    residuals_10_one_cut, residuals_10_two_cut, residuals_10_two_cut_reduced, Formulation,
    ResidualSystem,
};

/// Quartic effective potential of a single eigenvalue in the mean field of the others.
pub fn effective_potential(model: GeometryModel, g: f64, m: &Moments) -> Result<QuarticPotential> {
    match model {
        GeometryModel::Plus => QuarticPotential::new(
            8.0 * m.m3 + 4.0 * g * m.m1,
            2.0 * (6.0 * m.m2 + g),
            8.0 * m.m1,
            2.0,
        ),
        GeometryModel::Minus => QuarticPotential::new(0.0, 2.0 * (6.0 * m.m2 + g), 0.0, 2.0),
        GeometryModel::GaussianBaseline => Err(Error::InvalidInput(
            "the Gaussian baseline has no quartic effective potential".into(),
        )),
    }
}

/// Shape of a candidate measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ansatz {
    Sym1Cut,
    Sym2Cut,
    Asym1Cut,
    Asym2Cut,
}

impl Ansatz {
    pub const ALL: [Ansatz; 4] = [
        Ansatz::Sym1Cut,
        Ansatz::Sym2Cut,
        Ansatz::Asym1Cut,
        Ansatz::Asym2Cut,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Ansatz::Sym1Cut => "sym1",
            Ansatz::Sym2Cut => "sym2",
            Ansatz::Asym1Cut => "asym1",
            Ansatz::Asym2Cut => "asym2",
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, Ansatz::Sym1Cut | Ansatz::Sym2Cut)
    }

    pub fn cuts(self) -> usize {
        match self {
            Ansatz::Sym1Cut | Ansatz::Asym1Cut => 1,
            Ansatz::Sym2Cut | Ansatz::Asym2Cut => 2,
        }
    }
}

impl fmt::Display for Ansatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Ansatz {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sym1" | "sym1cut" => Ok(Ansatz::Sym1Cut),
            "sym2" | "sym2cut" => Ok(Ansatz::Sym2Cut),
            "asym1" | "asym1cut" => Ok(Ansatz::Asym1Cut),
            "asym2" | "asym2cut" => Ok(Ansatz::Asym2Cut),
            other => Err(Error::InvalidInput(format!("unknown ansatz '{other}'"))),
        }
    }
}

/// Support and moments of a candidate solution. Symmetric ansätze carry a
/// mirrored support and vanishing odd moments by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateParams {
    pub ansatz: Ansatz,
    pub support: Support,
    pub moments: Moments,
}

impl CandidateParams {
    pub fn sym_one_cut(b: f64, m2: f64) -> Result<Self> {
        Ok(CandidateParams {
            ansatz: Ansatz::Sym1Cut,
            support: Support::OneCut(OneCutSupport::symmetric(b)?),
            moments: Moments::symmetric(m2),
        })
    }

    pub fn sym_two_cut(a: f64, b: f64, m2: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidInput(format!(
                "symmetric 2-cut needs a > 0 (got {a})"
            )));
        }
        Ok(CandidateParams {
            ansatz: Ansatz::Sym2Cut,
            support: Support::TwoCut(TwoCutSupport::symmetric(a, b)?),
            moments: Moments::symmetric(m2),
        })
    }

    pub fn asym_one_cut(a: f64, b: f64, moments: Moments) -> Result<Self> {
        Ok(CandidateParams {
            ansatz: Ansatz::Asym1Cut,
            support: Support::OneCut(OneCutSupport::new(a, b)?),
            moments,
        })
    }

    pub fn asym_two_cut(edges: [f64; 4], moments: Moments) -> Result<Self> {
        Ok(CandidateParams {
            ansatz: Ansatz::Asym2Cut,
            support: Support::TwoCut(TwoCutSupport::from_slice(&edges)?),
            moments,
        })
    }

    /// The solution for the reflected measure `ρ(-λ)`.
    pub fn mirrored(&self) -> Self {
        CandidateParams {
            ansatz: self.ansatz,
            support: self.support.mirrored(),
            moments: self.moments.mirrored(),
        }
    }

    /// Representative with `m1 ≥ 0`.
    pub fn canonical(self) -> Self {
        if self.moments.m1 < 0.0 {
            self.mirrored()
        } else {
            self
        }
    }

    pub fn potential(&self, model: GeometryModel, g: f64) -> Result<QuarticPotential> {
        effective_potential(model, g, &self.moments)
    }
}
