//! Residual systems for each ansatz and their packing into Newton unknowns.

use serde::{Deserialize, Serialize};

use super::newton::{newton_solve, NewtonOptions, NewtonReport};
use super::{effective_potential, Ansatz, CandidateParams};
use crate::error::{Error, Result};
use crate::model::{GeometryModel, Moments};
use crate::riemann_hilbert::series::{one_cut_coefficients_extended, two_cut_coefficients_extended};
use crate::riemann_hilbert::{
    expansion_moments, one_cut_boundary_residuals, two_cut_boundary_residuals, Support,
    TwoCutSupport,
};
use crate::quadrature;

/// Minimum separation of consecutive support edges accepted at any iterate.
const EDGE_GAP: f64 = 1e-10;

fn two_cut_support(p: &CandidateParams) -> Result<TwoCutSupport> {
    match p.support {
        Support::TwoCut(s) => Ok(s),
        Support::OneCut(_) => Err(Error::InvalidInput("expected a 2-cut support".into())),
    }
}

/// The seven (1,0) conditions on a 2-cut support: three expansion conditions,
/// three moment closures and the equal-chemical-potential gap integral.
pub fn residuals_10_two_cut(g: f64, p: &CandidateParams) -> Result<[f64; 7]> {
    let s = two_cut_support(p)?;
    let c = two_cut_coefficients_extended(&s, 7);
    let Moments { m1, m2, m3, .. } = p.moments;
    let k = c[0] + 3.0 * m1;
    let (a1, b2) = (s.a1, s.b2);
    let gap = quadrature::integrate_arc(s.b1, s.a2, |x| {
        ((x - a1) * (b2 - x)).sqrt() * (x + k)
    });
    Ok([
        4.0 * c[1] + 4.0 * c[0] * k + 2.0 * (g + 6.0 * m2),
        4.0 * c[2] + 4.0 * c[1] * k + 2.0 * (g * m1 + 2.0 * m3),
        4.0 * c[3] + 4.0 * c[2] * k - 1.0,
        4.0 * c[4] + 4.0 * c[3] * k - m1,
        4.0 * c[5] + 4.0 * c[4] * k - m2,
        4.0 * c[6] + 4.0 * c[5] * k - m3,
        gap,
    ])
}

/// Four-dimensional form of the 2-cut system: the moment closures are linear
/// in the moments and are solved exactly. Returns the remaining residuals and
/// the moments implied by the support.
pub fn residuals_10_two_cut_reduced(g: f64, s: &TwoCutSupport) -> Result<([f64; 4], Moments)> {
    let c = two_cut_coefficients_extended(s, 7);
    let denom = 1.0 - 12.0 * c[3];
    if denom.abs() < 1e-14 {
        return Err(Error::SingularJacobian {
            condition: f64::INFINITY,
        });
    }
    let m1 = (4.0 * c[4] + 4.0 * c[3] * c[0]) / denom;
    let k = c[0] + 3.0 * m1;
    let m2 = 4.0 * c[5] + 4.0 * c[4] * k;
    let m3 = 4.0 * c[6] + 4.0 * c[5] * k;
    let moments = Moments::new(m1, m2, m3);
    let p = CandidateParams {
        ansatz: Ansatz::Asym2Cut,
        support: Support::TwoCut(*s),
        moments,
    };
    let r = residuals_10_two_cut(g, &p)?;
    Ok(([r[0], r[1], r[2], r[6]], moments))
}

/// The five (1,0) conditions on a single interval: two boundary conditions
/// and three moment closures.
pub fn residuals_10_one_cut(g: f64, p: &CandidateParams) -> Result<[f64; 5]> {
    let Support::OneCut(s) = p.support else {
        return Err(Error::InvalidInput("expected a 1-cut support".into()));
    };
    let w = effective_potential(GeometryModel::Plus, g, &p.moments)?;
    let [r1, r2] = one_cut_boundary_residuals(&w, &s);
    let m = expansion_moments(&w, &p.support, 3);
    Ok([
        r1,
        r2,
        m[0] - p.moments.m1,
        m[1] - p.moments.m2,
        m[2] - p.moments.m3,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Support edges and moments are all unknowns.
    Full,
    /// Moments eliminated through their linear closure relations.
    Reduced,
}

/// A residual system for one ansatz at fixed `(model, g)`, exposed on a flat
/// vector of unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSystem {
    pub model: GeometryModel,
    pub g: f64,
    pub ansatz: Ansatz,
    pub formulation: Formulation,
}

impl ResidualSystem {
    pub fn new(model: GeometryModel, g: f64, ansatz: Ansatz, formulation: Formulation) -> Result<Self> {
        model.require_geometry()?;
        if !g.is_finite() {
            return Err(Error::InvalidInput(format!("coupling g = {g} is not finite")));
        }
        if model == GeometryModel::Minus && !ansatz.is_symmetric() {
            return Err(Error::InvalidInput(
                "the (0,1) effective potential is even; only symmetric ansätze apply".into(),
            ));
        }
        Ok(ResidualSystem {
            model,
            g,
            ansatz,
            formulation,
        })
    }

    pub fn dim(&self) -> usize {
        match (self.ansatz, self.formulation) {
            (Ansatz::Sym1Cut, Formulation::Full) => 2,
            (Ansatz::Sym1Cut, Formulation::Reduced) => 1,
            (Ansatz::Sym2Cut, Formulation::Full) => 3,
            (Ansatz::Sym2Cut, Formulation::Reduced) => 2,
            (Ansatz::Asym1Cut, _) => 5,
            (Ansatz::Asym2Cut, Formulation::Full) => 7,
            (Ansatz::Asym2Cut, Formulation::Reduced) => 4,
        }
    }

    /// Unknown vector of a candidate of this system's ansatz.
    pub fn pack(&self, p: &CandidateParams) -> Result<Vec<f64>> {
        if p.ansatz != self.ansatz {
            return Err(Error::InvalidInput(format!(
                "candidate is {} but the system is {}",
                p.ansatz, self.ansatz
            )));
        }
        let e = p.support.edges();
        let m = p.moments;
        let full = self.formulation == Formulation::Full;
        Ok(match self.ansatz {
            Ansatz::Sym1Cut if full => vec![e[1], m.m2],
            Ansatz::Sym1Cut => vec![e[1]],
            Ansatz::Sym2Cut if full => vec![e[2], e[3], m.m2],
            Ansatz::Sym2Cut => vec![e[2], e[3]],
            Ansatz::Asym1Cut => vec![e[0], e[1], m.m1, m.m2, m.m3],
            Ansatz::Asym2Cut if full => vec![e[0], e[1], e[2], e[3], m.m1, m.m2, m.m3],
            Ansatz::Asym2Cut => e,
        })
    }

    /// Candidate for an unknown vector; fails if consecutive edges come closer
    /// than `1e-10` or the vector has the wrong length.
    pub fn unpack(&self, x: &[f64]) -> Result<CandidateParams> {
        if x.len() != self.dim() || !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Precondition(format!(
                "expected {} finite unknowns, got {:?}",
                self.dim(),
                x
            )));
        }
        let ordered = |edges: &[f64]| edges.windows(2).all(|w| w[0] + EDGE_GAP < w[1]);
        let bad = || Error::Precondition(format!("support edges out of order: {x:?}"));
        match (self.ansatz, self.formulation) {
            (Ansatz::Sym1Cut, f) => {
                let b = x[0];
                if !(b > EDGE_GAP) {
                    return Err(bad());
                }
                let m2 = match f {
                    Formulation::Full => x[1],
                    Formulation::Reduced => self.sym_one_cut_m2(b),
                };
                CandidateParams::sym_one_cut(b, m2)
            }
            (Ansatz::Sym2Cut, f) => {
                let (a, b) = (x[0], x[1]);
                if !(a > 0.5 * EDGE_GAP && ordered(&[a, b])) {
                    return Err(bad());
                }
                let m2 = match f {
                    Formulation::Full => x[2],
                    Formulation::Reduced => {
                        let c = two_cut_coefficients_extended(&TwoCutSupport::symmetric(a, b)?, 6);
                        4.0 * c[5]
                    }
                };
                CandidateParams::sym_two_cut(a, b, m2)
            }
            (Ansatz::Asym1Cut, _) => {
                if !ordered(&x[..2]) {
                    return Err(bad());
                }
                CandidateParams::asym_one_cut(x[0], x[1], Moments::new(x[2], x[3], x[4]))
            }
            (Ansatz::Asym2Cut, f) => {
                if !ordered(&x[..4]) {
                    return Err(bad());
                }
                let edges = [x[0], x[1], x[2], x[3]];
                let moments = match f {
                    Formulation::Full => Moments::new(x[4], x[5], x[6]),
                    Formulation::Reduced => {
                        residuals_10_two_cut_reduced(self.g, &TwoCutSupport::from_slice(x)?)?.1
                    }
                };
                CandidateParams::asym_two_cut(edges, moments)
            }
        }
    }

    /// `m2` of a symmetric 1-cut support of half-width `b`, with `w2` fixed by
    /// the normalization condition.
    fn sym_one_cut_m2(&self, b: f64) -> f64 {
        let (c2, c4) = self.sym_one_cut_c(b);
        // normalization: 2 w4 C4 + (4 C2 + w2) C2 = 1 with w4 = 2
        let w2 = (1.0 - 4.0 * c4) / c2 - 4.0 * c2;
        (w2 - 2.0 * self.g) / 12.0
    }

    fn sym_one_cut_c(&self, b: f64) -> (f64, f64) {
        let s = crate::riemann_hilbert::OneCutSupport { a: -b, b };
        let c = one_cut_coefficients_extended(&s, 4);
        (c[1], c[3])
    }

    pub fn residuals(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.unpack(x)?;
        let w = effective_potential(self.model, self.g, &p.moments)?;
        Ok(match (self.ansatz, self.formulation) {
            (Ansatz::Sym1Cut, Formulation::Full) => {
                let Support::OneCut(s) = p.support else { unreachable!() };
                let m = expansion_moments(&w, &p.support, 2);
                vec![one_cut_boundary_residuals(&w, &s)[1], m[1] - p.moments.m2]
            }
            (Ansatz::Sym1Cut, Formulation::Reduced) => {
                let m = expansion_moments(&w, &p.support, 2);
                vec![m[1] - p.moments.m2]
            }
            (Ansatz::Sym2Cut, f) => {
                let s = two_cut_support(&p)?;
                let r = two_cut_boundary_residuals(&w, &s);
                match f {
                    Formulation::Full => {
                        let m = expansion_moments(&w, &p.support, 2);
                        vec![r[0], r[2], m[1] - p.moments.m2]
                    }
                    Formulation::Reduced => vec![r[0], r[2]],
                }
            }
            (Ansatz::Asym1Cut, _) => residuals_10_one_cut(self.g, &p)?.to_vec(),
            (Ansatz::Asym2Cut, Formulation::Full) => residuals_10_two_cut(self.g, &p)?.to_vec(),
            (Ansatz::Asym2Cut, Formulation::Reduced) => {
                residuals_10_two_cut_reduced(self.g, &two_cut_support(&p)?)?.0.to_vec()
            }
        })
    }

    /// Newton solve from `start`.
    pub fn solve(&self, start: &CandidateParams, opts: &NewtonOptions) -> Result<(CandidateParams, NewtonReport)> {
        let x0 = self.pack(start)?;
        let report = newton_solve(|x| self.residuals(x), &x0, opts)?;
        Ok((self.unpack(&report.x)?, report))
    }
}
