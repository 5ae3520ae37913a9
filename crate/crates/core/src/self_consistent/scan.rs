//! Seeds and path-following along a solution branch in `g`.

use serde::{Deserialize, Serialize};

use super::newton::NewtonOptions;
use super::systems::{Formulation, ResidualSystem};
use super::{Ansatz, CandidateParams};
use crate::closed_form::{solve_one_cut_01, solve_two_cut_01, G_SYMMETRIC_CRITICAL};
use crate::error::{Error, Result};
use crate::free_energy::{candidate_density, EquilibriumSolution};
use crate::model::{GeometryModel, Moments};

/// Coupling at which the broken-symmetry branch is first solved.
pub const BROKEN_BRANCH_ANCHOR: f64 = -4.0;

/// Starting guess for the broken-symmetry 2-cut solution at the anchor
/// coupling: a small cut in the left well, a large one in the right well.
fn broken_branch_guess(g: f64) -> Result<CandidateParams> {
    let bb = if g > G_SYMMETRIC_CRITICAL {
        2f64.powf(0.25)
    } else {
        solve_two_cut_01(g)?.0.b
    };
    CandidateParams::asym_two_cut(
        [-1.25 * bb - 0.1, -1.25 * bb + 0.05, 0.1 * bb, 0.85 * bb],
        Moments::new(0.5 * bb, -g / 8.0 + 0.05, 0.2),
    )
}

/// Converged candidate of `ansatz` at `g`.
///
/// Symmetric ansätze come from the closed forms. The broken-symmetry 2-cut
/// branch of (1,0) is solved at `g = -4` and continued to `g`.
pub fn seed(model: GeometryModel, ansatz: Ansatz, g: f64) -> Result<CandidateParams> {
    model.require_geometry()?;
    let fail = |reason: String| Error::SeedFailure { g, reason };
    match ansatz {
        Ansatz::Sym1Cut => {
            if g < G_SYMMETRIC_CRITICAL {
                return Err(fail("b⁴ > 2: the density turns negative at the origin".into()));
            }
            let (s, _) = solve_one_cut_01(g)?;
            CandidateParams::sym_one_cut(s.b, s.m2)
        }
        Ansatz::Sym2Cut => {
            if g >= G_SYMMETRIC_CRITICAL {
                return Err(fail("a² ≤ 0: the gap has closed".into()));
            }
            let (s, _) = solve_two_cut_01(g)?;
            CandidateParams::sym_two_cut(s.a, s.b, s.m2)
        }
        Ansatz::Asym1Cut => Err(fail("no seeded asymmetric 1-cut branch".into())),
        Ansatz::Asym2Cut => {
            if model != GeometryModel::Plus {
                return Err(fail("broken symmetry requires the (1,0) model".into()));
            }
            let mut tracker = BranchTracker::broken_branch().map_err(|e| fail(e.to_string()))?;
            tracker
                .solve_at(g)
                .map(CandidateParams::canonical)
                .map_err(|e| fail(e.to_string()))
        }
    }
}

/// Continuation along one branch, caching every solved point.
///
/// Steps toward a target coupling with a secant predictor; a failed step is
/// halved down to `max_step / 256` before the branch is declared ended.
#[derive(Debug, Clone)]
pub struct BranchTracker {
    model: GeometryModel,
    ansatz: Ansatz,
    formulation: Formulation,
    opts: NewtonOptions,
    /// Solved `(g, unknowns)`, sorted by `g`.
    known: Vec<(f64, Vec<f64>)>,
    pub max_step: f64,
}

impl BranchTracker {
    pub fn new(model: GeometryModel, g: f64, start: &CandidateParams) -> Result<Self> {
        let mut t = BranchTracker {
            model,
            ansatz: start.ansatz,
            formulation: Formulation::Full,
            opts: NewtonOptions::default(),
            known: Vec::new(),
            max_step: 0.05,
        };
        let sys = t.system(g)?;
        let (p, _) = sys.solve(start, &t.opts)?;
        t.check_admissible(g, &p)?;
        t.known.push((g, sys.pack(&p)?));
        Ok(t)
    }

    /// The (1,0) broken-symmetry 2-cut branch, solved at the anchor coupling.
    pub fn broken_branch() -> Result<Self> {
        let g = BROKEN_BRANCH_ANCHOR;
        BranchTracker::new(GeometryModel::Plus, g, &broken_branch_guess(g)?)
    }

    pub fn with_formulation(mut self, formulation: Formulation) -> Result<Self> {
        if formulation != self.formulation {
            let old: Vec<(f64, Vec<f64>)> = std::mem::take(&mut self.known);
            let from = self.formulation;
            self.formulation = formulation;
            for (g, x) in old {
                let p = ResidualSystem::new(self.model, g, self.ansatz, from)?.unpack(&x)?;
                let sys = self.system(g)?;
                let (p, _) = sys.solve(&p, &self.opts)?;
                self.known.push((g, sys.pack(&p)?));
            }
        }
        Ok(self)
    }

    pub fn ansatz(&self) -> Ansatz {
        self.ansatz
    }

    pub fn model(&self) -> GeometryModel {
        self.model
    }

    /// Couplings solved so far, in increasing order.
    pub fn solved_couplings(&self) -> Vec<f64> {
        self.known.iter().map(|(g, _)| *g).collect()
    }

    fn system(&self, g: f64) -> Result<ResidualSystem> {
        ResidualSystem::new(self.model, g, self.ansatz, self.formulation)
    }

    fn check_admissible(&self, g: f64, p: &CandidateParams) -> Result<()> {
        candidate_density(self.model, g, p)?.check_positive()
    }

    fn insert(&mut self, g: f64, x: Vec<f64>) {
        let i = self.known.partition_point(|(h, _)| *h < g);
        if i < self.known.len() && self.known[i].0 == g {
            self.known[i].1 = x;
        } else {
            self.known.insert(i, (g, x));
        }
    }

    /// Solve at `g`, continuing from the nearest solved coupling.
    pub fn solve_at(&mut self, g: f64) -> Result<CandidateParams> {
        if !g.is_finite() {
            return Err(Error::InvalidInput(format!("coupling g = {g} is not finite")));
        }
        let i = (0..self.known.len())
            .min_by(|&i, &j| (self.known[i].0 - g).abs().total_cmp(&(self.known[j].0 - g).abs()))
            .ok_or_else(|| Error::SeedFailure {
                g,
                reason: "tracker holds no solution".into(),
            })?;
        let (g0, x0) = self.known[i].clone();
        if g0 == g {
            return self.system(g)?.unpack(&x0);
        }
        let dir = (g - g0).signum();
        // the solved point behind the start, for the secant predictor
        let behind = if dir > 0.0 { i.checked_sub(1) } else { Some(i + 1) };
        let mut prev = behind.and_then(|k| self.known.get(k).cloned());
        let mut cur = (g0, x0);
        let mut h = self.max_step.min((g - g0).abs());
        let min_step = self.max_step / 256.0;
        loop {
            let target = if (g - cur.0).abs() <= h { g } else { cur.0 + dir * h };
            let sys = self.system(target)?;
            let predicted = match &prev {
                Some((gp, xp)) if (cur.0 - gp).abs() > 0.0 => {
                    let t = (target - cur.0) / (cur.0 - gp);
                    let x: Vec<f64> = cur.1.iter().zip(xp).map(|(c, p)| c + t * (c - p)).collect();
                    if sys.unpack(&x).is_ok() { x } else { cur.1.clone() }
                }
                _ => cur.1.clone(),
            };
            let attempt = sys
                .unpack(&predicted)
                .and_then(|start| sys.solve(&start, &self.opts))
                .and_then(|(p, _)| self.check_admissible(target, &p).map(|_| p));
            match attempt {
                Ok(p) => {
                    let x = sys.pack(&p)?;
                    self.insert(target, x.clone());
                    if target == g {
                        return Ok(p);
                    }
                    prev = Some(std::mem::replace(&mut cur, (target, x)));
                    h = (2.0 * h).min(self.max_step);
                }
                Err(_) => {
                    h *= 0.5;
                    if h < min_step {
                        return Err(Error::OutOfBranch {
                            branch: self.ansatz.label(),
                            g: target,
                        });
                    }
                }
            }
        }
    }

    /// Solved coupling closest to `to` within the segment from `from` to `to`.
    pub fn branch_end_towards(&self, from: f64, to: f64) -> Option<f64> {
        let (lo, hi) = (from.min(to), from.max(to));
        self.known
            .iter()
            .map(|(g, _)| *g)
            .filter(|g| *g >= lo && *g <= hi)
            .min_by(|a, b| (a - to).abs().total_cmp(&(b - to).abs()))
    }
}

/// Solutions along one branch and, when it ended early, where.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchScan {
    pub model: GeometryModel,
    pub ansatz: Ansatz,
    pub solutions: Vec<EquilibriumSolution>,
    /// Last coupling with an admissible solution, when the branch ended
    /// before `g_to`.
    pub end: Option<f64>,
    pub end_reason: Option<String>,
}

/// Follows the branch of `ansatz` from `g_from` to `g_to` in steps of `step`.
pub fn branch_scan(
    model: GeometryModel,
    ansatz: Ansatz,
    g_from: f64,
    g_to: f64,
    step: f64,
) -> Result<BranchScan> {
    if !(step != 0.0 && step.is_finite()) || (g_to - g_from) * step < 0.0 {
        return Err(Error::InvalidInput(format!(
            "step {step} does not lead from {g_from} to {g_to}"
        )));
    }
    let start = seed(model, ansatz, g_from)?;
    let mut tracker = BranchTracker::new(model, g_from, &start)?;
    tracker.max_step = step.abs().min(0.05);
    let n = ((g_to - g_from) / step + 1e-9).floor() as usize;
    let mut out = BranchScan {
        model,
        ansatz,
        solutions: Vec::with_capacity(n + 1),
        end: None,
        end_reason: None,
    };
    let mut last_good = g_from;
    for k in 0..=n {
        let g = if k == n { g_from + step * n as f64 } else { g_from + step * k as f64 };
        let result = tracker
            .solve_at(g)
            .and_then(|p| EquilibriumSolution::from_candidate(model, g, &p));
        match result {
            Ok(sol) => {
                out.solutions.push(sol);
                last_good = g;
            }
            Err(e) => {
                out.end = Some(last_good);
                out.end_reason = Some(e.to_string());
                break;
            }
        }
    }
    Ok(out)
}
