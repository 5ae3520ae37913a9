//! Free energy of candidate equilibria, selection of the minimizer and
//! location of critical couplings.

use serde::{Deserialize, Serialize};

use crate::closed_form::G_SYMMETRIC_CRITICAL;
use crate::error::{Error, Result};
use crate::model::{GeometryModel, Moments};
use crate::riemann_hilbert::{
    build_one_cut_density, build_two_cut_density, SpectralDensity, Support,
};
use crate::self_consistent::{effective_potential, seed, Ansatz, BranchTracker, CandidateParams};

/// Largest `|E1 - E2|` still reported as a degenerate (critical) pair.
pub const DEGENERACY_TOL: f64 = 1e-9;
const CLOSURE_TOL: f64 = 1e-9;

/// A converged candidate together with its density, Lagrange multiplier and free energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub model: GeometryModel,
    pub g: f64,
    pub ansatz: Ansatz,
    pub support: Support,
    /// `m1..m3` of the candidate and `m4` of its density.
    pub moments: Moments,
    pub density: SpectralDensity,
    pub lagrange: f64,
    pub free_energy: f64,
}

impl EquilibriumSolution {
    /// Builds and screens the density of `candidate` and evaluates `ℓ` and `E`.
    pub fn from_candidate(model: GeometryModel, g: f64, candidate: &CandidateParams) -> Result<Self> {
        let candidate = candidate.canonical();
        let density = candidate_density(model, g, &candidate)?;
        density.check_admissible()?;
        let mut moments = candidate.moments;
        moments.m4 = Some(density.moment(4));
        let probe = probe_point(&density);
        let lagrange = lagrange_at(model, g, &density, &moments, probe)?;
        let free_energy = free_energy_from_lagrange(g, lagrange, &moments);
        if !free_energy.is_finite() {
            return Err(Error::NonAdmissibleDensity(format!(
                "free energy is not finite at g = {g}"
            )));
        }
        Ok(EquilibriumSolution {
            model,
            g,
            ansatz: candidate.ansatz,
            support: candidate.support,
            moments,
            density,
            lagrange,
            free_energy,
        })
    }

    pub fn candidate(&self) -> CandidateParams {
        let mut moments = self.moments;
        moments.m4 = None;
        CandidateParams {
            ansatz: self.ansatz,
            support: self.support,
            moments,
        }
    }

    /// Largest difference between the candidate moments `m1..m3` and the
    /// quadrature moments of its density.
    pub fn closure_error(&self) -> f64 {
        let m = self.moments;
        [(1, m.m1), (2, m.m2), (3, m.m3)]
            .iter()
            .map(|&(n, v)| (self.density.moment(n) - v).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_closed(&self) -> bool {
        self.closure_error() < CLOSURE_TOL
    }

    /// Mirror solution `ρ(-λ)`.
    pub fn mirrored(&self) -> Self {
        let moments = Moments {
            m4: self.moments.m4,
            ..self.moments.mirrored()
        };
        let density = self.density.mirrored();
        let probe = probe_point(&density);
        let lagrange = lagrange_at(self.model, self.g, &density, &moments, probe)
            .unwrap_or(self.lagrange);
        EquilibriumSolution {
            support: self.support.mirrored(),
            moments,
            free_energy: free_energy_from_lagrange(self.g, lagrange, &moments),
            lagrange,
            density,
            ..self.clone()
        }
    }
}

/// Density of the effective potential of `candidate` on its support.
pub fn candidate_density(
    model: GeometryModel,
    g: f64,
    candidate: &CandidateParams,
) -> Result<SpectralDensity> {
    let w = effective_potential(model, g, &candidate.moments)?;
    match &candidate.support {
        Support::OneCut(s) => build_one_cut_density(&w, s),
        Support::TwoCut(s) => build_two_cut_density(&w, s),
    }
}

/// `L(x) = ∫ log(1/|x - λ|) ρ(λ) dλ`.
pub fn log_potential(density: &SpectralDensity, x: f64) -> f64 {
    density.integrate_split(Some(x), |l| {
        let d = (x - l).abs();
        if d == 0.0 {
            0.0
        } else {
            -d.ln()
        }
    })
}

/// Polynomial `2∫U(λ0, λ')ρ(λ')dλ'` of the two-trace interaction.
fn interaction_polynomial(model: GeometryModel, g: f64, m: &Moments, x: f64) -> f64 {
    match model {
        GeometryModel::Plus => {
            2.0 * (2.0 * g * x * m.m1 + 4.0 * x * m.m3 + 4.0 * x.powi(3) * m.m1 + 6.0 * x * x * m.m2)
        }
        GeometryModel::Minus => 12.0 * x * x * m.m2,
        GeometryModel::GaussianBaseline => 0.0,
    }
}

fn bare_potential(g: f64, x: f64) -> f64 {
    2.0 * x.powi(4) + 2.0 * g * x * x
}

fn lagrange_at(
    model: GeometryModel,
    g: f64,
    density: &SpectralDensity,
    m: &Moments,
    x: f64,
) -> Result<f64> {
    model.require_geometry()?;
    let inside = density.cuts().iter().any(|c| {
        let margin = 1e-3 * c.width();
        x >= c.lo + margin && x <= c.hi - margin
    });
    if !inside {
        return Err(Error::Precondition(format!(
            "λ0 = {x} is not inside a cut (at least 1e-3 of its width from the edges)"
        )));
    }
    Ok(bare_potential(g, x) + interaction_polynomial(model, g, m, x) + 2.0 * log_potential(density, x))
}

/// Constant value of `V + 2∫Uρ + 2∫log(1/|·-λ'|)ρ` on the support, probed at `λ0`.
pub fn lagrange_multiplier(
    model: GeometryModel,
    g: f64,
    candidate: &CandidateParams,
    lambda0: f64,
) -> Result<f64> {
    let density = candidate_density(model, g, candidate)?;
    lagrange_at(model, g, &density, &candidate.moments, lambda0)
}

/// `E = ℓ/2 + (2 m4 + 2 g m2)/2`.
fn free_energy_from_lagrange(g: f64, lagrange: f64, m: &Moments) -> f64 {
    let m4 = m.m4.unwrap_or(f64::NAN);
    0.5 * lagrange + 0.5 * (2.0 * m4 + 2.0 * g * m.m2)
}

/// Free energy of a converged candidate.
pub fn free_energy_of(model: GeometryModel, g: f64, candidate: &CandidateParams) -> Result<f64> {
    Ok(EquilibriumSolution::from_candidate(model, g, candidate)?.free_energy)
}

/// Interior maximum of the density on the heaviest cut.
fn probe_point(density: &SpectralDensity) -> f64 {
    let k = (0..density.cuts().len())
        .max_by(|&i, &j| density.cut_mass(i).total_cmp(&density.cut_mass(j)))
        .unwrap_or(0);
    density.interior_maximum(k)
}

/// Probe points spread over every cut, clear of the edges.
pub fn probe_points(density: &SpectralDensity) -> Vec<f64> {
    let mut points = Vec::new();
    for (k, c) in density.cuts().iter().enumerate() {
        points.push(density.interior_maximum(k));
        for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
            points.push(c.lo + t * c.width());
        }
    }
    points
}

/// `max ℓ - min ℓ` over [`probe_points`].
pub fn lagrange_spread(solution: &EquilibriumSolution) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in probe_points(&solution.density) {
        let l = lagrange_at(solution.model, solution.g, &solution.density, &solution.moments, x)?;
        lo = lo.min(l);
        hi = hi.max(l);
    }
    Ok(hi - lo)
}

/// `∫V ρ + ∫∫U ρρ + ∫∫log(1/|λ-λ'|) ρρ`, with the logarithmic double integral
/// taken as nested quadrature. Independent of the Lagrange-multiplier route.
pub fn direct_free_energy(solution: &EquilibriumSolution) -> f64 {
    let d = &solution.density;
    let m = &solution.moments;
    let g = solution.g;
    let v1 = d.integrate(|x| bare_potential(g, x));
    let uq = match solution.model {
        GeometryModel::Plus => 2.0 * g * m.m1 * m.m1 + 8.0 * m.m1 * m.m3 + 6.0 * m.m2 * m.m2,
        GeometryModel::Minus => 6.0 * m.m2 * m.m2,
        GeometryModel::GaussianBaseline => 0.0,
    };
    let lq = d.integrate(|x| log_potential(d, x));
    v1 + uq + lq
}

/// Symmetrized mean density `(ρ(λ) + ρ(-λ))/2` of a broken-symmetry solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanDensity {
    pub components: Vec<SpectralDensity>,
}

impl MeanDensity {
    pub fn symmetrized(density: &SpectralDensity) -> Self {
        MeanDensity {
            components: vec![density.clone(), density.mirrored()],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.components.iter().map(|d| d.eval(x)).sum::<f64>() / self.components.len() as f64
    }

    pub fn moment(&self, n: u32) -> f64 {
        self.components.iter().map(|d| d.moment(n)).sum::<f64>() / self.components.len() as f64
    }
}

/// Outcome of comparing the candidates at one coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub winner: EquilibriumSolution,
    /// All candidates in increasing order of free energy.
    pub ranked: Vec<EquilibriumSolution>,
    /// The two lowest free energies agree within [`DEGENERACY_TOL`].
    pub degenerate: bool,
    pub mean_density: Option<MeanDensity>,
}

/// Picks the candidate of least free energy.
pub fn select_equilibrium(
    model: GeometryModel,
    g: f64,
    candidates: Vec<EquilibriumSolution>,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(c) = candidates.iter().find(|c| c.model != model || c.g != g) {
        return Err(Error::InvalidInput(format!(
            "candidate for ({}, g = {}) in a selection at ({model}, g = {g})",
            c.model, c.g
        )));
    }
    let mut ranked = candidates;
    ranked.sort_by(|a, b| a.free_energy.total_cmp(&b.free_energy));
    let degenerate = ranked.len() > 1
        && (ranked[1].free_energy - ranked[0].free_energy).abs() < DEGENERACY_TOL;
    let winner = ranked[0].clone();
    let mean_density = (winner.moments.m1.abs() > 1e-12).then(|| MeanDensity::symmetrized(&winner.density));
    Ok(Selection {
        winner,
        ranked,
        degenerate,
        mean_density,
    })
}

/// Candidate energies and the selected ansatz at one coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub g: f64,
    pub chosen: Ansatz,
    pub degenerate: bool,
    pub energies: Vec<(Ansatz, f64)>,
    pub moments: Moments,
    pub support: Support,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub model: GeometryModel,
    pub points: Vec<PhasePoint>,
    /// Couplings where the selected ansatz changes, refined by bisection.
    pub critical: Vec<f64>,
}

/// Candidate solutions available at `g`. The broken-symmetry branch is
/// followed by `tracker` when one is supplied.
pub fn candidates_at(
    model: GeometryModel,
    g: f64,
    tracker: Option<&mut BranchTracker>,
) -> Vec<EquilibriumSolution> {
    let mut out = Vec::new();
    for ansatz in [Ansatz::Sym1Cut, Ansatz::Sym2Cut] {
        if let Ok(p) = seed(model, ansatz, g) {
            if let Ok(sol) = EquilibriumSolution::from_candidate(model, g, &p) {
                out.push(sol);
            }
        }
    }
    if let Some(tracker) = tracker {
        if let Ok(p) = tracker.solve_at(g) {
            if let Ok(sol) = EquilibriumSolution::from_candidate(model, g, &p) {
                out.push(sol);
            }
        }
    }
    out
}

/// Solution of a single ansatz at `g`; the broken-symmetry branch is reached
/// by continuation from its anchor.
pub fn solve_ansatz(model: GeometryModel, g: f64, ansatz: Ansatz) -> Result<EquilibriumSolution> {
    model.require_geometry()?;
    let out_of_branch = Error::OutOfBranch {
        branch: ansatz.label(),
        g,
    };
    let candidate = match (model, ansatz) {
        (GeometryModel::Plus, Ansatz::Asym2Cut) => BranchTracker::broken_branch()?.solve_at(g)?,
        (_, Ansatz::Sym1Cut) if g < G_SYMMETRIC_CRITICAL => return Err(out_of_branch),
        (_, Ansatz::Sym2Cut) if g >= G_SYMMETRIC_CRITICAL => return Err(out_of_branch),
        (GeometryModel::Minus, Ansatz::Asym1Cut | Ansatz::Asym2Cut) => {
            return Err(Error::InvalidInput(format!(
                "the (0,1) model has no {} solutions",
                ansatz.label()
            )))
        }
        _ => seed(model, ansatz, g)?,
    };
    EquilibriumSolution::from_candidate(model, g, &candidate)
}

/// Free-energy comparison over a grid of couplings.
pub fn phase_report(model: GeometryModel, grid: &[f64]) -> Result<PhaseReport> {
    model.require_geometry()?;
    let mut tracker = match model {
        GeometryModel::Plus => BranchTracker::broken_branch().ok(),
        _ => None,
    };
    let mut points = Vec::new();
    for &g in grid {
        let candidates = candidates_at(model, g, tracker.as_mut());
        let Ok(sel) = select_equilibrium(model, g, candidates) else {
            continue;
        };
        points.push(PhasePoint {
            g,
            chosen: sel.winner.ansatz,
            degenerate: sel.degenerate,
            energies: sel.ranked.iter().map(|s| (s.ansatz, s.free_energy)).collect(),
            moments: sel.winner.moments,
            support: sel.winner.support,
        });
    }
    let mut critical = Vec::new();
    for w in points.windows(2) {
        if w[0].chosen != w[1].chosen {
            let estimate = match model {
                GeometryModel::Minus => G_SYMMETRIC_CRITICAL,
                _ => locate_critical(model, w[0].g.min(w[1].g), w[0].g.max(w[1].g))
                    .unwrap_or(0.5 * (w[0].g + w[1].g)),
            };
            critical.push(estimate);
        }
    }
    Ok(PhaseReport {
        model,
        points,
        critical,
    })
}

/// `E(Sym1Cut) - E(Asym2Cut)` at `g`.
fn plus_energy_gap(g: f64, tracker: &mut BranchTracker) -> Result<f64> {
    let sym = EquilibriumSolution::from_candidate(
        GeometryModel::Plus,
        g,
        &seed(GeometryModel::Plus, Ansatz::Sym1Cut, g)?,
    )?;
    let broken = EquilibriumSolution::from_candidate(GeometryModel::Plus, g, &tracker.solve_at(g)?)?;
    Ok(sym.free_energy - broken.free_energy)
}

/// Bracket searched when none is given: around `-4√2` for (0,1) and around
/// the (1,0) crossing, inside the range where the broken branch exists.
pub fn default_bracket(model: GeometryModel) -> (f64, f64) {
    match model {
        GeometryModel::Plus => (-3.4, -3.0),
        _ => (-8.0, -4.0),
    }
}

/// Critical coupling in `[g_lo, g_hi]`.
///
/// For (1,0) this bisects the free-energy difference between the symmetric
/// 1-cut and the broken-symmetry 2-cut branches to `|Δg| < 1e-4`. When the
/// broken branch ends inside the bracket, the bracket is cut back to its last
/// solvable coupling. For (0,1) the transition is at `-4√2`.
pub fn locate_critical(model: GeometryModel, g_lo: f64, g_hi: f64) -> Result<f64> {
    model.require_geometry()?;
    if !(g_lo < g_hi) {
        return Err(Error::InvalidInput(format!(
            "bracket [{g_lo}, {g_hi}] is empty"
        )));
    }
    if model == GeometryModel::Minus {
        if g_lo <= G_SYMMETRIC_CRITICAL && G_SYMMETRIC_CRITICAL <= g_hi {
            return Ok(G_SYMMETRIC_CRITICAL);
        }
        return Err(Error::NoSignChange {
            lo: g_lo,
            hi: g_hi,
            reason: "the (0,1) branch point -4√2 lies outside the bracket".into(),
        });
    }
    let no_change = |reason: String| Error::NoSignChange {
        lo: g_lo,
        hi: g_hi,
        reason,
    };
    let mut tracker = BranchTracker::broken_branch()
        .map_err(|e| no_change(format!("broken branch unavailable: {e}")))?;
    let lo_gap = plus_energy_gap(g_lo, &mut tracker)
        .map_err(|e| no_change(format!("no candidate pair at g = {g_lo}: {e}")))?;
    let (mut hi, hi_gap) = match plus_energy_gap(g_hi, &mut tracker) {
        Ok(d) => (g_hi, d),
        Err(_) => {
            let end = tracker
                .branch_end_towards(g_lo, g_hi)
                .ok_or_else(|| no_change("broken branch absent in the bracket".into()))?;
            (end, plus_energy_gap(end, &mut tracker)?)
        }
    };
    if lo_gap.signum() == hi_gap.signum() {
        return Err(no_change(format!(
            "ΔE = {lo_gap:e} at {g_lo} and {hi_gap:e} at {hi}"
        )));
    }
    let mut lo = g_lo;
    while hi - lo >= 1e-4 {
        let mid = 0.5 * (lo + hi);
        let d = plus_energy_gap(mid, &mut tracker)?;
        if d.signum() == lo_gap.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{solve_one_cut_01, solve_two_cut_01};

    #[test]
    fn semicircle_log_potential() {
        // ∫ log|λ| ρ_sc = -1/2, so ℓ = λ0²/2 + 2 L(λ0) equals 1 at the origin
        let sc = SpectralDensity::semicircle();
        assert!((2.0 * log_potential(&sc, 0.0) - 1.0).abs() < 1e-12, "{}", 2.0 * log_potential(&sc, 0.0));
        for x in [-1.3, 0.4, 1.9] {
            let l = 0.5 * x * x + 2.0 * log_potential(&sc, x);
            assert!((l - 1.0).abs() < 1e-10, "{x}: {l}");
        }
    }

    #[test]
    fn semicircle_log_potential_against_midpoint_sum() {
        let sc = SpectralDensity::semicircle();
        let n = 100_000;
        let h = 4.0 / n as f64;
        let x0 = 0.3;
        let oracle: f64 = (0..n)
            .map(|i| {
                let l = -2.0 + (i as f64 + 0.5) * h;
                -(x0 - l).abs().ln() * sc.eval(l) * h
            })
            .sum();
        assert!((log_potential(&sc, x0) - oracle).abs() < 1e-4);
    }

    #[test]
    fn lagrange_constant_on_two_cut() {
        let (s, _) = solve_two_cut_01(-7.0).unwrap();
        let p = CandidateParams::sym_two_cut(s.a, s.b, s.m2).unwrap();
        let sol = EquilibriumSolution::from_candidate(GeometryModel::Minus, -7.0, &p).unwrap();
        let d = &sol.density;
        let l0 = lagrange_multiplier(GeometryModel::Minus, -7.0, &p, d.interior_maximum(0)).unwrap();
        let l1 = lagrange_multiplier(GeometryModel::Minus, -7.0, &p, d.interior_maximum(1)).unwrap();
        assert!((l0 - l1).abs() < 1e-6);
        assert!(lagrange_spread(&sol).unwrap() < 1e-6);
        assert!(matches!(
            lagrange_multiplier(GeometryModel::Minus, -7.0, &p, 0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn routes_agree_for_one_cut() {
        let (s, _) = solve_one_cut_01(0.0).unwrap();
        let p = CandidateParams::sym_one_cut(s.b, s.m2).unwrap();
        let sol = EquilibriumSolution::from_candidate(GeometryModel::Minus, 0.0, &p).unwrap();
        assert!((direct_free_energy(&sol) - sol.free_energy).abs() < 1e-6);
        assert!(sol.is_closed());
    }

    #[test]
    fn branches_degenerate_at_boundary() {
        let g = G_SYMMETRIC_CRITICAL;
        let (s1, _) = solve_one_cut_01(g).unwrap();
        let e1 = free_energy_of(GeometryModel::Minus, g, &CandidateParams::sym_one_cut(s1.b, s1.m2).unwrap()).unwrap();
        // just below the boundary the gap is open; E is continuous
        let g2 = g - 1e-10;
        let (s2, _) = solve_two_cut_01(g2).unwrap();
        let e2 = free_energy_of(GeometryModel::Minus, g2, &CandidateParams::sym_two_cut(s2.a, s2.b, s2.m2).unwrap()).unwrap();
        assert!((e1 - e2).abs() < 1e-8, "{e1} {e2}");
    }

    #[test]
    fn selection_rules() {
        assert!(matches!(
            select_equilibrium(GeometryModel::Minus, 0.0, vec![]),
            Err(Error::EmptyInput)
        ));
        let (s, _) = solve_one_cut_01(-1.0).unwrap();
        let p = CandidateParams::sym_one_cut(s.b, s.m2).unwrap();
        let sol = EquilibriumSolution::from_candidate(GeometryModel::Minus, -1.0, &p).unwrap();
        let sel = select_equilibrium(GeometryModel::Minus, -1.0, vec![sol.clone()]).unwrap();
        assert_eq!(sel.winner, sol);
        assert!(!sel.degenerate && sel.mean_density.is_none());
        let sel = select_equilibrium(GeometryModel::Minus, -1.0, vec![sol.clone(), sol]).unwrap();
        assert!(sel.degenerate);
    }

    #[test]
    fn minus_critical_point() {
        let g = locate_critical(GeometryModel::Minus, -8.0, -3.0).unwrap();
        assert_eq!(g, -4.0 * 2f64.sqrt());
    }
}
