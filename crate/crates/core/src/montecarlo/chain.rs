use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{
    action_from_sums, coulomb_energy, EigenvalueConfig, GeometryModel, PowerSums,
};

/// Ratios are multiplied in blocks of this size before taking one logarithm.
const LOG_BLOCK: usize = 8;

/// Mutable state of one Metropolis chain.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub(crate) model: GeometryModel,
    pub(crate) g: f64,
    pub(crate) values: Vec<f64>,
    pub(crate) sums: PowerSums,
    /// Running value of `E(Λ)`, updated by the accepted `ΔE`.
    pub(crate) energy: f64,
    pub(crate) width: f64,
    pub(crate) rng: ChaCha8Rng,
}

impl ChainState {
    pub fn new(config: EigenvalueConfig, width: f64, rng: ChaCha8Rng) -> Result<Self> {
        if config.len() < 2 {
            return Err(Error::InvalidInput("a chain needs at least two eigenvalues".into()));
        }
        if !(width >= 0.0 && width.is_finite()) {
            return Err(Error::InvalidInput(format!("proposal width {width} is invalid")));
        }
        let energy = coulomb_energy(&config)?;
        let model = config.model();
        let g = config.g();
        let values = config.values().to_vec();
        Ok(ChainState {
            model,
            g,
            sums: PowerSums::of(&values),
            values,
            energy,
            width,
            rng,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn sums(&self) -> PowerSums {
        self.sums
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn set_width(&mut self, width: f64) {
        self.width = width;
    }

    fn n(&self) -> usize {
        self.values.len()
    }

    /// Change of `E` when eigenvalue `i` moves to `y`, or `None` if `y`
    /// coincides with another eigenvalue.
    pub fn single_move_delta(&self, i: usize, y: f64) -> Option<f64> {
        let x = self.values[i];
        let mut new_sums = self.sums;
        shift_sums(&mut new_sums, x, y);
        let ds = action_delta(self.model, self.g, self.n(), &self.sums, &new_sums);
        let logs = log_ratio_sum(&self.values, y, x, |j| j == i)?;
        let nf = self.n() as f64;
        Some(ds - 2.0 / (nf * nf) * logs)
    }

    /// Change of `E` for the trace-preserving move `(λ_i + δ, λ_j - δ)`.
    pub fn pair_move_delta(&self, i: usize, j: usize, delta: f64) -> Option<f64> {
        let (xi, xj) = (self.values[i], self.values[j]);
        let (yi, yj) = (xi + delta, xj - delta);
        let mut new_sums = self.sums;
        shift_sums(&mut new_sums, xi, yi);
        shift_sums(&mut new_sums, xj, yj);
        let ds = action_delta(self.model, self.g, self.n(), &self.sums, &new_sums);
        let skip = |k: usize| k == i || k == j;
        let li = log_ratio_sum(&self.values, yi, xi, skip)?;
        let lj = log_ratio_sum(&self.values, yj, xj, skip)?;
        let dnew = (yi - yj).abs();
        if dnew == 0.0 {
            return None;
        }
        let pair = (dnew / (xi - xj).abs()).ln();
        let nf = self.n() as f64;
        Some(ds - 2.0 / (nf * nf) * (li + lj + pair))
    }

    fn apply_single(&mut self, i: usize, y: f64, delta_e: f64) {
        let x = self.values[i];
        shift_sums(&mut self.sums, x, y);
        self.values[i] = y;
        self.energy += delta_e;
    }

    fn apply_pair(&mut self, i: usize, j: usize, delta: f64, delta_e: f64) {
        let (xi, xj) = (self.values[i], self.values[j]);
        shift_sums(&mut self.sums, xi, xi + delta);
        shift_sums(&mut self.sums, xj, xj - delta);
        self.values[i] = xi + delta;
        self.values[j] = xj - delta;
        self.energy += delta_e;
    }

    /// Recomputes power sums and energy from scratch and returns the drift
    /// of the running energy.
    pub fn audit(&mut self) -> Result<f64> {
        if self.model == GeometryModel::Minus {
            let mean = self.values.iter().sum::<f64>() / self.n() as f64;
            for v in &mut self.values {
                *v -= mean;
            }
        }
        let config = EigenvalueConfig::new(self.values.clone(), self.model, self.g)?;
        let exact = coulomb_energy(&config)?;
        let drift = (exact - self.energy).abs();
        self.sums = PowerSums::of(&self.values);
        self.energy = exact;
        Ok(drift)
    }
}

fn shift_sums(s: &mut PowerSums, old: f64, new: f64) {
    let (o2, n2) = (old * old, new * new);
    s.p1 += new - old;
    s.p2 += n2 - o2;
    s.p3 += n2 * new - o2 * old;
    s.p4 += n2 * n2 - o2 * o2;
}

/// `S(new) - S(old)` without subtracting two O(1) totals.
fn action_delta(model: GeometryModel, g: f64, n: usize, old: &PowerSums, new: &PowerSums) -> f64 {
    let nf = n as f64;
    let n2 = nf * nf;
    let d1 = new.p1 - old.p1;
    let d2 = new.p2 - old.p2;
    let d3 = new.p3 - old.p3;
    let d4 = new.p4 - old.p4;
    match model {
        GeometryModel::GaussianBaseline => d2 / (2.0 * nf),
        GeometryModel::Plus | GeometryModel::Minus => {
            let sign = if model == GeometryModel::Plus { 1.0 } else { -1.0 };
            let p1sq = d1 * (2.0 * old.p1 + d1);
            let p1p3 = d1 * old.p3 + old.p1 * d3 + d1 * d3;
            let p2sq = d2 * (2.0 * old.p2 + d2);
            (2.0 / nf) * (d4 + g * d2)
                + sign * ((2.0 * g / n2) * p1sq + (8.0 / n2) * p1p3)
                + (6.0 / n2) * p2sq
        }
    }
}

/// `Σ_k log(|y - λ_k| / |x - λ_k|)` over the indices not skipped.
fn log_ratio_sum(values: &[f64], y: f64, x: f64, skip: impl Fn(usize) -> bool) -> Option<f64> {
    let mut total = 0.0;
    let mut product = 1.0;
    let mut count = 0;
    for (k, &v) in values.iter().enumerate() {
        if skip(k) {
            continue;
        }
        let num = (y - v).abs();
        if num == 0.0 {
            return None;
        }
        product *= num / (x - v).abs();
        count += 1;
        if count == LOG_BLOCK {
            total += product.ln();
            product = 1.0;
            count = 0;
        }
    }
    Some(total + product.ln())
}

/// `min(1, exp(-N² ΔE))`.
pub fn acceptance_probability(n: usize, delta_e: f64) -> f64 {
    let nf = n as f64;
    (-nf * nf * delta_e).exp().min(1.0)
}

/// Result of one sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStats {
    pub attempts: usize,
    pub accepted: usize,
}

/// `N` proposals: single-eigenvalue moves for the (1,0) and Gaussian
/// ensembles, trace-preserving pair moves for (0,1).
pub fn metropolis_sweep(state: &mut ChainState) -> SweepStats {
    let n = state.n();
    let nf2 = (n * n) as f64;
    let mut accepted = 0;
    for step in 0..n {
        let z: f64 = state.rng.sample(StandardNormal);
        let delta = state.width * z;
        let u: f64 = state.rng.random();
        match state.model {
            GeometryModel::Minus => {
                let i = state.rng.random_range(0..n);
                let mut j = state.rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                if let Some(de) = state.pair_move_delta(i, j, delta) {
                    if u < (-nf2 * de).exp() {
                        state.apply_pair(i, j, delta, de);
                        accepted += 1;
                    }
                }
            }
            _ => {
                let y = state.values[step] + delta;
                if let Some(de) = state.single_move_delta(step, y) {
                    if u < (-nf2 * de).exp() {
                        state.apply_single(step, y, de);
                        accepted += 1;
                    }
                }
            }
        }
    }
    SweepStats {
        attempts: n,
        accepted,
    }
}

/// Energy recomputed from scratch for the current eigenvalues.
pub fn exact_energy(state: &ChainState) -> Result<f64> {
    let sums = PowerSums::of(&state.values);
    let action = action_from_sums(state.model, state.g, state.n(), &sums);
    let logs = crate::model::log_vandermonde(&state.values)?;
    let nf = state.n() as f64;
    Ok(action - 2.0 / (nf * nf) * logs)
}
