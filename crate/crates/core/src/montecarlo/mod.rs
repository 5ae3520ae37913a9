//! Metropolis sampling of the finite-N eigenvalue measure `∝ exp(-N² E(Λ))`.

mod chain;
pub mod checkpoint;
mod histogram;

pub use chain::{acceptance_probability, exact_energy, metropolis_sweep, ChainState, SweepStats};
pub use histogram::{empirical_density, BinSpec, Histogram};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EigenvalueConfig, GeometryModel};
use crate::riemann_hilbert::SpectralDensity;

const ADAPT_WINDOW: usize = 10;
const AUDIT_INTERVAL: usize = 1000;
const TARGET_ACCEPTANCE: (f64, f64) = (0.3, 0.5);
const QUANTILE_GRID: usize = 20_001;

#[derive(Debug, Clone, PartialEq)]
pub enum McInit {
    /// Equally spaced on `[-1, 1]`.
    EvenlySpaced,
    /// Quantiles `(i + 1/2)/N` of a density.
    FromDensity(SpectralDensity),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub model: GeometryModel,
    pub g: f64,
    pub n: usize,
    /// Total sweeps including burn-in.
    pub sweeps: usize,
    pub burn_in: usize,
    pub width: f64,
    pub seed: u64,
    pub init: McInit,
    /// Sweeps between recorded samples.
    pub sample_every: usize,
}

impl McConfig {
    pub fn new(model: GeometryModel, g: f64, n: usize, sweeps: usize, seed: u64) -> Self {
        McConfig {
            model,
            g,
            n,
            sweeps,
            burn_in: sweeps / 10,
            width: 0.1,
            seed,
            init: McInit::EvenlySpaced,
            sample_every: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInput(format!("N = {} must be at least 2", self.n)));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidInput(format!("coupling g = {} is not finite", self.g)));
        }
        if self.sweeps <= self.burn_in {
            return Err(Error::InvalidInput(format!(
                "sweeps ({}) must exceed burn-in ({})",
                self.sweeps, self.burn_in
            )));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidInput(format!("proposal width {} must be positive", self.width)));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidInput("sample interval must be positive".into()));
        }
        if let McInit::Explicit(v) = &self.init {
            if v.len() != self.n {
                return Err(Error::InvalidInput(format!(
                    "{} initial eigenvalues given for N = {}",
                    v.len(),
                    self.n
                )));
            }
        }
        Ok(())
    }

    pub fn initial_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.n;
        let mut v = match &self.init {
            McInit::EvenlySpaced => (0..n)
                .map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / n as f64)
                .collect(),
            McInit::FromDensity(d) => density_quantiles(d, n),
            McInit::Explicit(v) => v.clone(),
        };
        if self.model == GeometryModel::Minus && !matches!(self.init, McInit::Explicit(_)) {
            let mean = v.iter().sum::<f64>() / n as f64;
            v.iter_mut().for_each(|x| *x -= mean);
        }
        Ok(v)
    }
}

fn density_quantiles(d: &SpectralDensity, n: usize) -> Vec<f64> {
    let (lo, hi) = (d.lower_edge(), d.upper_edge());
    let h = (hi - lo) / (QUANTILE_GRID - 1) as f64;
    let xs: Vec<f64> = (0..QUANTILE_GRID).map(|i| lo + h * i as f64).collect();
    let mut cdf = vec![0.0; QUANTILE_GRID];
    let mut prev = d.eval(lo);
    for i in 1..QUANTILE_GRID {
        let cur = d.eval(xs[i]);
        cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    let total = cdf[QUANTILE_GRID - 1];
    (0..n)
        .map(|i| {
            let p = total * (i as f64 + 0.5) / n as f64;
            let k = cdf.partition_point(|&c| c < p).clamp(1, QUANTILE_GRID - 1);
            let t = (p - cdf[k - 1]) / (cdf[k] - cdf[k - 1]);
            xs[k - 1] + t * h
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub sweep: usize,
    /// Order parameter `M = P1/N`.
    pub order_parameter: f64,
    pub m2: f64,
    pub energy: f64,
    /// Acceptance over the sweeps since the previous sample.
    pub acceptance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McTrace {
    pub samples: Vec<TraceSample>,
    /// Acceptance over the sampling phase.
    pub acceptance_rate: f64,
    pub final_eigenvalues: Vec<f64>,
    pub final_energy: f64,
    pub final_width: f64,
    /// Largest discrepancy found by the periodic energy audits.
    pub max_energy_drift: f64,
}

impl McTrace {
    pub fn mean_energy(&self) -> f64 {
        mean(self.samples.iter().map(|s| s.energy))
    }

    pub fn mean_order_parameter(&self) -> f64 {
        mean(self.samples.iter().map(|s| s.order_parameter))
    }

    pub fn mean_m2(&self) -> f64 {
        mean(self.samples.iter().map(|s| s.m2))
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    s / c as f64
}

/// Mean and its standard error from `batches` consecutive batch means.
pub fn batch_mean_error(series: &[f64], batches: usize) -> Result<(f64, f64)> {
    if batches < 2 || series.len() < batches {
        return Err(Error::InvalidInput(format!(
            "{} values cannot form {batches} batches",
            series.len()
        )));
    }
    let size = series.len() / batches;
    let means: Vec<f64> = series
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let mu = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Ok((mu, (var / batches as f64).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub trace: McTrace,
    pub histogram: Histogram,
    /// Eigenvalues of every recorded sample, concatenated.
    pub pooled: Vec<f64>,
}

/// Burn-in with width adaptation, then fixed-width sampling.
pub fn run_chain(config: &McConfig) -> Result<McRun> {
    config.validate()?;
    let values = config.initial_eigenvalues()?;
    let eig = EigenvalueConfig::new(values, config.model, config.g)?;
    let mut state = ChainState::new(eig, config.width, ChaCha8Rng::seed_from_u64(config.seed))?;
    let n = config.n as f64;

    let mut window = (0usize, 0usize);
    let mut max_drift = 0.0f64;
    let mut samples = Vec::new();
    let mut pooled = Vec::with_capacity(
        config.n * (config.sweeps - config.burn_in).div_ceil(config.sample_every),
    );
    let mut sampling = (0usize, 0usize);
    let mut since_sample = (0usize, 0usize);

    for sweep in 1..=config.sweeps {
        let st = metropolis_sweep(&mut state);
        if sweep <= config.burn_in {
            window.0 += st.accepted;
            window.1 += st.attempts;
            if sweep % ADAPT_WINDOW == 0 {
                let rate = window.0 as f64 / window.1 as f64;
                if rate > TARGET_ACCEPTANCE.1 {
                    state.set_width(state.width() * 1.1);
                } else if rate < TARGET_ACCEPTANCE.0 {
                    state.set_width(state.width() * 0.9);
                }
                window = (0, 0);
            }
        } else {
            sampling.0 += st.accepted;
            sampling.1 += st.attempts;
            since_sample.0 += st.accepted;
            since_sample.1 += st.attempts;
        }
        if sweep % AUDIT_INTERVAL == 0 {
            max_drift = max_drift.max(state.audit()?);
        }
        if sweep > config.burn_in && (sweep - config.burn_in) % config.sample_every == 0 {
            let s = state.sums();
            samples.push(TraceSample {
                sweep,
                order_parameter: s.p1 / n,
                m2: s.p2 / n,
                energy: state.energy(),
                acceptance: since_sample.0 as f64 / since_sample.1 as f64,
            });
            since_sample = (0, 0);
            pooled.extend_from_slice(state.values());
        }
    }
    max_drift = max_drift.max(state.audit()?);
    if pooled.is_empty() {
        pooled.extend_from_slice(state.values());
    }
    let histogram = empirical_density(&pooled, BinSpec::default())?;
    Ok(McRun {
        trace: McTrace {
            samples,
            acceptance_rate: sampling.0 as f64 / sampling.1 as f64,
            final_eigenvalues: state.values().to_vec(),
            final_energy: state.energy(),
            final_width: state.width(),
            max_energy_drift: max_drift,
        },
        histogram,
        pooled,
    })
}
