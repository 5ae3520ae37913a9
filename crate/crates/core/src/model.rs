//! Ensemble labels, the quartic action on eigenvalues and the finite-N
//! Coulomb-gas energy.
//!
//! For a hermitian `H` with eigenvalues `λ_1..λ_N` the action of the (1,0)
//! and (0,1) ensembles depends on the spectrum only through the power sums
//! `P_k = Σ λ_i^k`:
//!
//! ```text
//! S±(Λ) = (2/N)(P4 + g P2) ± (2g/N²) P1² ± (8/N²) P1 P3 + (6/N²) P2²
//! ```
//!
//! and the joint eigenvalue density is `∝ exp(-N² E(Λ))` with
//! `E = S - (2/N²) Σ_{i<j} log|λ_i - λ_j|`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which matrix ensemble is being described.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeometryModel {
    /// (1,0) geometry, `D = {H, ·}`.
    Plus,
    /// (0,1) geometry, `D = [H, ·]`, traceless `H`.
    Minus,
    /// GUE with potential `λ²/2`; only meaningful for the Monte-Carlo sampler.
    GaussianBaseline,
}

impl GeometryModel {
    pub fn label(self) -> &'static str {
        match self {
            GeometryModel::Plus => "10",
            GeometryModel::Minus => "01",
            GeometryModel::GaussianBaseline => "gue",
        }
    }

    /// Errors unless the model is one of the two geometries.
    pub fn require_geometry(self) -> Result<()> {
        match self {
            GeometryModel::GaussianBaseline => Err(Error::InvalidInput(
                "the Gaussian baseline is only available for Monte-Carlo validation".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GeometryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for GeometryModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "10" | "(1,0)" | "plus" | "+" => Ok(GeometryModel::Plus),
            "01" | "(0,1)" | "minus" | "-" => Ok(GeometryModel::Minus),
            "gue" | "gaussian" => Ok(GeometryModel::GaussianBaseline),
            other => Err(Error::InvalidInput(format!("unknown model '{other}'"))),
        }
    }
}

/// Spectral moments `m_n = ∫ λ^n ρ(λ) dλ` of a candidate equilibrium measure.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Moments {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m4: Option<f64>,
}

impl Moments {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Self {
        Moments {
            m1,
            m2,
            m3,
            m4: None,
        }
    }

    pub fn symmetric(m2: f64) -> Self {
        Moments::new(0.0, m2, 0.0)
    }

    /// Moments of the mirrored measure `ρ(-λ)`.
    pub fn mirrored(self) -> Self {
        Moments {
            m1: -self.m1,
            m2: self.m2,
            m3: -self.m3,
            m4: self.m4,
        }
    }

    /// `m2 ≥ 0` and `m2 ≥ m1²`, up to `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        self.m2 >= -tol && self.m2 - self.m1 * self.m1 >= -tol
    }
}

/// Power sums `P_k = Σ λ_i^k`, `k = 1..4`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PowerSums {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl PowerSums {
    pub fn of(values: &[f64]) -> Self {
        values.iter().fold(PowerSums::default(), |mut s, &x| {
            let x2 = x * x;
            s.p1 += x;
            s.p2 += x2;
            s.p3 += x2 * x;
            s.p4 += x2 * x2;
            s
        })
    }
}

/// Replace the contribution of `old` by that of `new` in every power sum.
pub fn power_sum_delta(sums: PowerSums, old: f64, new: f64) -> PowerSums {
    if old == new {
        return sums;
    }
    let (o2, n2) = (old * old, new * new);
    PowerSums {
        p1: sums.p1 - old + new,
        p2: sums.p2 - o2 + n2,
        p3: sums.p3 - o2 * old + n2 * new,
        p4: sums.p4 - o2 * o2 + n2 * n2,
    }
}

/// Action expressed through power sums of `n` eigenvalues.
pub fn action_from_sums(model: GeometryModel, g: f64, n: usize, s: &PowerSums) -> f64 {
    let nf = n as f64;
    let n2 = nf * nf;
    match model {
        GeometryModel::GaussianBaseline => s.p2 / (2.0 * nf),
        GeometryModel::Plus => {
            (2.0 / nf) * (s.p4 + g * s.p2)
                + (2.0 * g / n2) * s.p1 * s.p1
                + (8.0 / n2) * s.p1 * s.p3
                + (6.0 / n2) * s.p2 * s.p2
        }
        GeometryModel::Minus => {
            (2.0 / nf) * (s.p4 + g * s.p2) - (2.0 * g / n2) * s.p1 * s.p1
                - (8.0 / n2) * s.p1 * s.p3
                + (6.0 / n2) * s.p2 * s.p2
        }
    }
}

/// Eigenvalues of one sample together with the ensemble they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueConfig {
    values: Vec<f64>,
    model: GeometryModel,
    g: f64,
}

impl EigenvalueConfig {
    pub fn new(values: Vec<f64>, model: GeometryModel, g: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !g.is_finite() {
            return Err(Error::InvalidInput(format!("coupling g = {g} is not finite")));
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite eigenvalue {x}")));
        }
        if model == GeometryModel::Minus {
            let sum: f64 = values.iter().sum();
            let tolerance = 1e-12 * values.len() as f64;
            if sum.abs() > tolerance {
                return Err(Error::TraceConstraint {
                    sum: sum.abs(),
                    tolerance,
                });
            }
        }
        Ok(EigenvalueConfig { values, model, g })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn model(&self) -> GeometryModel {
        self.model
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `S±_g(Λ)`, or `P2/(2N)` for the Gaussian baseline.
pub fn action_of_eigenvalues(config: &EigenvalueConfig) -> f64 {
    let sums = PowerSums::of(config.values());
    action_from_sums(config.model(), config.g(), config.len(), &sums)
}

/// `Σ_{i<j} log|λ_i - λ_j|`; fails on a coincident pair.
pub fn log_vandermonde(values: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let d = (values[i] - values[j]).abs();
            if d == 0.0 {
                return Err(Error::DegenerateConfiguration { i, j });
            }
            total += d.ln();
        }
    }
    Ok(total)
}

/// Coulomb-gas energy `E(Λ) = S(Λ) - (2/N²) Σ_{i<j} log|λ_i - λ_j|`.
pub fn coulomb_energy(config: &EigenvalueConfig) -> Result<f64> {
    let n = config.len() as f64;
    let logs = log_vandermonde(config.values())?;
    Ok(action_of_eigenvalues(config) - 2.0 / (n * n) * logs)
}
