//! Spectra of `D₊ = {H, ·}` and `D₋ = [H, ·]`, whose eigenvalues are
//! `λ_m + λ_n` and `λ_m - λ_n`. At large N their densities are the
//! self-convolution and self-correlation of the density of `H`.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::riemann_hilbert::SpectralDensity;

pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiracSign {
    /// Anti-commutator, eigenvalues `λ_m + λ_n`.
    Plus,
    /// Commutator, eigenvalues `λ_m - λ_n`.
    Minus,
}

impl fmt::Display for DiracSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiracSign::Plus => "+",
            DiracSign::Minus => "-",
        })
    }
}

/// Density on the uniform grid `s_k = lo + k·step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracDensity {
    pub sign: DiracSign,
    pub lo: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl DiracDensity {
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| self.lo + k as f64 * self.step)
    }

    pub fn hi(&self) -> f64 {
        self.lo + (self.values.len() - 1) as f64 * self.step
    }

    /// Linear interpolation, zero off the grid.
    pub fn eval(&self, s: f64) -> f64 {
        let t = (s - self.lo) / self.step;
        if t < 0.0 || t > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let k = (t.floor() as usize).min(self.values.len() - 2);
        let f = t - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }

    /// Trapezoid integral of `f(s) ρ(s)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let last = self.values.len() - 1;
        self.grid()
            .zip(&self.values)
            .enumerate()
            .map(|(k, (s, v))| {
                let w = if k == 0 || k == last { 0.5 } else { 1.0 };
                w * f(s) * v
            })
            .sum::<f64>()
            * self.step
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|s| s)
    }
}

/// Convolution (`+`) or correlation (`-`) of `f` with itself, from `points`
/// samples of `f` on `[lo, hi]`.
pub fn dirac_density_fn<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    sign: DiracSign,
    points: usize,
) -> Result<DiracDensity> {
    if points < MIN_GRID {
        return Err(Error::Resolution {
            points,
            minimum: MIN_GRID,
        });
    }
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("bad sampling range [{lo}, {hi}]")));
    }
    let m = points;
    let h = (hi - lo) / (m - 1) as f64;
    let rho: Vec<f64> = (0..m).map(|k| f(lo + k as f64 * h).max(0.0)).collect();
    let (start, mut values) = match sign {
        DiracSign::Plus => {
            let mut c = vec![0.0; 2 * m - 1];
            for (i, &a) in rho.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (j, &b) in rho.iter().enumerate() {
                    c[i + j] += a * b;
                }
            }
            (2.0 * lo, c)
        }
        DiracSign::Minus => {
            let half: Vec<f64> = (0..m)
                .map(|shift| (0..m - shift).map(|k| rho[k + shift] * rho[k]).sum())
                .collect();
            let c: Vec<f64> = half.iter().rev().chain(half.iter().skip(1)).copied().collect();
            (-((m - 1) as f64) * h, c)
        }
    };
    let last = values.len() - 1;
    let total: f64 = values
        .iter()
        .enumerate()
        .map(|(k, v)| if k == 0 || k == last { 0.5 * v } else { *v })
        .sum::<f64>()
        * h;
    if !(total > 0.0) {
        return Err(Error::InvalidInput("input density vanishes on the sampling grid".into()));
    }
    values.iter_mut().for_each(|v| *v /= total);
    Ok(DiracDensity {
        sign,
        lo: start,
        step: h,
        values,
    })
}

/// `ρ_{D±}(s) = ∫ ρ(s ∓ λ) ρ(λ) dλ`, sampled across the support of `rho`.
pub fn dirac_density(rho: &SpectralDensity, sign: DiracSign, points: usize) -> Result<DiracDensity> {
    dirac_density_fn(|x| rho.eval(x), rho.lower_edge(), rho.upper_edge(), sign, points)
}

/// All `N²` values `λ_m ± λ_n`, row-major in `m`.
pub fn dirac_sample(eigenvalues: &[f64], sign: DiracSign) -> Vec<f64> {
    let s = match sign {
        DiracSign::Plus => 1.0,
        DiracSign::Minus => -1.0,
    };
    eigenvalues
        .iter()
        .flat_map(|&a| eigenvalues.iter().map(move |&b| a + s * b))
        .collect()
}
