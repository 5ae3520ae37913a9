//! Distances between two tabulated densities, e.g. a theoretical curve and a
//! Monte-Carlo histogram.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl DensityTable {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "{} abscissae for {} values",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::EmptyInput);
        }
        if !x.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("abscissae must be strictly increasing".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("table contains non-finite values".into()));
        }
        Ok(DensityTable { x, y })
    }

    /// Linear interpolation, zero outside the tabulated range.
    pub fn interpolate(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t < self.x[0] || t > self.x[n - 1] {
            return 0.0;
        }
        let k = self.x.partition_point(|&v| v <= t).clamp(1, n - 1);
        let (x0, x1) = (self.x[k - 1], self.x[k]);
        let f = (t - x0) / (x1 - x0);
        self.y[k - 1] * (1.0 - f) + self.y[k] * f
    }

    fn same_grid(&self, other: &DensityTable) -> bool {
        let scale = self.x.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        self.x.len() == other.x.len()
            && self.x.iter().zip(&other.x).all(|(a, b)| (a - b).abs() <= 1e-12 * scale)
    }
}

fn trapezoid(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..x.len()).map(|k| 0.5 * (f(k - 1) + f(k)) * (x[k] - x[k - 1])).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareMetrics {
    pub l1: f64,
    pub sup: f64,
    /// `m_k(sample) - m_k(reference)` for `k = 1..4`.
    pub moment_differences: [f64; 4],
    pub points: usize,
    /// The reference was interpolated onto the sample grid.
    pub resampled: bool,
}

/// Metrics on the grid of `sample`, with `reference` interpolated onto it
/// when the grids differ.
pub fn compare_densities(reference: &DensityTable, sample: &DensityTable) -> CompareMetrics {
    let resampled = !reference.same_grid(sample);
    let r: Vec<f64> = if resampled {
        sample.x.iter().map(|&t| reference.interpolate(t)).collect()
    } else {
        reference.y.clone()
    };
    let x = &sample.x;
    let s = &sample.y;
    let l1 = trapezoid(x, |k| (s[k] - r[k]).abs());
    let sup = s.iter().zip(&r).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
    let mut moment_differences = [0.0; 4];
    for (n, d) in moment_differences.iter_mut().enumerate() {
        let p = n as i32 + 1;
        *d = trapezoid(x, |k| x[k].powi(p) * (s[k] - r[k]));
    }
    CompareMetrics {
        l1,
        sup,
        moment_differences,
        points: x.len(),
        resampled,
    }
}
