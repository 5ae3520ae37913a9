use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How to bin pooled eigenvalue samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BinSpec {
    /// Bin width `2 IQR n^{-1/3}`.
    #[default]
    FreedmanDiaconis,
    Fixed { lo: f64, hi: f64, bins: usize },
}

/// Normalized histogram on uniform bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.density.len()
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.width * self.density.len() as f64
    }

    pub fn center(&self, k: usize) -> f64 {
        self.lo + (k as f64 + 0.5) * self.width
    }

    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width
    }

    /// Piecewise-constant value at `x`, zero outside the bins.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo || x >= self.hi() {
            return 0.0;
        }
        let k = ((x - self.lo) / self.width) as usize;
        self.density[k.min(self.bins() - 1)]
    }

    pub fn moment(&self, n: i32) -> f64 {
        (0..self.bins())
            .map(|k| self.center(k).powi(n) * self.density[k] * self.width)
            .sum()
    }

    /// `∫|h - f|` with `f` averaged over each bin, plus the mass of `f`
    /// outside the binned range.
    pub fn l1_distance<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        const SUB: usize = 16;
        let mut dist = 0.0;
        let mut inside = 0.0;
        for k in 0..self.bins() {
            let a = self.lo + k as f64 * self.width;
            let avg = (0..SUB)
                .map(|j| f(a + (j as f64 + 0.5) * self.width / SUB as f64))
                .sum::<f64>()
                / SUB as f64;
            inside += avg * self.width;
            dist += (self.density[k] - avg).abs() * self.width;
        }
        dist + (1.0 - inside).max(0.0)
    }
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let k = pos.floor() as usize;
    let t = pos - k as f64;
    if k + 1 < sorted.len() {
        sorted[k] * (1.0 - t) + sorted[k + 1] * t
    } else {
        sorted[k]
    }
}

/// Histogram with unit total mass. Samples outside a fixed range are dropped
/// before normalizing.
pub fn empirical_density(samples: &[f64], spec: BinSpec) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite sample {x}")));
    }
    let (lo, hi, bins) = match spec {
        BinSpec::Fixed { lo, hi, bins } => {
            if bins == 0 || !(hi > lo) {
                return Err(Error::InvalidInput(format!(
                    "bad bin range [{lo}, {hi}] with {bins} bins"
                )));
            }
            (lo, hi, bins)
        }
        BinSpec::FreedmanDiaconis => {
            let mut sorted = samples.to_vec();
            sorted.sort_by(f64::total_cmp);
            let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
            let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
            let h = 2.0 * iqr / (sorted.len() as f64).cbrt();
            if max == min || h <= 0.0 {
                (min - 0.5, min + 0.5, 1)
            } else {
                let bins = (((max - min) / h).ceil() as usize).clamp(1, 100_000);
                (min, max, bins)
            }
        }
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut used = 0usize;
    for &x in samples {
        if x < lo || x > hi {
            continue;
        }
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
        used += 1;
    }
    if used == 0 {
        return Err(Error::EmptyInput);
    }
    let norm = 1.0 / (used as f64 * width);
    Ok(Histogram {
        lo,
        width,
        density: counts.into_iter().map(|c| c as f64 * norm).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn delta_input_gives_single_bin() {
        let h = empirical_density(&[0.3; 1000], BinSpec::default()).unwrap();
        assert_eq!(h.density.iter().filter(|&&d| d > 0.0).count(), 1);
        assert!((h.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(empirical_density(&[], BinSpec::default()), Err(Error::EmptyInput));
    }

    #[test]
    fn uniform_samples_are_close_to_uniform_density() {
        let xs: Vec<f64> = (0..100_000).map(|i| (i as f64 + 0.5) / 100_000.0).collect();
        let h = empirical_density(&xs, BinSpec::default()).unwrap();
        let l1 = h.l1_distance(|x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 });
        assert!(l1 < 1e-2, "{l1}");
        assert!((h.moment(1) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn l1_counts_mass_outside_range() {
        let h = Histogram {
            lo: 0.0,
            width: 1.0,
            density: vec![1.0],
        };
        let l1 = h.l1_distance(|x| if (0.0..2.0).contains(&x) { 0.5 } else { 0.0 });
        assert!((l1 - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn histogram_is_normalized(xs in prop::collection::vec(-10.0f64..10.0, 1..500)) {
            let h = empirical_density(&xs, BinSpec::default()).unwrap();
            prop_assert!((h.mass() - 1.0).abs() < 1e-12);
            prop_assert!(h.density.iter().all(|&d| d >= 0.0));
        }
    }
}
