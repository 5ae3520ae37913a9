use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::support::{OneCutSupport, QuarticPotential, TwoCutSupport};
use crate::error::{Error, Result};
use crate::quadrature::{self, chebyshev_points};

/// One interval of the support with the polynomial multiplying `√|q|/π` there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub lo: f64,
    pub hi: f64,
    /// `[p0, p1, p2]` for `p0 + p1 λ + p2 λ²`.
    pub prefactor: [f64; 3],
}

impl Cut {
    pub fn prefactor_at(&self, x: f64) -> f64 {
        self.prefactor[0] + x * (self.prefactor[1] + x * self.prefactor[2])
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Piecewise density `ρ(λ) = p_k(λ) √|q(λ)| / π` on cut `k`, zero elsewhere.
///
/// `roots` holds every zero of `q` (two or four, sorted) and each cut spans a
/// consecutive pair of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    roots: Vec<f64>,
    cuts: Vec<Cut>,
}

const POSITIVITY_SAMPLES: usize = 512;
const POSITIVITY_TOL: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-10;
const SINGULARITY_DISTANCE: f64 = 1e-8;

impl SpectralDensity {
    pub fn new(roots: Vec<f64>, cuts: Vec<Cut>) -> Result<Self> {
        if roots.len() != 2 * cuts.len() || cuts.is_empty() {
            return Err(Error::InvalidInput(
                "a density needs two roots of q per cut".into(),
            ));
        }
        if !roots.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("roots of q must be strictly increasing".into()));
        }
        for (k, cut) in cuts.iter().enumerate() {
            if cut.lo != roots[2 * k] || cut.hi != roots[2 * k + 1] {
                return Err(Error::InvalidInput(
                    "cut edges must coincide with consecutive roots of q".into(),
                ));
            }
        }
        Ok(SpectralDensity { roots, cuts })
    }

    /// Wigner semicircle `√(4 - λ²)/(2π)` on `[-2, 2]`.
    pub fn semicircle() -> Self {
        SpectralDensity {
            roots: vec![-2.0, 2.0],
            cuts: vec![Cut {
                lo: -2.0,
                hi: 2.0,
                prefactor: [0.5, 0.0, 0.0],
            }],
        }
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn lower_edge(&self) -> f64 {
        self.roots[0]
    }

    pub fn upper_edge(&self) -> f64 {
        *self.roots.last().unwrap()
    }

    /// `√|Π (λ - e)|` over the roots that do not bound cut `k`.
    fn outer_factor(&self, k: usize, x: f64) -> f64 {
        let mut prod = 1.0;
        for (i, e) in self.roots.iter().enumerate() {
            if i / 2 != k {
                prod *= x - e;
            }
        }
        prod.abs().sqrt()
    }

    pub fn eval(&self, x: f64) -> f64 {
        for cut in &self.cuts {
            if cut.contains(x) {
                let q: f64 = self.roots.iter().map(|e| x - e).product();
                return cut.prefactor_at(x) * q.abs().sqrt() / PI;
            }
        }
        0.0
    }

    /// `∫ f(λ) ρ(λ) dλ`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.integrate_split(None, f)
    }

    /// `∫ f(λ) ρ(λ) dλ` with the angular panels split at `split`.
    pub fn integrate_split<F: Fn(f64) -> f64>(&self, split: Option<f64>, f: F) -> f64 {
        self.cuts
            .iter()
            .enumerate()
            .map(|(k, cut)| {
                quadrature::integrate_arc_split(cut.lo, cut.hi, split, |x| {
                    f(x) * cut.prefactor_at(x) * self.outer_factor(k, x) / PI
                })
            })
            .sum()
    }

    /// `∫_{lo}^{hi} ρ` restricted to one cut.
    pub fn cut_mass(&self, k: usize) -> f64 {
        let cut = self.cuts[k];
        quadrature::integrate_arc(cut.lo, cut.hi, |x| {
            cut.prefactor_at(x) * self.outer_factor(k, x) / PI
        })
    }

    pub fn moment(&self, n: u32) -> f64 {
        self.integrate(|x| x.powi(n as i32))
    }

    /// Fails if `ρ < -1e-12` at any of 512 Chebyshev points of a cut.
    pub fn check_positive(&self) -> Result<()> {
        for cut in &self.cuts {
            for x in chebyshev_points(cut.lo, cut.hi, POSITIVITY_SAMPLES) {
                let v = self.eval(x);
                if v < -POSITIVITY_TOL || !v.is_finite() {
                    return Err(Error::NonAdmissibleDensity(format!(
                        "ρ({x:.6}) = {v:e} on [{:.6}, {:.6}]",
                        cut.lo, cut.hi
                    )));
                }
            }
        }
        Ok(())
    }

    /// Positivity plus `|∫ρ - 1| ≤ 1e-10`.
    pub fn check_admissible(&self) -> Result<()> {
        self.check_positive()?;
        let mass = self.moment(0);
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NonAdmissibleDensity(format!(
                "total mass {mass} differs from 1"
            )));
        }
        Ok(())
    }

    /// Density of the mirrored measure, `ρ(-λ)`.
    pub fn mirrored(&self) -> Self {
        let roots: Vec<f64> = self.roots.iter().rev().map(|e| -e).collect();
        let cuts = self
            .cuts
            .iter()
            .rev()
            .map(|c| Cut {
                lo: -c.hi,
                hi: -c.lo,
                prefactor: [c.prefactor[0], -c.prefactor[1], c.prefactor[2]],
            })
            .collect();
        SpectralDensity { roots, cuts }
    }

    /// Approximate location of the largest value of `ρ` inside cut `k`.
    pub fn interior_maximum(&self, k: usize) -> f64 {
        let cut = self.cuts[k];
        let n = 2048;
        let mut best = (0.5 * (cut.lo + cut.hi), f64::NEG_INFINITY);
        for i in 1..n {
            let x = cut.lo + cut.width() * i as f64 / n as f64;
            let v = self.eval(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        // keep away from the edges
        let margin = 1e-3 * cut.width();
        best.0.clamp(cut.lo + margin, cut.hi - margin)
    }

    /// Euclidean distance from `z` to the support.
    pub fn distance_to_support(&self, z: Complex64) -> f64 {
        self.cuts
            .iter()
            .map(|c| {
                let dx = if z.re < c.lo {
                    c.lo - z.re
                } else if z.re > c.hi {
                    z.re - c.hi
                } else {
                    0.0
                };
                dx.hypot(z.im)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `(λ, ρ(λ))` on a uniform grid spanning the support.
    pub fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        let lo = self.lower_edge();
        let hi = self.upper_edge();
        let n = points.max(2);
        (0..n)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                (x, self.eval(x))
            })
            .collect()
    }
}

/// Equilibrium density of `W` on a single interval.
pub fn build_one_cut_density(
    w: &QuarticPotential,
    support: &OneCutSupport,
) -> Result<SpectralDensity> {
    let s1 = support.s1();
    let s2 = support.s2();
    let p0 = w.w2 + 0.75 * s1 * w.w3 + (3.0 * s1 * s1 - 4.0 * s2) / 4.0 * w.w4;
    let p1 = (3.0 * w.w3 + 2.0 * w.w4 * s1) / 2.0;
    let p2 = 2.0 * w.w4;
    let density = SpectralDensity::new(
        vec![support.a, support.b],
        vec![Cut {
            lo: support.a,
            hi: support.b,
            prefactor: [p0, p1, p2],
        }],
    )?;
    density.check_positive()?;
    Ok(density)
}

/// Equilibrium density of `W` on two intervals; the linear prefactor enters
/// with sign `-` on the lower cut and `+` on the upper one.
pub fn build_two_cut_density(
    w: &QuarticPotential,
    support: &TwoCutSupport,
) -> Result<SpectralDensity> {
    let [s1, ..] = support.symmetric_functions();
    let p0 = 1.5 * w.w3 + s1 * w.w4;
    let p1 = 2.0 * w.w4;
    let density = SpectralDensity::new(
        support.edges().to_vec(),
        vec![
            Cut {
                lo: support.a1,
                hi: support.b1,
                prefactor: [-p0, -p1, 0.0],
            },
            Cut {
                lo: support.a2,
                hi: support.b2,
                prefactor: [p0, p1, 0.0],
            },
        ],
    )?;
    density.check_positive()?;
    Ok(density)
}

/// `m_n = ∫ λ^n ρ(λ) dλ` for `n ≤ 8`.
pub fn density_moment(density: &SpectralDensity, n: u32) -> Result<f64> {
    if n > 8 {
        return Err(Error::InvalidInput(format!("moment order {n} exceeds 8")));
    }
    Ok(density.moment(n))
}

/// `G(z) = (i/π) ∫ ρ(λ)/(z - λ) dλ` for `z` off the support.
///
/// When `Re z` lies over a cut the pole contribution `ρ(Re z)·∫dλ/(z-λ)` is
/// taken analytically so that points close to the real axis stay accurate.
pub fn borel_transform(density: &SpectralDensity, z: Complex64) -> Result<Complex64> {
    let distance = density.distance_to_support(z);
    if distance < SINGULARITY_DISTANCE {
        return Err(Error::NearSingularity {
            re: z.re,
            im: z.im,
            distance,
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (k, cut) in density.cuts().iter().enumerate() {
        let weight = |x: f64| cut.prefactor_at(x) * density.outer_factor(k, x) / PI;
        let inside = z.re > cut.lo && z.re < cut.hi && z.im.abs() < cut.width();
        let (anchor, rho_anchor) = if inside {
            (Some(z.re), density.eval(z.re))
        } else {
            (None, 0.0)
        };
        // ρ(λ) = weight(λ)·√((hi-λ)(λ-lo)); subtract ρ(Re z) under the integral
        let integrand = |x: f64, part: fn(Complex64) -> f64| {
            let arc = ((cut.hi - x) * (x - cut.lo)).max(0.0).sqrt();
            let r = weight(x) * arc - rho_anchor;
            part(Complex64::new(r, 0.0) / (z - x))
        };
        let c = 0.5 * (cut.lo + cut.hi);
        let h = 0.5 * cut.width();
        let angular = |part: fn(Complex64) -> f64| {
            let f = |t: f64| h * t.sin() * integrand(c + h * t.cos(), part);
            match anchor {
                Some(x) => {
                    let t0 = ((x - c) / h).clamp(-1.0, 1.0).acos();
                    quadrature::adaptive(f, 0.0, t0, 1e-15, 1e-13)
                        + quadrature::adaptive(f, t0, PI, 1e-15, 1e-13)
                }
                None => quadrature::adaptive(f, 0.0, PI, 1e-15, 1e-13),
            }
        };
        let mut part = Complex64::new(angular(|c| c.re), angular(|c| c.im));
        if inside {
            part += rho_anchor * ((z - cut.lo).ln() - (z - cut.hi).ln());
        }
        total += part;
    }
    Ok(Complex64::i() / PI * total)
}
