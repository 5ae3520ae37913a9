//! Symmetric equilibrium measures of the (0,1) ensemble in closed form.
//!
//! The effective potential of this ensemble is always even, so the measure is
//! either one symmetric cut `[-b, b]` or two mirrored cuts `[-b, -a] ∪ [a, b]`,
//! with the branches meeting at `g = -4√2`.

use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::riemann_hilbert::{
    build_one_cut_density, build_two_cut_density, Cut, OneCutSupport, QuarticPotential,
    SpectralDensity, TwoCutSupport,
};

/// Coupling at which the symmetric 1-cut density vanishes at the origin.
pub const G_SYMMETRIC_CRITICAL: f64 = -4.0 * SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneCutSymmetric {
    pub b: f64,
    pub g: f64,
    pub m2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoCutSymmetric {
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub m2: f64,
}

/// `g(b) = 1/b² - 3b² - (3/4)b⁶`, strictly decreasing on `b > 0`.
pub fn one_cut_coupling(b: f64) -> f64 {
    let b2 = b * b;
    1.0 / b2 - 3.0 * b2 - 0.75 * b2 * b2 * b2
}

fn one_cut_coupling_derivative(b: f64) -> f64 {
    -2.0 / b.powi(3) - 6.0 * b - 4.5 * b.powi(5)
}

pub fn one_cut_m2(b: f64) -> f64 {
    let b2 = b * b;
    b2 / 4.0 + b2 * b2 * b2 / 8.0
}

/// Symmetric 1-cut solution, valid for `g ≥ -4√2`.
pub fn solve_one_cut_01(g: f64) -> Result<(OneCutSymmetric, SpectralDensity)> {
    if !g.is_finite() {
        return Err(Error::InvalidInput(format!("coupling g = {g} is not finite")));
    }
    if g < G_SYMMETRIC_CRITICAL {
        return Err(Error::OutOfBranch {
            branch: "symmetric 1-cut",
            g,
        });
    }
    let b_max = 2f64.powf(0.25);
    let b = if g == G_SYMMETRIC_CRITICAL {
        b_max
    } else {
        let mut lo = (1.0f64).min(1.0 / (g.abs() + 1.0).sqrt()) * 1e-3;
        let mut hi = b_max;
        while hi - lo > 1e-14 * hi {
            let mid = 0.5 * (lo + hi);
            if one_cut_coupling(mid) > g {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = 0.5 * (lo + hi);
        (b - (one_cut_coupling(b) - g) / one_cut_coupling_derivative(b)).min(b_max)
    };
    let m2 = one_cut_m2(b);
    let w = QuarticPotential::new(0.0, 2.0 * g + 12.0 * m2, 0.0, 2.0)?;
    let density = build_one_cut_density(&w, &OneCutSupport::symmetric(b)?)?;
    Ok((OneCutSymmetric { b, g, m2 }, density))
}

/// Symmetric 2-cut solution, valid for `g ≤ -4√2`. At the boundary the gap
/// has closed and the density is returned on the single interval `[-b, b]`.
pub fn solve_two_cut_01(g: f64) -> Result<(TwoCutSymmetric, SpectralDensity)> {
    if !g.is_finite() {
        return Err(Error::InvalidInput(format!("coupling g = {g} is not finite")));
    }
    if g > G_SYMMETRIC_CRITICAL {
        return Err(Error::OutOfBranch {
            branch: "symmetric 2-cut",
            g,
        });
    }
    let scale = 2.0 * SQRT_2;
    let b = (-g + 4.0 * SQRT_2).sqrt() / scale;
    let a = (-g - 4.0 * SQRT_2).max(0.0).sqrt() / scale;
    let m2 = -g / 8.0;
    let density = if a > 0.0 {
        let w = QuarticPotential::new(0.0, 2.0 * g + 12.0 * m2, 0.0, 2.0)?;
        build_two_cut_density(&w, &TwoCutSupport::symmetric(a, b)?)?
    } else {
        SpectralDensity::new(
            vec![-b, b],
            vec![Cut {
                lo: -b,
                hi: b,
                prefactor: [0.0, 0.0, 4.0],
            }],
        )?
    };
    Ok((TwoCutSymmetric { a, b, g, m2 }, density))
}

/// Closed-form symmetric solution on whichever branch contains `g`, with
/// the 2-cut branch below `-4√2`.
pub fn solve_symmetric_01(g: f64) -> Result<SpectralDensity> {
    if g < G_SYMMETRIC_CRITICAL {
        Ok(solve_two_cut_01(g)?.1)
    } else {
        Ok(solve_one_cut_01(g)?.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_cut_at_zero_coupling() {
        // b⁴ is the positive root of 0.75u² + 3u - 1
        let u = (-3.0 + (9.0f64 + 3.0).sqrt()) / 1.5;
        let (s, d) = solve_one_cut_01(0.0).unwrap();
        assert!((s.b - u.powf(0.25)).abs() < 1e-13);
        assert!((s.b - 0.7458139).abs() < 1e-7);
        assert!((s.m2 - 0.1605722).abs() < 1e-7);
        let rho0 = s.b * (2.0 / (s.b * s.b) - s.b * s.b) / PI;
        assert!((d.eval(0.0) - rho0).abs() < 1e-13);
        assert!((d.eval(0.0) - 0.72153).abs() < 1e-5);
    }

    #[test]
    fn one_cut_invariants() {
        for g in [-5.6, -4.0, -1.0, 0.0, 2.5, 40.0, 1e4] {
            let (s, d) = solve_one_cut_01(g).unwrap();
            assert!(s.b.powi(4) <= 2.0);
            assert!((one_cut_coupling(s.b) - g).abs() < 1e-12 * g.abs().max(1.0));
            assert!((d.moment(0) - 1.0).abs() < 1e-10);
            assert!(d.moment(1).abs() < 1e-12 && d.moment(3).abs() < 1e-12);
            assert!((d.moment(2) - s.m2).abs() < 1e-10);
        }
    }

    #[test]
    fn one_cut_at_branch_point() {
        let (s, d) = solve_one_cut_01(G_SYMMETRIC_CRITICAL).unwrap();
        assert!((s.b - 2f64.powf(0.25)).abs() < 1e-14);
        assert!(d.eval(0.0).abs() < 1e-14);
        assert!(matches!(
            solve_one_cut_01(G_SYMMETRIC_CRITICAL - 1e-9),
            Err(Error::OutOfBranch { .. })
        ));
    }

    #[test]
    fn large_coupling_approaches_semicircle() {
        let (s, d) = solve_one_cut_01(100.0).unwrap();
        let b = s.b;
        let n = 20000;
        let l1: f64 = (0..n)
            .map(|i| {
                let x = -b + 2.0 * b * (i as f64 + 0.5) / n as f64;
                let sc = 2.0 / (PI * b * b) * (b * b - x * x).sqrt();
                (d.eval(x) - sc).abs() * 2.0 * b / n as f64
            })
            .sum();
        assert!(l1 < 0.01, "{l1}");
    }

    #[test]
    fn two_cut_values() {
        let (s, d) = solve_two_cut_01(-7.0).unwrap();
        assert!((s.a - 0.4097478).abs() < 1e-7);
        assert!((s.b - 1.2578183).abs() < 1e-7);
        assert_eq!(s.m2, 0.875);
        assert!((d.moment(0) - 1.0).abs() < 1e-10);
        assert!((d.moment(2) - 0.875).abs() < 1e-10);
        for x in [0.5, 1.0, 1.2] {
            let rho = 4.0 / PI * x * ((s.b * s.b - x * x) * (x * x - s.a * s.a)).sqrt();
            assert!((d.eval(x) - rho).abs() < 1e-13 && (d.eval(-x) - rho).abs() < 1e-13);
        }
        assert!(matches!(solve_two_cut_01(-5.0), Err(Error::OutOfBranch { .. })));
    }

    #[test]
    fn gap_opens_continuously() {
        let (s, _) = solve_two_cut_01(G_SYMMETRIC_CRITICAL - 1e-9).unwrap();
        let expected = (1e-9f64).sqrt() / (2.0 * SQRT_2);
        assert!(s.a > 0.0 && (s.a - expected).abs() < 1e-3 * expected);
        assert!((s.a - 1.118034e-5).abs() < 1e-10);
    }

    #[test]
    fn branches_agree_at_boundary() {
        let (s1, d1) = solve_one_cut_01(G_SYMMETRIC_CRITICAL).unwrap();
        let (s2, d2) = solve_two_cut_01(G_SYMMETRIC_CRITICAL).unwrap();
        assert_eq!(s2.a, 0.0);
        assert!((s1.b - s2.b).abs() < 1e-14);
        assert!((s1.m2 - s2.m2).abs() < 1e-12);
        for i in 0..1000 {
            let x = -1.3 + 2.6 * i as f64 / 999.0;
            assert!((d1.eval(x) - d2.eval(x)).abs() < 1e-10);
        }
        assert!((d2.moment(0) - 1.0).abs() < 1e-10);
    }
}
