use super::series::{one_cut_coefficients_extended, two_cut_coefficients_extended};
use super::support::{OneCutSupport, QuarticPotential, Support, TwoCutSupport};
use crate::error::{Error, Result};
use crate::model::Moments;
use crate::quadrature;

const EXTRACTION_TOL: f64 = 1e-8;

/// `A` and `B` multiplying `C_{k+3}` and `C_{k+2}` in the 1-cut expansion.
fn one_cut_ab(w: &QuarticPotential, c: &[f64]) -> (f64, f64) {
    let (c1, c2) = (c[0], c[1]);
    let a = (3.0 * w.w3 + 4.0 * c1 * w.w4) / 2.0;
    let b = (4.0 * (c1 * c1 + c2) * w.w4 + 3.0 * c1 * w.w3 + 2.0 * w.w2) / 2.0;
    (a, b)
}

/// Vanishing of the `z^0` and `z^{-1}` terms of the 1-cut resolvent, the second
/// being the normalization.
pub fn one_cut_boundary_residuals(w: &QuarticPotential, support: &OneCutSupport) -> [f64; 2] {
    let c = one_cut_coefficients_extended(support, 4);
    let (a, b) = one_cut_ab(w, &c);
    let r1 = 2.0 * w.w4 * c[2] + a * c[1] + b * c[0] + w.w1 / 2.0;
    let r2 = 2.0 * w.w4 * c[3] + a * c[2] + b * c[1] - 1.0;
    [r1, r2]
}

fn two_cut_a(w: &QuarticPotential, c1: f64) -> f64 {
    (4.0 * c1 * w.w4 + 3.0 * w.w3) / 2.0
}

/// `∫_{b1}^{a2} √q(x) (4 w4 x + 4 w4 c1 + 3 w3) dx`, zero when both cuts
/// share one chemical potential.
pub fn gap_integral(w: &QuarticPotential, support: &TwoCutSupport) -> f64 {
    let c1 = 0.5 * support.symmetric_functions()[0];
    let (a1, b2) = (support.a1, support.b2);
    // √q = √((x-b1)(a2-x)) · √((x-a1)(b2-x)) on the gap
    quadrature::integrate_arc(support.b1, support.a2, |x| {
        ((x - a1) * (b2 - x)).sqrt() * (4.0 * w.w4 * (x + c1) + 3.0 * w.w3)
    })
}

/// `(r1, r2, r3, r4)` for a 2-cut support: three expansion conditions (the
/// third is the normalization) and the gap integral.
pub fn two_cut_boundary_residuals(w: &QuarticPotential, support: &TwoCutSupport) -> [f64; 4] {
    let c = two_cut_coefficients_extended(support, 4);
    let a = two_cut_a(w, c[0]);
    let r1 = 2.0 * c[1] * w.w4 + c[0] * a + w.w2;
    let r2 = 2.0 * c[2] * w.w4 + c[1] * a + w.w1 / 2.0;
    let r3 = 2.0 * c[3] * w.w4 + c[2] * a - 1.0;
    [r1, r2, r3, gap_integral(w, support)]
}

/// Boundary residuals for either topology, flattened.
pub fn boundary_residuals(w: &QuarticPotential, support: &Support) -> Vec<f64> {
    match support {
        Support::OneCut(s) => one_cut_boundary_residuals(w, s).to_vec(),
        Support::TwoCut(s) => two_cut_boundary_residuals(w, s).to_vec(),
    }
}

/// `m_1..m_n` read off the large-`z` expansion, without checking residuals.
pub fn expansion_moments(w: &QuarticPotential, support: &Support, n: usize) -> Vec<f64> {
    match support {
        Support::OneCut(s) => {
            let c = one_cut_coefficients_extended(s, n + 4);
            let (a, b) = one_cut_ab(w, &c);
            // C_k sits at index k-1
            (1..=n)
                .map(|k| 2.0 * w.w4 * c[k + 3] + a * c[k + 2] + b * c[k + 1])
                .collect()
        }
        Support::TwoCut(s) => {
            let c = two_cut_coefficients_extended(s, n + 4);
            let a = two_cut_a(w, c[0]);
            (1..=n)
                .map(|k| 2.0 * w.w4 * c[k + 3] + a * c[k + 2])
                .collect()
        }
    }
}

/// `m1..m4` of the equilibrium measure of `W` on `support`.
pub fn moment_extraction(w: &QuarticPotential, support: &Support) -> Result<Moments> {
    let norm = boundary_residuals(w, support)
        .iter()
        .fold(0.0f64, |acc, r| acc.max(r.abs()));
    if !(norm <= EXTRACTION_TOL) {
        return Err(Error::ResidualViolation { norm });
    }
    let m = expansion_moments(w, support, 4);
    Ok(Moments {
        m1: m[0],
        m2: m[1],
        m3: m[2],
        m4: Some(m[3]),
    })
}
