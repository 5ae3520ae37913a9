//! Large-`z` expansion coefficients of `√q(z)`.
//!
//! For a 1-cut support `√q(z) = z (1 - Σ C_n z^{-n})`, for a 2-cut support
//! `√q(z) = z² (1 - Σ c_n z^{-n})`. The closed forms below are written out in
//! the symmetric functions of the edges; [`sqrt_series`] computes any number
//! of coefficients by the square-root recurrence and is used for higher orders.

use super::support::{OneCutSupport, TwoCutSupport};

/// Coefficients `h_1..h_n` of `√(1 + f_1 x + f_2 x² + …) = 1 + Σ h_k x^k`.
pub fn sqrt_series(f: &[f64], n: usize) -> Vec<f64> {
    let coef = |k: usize| if k >= 1 && k <= f.len() { f[k - 1] } else { 0.0 };
    let mut h = vec![0.0; n + 1];
    h[0] = 1.0;
    for k in 1..=n {
        let cross: f64 = (1..k).map(|j| h[j] * h[k - j]).sum();
        h[k] = 0.5 * (coef(k) - cross);
    }
    h.remove(0);
    h
}

/// `C_1..C_4` for `[a, b]`.
pub fn one_cut_coefficients(support: &OneCutSupport) -> [f64; 4] {
    let s1 = support.s1();
    let s2 = support.s2();
    [
        s1 / 2.0,
        (s1 * s1 - 4.0 * s2) / 8.0,
        (s1.powi(3) - 4.0 * s1 * s2) / 16.0,
        (5.0 * s1.powi(4) - 24.0 * s1 * s1 * s2 + 16.0 * s2 * s2) / 128.0,
    ]
}

/// `C_1..C_n` from the recurrence; index 0 holds `C_1`.
pub fn one_cut_coefficients_extended(support: &OneCutSupport, n: usize) -> Vec<f64> {
    sqrt_series(&[-support.s1(), support.s2()], n)
        .into_iter()
        .map(|h| -h)
        .collect()
}

/// `c_1..c_7` for `[a1, b1] ∪ [a2, b2]`.
pub fn two_cut_coefficients(support: &TwoCutSupport) -> [f64; 7] {
    let [s1, s2, s3, s4] = support.symmetric_functions();
    let c1 = s1 / 2.0;
    let c2 = (s1 * s1 - 4.0 * s2) / 8.0;
    let c3 = (s1.powi(3) - 4.0 * s1 * s2 + 8.0 * s3) / 16.0;
    let c4 = (5.0 * s1.powi(4) - 24.0 * s1 * s1 * s2 + 32.0 * s1 * s3 + 16.0 * s2 * s2
        - 64.0 * s4)
        / 128.0;
    let c5 = (7.0 * s1.powi(5) - 40.0 * s1.powi(3) * s2 + 48.0 * s1 * s1 * s3
        + 48.0 * s1 * s2 * s2
        - 64.0 * s1 * s4
        - 64.0 * s2 * s3)
        / 256.0;
    let c6 = (21.0 * s1.powi(6) - 140.0 * s1.powi(4) * s2 + 160.0 * s1.powi(3) * s3
        + 240.0 * s1 * s1 * s2 * s2
        - 192.0 * s1 * s1 * s4
        - 384.0 * s1 * s2 * s3
        - 64.0 * s2.powi(3)
        + 256.0 * s2 * s4
        + 128.0 * s3 * s3)
        / 1024.0;
    let c7 = (33.0 * s1.powi(7) - 252.0 * s1.powi(5) * s2 + 280.0 * s1.powi(4) * s3
        + 560.0 * s1.powi(3) * s2 * s2
        - 320.0 * s1.powi(3) * s4
        - 960.0 * s1 * s1 * s2 * s3
        - 320.0 * s1 * s2.powi(3)
        + 768.0 * s1 * s2 * s4
        + 384.0 * s1 * s3 * s3
        + 384.0 * s2 * s2 * s3
        - 512.0 * s3 * s4)
        / 2048.0;
    [c1, c2, c3, c4, c5, c6, c7]
}

/// `c_1..c_n` from the recurrence; index 0 holds `c_1`.
pub fn two_cut_coefficients_extended(support: &TwoCutSupport, n: usize) -> Vec<f64> {
    let [s1, s2, s3, s4] = support.symmetric_functions();
    sqrt_series(&[-s1, s2, -s3, s4], n)
        .into_iter()
        .map(|h| -h)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_unit_interval() {
        let c = one_cut_coefficients(&OneCutSupport::new(-1.0, 1.0).unwrap());
        assert_eq!(c, [0.0, 0.5, 0.0, 0.125]);
    }

    #[test]
    fn half_line_interval() {
        // √(z² - 2z) = z (1 - 1/z - 1/(2z²) - 1/(2z³) - 5/(8z⁴) - …)
        let c = one_cut_coefficients(&OneCutSupport::new(0.0, 2.0).unwrap());
        assert_eq!(c, [1.0, 0.5, 0.5, 0.625]);
        // [-1, 1] shifted by t = 1
        let t = 1.0;
        let shifted = one_cut_coefficients(&OneCutSupport::new(-1.0 + t, 1.0 + t).unwrap());
        assert_eq!(shifted[0], 1.0);
    }

    #[test]
    fn truncated_series_matches_sqrt() {
        // evaluate z(1 - Σ C_n z^-n) at large z against the exact root
        let s = OneCutSupport::new(-0.4, 1.3).unwrap();
        let c = one_cut_coefficients_extended(&s, 12);
        let z: f64 = 40.0;
        let series = z * (1.0 - c.iter().enumerate().map(|(k, ck)| ck / z.powi(k as i32 + 1)).sum::<f64>());
        assert!((series - s.q(z).sqrt()).abs() < 1e-14 * z);

        let t = TwoCutSupport::new(-1.2, -0.3, 0.1, 0.9).unwrap();
        let c = two_cut_coefficients_extended(&t, 16);
        let series = z * z * (1.0 - c.iter().enumerate().map(|(k, ck)| ck / z.powi(k as i32 + 1)).sum::<f64>());
        assert!((series - t.q(z).sqrt()).abs() < 1e-13 * z * z);
    }

    #[test]
    fn closed_forms_match_recurrence() {
        let supports = [
            OneCutSupport::new(-0.4, 1.3).unwrap(),
            OneCutSupport::new(0.2, 0.3).unwrap(),
            OneCutSupport::new(-2.0, -1.0).unwrap(),
        ];
        for s in supports {
            let a = one_cut_coefficients(&s);
            let b = one_cut_coefficients_extended(&s, 4);
            for k in 0..4 {
                assert!((a[k] - b[k]).abs() < 1e-14, "C{}: {} {}", k + 1, a[k], b[k]);
            }
        }
        let supports = [
            TwoCutSupport::new(-1.2, -0.3, 0.1, 0.9).unwrap(),
            TwoCutSupport::new(-1.83, -1.70, 0.23, 1.01).unwrap(),
            TwoCutSupport::symmetric(1.0, 3f64.sqrt()).unwrap(),
        ];
        for s in supports {
            let a = two_cut_coefficients(&s);
            let b = two_cut_coefficients_extended(&s, 7);
            for k in 0..7 {
                assert!((a[k] - b[k]).abs() < 1e-13, "c{}: {} {}", k + 1, a[k], b[k]);
            }
        }
    }

    #[test]
    fn symmetric_two_cut_coefficients() {
        // √(z⁴ - 4z² + 3) = z²(1 - 2/z² - 1/(2z⁴) - …)
        let c = two_cut_coefficients(&TwoCutSupport::symmetric(1.0, 3f64.sqrt()).unwrap());
        assert!(c[0].abs() < 1e-15 && c[2].abs() < 1e-15);
        assert!(c[4].abs() < 1e-14 && c[6].abs() < 1e-14);
        assert!((c[1] - 2.0).abs() < 1e-14);
        assert!((c[3] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn minus_two_cut_has_quarter_c4() {
        for g in [-5.7, -7.0, -12.0] {
            let r2 = 2.0f64.sqrt();
            let b = (-g + 4.0 * r2).sqrt() / (2.0 * r2);
            let a = (-g - 4.0 * r2).sqrt() / (2.0 * r2);
            let c = two_cut_coefficients(&TwoCutSupport::symmetric(a, b).unwrap());
            assert!((c[3] - 0.25).abs() < 1e-14);
        }
    }
}
