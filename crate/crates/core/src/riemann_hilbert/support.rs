use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `W(λ) = w1 λ + w2 λ² + w3 λ³ + w4 λ⁴` with `w4 > 0` (the constant term is dropped).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticPotential {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
}

impl QuarticPotential {
    pub fn new(w1: f64, w2: f64, w3: f64, w4: f64) -> Result<Self> {
        if !(w4 > 0.0) || ![w1, w2, w3, w4].iter().all(|w| w.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "quartic potential needs finite coefficients and w4 > 0 (got w4 = {w4})"
            )));
        }
        Ok(QuarticPotential { w1, w2, w3, w4 })
    }

    pub fn value(&self, x: f64) -> f64 {
        x * (self.w1 + x * (self.w2 + x * (self.w3 + x * self.w4)))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.w1 + x * (2.0 * self.w2 + x * (3.0 * self.w3 + x * 4.0 * self.w4))
    }

    /// Potential of the mirrored problem, `W(-λ)`.
    pub fn mirrored(&self) -> Self {
        QuarticPotential {
            w1: -self.w1,
            w2: self.w2,
            w3: -self.w3,
            w4: self.w4,
        }
    }
}

/// Single interval `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneCutSupport {
    pub a: f64,
    pub b: f64,
}

impl OneCutSupport {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!(
                "1-cut support needs a < b (got [{a}, {b}])"
            )));
        }
        Ok(OneCutSupport { a, b })
    }

    pub fn symmetric(b: f64) -> Result<Self> {
        OneCutSupport::new(-b, b)
    }

    pub fn s1(&self) -> f64 {
        self.a + self.b
    }

    pub fn s2(&self) -> f64 {
        self.a * self.b
    }

    pub fn q(&self, z: f64) -> f64 {
        (z - self.a) * (z - self.b)
    }

    pub fn mirrored(&self) -> Self {
        OneCutSupport {
            a: -self.b,
            b: -self.a,
        }
    }
}

/// Two intervals `[a1, b1] ∪ [a2, b2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoCutSupport {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl TwoCutSupport {
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<Self> {
        let ok = a1 < b1 && b1 < a2 && a2 < b2 && [a1, b1, a2, b2].iter().all(|x| x.is_finite());
        if !ok {
            return Err(Error::InvalidInput(format!(
                "2-cut support needs a1 < b1 < a2 < b2 (got {a1}, {b1}, {a2}, {b2})"
            )));
        }
        Ok(TwoCutSupport { a1, b1, a2, b2 })
    }

    /// `[-b, -a] ∪ [a, b]`.
    pub fn symmetric(a: f64, b: f64) -> Result<Self> {
        TwoCutSupport::new(-b, -a, a, b)
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        match x {
            [a1, b1, a2, b2, ..] => TwoCutSupport::new(*a1, *b1, *a2, *b2),
            _ => Err(Error::InvalidInput("2-cut support needs four edges".into())),
        }
    }

    pub fn edges(&self) -> [f64; 4] {
        [self.a1, self.b1, self.a2, self.b2]
    }

    /// Elementary symmetric functions `(s1, s2, s3, s4)` of the edges.
    pub fn symmetric_functions(&self) -> [f64; 4] {
        let [a1, b1, a2, b2] = self.edges();
        let s1 = a1 + b1 + a2 + b2;
        let s2 = a1 * b1 + a2 * b2 + a1 * a2 + b1 * b2 + a1 * b2 + b1 * a2;
        let s3 = a1 * b1 * a2 + a1 * b1 * b2 + a1 * a2 * b2 + b1 * a2 * b2;
        let s4 = a1 * b1 * a2 * b2;
        [s1, s2, s3, s4]
    }

    /// `q(z) = z⁴ - s1 z³ + s2 z² - s3 z + s4`.
    pub fn q(&self, z: f64) -> f64 {
        let [s1, s2, s3, s4] = self.symmetric_functions();
        (((z - s1) * z + s2) * z - s3) * z + s4
    }

    /// `q(z)` as the product of linear factors.
    pub fn q_product(&self, z: f64) -> f64 {
        self.edges().iter().map(|e| z - e).product()
    }

    pub fn mirrored(&self) -> Self {
        TwoCutSupport {
            a1: -self.b2,
            b1: -self.a2,
            a2: -self.b1,
            b2: -self.a1,
        }
    }
}

/// Support topology of a candidate measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    OneCut(OneCutSupport),
    TwoCut(TwoCutSupport),
}

impl Support {
    pub fn edges(&self) -> Vec<f64> {
        match self {
            Support::OneCut(s) => vec![s.a, s.b],
            Support::TwoCut(s) => s.edges().to_vec(),
        }
    }

    pub fn mirrored(&self) -> Self {
        match self {
            Support::OneCut(s) => Support::OneCut(s.mirrored()),
            Support::TwoCut(s) => Support::TwoCut(s.mirrored()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(QuarticPotential::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(OneCutSupport::new(1.0, 1.0).is_err());
        assert!(TwoCutSupport::new(-1.0, 0.5, 0.2, 1.0).is_err());
        assert!(TwoCutSupport::new(-1.0, -0.5, 0.2, 1.0).is_ok());
    }

    #[test]
    fn quartic_reproduces_product_form() {
        let s = TwoCutSupport::new(-1.3, -0.4, 0.15, 1.7).unwrap();
        for z in [-3.0, -0.7, 0.0, 0.9, 2.5] {
            let a = s.q(z);
            let b = s.q_product(z);
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn mirror_reverses_edges() {
        let s = TwoCutSupport::new(-1.3, -0.4, 0.15, 1.7).unwrap();
        let m = s.mirrored();
        assert_eq!(m.edges(), [-1.7, -0.15, 0.4, 1.3]);
        let [s1, s2, s3, s4] = s.symmetric_functions();
        let [t1, t2, t3, t4] = m.symmetric_functions();
        assert!((s1 + t1).abs() < 1e-15 && (s2 - t2).abs() < 1e-15);
        assert!((s3 + t3).abs() < 1e-15 && (s4 - t4).abs() < 1e-15);
    }

    #[test]
    fn potential_derivative() {
        let w = QuarticPotential::new(0.3, -1.0, 0.5, 2.0).unwrap();
        let x = 0.7;
        let h = 1e-6;
        let fd = (w.value(x + h) - w.value(x - h)) / (2.0 * h);
        assert!((fd - w.derivative(x)).abs() < 1e-8);
    }
}
