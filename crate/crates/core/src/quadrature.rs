//! Gauss–Legendre rules and an adaptive bisection integrator.
//!
//! Every density in this crate has the form `p(λ)·√|q(λ)|/π` on each cut, so
//! integrals over a cut `[lo, hi]` are taken in the angle variable
//! `λ = c + h cos θ`, which turns the square-root edges into the smooth
//! factor `h sin θ` (the Gauss–Chebyshev substitution).

use std::sync::OnceLock;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

pub fn gl64() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(64))
}

pub fn gl128() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(128))
}

const MAX_PANELS: usize = 4000;

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, rule: &GaussLegendre, a: f64, b: f64, whole: f64) -> Self {
        let m = 0.5 * (a + b);
        let left = rule.integrate(a, m, f);
        let right = rule.integrate(m, b, f);
        let err = if m <= a || m >= b { 0.0 } else { (left + right - whole).abs() };
        Panel { a, b, left, right, err }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive 16-point Gauss–Legendre quadrature: the panel with the
/// largest error estimate is bisected until the summed estimate falls below
/// `max(abs_tol, rel_tol·|I|)` or the panel budget is spent.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let rule = gl16();
    let whole = rule.integrate(a, b, &f);
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(Panel::new(&f, rule, a, b, whole));
    let mut total_err = heap.peek().map_or(0.0, |p| p.err);
    let mut total = heap.peek().map_or(0.0, |p| p.value());
    while heap.len() < MAX_PANELS {
        let tol = abs_tol.max(rel_tol * total.abs());
        // stop at the tolerance or once the estimates are pure rounding noise
        if total_err <= tol || total_err <= 16.0 * f64::EPSILON * total.abs() {
            break;
        }
        let Some(p) = heap.pop() else { break };
        if p.err == 0.0 {
            heap.push(p);
            break;
        }
        let m = 0.5 * (p.a + p.b);
        let l = Panel::new(&f, rule, p.a, m, p.left);
        let r = Panel::new(&f, rule, m, p.b, p.right);
        total += l.value() + r.value() - p.value();
        total_err += l.err + r.err - p.err;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to shed the drift of the running total
    heap.iter().map(Panel::value).sum()
}

/// Default tolerances used for density integrals.
pub const ABS_TOL: f64 = 1e-15;
pub const REL_TOL: f64 = 1e-14;

/// `∫_lo^hi √((hi-λ)(λ-lo)) f(λ) dλ` through `λ = c + h cos θ`.
pub fn integrate_arc<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: F) -> f64 {
    integrate_arc_split(lo, hi, None, f)
}

/// As [`integrate_arc`], splitting the angular range at the preimage of
/// `split` so that an integrable singularity there sits on a panel edge.
pub fn integrate_arc_split<F: Fn(f64) -> f64>(lo: f64, hi: f64, split: Option<f64>, f: F) -> f64 {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let g = |theta: f64| {
        let s = theta.sin();
        h * h * s * s * f(c + h * theta.cos())
    };
    let pi = std::f64::consts::PI;
    match split {
        Some(x) if x > lo && x < hi => {
            let t0 = ((x - c) / h).clamp(-1.0, 1.0).acos();
            adaptive(g, 0.0, t0, ABS_TOL, REL_TOL) + adaptive(g, t0, pi, ABS_TOL, REL_TOL)
        }
        _ => adaptive(g, 0.0, pi, ABS_TOL, REL_TOL),
    }
}

/// `n` Chebyshev points of the first kind mapped to `[lo, hi]` (dense near the ends).
pub fn chebyshev_points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    (0..n).map(move |k| {
        c + h * (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos()
    })
}
