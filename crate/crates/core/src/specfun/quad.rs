//! Gauss–Legendre and trapezoid rules, composite and mapped line rules, and
//! oscillatory integrals of analytic functions.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{param, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    GaussLegendre,
    PeriodicTrapezoid,
}

/// Nodes and weights on an interval. Composite Gauss–Legendre rules share this
/// type; their weights still sum to the interval length.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
    pub kind: QuadratureKind,
}

impl QuadratureRule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_c<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Builds a Gauss–Legendre rule (exact through degree `2·order − 1`) or the
/// periodic trapezoid rule on `[0, 2π)` (exact for trigonometric polynomials of
/// degree below `order`). For the trapezoid kind the interval must be
/// `(0, 2π)`.
pub fn make_quadrature(kind: QuadratureKind, order: usize, interval: (f64, f64)) -> Result<QuadratureRule> {
    if order < 2 {
        return Err(param(format!("quadrature order {order} < 2")));
    }
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(param(format!("bad interval [{a}, {b}]")));
    }
    match kind {
        QuadratureKind::GaussLegendre => {
            let base = gauss_legendre_unit(order);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (b + a);
            Ok(QuadratureRule {
                nodes: base.0.iter().map(|x| mid + half * x).collect(),
                weights: base.1.iter().map(|w| half * w).collect(),
                interval,
                kind,
            })
        }
        QuadratureKind::PeriodicTrapezoid => {
            if (a - 0.0).abs() > 1e-15 || (b - 2.0 * PI).abs() > 1e-12 {
                return Err(param("periodic trapezoid rule lives on [0, 2π)"));
            }
            let h = 2.0 * PI / order as f64;
            Ok(QuadratureRule {
                nodes: (0..order).map(|k| k as f64 * h).collect(),
                weights: vec![h; order],
                interval,
                kind,
            })
        }
    }
}

type UnitRule = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss–Legendre nodes (increasing) and weights on [−1, 1], memoized.
pub fn gauss_legendre_unit(order: usize) -> UnitRule {
    static CACHE: OnceLock<Mutex<HashMap<usize, UnitRule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&order) {
        return r.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(order));
    cache.lock().unwrap().insert(order, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let k = (i + 1) as f64;
        let nf = n as f64;
        let mut z = (PI * (k - 0.25) / (nf + 0.5)).cos()
            * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A bag of nodes and weights on (part of) the real line; used for composite
/// and algebraically mapped rules whose weights need not sum to a length.
#[derive(Debug, Clone, Default)]
pub struct LineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    /// `panels` equal Gauss–Legendre panels of the given order on `[a, b]`.
    pub fn panels(a: f64, b: f64, panels: usize, order: usize) -> LineRule {
        let mut r = LineRule::default();
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            r.push_panel(a + p as f64 * h, a + (p + 1) as f64 * h, order);
        }
        r
    }

    /// Panels of width at most `h` covering `[a, b]`.
    pub fn with_width(a: f64, b: f64, h: f64, order: usize) -> LineRule {
        let panels = (((b - a) / h).ceil() as usize).max(1);
        LineRule::panels(a, b, panels, order)
    }

    /// Panels on `[a, b]` shrinking geometrically towards `a` with ratio `q`,
    /// the smallest one of width `(b − a)·q^levels`.
    pub fn graded(a: f64, b: f64, levels: usize, q: f64, order: usize) -> LineRule {
        let mut r = LineRule::default();
        let mut edges = vec![a];
        for k in (1..=levels).rev() {
            edges.push(a + (b - a) * q.powi(k as i32));
        }
        edges.push(b);
        for e in edges.windows(2) {
            r.push_panel(e[0], e[1], order);
        }
        r
    }

    /// `∫_{y0}^{∞} f(y) dy` through `y = y0/s²`, adequate for integrands with
    /// algebraic decay `O(y^{-2})` or faster.
    pub fn tail(y0: f64, order: usize) -> LineRule {
        let s = LineRule::graded(0.0, 1.0, 6, 0.5, order);
        let mut r = LineRule::default();
        for (&si, &wi) in s.nodes.iter().zip(&s.weights) {
            r.nodes.push(y0 / (si * si));
            r.weights.push(wi * 2.0 * y0 / (si * si * si));
        }
        r
    }

    /// The whole line: panels of width `h` on `[c − y0, c + y0]` and two tails.
    pub fn real_line(c: f64, y0: f64, h: f64, order: usize) -> LineRule {
        let mut r = LineRule::with_width(c - y0, c + y0, h, order);
        let t = LineRule::tail(y0, order);
        for (&y, &w) in t.nodes.iter().zip(&t.weights) {
            r.nodes.push(c + y);
            r.weights.push(w);
            r.nodes.push(c - y);
            r.weights.push(w);
        }
        r
    }

    /// `[a, ∞)`: panels of width `h` on `[a, a + x0]` and a tail.
    pub fn half_line(a: f64, x0: f64, h: f64, order: usize) -> LineRule {
        let mut r = LineRule::with_width(a, a + x0, h, order);
        let t = LineRule::tail(x0, order);
        for (&y, &w) in t.nodes.iter().zip(&t.weights) {
            r.nodes.push(a + y);
            r.weights.push(w);
        }
        r
    }

    pub fn push_panel(&mut self, a: f64, b: f64, order: usize) {
        let base = gauss_legendre_unit(order);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in base.0.iter().zip(&base.1) {
            self.nodes.push(mid + half * x);
            self.weights.push(half * w);
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> LineRule {
        LineRule { nodes: self.nodes.iter().map(|&x| f(x)).collect(), weights: self.weights.clone() }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_c<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Lower end of a Fourier-type integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lower {
    Finite(f64),
    /// `−∞`, where the integrand has Gaussian or exponential decay; the value is
    /// the truncation point used by the direct rule.
    Decaying(f64),
}

/// Above this frequency the endpoint (steepest-descent) representation is used.
pub const OMEGA_SWITCH: f64 = 10.0;

/// `∫_a^b g(t) e^{iωt} dt` for `g` analytic near `[a, b]`.
///
/// Moderate `|ω|` use panels resolving the oscillation. Large `|ω|` rotate the
/// contour at each finite endpoint into the half-plane where `e^{iωt}` decays,
/// `∫_a^b = E(a) − E(b)` with `E(c) = ±i e^{iωc} ∫_0^∞ g(c ± iτ) e^{−|ω|τ} dτ`.
/// Poles of `g` at height `y` contribute `O(e^{−|ω| y})`, negligible for the
/// integrands used here. `rate` is the exponential rate at which `g` itself
/// varies; it bounds the panel width of the direct rule.
pub fn fourier_integral<G: Fn(Complex64) -> Complex64>(g: G, lower: Lower, b: f64, omega: f64, rate: f64) -> Complex64 {
    if omega.abs() <= OMEGA_SWITCH {
        let a = match lower {
            Lower::Finite(a) | Lower::Decaying(a) => a,
        };
        if b <= a {
            return Complex64::new(0.0, 0.0);
        }
        let h = (4.0 / omega.abs().max(1e-300)).min(4.0 / rate.max(1e-300)).min(1.0);
        let panels = (((b - a) / h).ceil() as usize).max(1);
        let h = (b - a) / panels as f64;
        let base = gauss_legendre_unit(16);
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in base.0.iter().zip(&base.1) {
                let t = mid + 0.5 * h * x;
                acc += g(Complex64::new(t, 0.0)) * Complex64::from_polar(0.5 * h * w, omega * t);
            }
        }
        return acc;
    }
    let eb = endpoint_term(&g, b, omega);
    match lower {
        Lower::Finite(a) => endpoint_term(&g, a, omega) - eb,
        Lower::Decaying(_) => -eb,
    }
}

/// Endpoint decomposition of `∫_a^b g(t) e^{iωt} dt = Σ_k c_k e^{iω t_k}`,
/// returned as `(t_k, c_k)`; intended for `|ω|` above the switch, where the
/// coefficients vary slowly with `ω`.
pub fn fourier_endpoints<G: Fn(Complex64) -> Complex64>(g: G, lower: Lower, b: f64, omega: f64) -> Vec<(f64, Complex64)> {
    let mut out = Vec::with_capacity(2);
    if let Lower::Finite(a) = lower {
        out.push((a, endpoint_coefficient(&g, a, omega)));
    }
    out.push((b, -endpoint_coefficient(&g, b, omega)));
    out
}

fn endpoint_term<G: Fn(Complex64) -> Complex64>(g: &G, c: f64, omega: f64) -> Complex64 {
    Complex64::from_polar(1.0, omega * c) * endpoint_coefficient(g, c, omega)
}

fn endpoint_coefficient<G: Fn(Complex64) -> Complex64>(g: &G, c: f64, omega: f64) -> Complex64 {
    let rule = gauss_laguerre(LAGUERRE_ORDER);
    let w = omega.abs();
    let dir = if omega > 0.0 { 1.0 } else { -1.0 };
    let mut s = Complex64::new(0.0, 0.0);
    for (x, wt) in rule.0.iter().zip(&rule.1) {
        s += g(Complex64::new(c, dir * x / w)) * *wt;
    }
    Complex64::new(0.0, dir) * s / w
}

const LAGUERRE_ORDER: usize = 32;

/// Gauss–Laguerre nodes and weights for `∫_0^∞ f(s) e^{−s} ds`, memoized.
pub fn gauss_laguerre(order: usize) -> UnitRule {
    static CACHE: OnceLock<Mutex<HashMap<usize, UnitRule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&order) {
        return r.clone();
    }
    let rule = Arc::new(compute_gauss_laguerre(order));
    cache.lock().unwrap().insert(order, rule.clone());
    rule
}

fn compute_gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2])
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..200 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0 - z) * p2 - jf * p3) / (jf + 1.0);
            }
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs() {
                break;
            }
        }
        x[i] = z;
        w[i] = -1.0 / (pp * nf * p2);
    }
    (x, w)
}
