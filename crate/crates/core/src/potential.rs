//! External potentials `Q`, radial equilibrium data, the obstacle function
//! `Q̌` and the holomorphic completion `𝒱` of its harmonic continuation.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::specfun::LineRule;

/// Run-config description of a potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `Q(z) = coefficient·|z|^exponent`.
    Radial {
        profile: RadialProfile,
        exponent: f64,
        coefficient: f64,
    },
    /// Radial `q` sampled at increasing radii, interpolated by a natural
    /// cubic spline (which also supplies `q′`, `q″`).
    Custom {
        r: Vec<f64>,
        q: Vec<f64>,
        #[serde(default)]
        growth_margin: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialProfile {
    Power,
}

#[derive(Clone)]
enum Kind {
    Power { coefficient: f64, exponent: f64 },
    Table(Arc<Spline>),
    General { q: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>, laplacian: Arc<dyn Fn(Complex64) -> f64 + Send + Sync> },
}

/// An external field `Q` with its Laplacian `ΔQ = ∂∂̄Q`.
#[derive(Clone)]
pub struct Potential {
    kind: Kind,
    /// User-declared `liminf Q/log|z|² − 1`.
    pub growth_margin: f64,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Power { coefficient, exponent } => write!(f, "Potential({coefficient}|z|^{exponent})"),
            Kind::Table(s) => write!(f, "Potential(table, {} knots)", s.x.len()),
            Kind::General { .. } => write!(f, "Potential(general)"),
        }
    }
}

impl Potential {
    /// `Q = c|z|^p`, `c > 0`, `p > 0`.
    pub fn radial_power(coefficient: f64, exponent: f64) -> Result<Potential> {
        if !(coefficient > 0.0 && exponent > 0.0) {
            return Err(param(format!("radial power needs positive coefficient and exponent, got {coefficient}, {exponent}")));
        }
        // Q/log|z|² → ∞, so any margin holds; record a generous one
        Ok(Potential { kind: Kind::Power { coefficient, exponent }, growth_margin: 1.0 })
    }

    /// The Ginibre potential `|z|²`.
    pub fn ginibre() -> Potential {
        Potential::radial_power(1.0, 2.0).expect("valid constants")
    }

    pub fn radial_table(r: Vec<f64>, q: Vec<f64>, growth_margin: f64) -> Result<Potential> {
        Ok(Potential { kind: Kind::Table(Arc::new(Spline::new(r, q)?)), growth_margin })
    }

    /// A non-radial potential from closures for `Q` and `ΔQ`.
    pub fn general<Q, L>(q: Q, laplacian: L, growth_margin: f64) -> Potential
    where
        Q: Fn(Complex64) -> f64 + Send + Sync + 'static,
        L: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        Potential { kind: Kind::General { q: Arc::new(q), laplacian: Arc::new(laplacian) }, growth_margin }
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Potential> {
        match spec {
            PotentialSpec::Radial { profile: RadialProfile::Power, exponent, coefficient } => Potential::radial_power(*coefficient, *exponent),
            PotentialSpec::Custom { r, q, growth_margin } => Potential::radial_table(r.clone(), q.clone(), growth_margin.unwrap_or(0.0)),
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self.kind, Kind::General { .. })
    }

    pub fn evaluate(&self, z: Complex64) -> f64 {
        match &self.kind {
            Kind::General { q, .. } => q(z),
            _ => self.q(z.norm()),
        }
    }

    pub fn laplacian(&self, z: Complex64) -> f64 {
        match &self.kind {
            Kind::General { laplacian, .. } => laplacian(z),
            Kind::Power { coefficient, exponent } => 0.25 * coefficient * exponent * exponent * z.norm().powf(exponent - 2.0),
            Kind::Table(_) => {
                let r = z.norm();
                0.25 * (self.q2(r) + self.q1(r) / r)
            }
        }
    }

    /// `q(r)` with `Q(z) = q(|z|)`; `None` for non-radial potentials.
    pub fn radial_profile(&self, r: f64) -> Option<f64> {
        self.is_radial().then(|| self.q(r))
    }

    /// `q(r)` without the radial check.
    pub fn q(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Power { coefficient, exponent } => coefficient * r.powf(*exponent),
            Kind::Table(s) => s.eval(r).0,
            Kind::General { q, .. } => q(Complex64::new(r, 0.0)),
        }
    }

    /// `(c, p)` for `Q = c|z|^p`.
    pub fn power_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            Kind::Power { coefficient, exponent } => Some((coefficient, exponent)),
            _ => None,
        }
    }

    /// `q′(r)`.
    pub fn q1(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Power { coefficient, exponent } => coefficient * exponent * r.powf(exponent - 1.0),
            Kind::Table(s) => s.eval(r).1,
            Kind::General { .. } => f64::NAN,
        }
    }

    fn q2(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Power { coefficient, exponent } => coefficient * exponent * (exponent - 1.0) * r.powf(exponent - 2.0),
            Kind::Table(s) => s.eval(r).2,
            Kind::General { .. } => f64::NAN,
        }
    }

    /// The growth bound `Q/log|z|² ≥ 1 + margin/2` at `|z| ∈ {1e3, 1e4}`, and
    /// `ΔQ > 0` sampled on the disc of radius `radius`.
    pub fn validate(&self, radius: f64) -> Result<()> {
        for r in [1e3, 1e4] {
            for k in 0..8 {
                let z = Complex64::from_polar(r, k as f64 * PI / 4.0);
                let ratio = self.evaluate(z) / (2.0 * r.ln());
                if !(ratio >= 1.0 + 0.5 * self.growth_margin) {
                    return Err(domain(format!("growth bound fails at |z| = {r}: Q/log|z|^2 = {ratio}")));
                }
            }
        }
        for i in 1..=20 {
            for k in 0..16 {
                let z = Complex64::from_polar(radius * i as f64 / 20.0, k as f64 * PI / 8.0);
                if !(self.laplacian(z) > 0.0) {
                    return Err(domain(format!("Laplacian not positive at {z}")));
                }
            }
        }
        Ok(())
    }
}

/// Natural cubic spline returning value, first and second derivative.
/// Outside the knots the end cubics are extended.
struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Spline> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(param("spline table needs at least three matching (r, q) pairs"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x[0] < 0.0 {
            return Err(param("spline radii must be nonnegative and strictly increasing"));
        }
        // tridiagonal system for second derivatives, natural ends
        let mut a = vec![0.0; n];
        let mut b = vec![1.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
        Ok(Spline { x, y, m })
    }

    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let (a, b) = ((x1 - t) / h, (t - x0) / h);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (self.y[i + 1] - self.y[i]) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        (v, d1, d2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropletKind {
    Disc,
    Annulus,
    UserSuppliedCurves,
}

/// A closed curve `θ ↦ γ(θ)`, `θ ∈ [0, 2π)`.
#[derive(Clone)]
pub struct Curve(pub Arc<dyn Fn(f64) -> Complex64 + Send + Sync>);

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Curve")
    }
}

/// The droplet `S = supp σ` and its equilibrium constant `F_σ`.
#[derive(Debug, Clone)]
pub struct DropletData {
    pub kind: DropletKind,
    pub outer_radius: f64,
    pub inner_radius: f64,
    pub boundary_curves: Vec<Curve>,
    pub f_sigma: f64,
    /// Radius of an excluded disc `Ω = D(0, r₀)` carrying a hard edge.
    pub hard_hole: Option<f64>,
    potential: Potential,
}

impl DropletData {
    /// Droplet supplied by the user for a non-radial potential.
    pub fn user_supplied(potential: Potential, curves: Vec<Curve>, f_sigma: f64) -> DropletData {
        DropletData {
            kind: DropletKind::UserSuppliedCurves,
            outer_radius: f64::NAN,
            inner_radius: 0.0,
            boundary_curves: curves,
            f_sigma,
            hard_hole: None,
            potential,
        }
    }

    /// Declare a hard edge along `|z| = r₀` inside the droplet.
    pub fn with_hard_hole(mut self, r0: f64) -> Result<DropletData> {
        if !(r0 > self.inner_radius && r0 < self.outer_radius) {
            return Err(param(format!("hole radius {r0} must lie inside the droplet")));
        }
        self.hard_hole = Some(r0);
        Ok(self)
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r >= self.inner_radius && r <= self.outer_radius
    }

    /// `ΔQ·1_S`.
    pub fn equilibrium_density(&self, z: Complex64) -> f64 {
        if self.contains(z) {
            self.potential.laplacian(z)
        } else {
            0.0
        }
    }

    /// `σ(D(0, r))` in the radial case: `(r q′(r) − r_in q′(r_in))/2` on `S`.
    pub fn mass_within(&self, r: f64) -> f64 {
        let q = &self.potential;
        let rin = self.inner_radius;
        let base = if rin > 0.0 { rin * q.q1(rin) } else { 0.0 };
        let r = r.clamp(rin, self.outer_radius);
        if r <= 0.0 {
            return 0.0;
        }
        0.5 * (r * q.q1(r) - base)
    }

    /// `∫_S ΔQ dA` by quadrature.
    pub fn total_mass(&self) -> f64 {
        let rule = LineRule::with_width(self.inner_radius, self.outer_radius, 0.05 * self.outer_radius, 16);
        rule.integrate(|r| 2.0 * r * self.potential.laplacian(Complex64::new(r, 0.0)))
    }

    /// `U^σ(z)` for a radial droplet, `∫ log(1/|z − w|) dσ(w)`.
    pub fn log_potential(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let rule = LineRule::with_width(self.inner_radius, self.outer_radius, 0.05 * self.outer_radius, 16);
        // a rotation-invariant shell of radius s contributes −log max(r, s) per unit mass
        rule.integrate(|s| {
            let dm = 2.0 * s * self.potential.laplacian(Complex64::new(s, 0.0));
            -dm * s.max(r).ln()
        })
    }
}

/// Radial droplet: outer radius from `R q′(R) = 2`, inner radius from
/// `r q′(r) = 0` when `r q′(r)` is negative near the origin.
pub fn radial_droplet(potential: &Potential) -> Result<DropletData> {
    if !potential.is_radial() {
        return Err(Error::Unsupported("droplets of non-radial potentials must be user supplied".into()));
    }
    let f = |r: f64| r * potential.q1(r);
    let inner = if f(1e-9) < 0.0 { bisect(&f, 0.0, 1e-9)? } else { 0.0 };
    let outer = bisect(&f, 2.0, inner.max(1e-9))?;
    let q = potential.q(outer);
    Ok(DropletData {
        kind: if inner > 0.0 { DropletKind::Annulus } else { DropletKind::Disc },
        outer_radius: outer,
        inner_radius: inner,
        boundary_curves: Vec::new(),
        f_sigma: q - 2.0 * outer.ln(),
        hard_hole: None,
        potential: potential.clone(),
    })
}

/// Root of `f(r) = level` above `start`, for increasing `f`.
fn bisect(f: &impl Fn(f64) -> f64, level: f64, start: f64) -> Result<f64> {
    let mut lo = start;
    let mut hi = start.max(1e-3);
    let mut k = 0;
    while !(f(hi) >= level) {
        lo = hi;
        hi *= 2.0;
        k += 1;
        if k > 80 {
            return Err(domain(format!("no root of r q'(r) = {level} in scan range")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Weighted logarithmic energy of a discrete measure, self-energy excluded.
pub fn energy(points: &[(Complex64, f64)], potential: &Potential) -> Result<f64> {
    if points.iter().any(|p| !(p.1 >= 0.0)) {
        return Err(param("weights must be nonnegative"));
    }
    let total: f64 = points.iter().map(|p| p.1).sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(param(format!("weights sum to {total}, expected 1")));
    }
    let mut e = 0.0;
    for (i, &(z, w)) in points.iter().enumerate() {
        for &(u, v) in &points[i + 1..] {
            let d = (z - u).norm();
            if d == 0.0 {
                return Err(domain(format!("coincident points at {z}")));
            }
            e += 2.0 * w * v * (1.0 / d).ln();
        }
        e += w * potential.evaluate(z);
    }
    Ok(e)
}

/// `Q̌(z) = −2U^σ(z) + F_σ`; radial droplets only.
pub fn obstacle_function(droplet: &DropletData, z: Complex64) -> Result<f64> {
    if droplet.kind == DropletKind::UserSuppliedCurves {
        return Err(Error::Unsupported("obstacle function for user supplied droplets".into()));
    }
    let q = &droplet.potential;
    let r = z.norm();
    if r <= droplet.outer_radius && r >= droplet.inner_radius {
        Ok(q.evaluate(z))
    } else if r > droplet.outer_radius {
        Ok(q.q(droplet.outer_radius) + 2.0 * (r / droplet.outer_radius).ln())
    } else {
        // no mass in the central hole of an annulus: U^σ is constant there
        Ok(q.q(droplet.inner_radius))
    }
}

/// `𝒱(z)`, holomorphic with `Re 𝒱 = V` near the boundary circle through the
/// anchor `z₀` and real at `z₀`.
///
/// On the outer boundary `𝒱(z) = 2 log z + q(R) − 2 log R`, the logarithm cut
/// along the ray opposite to `z₀`. On a hard hole `|z| = r₀`, `V` continues
/// the constant value of `Q̌` inside the hole and `𝒱 ≡ q(r₀)`.
pub fn script_v(droplet: &DropletData, z: Complex64, anchor: Complex64) -> Result<Complex64> {
    if droplet.kind == DropletKind::UserSuppliedCurves {
        return Err(Error::Unsupported("script V for user supplied droplets".into()));
    }
    let q = &droplet.potential;
    let ra = anchor.norm();
    if let Some(r0) = droplet.hard_hole {
        if (ra - r0).abs() <= 1e-10 * r0.max(1.0) {
            return Ok(Complex64::new(q.q(r0), 0.0));
        }
    }
    let big_r = droplet.outer_radius;
    if (ra - big_r).abs() > 1e-10 * big_r.max(1.0) {
        return Err(domain(format!("anchor {anchor} is not on a boundary circle")));
    }
    let w = z / anchor;
    if w.im == 0.0 && w.re <= 0.0 {
        return Err(domain(format!("{z} lies on the branch cut of script V")));
    }
    Ok(Complex64::new(2.0 * (z.norm() / big_r).ln() + q.q(big_r), 2.0 * w.arg()))
}
