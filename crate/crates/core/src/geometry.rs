//! Jordan domains given by Riemann maps, their Green's functions, balayage
//! onto the boundary `Γ`, inverse balayage onto an inner curve `Λ`, and
//! necklace discretizations of curve measures.
//!
//! Everything is computed in map coordinates `w = φ(z)`. A bounded domain is
//! sent to the unit disc, an exterior domain to the complement of the closed
//! unit disc. Curves are level sets `|φ| = s`, parametrized by `θ ↦ φ⁻¹(s e^{iθ})`,
//! and curve measures are stored by their density with respect to `dθ/2π`.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::specfun::LineRule;

/// Samples per curve measure.
pub const CURVE_SAMPLES: usize = 512;
const CDF_TABLE: usize = 4096;
const CONTINUATION_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    BoundedInterior,
    UnboundedExterior,
}

/// A series coefficient, real or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl Coefficient {
    fn value(self) -> Complex64 {
        match self {
            Coefficient::Real(x) => Complex64::new(x, 0.0),
            Coefficient::Complex([a, b]) => Complex64::new(a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub series: Vec<Coefficient>,
    #[serde(default)]
    pub center: [f64; 2],
}

/// Run-config description of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub map: MapSpec,
    pub orientation: Orientation,
    #[serde(default = "default_offset")]
    pub lambda_offset: f64,
}

fn default_offset() -> f64 {
    0.15
}

/// A simply connected domain `Ω` with its Riemann map.
///
/// Bounded: `φ(z) = Σ c_k (z − c)^k`. Exterior: `φ(z) = Σ c_k (z − c)^{1−k}`,
/// so `c_0` is the leading coefficient at infinity.
#[derive(Debug, Clone)]
pub struct ConformalDomain {
    pub series: Vec<Complex64>,
    pub center: Complex64,
    pub orientation: Orientation,
    pub lambda_offset: f64,
}

impl ConformalDomain {
    pub fn new(series: Vec<Complex64>, center: Complex64, orientation: Orientation) -> Result<ConformalDomain> {
        if series.iter().any(|c| !c.is_finite()) {
            return Err(param("map coefficients must be finite"));
        }
        match orientation {
            Orientation::BoundedInterior => {
                if series.len() < 2 || series[1] == Complex64::new(0.0, 0.0) {
                    return Err(param("bounded map needs a nonzero linear coefficient"));
                }
                if series[0].norm() >= 1.0 {
                    return Err(param("the center must map into the unit disc"));
                }
            }
            Orientation::UnboundedExterior => {
                if series.is_empty() || series[0] == Complex64::new(0.0, 0.0) {
                    return Err(param("exterior map needs a nonzero leading coefficient"));
                }
            }
        }
        Ok(ConformalDomain { series, center, orientation, lambda_offset: default_offset() })
    }

    /// The disc `D(c, r)`.
    pub fn disc(center: Complex64, r: f64) -> Result<ConformalDomain> {
        if !(r > 0.0) {
            return Err(param(format!("radius {r} must be positive")));
        }
        ConformalDomain::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0 / r, 0.0)], center, Orientation::BoundedInterior)
    }

    /// The exterior `{|z − c| > r}`.
    pub fn disc_exterior(center: Complex64, r: f64) -> Result<ConformalDomain> {
        if !(r > 0.0) {
            return Err(param(format!("radius {r} must be positive")));
        }
        ConformalDomain::new(vec![Complex64::new(1.0 / r, 0.0)], center, Orientation::UnboundedExterior)
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<ConformalDomain> {
        if !(spec.lambda_offset > 0.0 && spec.lambda_offset < 1.0) {
            return Err(param(format!("lambda_offset {} outside (0, 1)", spec.lambda_offset)));
        }
        let series = spec.map.series.iter().map(|c| c.value()).collect();
        let center = Complex64::new(spec.map.center[0], spec.map.center[1]);
        let mut d = ConformalDomain::new(series, center, spec.orientation)?;
        d.lambda_offset = spec.lambda_offset;
        d.validate()?;
        Ok(d)
    }

    pub fn is_bounded(&self) -> bool {
        self.orientation == Orientation::BoundedInterior
    }

    /// `φ(z)`.
    pub fn map(&self, z: Complex64) -> Complex64 {
        self.map_and_derivative(z).0
    }

    /// `φ′(z)`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.map_and_derivative(z).1
    }

    pub fn map_and_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let u = z - self.center;
        let zero = Complex64::new(0.0, 0.0);
        match self.orientation {
            Orientation::BoundedInterior => {
                // Horner for value and derivative
                let (mut f, mut d) = (zero, zero);
                for &c in self.series.iter().rev() {
                    d = d * u + f;
                    f = f * u + c;
                }
                (f, d)
            }
            Orientation::UnboundedExterior => {
                let v = u.inv();
                let (mut f, mut d) = (zero, zero);
                for &c in self.series[1..].iter().rev() {
                    d = d * v + f;
                    f = f * v + c;
                }
                // f(v) = Σ_{k≥1} c_k v^{k−1}; φ = c_0 u + f(v)
                let value = self.series[0] * u + f;
                let deriv = self.series[0] - d * v * v;
                (value, deriv)
            }
        }
    }

    /// `φ⁻¹(w)` by Newton continuation from a point with known preimage.
    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        let (mut z, start) = match self.orientation {
            Orientation::BoundedInterior => (self.center, self.series[0]),
            Orientation::UnboundedExterior => {
                if w.norm() == 0.0 {
                    return Err(domain("0 has no preimage under an exterior map"));
                }
                let far = w * (16.0 / w.norm()).max(16.0);
                let c1 = self.series.get(1).copied().unwrap_or_default();
                (self.center + (far - c1) / self.series[0], far)
            }
        };
        for step in 1..=CONTINUATION_STEPS {
            let target = start + (w - start) * (step as f64 / CONTINUATION_STEPS as f64);
            z = self.newton(z, target);
        }
        self.checked(z, w)
    }

    /// `φ⁻¹(w)` by Newton iteration from a nearby preimage.
    pub fn inverse_near(&self, w: Complex64, guess: Complex64) -> Result<Complex64> {
        let z = self.newton(guess, w);
        match self.checked(z, w) {
            Ok(z) => Ok(z),
            Err(_) => self.inverse(w),
        }
    }

    fn newton(&self, mut z: Complex64, target: Complex64) -> Complex64 {
        for _ in 0..40 {
            let (f, d) = self.map_and_derivative(z);
            let step = (f - target) / d;
            z -= step;
            if step.norm() <= 1e-16 * (1.0 + z.norm()) {
                break;
            }
        }
        z
    }

    fn checked(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let err = (self.map(z) - w).norm();
        if z.is_finite() && err <= 1e-12 * (1.0 + w.norm()) {
            Ok(z)
        } else {
            Err(Error::Accuracy(format!("inverse map did not converge at w = {w} (residual {err:e})")))
        }
    }

    /// Whether `z ∈ Ω̄`, up to a relative tolerance on `|φ|`.
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        let r = self.map(z).norm();
        match self.orientation {
            Orientation::BoundedInterior => r <= 1.0 + tol,
            Orientation::UnboundedExterior => r >= 1.0 - tol,
        }
    }

    /// `Γ(θ) = φ⁻¹(e^{iθ})`.
    pub fn boundary_point(&self, theta: f64) -> Result<Complex64> {
        self.inverse(Complex64::from_polar(1.0, theta))
    }

    /// Outer unit normal of `Ω` at the boundary point `z`.
    pub fn outward_normal(&self, z: Complex64) -> Complex64 {
        let (f, d) = self.map_and_derivative(z);
        // ∇|φ|² points along conj(φ′)·φ
        let g = d.conj() * f;
        let n = g / g.norm();
        match self.orientation {
            Orientation::BoundedInterior => n,
            Orientation::UnboundedExterior => -n,
        }
    }

    /// Points `φ⁻¹(s e^{iθ_k})` at `θ_k = 2πk/N`.
    pub fn level_curve(&self, level: f64, samples: usize) -> Result<Vec<Complex64>> {
        let mut pts = Vec::with_capacity(samples);
        let mut prev = self.inverse(Complex64::new(level, 0.0))?;
        for k in 0..samples {
            let w = Complex64::from_polar(level, TAU * k as f64 / samples as f64);
            prev = self.inverse_near(w, prev)?;
            pts.push(prev);
        }
        Ok(pts)
    }

    /// `|φ| = 1` on 64 boundary samples, and injectivity of `φ` on a mesh of `Ω`.
    pub fn validate(&self) -> Result<()> {
        for k in 0..64 {
            let theta = TAU * k as f64 / 64.0;
            let z = self.boundary_point(theta)?;
            let dev = (self.map(z).norm() - 1.0).abs();
            if dev > 1e-10 {
                return Err(domain(format!("|φ(Γ({theta}))| − 1 = {dev:e}")));
            }
        }
        let mut mesh = Vec::new();
        for i in 1..=8 {
            let s = match self.orientation {
                Orientation::BoundedInterior => i as f64 / 8.5,
                Orientation::UnboundedExterior => 8.5 / i as f64,
            };
            for k in 0..16 {
                let w = Complex64::from_polar(s, TAU * k as f64 / 16.0);
                mesh.push(self.inverse(w)?);
            }
        }
        let mut gap = f64::INFINITY;
        for (i, a) in mesh.iter().enumerate() {
            for b in &mesh[i + 1..] {
                gap = gap.min((a - b).norm());
            }
        }
        if !(gap > 0.0) {
            return Err(domain("Riemann map is not injective on the sample mesh"));
        }
        Ok(())
    }

    /// `|φ|` on `Λ` for the given offset: `1 − offset` inside, `1/(1 − offset)` outside.
    pub fn lambda_level(&self, offset: f64) -> f64 {
        match self.orientation {
            Orientation::BoundedInterior => 1.0 - offset,
            Orientation::UnboundedExterior => 1.0 / (1.0 - offset),
        }
    }

    /// Factor `m` such that sweeping a measure on `|φ| = level` onto `Γ`
    /// multiplies its `k`-th Fourier mode by `m^{|k|}`.
    fn mode_factor(&self, level: f64) -> f64 {
        match self.orientation {
            Orientation::BoundedInterior => level,
            Orientation::UnboundedExterior => 1.0 / level,
        }
    }

    fn strictly_inside(&self, level: f64) -> bool {
        match self.orientation {
            Orientation::BoundedInterior => level < 1.0,
            Orientation::UnboundedExterior => level > 1.0,
        }
    }
}

/// A measure on the curve `|φ| = level`.
#[derive(Debug, Clone)]
pub struct BoundaryMeasure {
    pub level: f64,
    /// Density with respect to `dθ/2π` at `θ_k = 2πk/N`.
    pub theta_density: Vec<f64>,
    pub points: Vec<Complex64>,
    /// `|dγ/dθ|` at the samples.
    pub speed: Vec<f64>,
    pub total_mass: f64,
    modes: Vec<Complex64>,
    cdf_table: OnceLock<Vec<f64>>,
}

fn fft(data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse { planner.plan_fft_inverse(data.len()) } else { planner.plan_fft_forward(data.len()) };
    plan.process(data);
}

/// Signed frequency of FFT slot `i`.
fn freq(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl BoundaryMeasure {
    fn build(domain: &ConformalDomain, level: f64, theta_density: Vec<f64>, modes: Vec<Complex64>) -> Result<BoundaryMeasure> {
        let n = theta_density.len();
        let points = domain.level_curve(level, n)?;
        let speed = points.iter().map(|&z| level / domain.derivative(z).norm()).collect();
        Ok(BoundaryMeasure { level, total_mass: modes[0].re, theta_density, points, speed, modes, cdf_table: OnceLock::new() })
    }

    fn from_theta_density(domain: &ConformalDomain, level: f64, theta_density: Vec<f64>) -> Result<BoundaryMeasure> {
        let n = theta_density.len() as f64;
        let mut modes: Vec<Complex64> = theta_density.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft(&mut modes, false);
        modes.iter_mut().for_each(|c| *c /= n);
        BoundaryMeasure::build(domain, level, theta_density, modes)
    }

    fn from_modes(domain: &ConformalDomain, level: f64, modes: Vec<Complex64>) -> Result<BoundaryMeasure> {
        let mut vals = modes.clone();
        fft(&mut vals, true);
        let dens = vals.iter().map(|c| c.re).collect();
        BoundaryMeasure::build(domain, level, dens, modes)
    }

    /// Measure on `|φ| = level` with density `f` with respect to `ds`.
    pub fn from_ds_density(domain: &ConformalDomain, level: f64, f: impl Fn(Complex64) -> f64) -> Result<BoundaryMeasure> {
        let points = domain.level_curve(level, CURVE_SAMPLES)?;
        let dens = points.iter().map(|&z| f(z) * level / domain.derivative(z).norm()).collect();
        BoundaryMeasure::from_theta_density(domain, level, dens)
    }

    pub fn len(&self) -> usize {
        self.theta_density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_density.is_empty()
    }

    pub fn theta(&self, k: usize) -> f64 {
        TAU * k as f64 / self.len() as f64
    }

    /// Density with respect to `ds = |dz|/2π` at sample `k`.
    pub fn density(&self, k: usize) -> f64 {
        self.theta_density[k] / self.speed[k]
    }

    /// `c_k`, `k ≥ 0`, of the `dθ/2π` density `Σ c_k e^{ikθ}`.
    pub fn mode(&self, k: usize) -> Complex64 {
        self.modes[k]
    }

    /// Trigonometric interpolant of the `dθ/2π` density.
    pub fn density_at(&self, theta: f64) -> f64 {
        let n = self.len();
        let mut s = self.modes[0].re;
        let e = Complex64::from_polar(1.0, theta);
        let mut p = e;
        for k in 1..n / 2 {
            s += 2.0 * (self.modes[k] * p).re;
            p *= e;
        }
        s
    }

    /// `∫ log(1/|z − ζ|) dμ(ζ)` by the trapezoidal rule in `θ`.
    pub fn log_potential(&self, z: Complex64) -> f64 {
        let n = self.len() as f64;
        self.points.iter().zip(&self.theta_density).map(|(&p, &d)| -d * (z - p).norm().ln()).sum::<f64>() / n
    }

    pub fn scaled(&self, factor: f64) -> BoundaryMeasure {
        let mut m = self.clone();
        m.theta_density.iter_mut().for_each(|x| *x *= factor);
        m.modes.iter_mut().for_each(|x| *x *= factor);
        m.total_mass *= factor;
        m.cdf_table = OnceLock::new();
        m
    }

    /// `∫_0^θ density dt/2π`.
    pub fn cdf(&self, theta: f64) -> f64 {
        let n = self.len();
        let mut s = self.modes[0].re * theta / TAU;
        let e = Complex64::from_polar(1.0, theta);
        let mut p = e;
        for k in 1..n / 2 {
            let c = self.modes[k] / Complex64::new(0.0, PI * k as f64);
            s += (c * (p - 1.0)).re;
            p *= e;
        }
        s
    }

    fn is_uniform(&self) -> bool {
        let c0 = self.modes[0].norm();
        self.modes[1..self.len() / 2].iter().all(|c| c.norm() <= 1e-15 * c0)
    }

    /// `θ ∈ [0, 2π]` with `cdf(θ) = u·total_mass`.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = u * self.total_mass;
        if self.is_uniform() {
            return TAU * u;
        }
        let table = self.cdf_table.get_or_init(|| (0..=CDF_TABLE).map(|i| self.cdf(TAU * i as f64 / CDF_TABLE as f64)).collect());
        let i = table.partition_point(|&f| f < target).clamp(1, CDF_TABLE);
        let h = TAU / CDF_TABLE as f64;
        let (mut lo, mut hi) = ((i - 1) as f64 * h, i as f64 * h);
        let (flo, fhi) = (table[i - 1], table[i]);
        let mut t = if fhi > flo { lo + h * (target - flo) / (fhi - flo) } else { lo };
        for _ in 0..50 {
            let f = self.cdf(t) - target;
            if f.abs() <= 1e-15 * self.total_mass {
                break;
            }
            if f < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let slope = self.density_at(t) / TAU;
            let next = t - f / slope;
            t = if slope > 0.0 && next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-15 {
                break;
            }
        }
        t
    }
}

/// `j` atoms of weight `1/j` on a curve `|φ| = level`.
#[derive(Debug, Clone)]
pub struct NecklaceMeasure {
    pub atoms: Vec<Complex64>,
    /// `φ(ζ_k)`.
    pub map_points: Vec<Complex64>,
    pub thetas: Vec<f64>,
}

impl NecklaceMeasure {
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.atoms.len() as f64
    }

    /// `∫ z^p dλ_j`.
    pub fn moment(&self, p: i32) -> Complex64 {
        self.atoms.iter().map(|z| z.powi(p)).sum::<Complex64>() * self.weight()
    }
}

/// Measures swept onto `Γ`.
#[derive(Clone, Copy)]
pub enum InteriorMeasure<'a> {
    /// Point masses `(ζ, mass)`.
    Atoms(&'a [(Complex64, f64)]),
    Necklace(&'a NecklaceMeasure),
    Curve(&'a BoundaryMeasure),
    /// Density with respect to `dA` on all of `Ω` (bounded domains).
    Area(&'a dyn Fn(Complex64) -> f64),
}

/// `g_Ω` in map coordinates: `log|1 − a b̄| − log|a − b|`.
fn green_w(a: Complex64, b: Complex64) -> f64 {
    (1.0 - a * b.conj()).norm().ln() - (a - b).norm().ln()
}

/// `g_Ω(z, ζ) = −log|(φ(z) − φ(ζ))/(1 − φ(z) conj φ(ζ))|`.
pub fn greens_function(domain: &ConformalDomain, z: Complex64, zeta: Complex64) -> Result<f64> {
    if z == zeta {
        return Err(Error::Pole(format!("Green's function at the pole {z}")));
    }
    for p in [z, zeta] {
        if !domain.contains(p, 1e-12) {
            return Err(crate::error::domain(format!("{p} lies outside the domain")));
        }
    }
    Ok(green_w(domain.map(z), domain.map(zeta)))
}

/// `ν̂`: the balayage of `ν` onto `Γ`, via the Poisson kernel of the disc in
/// map coordinates.
pub fn balayage_density(domain: &ConformalDomain, measure: InteriorMeasure<'_>) -> Result<BoundaryMeasure> {
    let n = CURVE_SAMPLES;
    let poisson_atoms = |atoms: &mut dyn Iterator<Item = (Complex64, f64)>| -> Result<BoundaryMeasure> {
        let mut dens = vec![0.0; n];
        for (zeta, mass) in atoms {
            let a = domain.map(zeta);
            let r = domain.mode_factor(a.norm());
            if !(r < 1.0) {
                return Err(crate::error::domain(format!("atom {zeta} is not inside the domain")));
            }
            if r.powi(n as i32) > 1e-13 {
                return Err(Error::Accuracy(format!("atom {zeta} is too close to the boundary")));
            }
            let num = (1.0 - a.norm_sqr()).abs();
            for (k, d) in dens.iter_mut().enumerate() {
                let e = Complex64::from_polar(1.0, TAU * k as f64 / n as f64);
                *d += mass * num / (e - a).norm_sqr();
            }
        }
        BoundaryMeasure::from_theta_density(domain, 1.0, dens)
    };
    match measure {
        InteriorMeasure::Atoms(a) => poisson_atoms(&mut a.iter().copied()),
        InteriorMeasure::Necklace(nk) => {
            let w = nk.weight();
            poisson_atoms(&mut nk.atoms.iter().map(|&z| (z, w)))
        }
        InteriorMeasure::Curve(m) => {
            if !domain.strictly_inside(m.level) {
                return Err(crate::error::domain("curve measure is not inside the domain"));
            }
            let f = domain.mode_factor(m.level);
            let modes = m.modes.iter().enumerate().map(|(i, &c)| c * f.powi(freq(i, m.len()).unsigned_abs() as i32)).collect();
            BoundaryMeasure::from_modes(domain, 1.0, modes)
        }
        InteriorMeasure::Area(dens) => {
            if !domain.is_bounded() {
                return Err(Error::Unsupported("area measures on exterior domains".into()));
            }
            let rings = LineRule::panels(0.0, 1.0, 4, 16);
            let mut modes = vec![Complex64::new(0.0, 0.0); n];
            for (&rho, &wt) in rings.nodes.iter().zip(&rings.weights) {
                let pts = domain.level_curve(rho, n)?;
                // pulled-back density f(ρ, t) = dens(ψ)·|ψ′|²; dA = 2ρ dρ · dt/2π
                let mut f: Vec<Complex64> = pts.iter().map(|&z| Complex64::new(dens(z) / domain.derivative(z).norm_sqr(), 0.0)).collect();
                fft(&mut f, false);
                for (i, m) in modes.iter_mut().enumerate() {
                    let k = freq(i, n).unsigned_abs() as i32;
                    *m += f[i] / n as f64 * (wt * 2.0 * rho * rho.powi(k));
                }
            }
            BoundaryMeasure::from_modes(domain, 1.0, modes)
        }
    }
}

/// `Λ` and `ν` with `ν̂ = μ`.
#[derive(Debug, Clone)]
pub struct InverseBalayage {
    pub offset: f64,
    /// `|φ|` on `Λ`.
    pub level: f64,
    pub nu: BoundaryMeasure,
}

/// Inverse balayage with the offset halved (up to six times) whenever the
/// density of `ν` comes out negative or its series diverges on `Λ`.
pub fn inverse_balayage(domain: &ConformalDomain, mu: &BoundaryMeasure, offset: f64) -> Result<InverseBalayage> {
    let mut off = offset;
    for _ in 0..6 {
        match inverse_balayage_at(domain, mu, off) {
            Err(Error::OffsetTooLarge { .. }) => off *= 0.5,
            r => return r,
        }
    }
    inverse_balayage_at(domain, mu, off)
}

/// One attempt at the given offset.
///
/// The harmonic extension of `U^μ` across `Γ` has the modes of `μ` divided
/// by `m^{|k|}` on `Λ`; the jump of its normal derivative across `Λ` is the
/// density of `ν`.
pub fn inverse_balayage_at(domain: &ConformalDomain, mu: &BoundaryMeasure, offset: f64) -> Result<InverseBalayage> {
    if !(offset > 0.0 && offset < 1.0) {
        return Err(param(format!("offset {offset} outside (0, 1)")));
    }
    if (mu.level - 1.0).abs() > 1e-14 {
        return Err(param("μ must live on Γ"));
    }
    let level = domain.lambda_level(offset);
    let m = domain.mode_factor(level);
    let n = mu.len();
    let c0 = mu.modes[0].norm();
    let mut modes = vec![Complex64::new(0.0, 0.0); n];
    for (i, &c) in mu.modes.iter().enumerate() {
        if c.norm() <= 1e-15 * c0 {
            continue;
        }
        let k = freq(i, n).unsigned_abs();
        let v = c / m.powi(k as i32);
        if k as usize >= n / 4 && v.norm() > 1e-8 * c0 {
            return Err(Error::OffsetTooLarge { offset, reason: format!("mode {k} of ν is {:e}; the series does not converge on Λ", v.norm()) });
        }
        modes[i] = v;
    }
    let nu = BoundaryMeasure::from_modes(domain, level, modes)?;
    let min = nu.theta_density.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        return Err(Error::OffsetTooLarge { offset, reason: format!("density of ν reaches {min:e}") });
    }
    Ok(InverseBalayage { offset, level, nu })
}

/// The necklace `λ_j`: atoms where the cumulative `λ`-measure along the curve
/// reaches `k/j`, `k = 1..j`.
pub fn discretize(lambda: &BoundaryMeasure, domain: &ConformalDomain, j: usize) -> Result<NecklaceMeasure> {
    if j == 0 {
        return Err(param("atom count must be positive"));
    }
    if (lambda.total_mass - 1.0).abs() > 1e-9 {
        return Err(param(format!("λ has mass {}, expected a probability measure", lambda.total_mass)));
    }
    let n = lambda.len();
    let mut out = NecklaceMeasure { atoms: Vec::with_capacity(j), map_points: Vec::with_capacity(j), thetas: Vec::with_capacity(j) };
    for k in 1..=j {
        let theta = lambda.quantile(k as f64 / j as f64);
        let w = Complex64::from_polar(lambda.level, theta);
        let guess = lambda.points[((theta / TAU * n as f64).round() as usize) % n];
        out.atoms.push(domain.inverse_near(w, guess)?);
        out.map_points.push(w);
        out.thetas.push(theta);
    }
    Ok(out)
}

/// `U_Ω^ν(z) = ∫ g_Ω(z, ζ) dν(ζ)`.
///
/// Curve measures use the Fourier expansion of `log|w − a|` and `log|1 − w ā|`
/// in map coordinates; atoms are summed exactly.
pub fn greens_potential(domain: &ConformalDomain, measure: InteriorMeasure<'_>, z: Complex64) -> Result<f64> {
    if !domain.contains(z, 1e-9) {
        return Err(crate::error::domain(format!("{z} lies outside the domain")));
    }
    let w = domain.map(z);
    let atom_sum = |it: &mut dyn Iterator<Item = (Complex64, f64)>| -> Result<f64> {
        let mut s = 0.0;
        for (a, mass) in it {
            if (w - a).norm() <= 1e-14 {
                return Err(Error::Pole(format!("{z} is an atom of the measure")));
            }
            s += mass * green_w(w, a);
        }
        Ok(s)
    };
    match measure {
        InteriorMeasure::Atoms(a) => atom_sum(&mut a.iter().map(|&(p, m)| (domain.map(p), m))),
        InteriorMeasure::Necklace(nk) => {
            let wt = nk.weight();
            atom_sum(&mut nk.map_points.iter().map(|&a| (a, wt)))
        }
        InteriorMeasure::Curve(m) => {
            let s = m.level;
            let r = w.norm();
            if (r - s).abs() <= 1e-12 * s {
                return Err(Error::Pole(format!("{z} lies on the support")));
            }
            let c0 = m.modes[0].re;
            let terms = m.len() / 2;
            // Σ_{k≥1} c_k x^k / k for the two series
            let series = |x: Complex64, conj_modes: bool| -> f64 {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut p = x;
                for k in 1..terms {
                    let c = if conj_modes { m.modes[k].conj() } else { m.modes[k] };
                    acc += c * p / k as f64;
                    p *= x;
                    if p.norm() < 1e-18 {
                        break;
                    }
                }
                acc.re
            };
            let t1 = match domain.orientation {
                Orientation::BoundedInterior => -series(w * s, false),
                Orientation::UnboundedExterior => c0 * (r.ln() + s.ln()) - series((w * s).inv(), true),
            };
            let t2 = if r < s { c0 * s.ln() - series(w / s, false) } else { c0 * r.ln() - series(s / w, true) };
            Ok(t1 - t2)
        }
        InteriorMeasure::Area(_) => Err(Error::Unsupported("Green's potential of area measures".into())),
    }
}

/// `Π_k (φ(z) − φ(ζ_k))/(1 − φ(z) conj φ(ζ_k))`, rotated to be positive at
/// `anchor`, returned as `(log modulus, unimodular phase)`.
pub fn blaschke_log(domain: &ConformalDomain, necklace: &NecklaceMeasure, z: Complex64, anchor: Complex64) -> (f64, Complex64) {
    let raw = |w: Complex64| -> (f64, Complex64) {
        let mut lm = 0.0;
        let mut p = Complex64::new(1.0, 0.0);
        for &a in &necklace.map_points {
            p *= (w - a) / (1.0 - w * a.conj());
            let r = p.norm();
            if r > 1e100 || (r < 1e-100 && r > 0.0) {
                lm += r.ln();
                p /= r;
            }
        }
        let r = p.norm();
        if r == 0.0 {
            return (f64::NEG_INFINITY, Complex64::new(1.0, 0.0));
        }
        (lm + r.ln(), p / r)
    };
    let (lm, u) = raw(domain.map(z));
    let (_, u0) = raw(domain.map(anchor));
    (lm, u * u0.conj())
}

/// The holomorphic factor `e^{−j𝒰_{λ_j}(z)}`; modulus `e^{−j U_Ω^{λ_j}(z)}`.
pub fn blaschke_factor_product(domain: &ConformalDomain, necklace: &NecklaceMeasure, z: Complex64, anchor: Complex64) -> Complex64 {
    let (lm, u) = blaschke_log(domain, necklace, z, anchor);
    u * lm.exp()
}
