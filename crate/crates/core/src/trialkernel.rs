//! Trial kernels `K_n^♯(z,w) = e^{(n/2)(𝒱(z) + conj 𝒱(w) − Q(z) − Q(w))} Σ_j h_j P_j(z) conj P_j(w)`
//! built from necklace Blaschke products `P_j`, with the diagnostics comparing
//! them to the limit kernels and to the finite-`n` kernel.
//!
//! `P_j` has one zero at each atom of the `j`-atom necklace of `λ = ν/ν(Λ)`.
//! With atoms at `φ = L e^{iΘ(k/j)}`, `log P_j(z) = Σ_k F(k/j)` for the
//! quasi-periodic `F(u) = log(φ − L e^{iΘ(u)}) − log(1 − φ L e^{−iΘ(u)})`, and
//! Poisson summation gives `log P_j = j Σ_p F̂(jp)` plus the winding term.
//! One FFT per point thus serves every `j`; points too close to `Λ` or to the
//! pole circle fall back to the direct product.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::finitekernel::{Cocycle, RescalingFrame, WeightedBasis};
use crate::geometry::{balayage_density, blaschke_log, discretize, inverse_balayage, BoundaryMeasure, ConformalDomain, InteriorMeasure, NecklaceMeasure};
use crate::limitkernels::{LimitKernel, Regime};
use crate::potential::{script_v, DropletData, DropletKind};
use crate::specfun::{phi_real, LineRule};

/// Rule for the lowest index `m_n` of the hard-edge sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerCut {
    /// `⌊√n⌋`.
    Sqrt,
    /// `⌊n^{1/4}⌋`.
    QuarterRoot,
}

/// Alternates for the free schedule parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleOverrides {
    #[serde(default)]
    pub lower_cut: Option<LowerCut>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub upper: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    pub m: usize,
    pub big_m: usize,
    /// `ε_n`, hard edges only.
    pub epsilon: Option<f64>,
    pub delta: f64,
}

/// Default schedule: hard `m_n = ⌊n^{1/4}⌋`, `ε_n = (log n)^{−1/2}`,
/// `M_n = round(nν(1 − ε_n))`, `δ_n = log n/n`; soft and soft/hard
/// `m_n = ⌊n^{1/4}⌋`, `M_n = ⌊√(n log n)⌋`, `δ_n = log n/√n`.
pub fn schedule(regime: Regime, n: usize, nu_mass: f64) -> Result<Schedule> {
    schedule_with(regime, n, nu_mass, &ScheduleOverrides::default())
}

pub fn schedule_with(regime: Regime, n: usize, nu_mass: f64, ov: &ScheduleOverrides) -> Result<Schedule> {
    if n < 16 {
        return Err(param(format!("schedules need n ≥ 16, got {n}")));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let s = match regime {
        Regime::Hard => {
            // m_n = ⌊√n⌋ leaves out a fraction m_n/(nν) of the profile of B
            if !(nu_mass > 0.0) {
                return Err(param(format!("ν(Λ) must be positive, got {nu_mass}")));
            }
            let m = match ov.lower_cut.unwrap_or(LowerCut::QuarterRoot) {
                LowerCut::Sqrt => nf.sqrt().floor() as usize,
                LowerCut::QuarterRoot => nf.powf(0.25).floor() as usize,
            };
            let eps = ov.epsilon.unwrap_or(1.0 / ln.sqrt());
            if !(eps > 0.0 && eps < 1.0) {
                return Err(param(format!("ε_n = {eps} outside (0, 1)")));
            }
            let big_m = ov.upper.unwrap_or((nf * nu_mass * (1.0 - eps)).round() as usize);
            if big_m as f64 > nf * nu_mass {
                return Err(param(format!("M_n = {big_m} exceeds nν(Λ) = {}", nf * nu_mass)));
            }
            Schedule { m, big_m, epsilon: Some(eps), delta: ln / nf }
        }
        Regime::Soft | Regime::SoftHard => {
            let m = match ov.lower_cut.unwrap_or(LowerCut::QuarterRoot) {
                LowerCut::Sqrt => nf.sqrt().floor() as usize,
                LowerCut::QuarterRoot => nf.powf(0.25).floor() as usize,
            };
            let big_m = ov.upper.unwrap_or((nf * ln).sqrt().floor() as usize);
            if big_m > n {
                return Err(param(format!("M_n = {big_m} exceeds n")));
            }
            Schedule { m, big_m, epsilon: None, delta: ln / nf.sqrt() }
        }
        Regime::BulkGinibre => return Err(param("trial kernels exist for edge regimes only")),
    };
    if s.m == 0 || s.m >= s.big_m {
        return Err(param(format!("n = {n} too small: m_n = {} is not below M_n = {}", s.m, s.big_m)));
    }
    Ok(s)
}

/// `h_{j,n}` for `j = m_n..=M_n`. `local` is `ρ(z₀)` for hard edges and
/// `ΔQ(z₀)` otherwise.
pub fn coefficients(regime: Regime, n: usize, sched: &Schedule, local: f64, nu_mass: f64) -> Result<Vec<f64>> {
    let nf = n as f64;
    let out: Vec<f64> = (sched.m..=sched.big_m)
        .map(|j| {
            let jf = j as f64;
            match regime {
                Regime::Hard => local * local / nu_mass * (nf - jf / nu_mass),
                Regime::Soft => (nf / TAU).sqrt() * local / nu_mass * (-jf * jf / (2.0 * nf * nu_mass * nu_mass)).exp(),
                Regime::SoftHard => {
                    let u = 1.0 / phi_real(-jf / (nf.sqrt() * nu_mass));
                    (nf / TAU).sqrt() * u * local / nu_mass * (-jf * jf / (2.0 * nf * nu_mass * nu_mass)).exp()
                }
                Regime::BulkGinibre => f64::NAN,
            }
        })
        .collect();
    if let Some(j) = out.iter().position(|h| !(*h > 0.0)) {
        return Err(Error::Evaluation(format!("h_{{{},n}} = {} is not positive", sched.m + j, out[j])));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialOptions {
    #[serde(default = "default_offset")]
    pub lambda_offset: f64,
    #[serde(default)]
    pub schedule: ScheduleOverrides,
}

fn default_offset() -> f64 {
    0.15
}

impl Default for TrialOptions {
    fn default() -> Self {
        TrialOptions { lambda_offset: default_offset(), schedule: ScheduleOverrides::default() }
    }
}

/// `F̂` of one point: `log P_j = j Σ_p c_{jp} + iπκ(j+1)` before anchoring.
#[derive(Debug, Clone)]
struct Profile {
    kappa: i64,
    coeffs: Vec<Complex64>,
}

impl Profile {
    fn log_p(&self, j: usize) -> Complex64 {
        let n = self.coeffs.len();
        let mut s = self.coeffs[0];
        let mut q = j;
        while q < n / 2 {
            s += self.coeffs[q] + self.coeffs[n - q];
            q += j;
        }
        s * j as f64 + Complex64::new(0.0, PI * (self.kappa as f64) * (j + 1) as f64)
    }
}

/// A trial kernel with its schedule, coefficients and necklace data.
pub struct TrialKernel {
    pub regime: Regime,
    pub n: usize,
    pub schedule: Schedule,
    pub nu_mass: f64,
    /// `h_{j,n}` for `j = m_n..=M_n`.
    pub h: Vec<f64>,
    pub z0: Complex64,
    /// Offset actually used for `Λ` after retries.
    pub offset: f64,
    /// `ρ(z₀)` (hard) or `ΔQ(z₀)` (soft, soft/hard).
    pub local: f64,
    /// `Ω`: the hole (hard) or the complement of the droplet (soft, soft/hard).
    pub domain: ConformalDomain,
    pub lambda: BoundaryMeasure,
    droplet: DropletData,
    tables: Mutex<HashMap<usize, Arc<Vec<Complex64>>>>,
    necklaces: OnceLock<Vec<NecklaceMeasure>>,
    anchor: OnceLock<Profile>,
}

impl std::fmt::Debug for TrialKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrialKernel").field("regime", &self.regime).field("n", &self.n).field("schedule", &self.schedule).finish()
    }
}

/// Builds `K_n^♯` at the edge point `z₀` of a radial droplet.
pub fn build_trial_kernel(droplet: &DropletData, z0: Complex64, regime: Regime, n: usize, opts: &TrialOptions) -> Result<TrialKernel> {
    if droplet.kind == DropletKind::UserSuppliedCurves {
        return Err(Error::Unsupported("trial kernels need a radial droplet".into()));
    }
    let origin = Complex64::new(0.0, 0.0);
    let q = droplet.potential();
    let (dom, mu) = match regime {
        Regime::Hard => {
            let r0 = droplet.hard_hole.ok_or_else(|| param("hard trial kernel needs a droplet with a hard hole"))?;
            if (z0.norm() - r0).abs() > 1e-10 * r0.max(1.0) {
                return Err(domain(format!("{z0} is not on the hard edge |z| = {r0}")));
            }
            let dom = ConformalDomain::disc(origin, r0)?;
            let dens = |z: Complex64| droplet.equilibrium_density(z);
            let mu = balayage_density(&dom, InteriorMeasure::Area(&dens))?;
            (dom, mu)
        }
        Regime::Soft | Regime::SoftHard => {
            let big_r = droplet.outer_radius;
            if (z0.norm() - big_r).abs() > 1e-10 * big_r.max(1.0) {
                return Err(domain(format!("{z0} is not on the outer boundary |z| = {big_r}")));
            }
            let dom = ConformalDomain::disc_exterior(origin, big_r)?;
            // μ = ½ ∂_n Q ds on Γ
            let mu = BoundaryMeasure::from_ds_density(&dom, 1.0, |z| 0.5 * q.q1(z.norm()))?;
            (dom, mu)
        }
        Regime::BulkGinibre => return Err(param("trial kernels exist for edge regimes only")),
    };
    let nu_mass = mu.total_mass;
    let inv = inverse_balayage(&dom, &mu, opts.lambda_offset)?;
    let lambda = inv.nu.scaled(1.0 / inv.nu.total_mass);
    let local = match regime {
        Regime::Hard => mu.density_at(z0.arg()) * dom.derivative(z0).norm(),
        _ => q.laplacian(z0),
    };
    let schedule = schedule_with(regime, n, nu_mass, &opts.schedule)?;
    let h = coefficients(regime, n, &schedule, local, nu_mass)?;
    Ok(TrialKernel {
        regime,
        n,
        schedule,
        nu_mass,
        h,
        z0,
        offset: inv.offset,
        local,
        domain: dom,
        lambda,
        droplet: droplet.clone(),
        tables: Mutex::new(HashMap::new()),
        necklaces: OnceLock::new(),
        anchor: OnceLock::new(),
    })
}

const MIN_SAMPLES: usize = 512;
const MAX_SAMPLES: usize = 16384;

impl TrialKernel {
    pub fn droplet(&self) -> &DropletData {
        &self.droplet
    }

    /// `|φ|` on `Λ`.
    pub fn lambda_level(&self) -> f64 {
        self.lambda.level
    }

    /// `L e^{iΘ(l/N)}`, `l = 0..N`.
    fn atoms_on_grid(&self, n: usize) -> Arc<Vec<Complex64>> {
        let mut t = self.tables.lock().unwrap_or_else(|e| e.into_inner());
        t.entry(n)
            .or_insert_with(|| {
                let lvl = self.lambda.level;
                Arc::new((0..n).map(|l| Complex64::from_polar(lvl, self.lambda.quantile(l as f64 / n as f64))).collect())
            })
            .clone()
    }

    /// Unwrapped `F` on `N` samples with its winding `κ`, or `None` when a step
    /// of either logarithm turns by more than `π/2`.
    fn unwrapped(&self, w: Complex64, n: usize) -> Option<(Vec<Complex64>, i64)> {
        let atoms = self.atoms_on_grid(n);
        let mut out = Vec::with_capacity(n);
        let (mut pa, mut pb) = (0.0, 0.0);
        let (mut prev_a, mut prev_b) = (0.0, 0.0);
        for (l, &a) in atoms.iter().chain(std::iter::once(&atoms[0])).enumerate() {
            let num = w - a;
            let den = 1.0 - w * a.conj();
            if num.norm() == 0.0 || den.norm() == 0.0 {
                return None;
            }
            let (ta, tb) = (num.arg(), den.arg());
            if l > 0 {
                let da = wrap(ta - prev_a);
                let db = wrap(tb - prev_b);
                if da.abs() > 0.5 * PI || db.abs() > 0.5 * PI {
                    return None;
                }
                pa += da;
                pb += db;
            } else {
                pa = ta;
                pb = tb;
            }
            prev_a = ta;
            prev_b = tb;
            if l < n {
                out.push(Complex64::new(num.norm().ln() - den.norm().ln(), pa - pb));
            }
        }
        // winding of F over one period
        let total = (pa - pb) - out[0].im;
        let kappa = (total / TAU).round() as i64;
        Some((out, kappa))
    }

    fn profile(&self, z: Complex64) -> Option<Profile> {
        let w = self.domain.map(z);
        let mut n = MIN_SAMPLES;
        while n <= MAX_SAMPLES {
            if let Some((mut f, kappa)) = self.unwrapped(w, n) {
                for (l, v) in f.iter_mut().enumerate() {
                    v.im -= TAU * kappa as f64 * l as f64 / n as f64;
                }
                let mut planner = FftPlanner::new();
                planner.plan_fft_forward(n).process(&mut f);
                f.iter_mut().for_each(|c| *c /= n as f64);
                let scale = f[0].norm().max(1.0);
                let tail = f[n / 2 - n / 16..n / 2 + n / 16].iter().map(|c| c.norm()).fold(0.0, f64::max);
                if tail <= 1e-15 * scale {
                    return Some(Profile { kappa, coeffs: f });
                }
            }
            n *= 2;
        }
        None
    }

    fn anchor_profile(&self) -> &Profile {
        self.anchor.get_or_init(|| self.profile(self.z0).expect("the edge point is away from Λ and the poles"))
    }

    /// Necklaces `λ_j`, `j = m_n..=M_n`, for the direct product.
    fn necklaces(&self) -> Result<&Vec<NecklaceMeasure>> {
        if let Some(v) = self.necklaces.get() {
            return Ok(v);
        }
        let v = (self.schedule.m..=self.schedule.big_m).map(|j| discretize(&self.lambda, &self.domain, j)).collect::<Result<Vec<_>>>()?;
        Ok(self.necklaces.get_or_init(|| v))
    }

    /// `log P_j(z)` by the direct product over the atoms of `λ_j`.
    pub fn log_blaschke_direct(&self, j: usize, z: Complex64) -> Result<Complex64> {
        let nk = discretize(&self.lambda, &self.domain, j)?;
        let (lm, u) = blaschke_log(&self.domain, &nk, z, self.z0);
        Ok(Complex64::new(lm, u.arg()))
    }

    /// `log P_j(z)` for every `j = m_n..=M_n`, up to multiples of `2πi`.
    pub fn log_blaschke_all(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let range = self.schedule.m..=self.schedule.big_m;
        match self.profile(z) {
            Some(p) => {
                let a = self.anchor_profile();
                Ok(range.map(|j| {
                    let v = p.log_p(j);
                    Complex64::new(v.re, v.im - a.log_p(j).im)
                })
                .collect())
            }
            None => {
                let nks = self.necklaces()?;
                Ok(nks
                    .iter()
                    .map(|nk| {
                        let (lm, u) = blaschke_log(&self.domain, nk, z, self.z0);
                        Complex64::new(lm, u.arg())
                    })
                    .collect())
            }
        }
    }

    /// `U_Ω^λ(z)`, continued across `Γ` as `−∫ log|F| du`.
    pub fn green_potential(&self, z: Complex64) -> f64 {
        let w = self.domain.map(z);
        let atoms = self.atoms_on_grid(4096);
        -atoms.iter().map(|&a| ((w - a) / (1.0 - w * a.conj())).norm().ln()).sum::<f64>() / atoms.len() as f64
    }

    /// `(n/2)(𝒱(z) − Q(z))`.
    fn half_exponent(&self, z: Complex64) -> Result<Complex64> {
        let v = script_v(&self.droplet, z, self.z0)?;
        Ok((v - self.droplet.potential().evaluate(z)) * (0.5 * self.n as f64))
    }

    /// Exponents `(n/2)(𝒱 − Q)(z) + log P_j(z)` for every `j`.
    fn exponents(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let base = self.half_exponent(z)?;
        Ok(self.log_blaschke_all(z)?.into_iter().map(|l| l + base).collect())
    }

    fn combine(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let e: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + y.conj()).collect();
        let top = e.iter().map(|x| x.re).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        let s: Complex64 = e.iter().zip(&self.h).map(|(x, &h)| (x - top).exp() * h).sum();
        s * top.exp()
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let a = self.exponents(z)?;
        let b = if z == w { a.clone() } else { self.exponents(w)? };
        let k = self.combine(&a, &b);
        if !(k.re.is_finite() && k.im.is_finite()) {
            return Err(domain(format!("trial kernel is not finite at ({z}, {w})")));
        }
        Ok(k)
    }

    /// Radii `[a, b]` of the annulus carrying the trial masses: from the
    /// midpoint between `Γ` and the pole circle to the midpoint between `Γ`
    /// and `Λ`, cut at `Γ` where the weight is restricted.
    pub fn mass_annulus(&self) -> (f64, f64) {
        let lvl = self.lambda.level;
        match self.regime {
            Regime::Hard => {
                let r0 = self.droplet.hard_hole.unwrap_or(f64::NAN);
                (r0, 0.5 * (r0 + r0 / lvl))
            }
            Regime::Soft => {
                let r = self.droplet.outer_radius;
                (0.5 * (r + r / lvl), 0.5 * (r + r * lvl))
            }
            _ => {
                let r = self.droplet.outer_radius;
                (0.5 * (r + r / lvl), r)
            }
        }
    }
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

pub fn trial_eval(spec: &TrialKernel, z: Complex64, w: Complex64) -> Result<Complex64> {
    spec.eval(z, w)
}

/// `scale^{−2} c_n(ζ,η) K_n^♯(z_n, w_n) − L(ζ,η)`.
pub fn local_compare(spec: &TrialKernel, frame: &RescalingFrame, zeta: Complex64, eta: Complex64) -> Result<Complex64> {
    let cy = Cocycle::new(frame, spec.droplet());
    let k = spec.eval(frame.point(zeta), frame.point(eta))? / (frame.scale * frame.scale);
    Ok(k * cy.eval(zeta, eta)? - LimitKernel::new(frame.regime).eval(zeta, eta))
}

/// Part of the trial mass annulus measured by [`offdiag_mass`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassCut {
    InsideDelta,
    OutsideDelta,
    Total,
}

/// Gauss–Legendre panels on `[edge, other]` (either order) refined
/// geometrically towards `edge`.
fn graded_toward(edge: f64, other: f64, levels: usize, order: usize) -> LineRule {
    let g = LineRule::graded(0.0, (other - edge).abs(), levels, 0.5, order);
    let s = (other - edge).signum();
    LineRule { nodes: g.nodes.iter().map(|x| edge + s * x).collect(), weights: g.weights }
}

/// `scale^{−2} ∫ |K_n^♯(z_n(ζ), w)|² dA(w)` over the mass annulus, restricted
/// to `|w − z₀| < δ_n`, to its complement, or not at all.
pub fn offdiag_mass(spec: &TrialKernel, frame: &RescalingFrame, zeta: Complex64, cut: MassCut) -> Result<f64> {
    let z = frame.point(zeta);
    let kz = spec.exponents(z)?;
    let s2 = frame.scale * frame.scale;
    let point_mass = |w: Complex64| -> Result<f64> { Ok(spec.combine(&kz, &spec.exponents(w)?).norm_sqr()) };
    let inside = || -> Result<f64> { inside_mass(spec, &point_mass) };
    let total = || -> Result<f64> { total_mass(spec, &point_mass) };
    let v = match cut {
        MassCut::InsideDelta => inside()?,
        MassCut::OutsideDelta => total()? - inside()?,
        MassCut::Total => total()?,
    };
    Ok(v / s2)
}

fn total_mass(spec: &TrialKernel, f: &dyn Fn(Complex64) -> Result<f64>) -> Result<f64> {
    let (a, b) = spec.mass_annulus();
    let gamma = match spec.regime {
        Regime::Hard => a,
        Regime::Soft => spec.droplet.outer_radius,
        _ => b,
    };
    let mut radial = LineRule::default();
    for (edge, other) in [(gamma, a), (gamma, b)] {
        if (other - edge).abs() > 0.0 {
            let g = graded_toward(edge, other, 16, 12);
            radial.nodes.extend(g.nodes);
            radial.weights.extend(g.weights);
        }
    }
    let nt = (4 * spec.schedule.big_m + 64).max(256);
    let t0 = spec.z0.arg();
    let mut s = 0.0;
    for k in 0..nt {
        // shifted nodes keep away from the cut of 𝒱 opposite to z₀
        let t = t0 + TAU * (k as f64 + 0.5) / nt as f64;
        let e = Complex64::from_polar(1.0, t);
        for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
            s += f(e * r)? * 2.0 * r * wr.abs() / nt as f64;
        }
    }
    Ok(s)
}

/// Polar rule about `z₀` on `|w − z₀| < δ_n` intersected with the annulus.
fn inside_mass(spec: &TrialKernel, f: &dyn Fn(Complex64) -> Result<f64>) -> Result<f64> {
    let (a, b) = spec.mass_annulus();
    let delta = spec.schedule.delta;
    let r0 = spec.z0.norm();
    let t0 = spec.z0.arg();
    let radial = LineRule::panels(0.0, delta, 24, 16);
    let mut s = 0.0;
    for (&rho, &wr) in radial.nodes.iter().zip(&radial.weights) {
        // a² ≤ r0² + 2 r0 ρ cos ψ + ρ² ≤ b²
        let lo = ((a * a - r0 * r0 - rho * rho) / (2.0 * r0 * rho)).clamp(-1.0, 1.0);
        let hi = ((b * b - r0 * r0 - rho * rho) / (2.0 * r0 * rho)).clamp(-1.0, 1.0);
        if lo >= hi {
            continue;
        }
        let (p0, p1) = (hi.acos(), lo.acos());
        for sign in [1.0, -1.0] {
            let arc = LineRule::panels(p0, p1, 8, 12);
            for (&psi, &wp) in arc.nodes.iter().zip(&arc.weights) {
                let w = spec.z0 + Complex64::from_polar(rho, t0 + sign * psi);
                s += f(w)? * rho * wr * wp / PI;
            }
        }
    }
    Ok(s)
}

/// Terms of the extremal lower bound `k_n(ζ,ζ) ≥ (1 − tol)·d²/m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    /// `scale^{−2} K_n(z_n, z_n)`.
    pub finite: f64,
    /// `scale^{−2} K_n^♯(z_n, z_n)`.
    pub trial_diagonal: f64,
    /// `scale^{−2} ‖K_n^♯(·, z_n)‖²`.
    pub trial_mass: f64,
}

impl LowerBound {
    pub fn bound(&self) -> f64 {
        self.trial_diagonal * self.trial_diagonal / self.trial_mass
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.finite >= (1.0 - tol) * self.bound()
    }
}

pub fn lower_bound(basis: &WeightedBasis, spec: &TrialKernel, frame: &RescalingFrame, zeta: Complex64) -> Result<LowerBound> {
    let z = frame.point(zeta);
    let s2 = frame.scale * frame.scale;
    Ok(LowerBound {
        finite: basis.kernel(z, z).re / s2,
        trial_diagonal: spec.eval(z, z)?.re / s2,
        trial_mass: offdiag_mass(spec, frame, zeta, MassCut::Total)?,
    })
}
