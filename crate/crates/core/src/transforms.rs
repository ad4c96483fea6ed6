//! Laplace and Bargmann transforms, and numerical checks of the spaces
//! `𝒜` (Bergman space of the right half-plane `ℍ`), `ℋ_ℂ` and `ℋ_𝕃`.
//!
//! Area integrals are taken against `dA = dx dy/π`. Integrands in these
//! spaces decay only algebraically along vertical lines, so the integrator
//! works on a central window `|y| ≤ Y0` plus two tails; a function may
//! describe its tail as a short sum `Σ a_k(y) e^{iω_k y}` with slowly varying
//! amplitudes (see [`Tangential::split`]) so that beating cross terms are
//! integrated as oscillatory integrals rather than through the algebraic map.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::limitkernels::{faddeeva, hard_edge_b, psi, soft_hard_kernel};
use crate::specfun::{fourier_endpoints, fourier_integral, gauss_laguerre, gauss_legendre_unit, phi_real, LineRule, Lower};

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Edge of the central window and of the rectangle reported by
/// [`bergman_halfplane_norm`].
pub const Y0: f64 = 40.0;
/// End of the resolved part of beating tails.
const Y1: f64 = 200.0;
/// Above this modulus `laplace` uses the endpoint expansion.
const LAPLACE_SWITCH: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    UnitInterval,
    NegativeHalfline,
}

/// A profile `F` on `[0, 1]` or `(−∞, 0]`.
///
/// The evaluator takes complex arguments: transforms at large `|ζ|` deform
/// the `t`-contour, so `F` must be analytic near its support (for
/// `negative_halfline` profiles with a cutoff, near `[cutoff, 0]`).
#[derive(Clone)]
pub struct ProfileFunction {
    pub support: Support,
    /// Left end of the support of a `negative_halfline` profile, if finite.
    pub lower_cutoff: Option<f64>,
    pub description: String,
    evaluator: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for ProfileFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileFunction")
            .field("support", &self.support)
            .field("lower_cutoff", &self.lower_cutoff)
            .field("description", &self.description)
            .finish()
    }
}

impl ProfileFunction {
    pub fn new<F>(support: Support, description: &str, f: F) -> ProfileFunction
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        ProfileFunction { support, lower_cutoff: None, description: description.to_string(), evaluator: Arc::new(f) }
    }

    pub fn unit_interval<F>(description: &str, f: F) -> ProfileFunction
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        ProfileFunction::new(Support::UnitInterval, description, f)
    }

    pub fn negative_halfline<F>(description: &str, f: F) -> ProfileFunction
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        ProfileFunction::new(Support::NegativeHalfline, description, f)
    }

    /// Restrict a `negative_halfline` profile to `[cutoff, 0]`.
    pub fn with_lower_cutoff(mut self, cutoff: f64) -> ProfileFunction {
        self.lower_cutoff = Some(cutoff);
        self
    }

    /// `t^k` on `[0, 1]`.
    pub fn power(k: i32) -> ProfileFunction {
        ProfileFunction::unit_interval(&format!("t^{k}"), move |t| t.powi(k))
    }

    /// The indicator of `[a, 0]`, `a < 0`.
    pub fn indicator(a: f64) -> ProfileFunction {
        ProfileFunction::negative_halfline(&format!("1[{a},0]"), |_| Complex64::new(1.0, 0.0)).with_lower_cutoff(a)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        (self.evaluator)(t)
    }

    pub fn eval_real(&self, t: f64) -> Complex64 {
        (self.evaluator)(Complex64::new(t, 0.0))
    }

    /// Finite values on a 1000-point sample of the support; for unit-interval
    /// profiles also `|F(t)|/√t` moderate at `t = 1e−6`.
    pub fn validate(&self) -> Result<()> {
        let (a, b) = match self.support {
            Support::UnitInterval => (0.0, 1.0),
            Support::NegativeHalfline => (self.lower_cutoff.unwrap_or(-40.0), 0.0),
        };
        if let Some(c) = self.lower_cutoff {
            if self.support == Support::UnitInterval || !(c < 0.0) {
                return Err(param(format!("invalid lower cutoff {c} for {:?} profile", self.support)));
            }
        }
        for k in 0..1000 {
            let t = a + (b - a) * k as f64 / 999.0;
            let v = self.eval_real(t);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Evaluation(format!("profile `{}` not finite at t = {t}", self.description)));
            }
        }
        if self.support == Support::UnitInterval {
            let r = self.eval_real(1e-6).norm() / 1e-3;
            if !(r <= 100.0) {
                return Err(domain(format!("profile `{}`: |F(t)|/sqrt(t) = {r} at t = 1e-6", self.description)));
            }
        }
        Ok(())
    }

    fn require(&self, support: Support) -> Result<()> {
        if self.support != support {
            return Err(param(format!("profile `{}` has support {:?}, expected {support:?}", self.description, self.support)));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- Laplace

/// `ℒF(ζ) = ∫_0^1 F(t) e^{−tζ} dt`.
pub fn laplace(f: &ProfileFunction, zeta: Complex64) -> Result<Complex64> {
    f.require(Support::UnitInterval)?;
    Ok(laplace_unchecked(f, zeta))
}

fn laplace_unchecked(f: &ProfileFunction, zeta: Complex64) -> Complex64 {
    if zeta.norm() <= LAPLACE_SWITCH {
        let base = gauss_legendre_unit(64);
        base.0
            .iter()
            .zip(&base.1)
            .map(|(x, w)| {
                let t = 0.5 * (x + 1.0);
                f.eval_real(t) * (-zeta * t).exp() * (0.5 * w)
            })
            .sum()
    } else {
        let (r0, r1) = laplace_endpoints(f, zeta);
        r0 - (-zeta).exp() * r1
    }
}

/// `ℒF(ζ) = R₀ − e^{−ζ} R₁` for large `|ζ|`, each `R` an integral along the
/// ray from the endpoint on which `e^{−tζ}` decays fastest.
fn laplace_endpoints(f: &ProfileFunction, zeta: Complex64) -> (Complex64, Complex64) {
    let rule = gauss_laguerre(20);
    let r = zeta.norm();
    let u = zeta.conj() / r;
    let ray = |c: f64| -> Complex64 {
        rule.0.iter().zip(&rule.1).map(|(s, w)| f.eval(Complex64::new(c, 0.0) + u * (s / r)) * *w).sum::<Complex64>() * u / r
    };
    (ray(0.0), ray(1.0))
}

/// `‖F‖` in `L²([0,1], dt/t)`, on dyadic panels accumulating at 0.
pub fn laplace_norm(f: &ProfileFunction) -> Result<f64> {
    f.require(Support::UnitInterval)?;
    let base = gauss_legendre_unit(20);
    let mut total = 0.0;
    let mut hi = 1.0f64;
    for _ in 0..1000 {
        let lo = 0.5 * hi;
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let piece: f64 = base.0
            .iter()
            .zip(&base.1)
            .map(|(x, w)| {
                let t = mid + half * x;
                w * half * f.eval_real(t).norm_sqr() / t
            })
            .sum();
        if !piece.is_finite() {
            return Err(Error::Evaluation(format!("profile `{}` not finite near t = {lo}", f.description)));
        }
        total += piece;
        if piece <= 1e-17 * total {
            return Ok(total.sqrt());
        }
        hi = lo;
    }
    Err(domain(format!("dt/t integral of `{}` does not converge at 0", f.description)))
}

/// `(∫_ℍ |f|² dA)^{1/2}`, with the part of `‖f‖²` outside the rectangle
/// `0 < Re ζ ≤ 40, |Im ζ| ≤ 40` reported separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlaneNorm {
    pub norm: f64,
    pub tail: f64,
}

pub fn bergman_halfplane_norm<T: Tangential + ?Sized>(f: &T) -> Result<HalfPlaneNorm> {
    let p = inner_product(f, f, &AreaRegion::half_plane());
    if !p.total.re.is_finite() || !p.outside.re.is_finite() {
        return Err(Error::Evaluation("non-finite samples in half-plane integral".into()));
    }
    Ok(HalfPlaneNorm { norm: p.total.re.max(0.0).sqrt(), tail: p.outside.re })
}

/// `|‖ℒF‖_{A²(ℍ)} − ‖F‖_{L²(dt/t)}| / ‖F‖`.
pub fn laplace_isometry_residual(f: &ProfileFunction) -> Result<f64> {
    let lhs = bergman_halfplane_norm(&LaplaceFn::new(f.clone())?)?.norm;
    let rhs = laplace_norm(f)?;
    if rhs == 0.0 {
        return Err(domain("zero profile"));
    }
    Ok((lhs - rhs).abs() / rhs)
}

// --------------------------------------------------------------- Bargmann

/// `𝓑F(ζ) = (2π)^{−1/4} ∫ e^{ζt − ζ²/2 − t²/4} F(t) dt`.
pub fn bargmann(f: &ProfileFunction, zeta: Complex64) -> Result<Complex64> {
    Ok(bargmann_weighted(f, zeta)? * (0.5 * zeta.norm_sqr()).exp())
}

/// `𝓑F(ζ)·e^{−|ζ|²/2}`, bounded on `ℂ` for bounded `F`.
///
/// `= (2π)^{−1/4} e^{−ixy} ∫ F(t) e^{−(t/2 − x)²} e^{iyt} dt` with `ζ = x+iy`.
pub fn bargmann_weighted(f: &ProfileFunction, zeta: Complex64) -> Result<Complex64> {
    f.require(Support::NegativeHalfline)?;
    Ok(bargmann_weighted_unchecked(f, zeta))
}

fn bargmann_weighted_unchecked(f: &ProfileFunction, zeta: Complex64) -> Complex64 {
    let (x, y) = (zeta.re, zeta.im);
    let Some((lower, b)) = bargmann_range(f, x) else {
        return C0;
    };
    let g = |t: Complex64| f.eval(t) * (-(t * 0.5 - x).powi(2)).exp();
    fourier_integral(g, lower, b, y, 1.0) * Complex64::from_polar(BARGMANN_NORM, -x * y)
}

/// `(2π)^{−1/4}`.
const BARGMANN_NORM: f64 = 0.6316187777460647;

/// Integration range at abscissa `x`: the support truncated at
/// `−2(13 + |x|)`, and to 16 either side of the Gaussian centre `2x`, where
/// the factor `e^{−(t/2−x)²}` is below `e^{−64}`.
fn bargmann_range(f: &ProfileFunction, x: f64) -> Option<(Lower, f64)> {
    let b = (2.0 * x + 16.0).min(0.0);
    let floor = (-2.0 * (13.0 + x.abs())).max(2.0 * x - 16.0);
    let lower = match f.lower_cutoff {
        Some(c) if c >= floor => Lower::Finite(c),
        _ => Lower::Decaying(floor),
    };
    let a = match lower {
        Lower::Finite(a) | Lower::Decaying(a) => a,
    };
    (a < b).then_some((lower, b))
}

/// Gaussian-weighted area regions for Fock-type norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FockRegion {
    /// `F²(ℂ)`.
    Plane,
    /// `F²(𝕃)`, the left half-plane.
    Left,
}

/// `‖𝓑F‖²` in `F²(ℂ)` or `F²(𝕃)`, i.e. `∫ |𝓑F|² e^{−|ζ|²} dA` over the region.
pub fn fock_norm_squared(f: &ProfileFunction, region: FockRegion) -> Result<f64> {
    let g = BargmannFn::new(f.clone())?;
    let hi = if region == FockRegion::Left { 0.0 } else { 6.0 };
    let p = inner_product(&g, &g, &AreaRegion::window(-12.0, hi));
    let v = p.total.re;
    if !v.is_finite() {
        return Err(Error::Evaluation("non-finite Fock norm".into()));
    }
    Ok(v)
}

/// `∫ |F|² w(t) dt` over the support, `w = 1` or `w = Φ`.
fn profile_l2(f: &ProfileFunction, with_phi: bool) -> f64 {
    let a = f.lower_cutoff.unwrap_or(-60.0);
    LineRule::with_width(a, 0.0, 0.5, 16).integrate(|t| f.eval_real(t).norm_sqr() * if with_phi { phi_real(t) } else { 1.0 })
}

/// `‖F‖²` in `L²(ℝ₋)`.
pub fn halfline_norm_squared(f: &ProfileFunction) -> Result<f64> {
    f.require(Support::NegativeHalfline)?;
    Ok(profile_l2(f, false))
}

/// `|‖𝓑F‖²_{F²(𝕃)} − ∫ |F|² Φ dt| / ∫ |F|² Φ dt`.
pub fn weighted_bargmann_isometry_residual(f: &ProfileFunction) -> Result<f64> {
    f.require(Support::NegativeHalfline)?;
    let rhs = profile_l2(f, true);
    if rhs == 0.0 {
        return Err(domain(format!("profile `{}` is zero", f.description)));
    }
    let lhs = fock_norm_squared(f, FockRegion::Left)?;
    Ok((lhs - rhs).abs() / rhs)
}

// ------------------------------------------------------- reproducing kernels

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// `𝒜 = A²(ℍ)` with kernel `B`.
    #[serde(rename = "A_hard")]
    AHard,
    /// `ℋ_ℂ` with kernel `H`.
    #[serde(rename = "H_C")]
    HC,
    /// `ℋ_𝕃` with kernel `H_L`.
    #[serde(rename = "H_L")]
    HL,
}

/// The section `η ↦ K(η, ξ)` of a space's kernel, weighted by
/// `e^{−(|η|²+|ξ|²)/2}` for the Fock-type spaces.
#[derive(Debug, Clone)]
pub enum KernelSection {
    Hard(LaplaceFn),
    Soft(Complex64),
    SoftHard(Complex64),
}

impl Tangential for KernelSection {
    fn has_split(&self) -> bool {
        true
    }

    fn value(&self, z: Complex64) -> Complex64 {
        match self {
            KernelSection::Hard(l) => l.value(z),
            KernelSection::Soft(xi) => faddeeva(z, *xi),
            KernelSection::SoftHard(xi) => soft_hard_kernel(z, *xi),
        }
    }

    fn split(&self, z: Complex64) -> Vec<(f64, Complex64)> {
        match self {
            KernelSection::Hard(l) => l.split(z),
            _ => vec![(0.0, self.value(z))],
        }
    }
}

impl Space {
    pub fn kernel(&self, zeta: Complex64, eta: Complex64) -> Complex64 {
        match self {
            Space::AHard => hard_edge_b(zeta, eta),
            Space::HC => faddeeva(zeta, eta),
            Space::HL => soft_hard_kernel(zeta, eta),
        }
    }

    pub fn section(&self, xi: Complex64) -> KernelSection {
        match self {
            Space::AHard => {
                let c = xi.conj();
                let f = ProfileFunction::unit_interval("t e^{-t conj(xi)}", move |t| t * (-t * c).exp());
                KernelSection::Hard(LaplaceFn { profile: f })
            }
            Space::HC => KernelSection::Soft(xi),
            Space::HL => KernelSection::SoftHard(xi),
        }
    }

    fn region(&self, a: Complex64, b: Complex64) -> AreaRegion {
        let lo = a.re.min(b.re) - 9.0;
        let hi = a.re.max(b.re) + 9.0;
        match self {
            Space::AHard => AreaRegion::half_plane(),
            Space::HC => AreaRegion::window(lo, hi),
            Space::HL => AreaRegion::window(lo.min(-1.0), hi.min(0.0)),
        }
    }

    /// `⟨K_ξ, K_ζ⟩` in the space's norm; for `ℋ_ℂ`, `ℋ_𝕃` both sections carry
    /// the Ginibre normalization so the result compares with `K(ζ,ξ)` as
    /// returned by [`Space::kernel`].
    pub fn inner(&self, zeta: Complex64, xi: Complex64) -> Complex64 {
        let region = self.region(zeta, xi);
        if zeta == xi {
            let s = self.section(xi);
            inner_product(&s, &s, &region).total
        } else {
            inner_product(&self.section(xi), &self.section(zeta), &region).total
        }
    }
}

/// `|⟨K_ξ, K_ζ⟩ − K(ζ, ξ)|`.
pub fn reproducing_residual(space: Space, zeta: Complex64, xi: Complex64) -> Result<f64> {
    let v = space.inner(zeta, xi);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Evaluation(format!("non-finite inner product in {space:?}")));
    }
    Ok((v - space.kernel(zeta, xi)).norm())
}

/// `|∫ |K(ζ,η)|² dA(η) − K(ζ,ζ)|`, the mass-one defect of the limit kernel.
pub fn mass_one_residual(space: Space, zeta: Complex64) -> Result<f64> {
    reproducing_residual(space, zeta, zeta)
}

/// `(2π)^{−1/2} ∫_{−T}^0 e^{−(t−w)²/2}/Φ(t) dt`, `T = max(12, |Re w| + 12)`,
/// on real Gauss–Legendre panels of width 1/4; a reference for `Ψ(w)`
/// independent of `limitkernels::psi`.
pub fn psi_reference(w: Complex64) -> Complex64 {
    let t_max = (12.0f64).max(w.re.abs() + 12.0);
    let rule = LineRule::with_width(-t_max, 0.0, 0.25, 20);
    rule.integrate_c(|t| {
        let d = Complex64::new(t, 0.0) - w;
        (-(d * d) * 0.5).exp() / phi_real(t)
    }) / (2.0 * PI).sqrt()
}

/// `|psi_reference(ζ+η̄)/Ψ(ζ+η̄) − 1|`.
pub fn hl_kernel_identity_residual(zeta: Complex64, eta: Complex64) -> f64 {
    let w = zeta + eta.conj();
    let a = psi_reference(w);
    (a - psi(w)).norm() / a.norm()
}

// -------------------------------------------------------- area integration

/// A function on a region of the plane prepared for [`inner_product`].
pub trait Tangential {
    fn value(&self, z: Complex64) -> Complex64;

    /// `f(x+iy) = Σ a_k e^{iω_k y}` for `|y| ≥ Y0`, each `a_k` varying slowly
    /// in `y`; the list must have the same length and frequencies for all
    /// `y` at fixed `x`. The default is a single term.
    fn split(&self, z: Complex64) -> Vec<(f64, Complex64)> {
        vec![(0.0, self.value(z))]
    }

    /// Whether [`Tangential::split`] describes the tail; otherwise the
    /// integrator resolves `Y0 ≤ |y| ≤ Y1` directly before mapping the rest.
    fn has_split(&self) -> bool {
        false
    }
}

impl<F: Fn(Complex64) -> Complex64> Tangential for F {
    fn value(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

/// `ζ ↦ ℒF(ζ)` with its two-frequency tail.
#[derive(Debug, Clone)]
pub struct LaplaceFn {
    profile: ProfileFunction,
}

impl LaplaceFn {
    pub fn new(profile: ProfileFunction) -> Result<LaplaceFn> {
        profile.require(Support::UnitInterval)?;
        Ok(LaplaceFn { profile })
    }
}

impl Tangential for LaplaceFn {
    fn has_split(&self) -> bool {
        true
    }

    fn value(&self, z: Complex64) -> Complex64 {
        laplace_unchecked(&self.profile, z)
    }

    fn split(&self, z: Complex64) -> Vec<(f64, Complex64)> {
        let (r0, r1) = laplace_endpoints(&self.profile, z);
        vec![(0.0, r0), (-1.0, -r1 * (-z.re).exp())]
    }
}

/// `ζ ↦ 𝓑F(ζ) e^{−|ζ|²/2}` with one tail frequency per finite endpoint.
#[derive(Debug, Clone)]
pub struct BargmannFn {
    profile: ProfileFunction,
}

impl BargmannFn {
    pub fn new(profile: ProfileFunction) -> Result<BargmannFn> {
        profile.require(Support::NegativeHalfline)?;
        Ok(BargmannFn { profile })
    }
}

impl Tangential for BargmannFn {
    fn has_split(&self) -> bool {
        true
    }

    fn value(&self, z: Complex64) -> Complex64 {
        bargmann_weighted_unchecked(&self.profile, z)
    }

    fn split(&self, z: Complex64) -> Vec<(f64, Complex64)> {
        let (x, y) = (z.re, z.im);
        let Some((lower, b)) = bargmann_range(&self.profile, x) else {
            return vec![(0.0, C0)];
        };
        let f = &self.profile;
        let g = |t: Complex64| f.eval(t) * (-(t * 0.5 - x).powi(2)).exp();
        fourier_endpoints(g, lower, b, y).into_iter().map(|(c, a)| (c - x, a * BARGMANN_NORM)).collect()
    }
}

/// Abscissae of an area integral; ordinates always cover the whole line.
#[derive(Debug, Clone)]
pub struct AreaRegion {
    xrule: LineRule,
    inner: (f64, f64),
}

impl AreaRegion {
    /// `ℍ`: panels on `(0, 40]` and a mapped tail.
    pub fn half_plane() -> AreaRegion {
        AreaRegion { xrule: LineRule::half_line(0.0, Y0, 1.0, 8), inner: (0.0, Y0) }
    }

    /// The strip `a ≤ Re ζ ≤ b`.
    pub fn window(a: f64, b: f64) -> AreaRegion {
        AreaRegion { xrule: LineRule::with_width(a, b, 1.0, 8), inner: (a, b) }
    }
}

/// An area integral split into the part over the inner rectangle
/// `inner × [−Y0, Y0]` and the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaIntegral {
    pub total: Complex64,
    pub outside: Complex64,
}

/// `∫ f · conj(g) dA` over the region.
pub fn inner_product<F, G>(f: &F, g: &G, region: &AreaRegion) -> AreaIntegral
where
    F: Tangential + ?Sized,
    G: Tangential + ?Sized,
{
    let central = LineRule::with_width(-Y0, Y0, 2.0, 10);
    let tail = LineRule::tail(Y0, 10);
    let mut total = C0;
    let mut outside = C0;
    for (&x, &wx) in region.xrule.nodes.iter().zip(&region.xrule.weights) {
        let mut inner_part = C0;
        for (&y, &wy) in central.nodes.iter().zip(&central.weights) {
            let z = Complex64::new(x, y);
            inner_part += f.value(z) * g.value(z).conj() * wy;
        }
        let mut tails = C0;
        for sign in [1.0, -1.0] {
            tails += tail_integral(f, g, x, sign, &tail);
        }
        let w = wx / PI;
        total += (inner_part + tails) * w;
        outside += tails * w;
        if x < region.inner.0 || x > region.inner.1 {
            outside += inner_part * w;
        }
    }
    AreaIntegral { total, outside }
}

/// `∫_{Y0}^{∞} f conj(g) dy` along `x + i·sign·y`.
fn tail_integral<F, G>(f: &F, g: &G, x: f64, sign: f64, tail: &LineRule) -> Complex64
where
    F: Tangential + ?Sized,
    G: Tangential + ?Sized,
{
    if !(f.has_split() && g.has_split()) {
        let direct = LineRule::with_width(Y0, Y1, 2.0, 16);
        let prod = |y: f64| {
            let z = Complex64::new(x, sign * y);
            f.value(z) * g.value(z).conj()
        };
        return direct.integrate_c(prod) + LineRule::tail(Y1, 16).integrate_c(prod);
    }
    let at = |y: f64| {
        let z = Complex64::new(x, sign * y);
        (f.split(z), g.split(z))
    };
    let (sf, sg) = at(Y0);
    let scale = sf.iter().map(|a| a.1.norm()).fold(0.0, f64::max) * sg.iter().map(|b| b.1.norm()).fold(0.0, f64::max);
    let mut diag = Vec::new();
    let mut cross = Vec::new();
    for (k, a) in sf.iter().enumerate() {
        for (l, b) in sg.iter().enumerate() {
            let d = a.0 - b.0;
            if d.abs() < 1e-12 {
                diag.push((k, l));
            } else if a.1.norm() * b.1.norm() > 1e-16 * scale {
                cross.push((k, l, d));
            }
        }
    }
    // along x + i·sign·y the phase of a_k conj(b_l) e^{i d Y} runs at rate sign·d
    let phase = |d: f64, y: f64| Complex64::from_polar(1.0, d * sign * y);
    let mut acc = C0;
    for (&y, &w) in tail.nodes.iter().zip(&tail.weights) {
        let (sf, sg) = at(y);
        for &(k, l) in &diag {
            acc += sf[k].1 * sg[l].1.conj() * phase(sf[k].0 - sg[l].0, y) * w;
        }
    }
    if cross.is_empty() {
        return acc;
    }
    let dmax = cross.iter().map(|c| c.2.abs()).fold(0.0, f64::max);
    let rule = LineRule::with_width(Y0, Y1, (4.0 / dmax).min(4.0), 8);
    for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (sf, sg) = at(y);
        for &(k, l, d) in &cross {
            acc += sf[k].1 * sg[l].1.conj() * phase(d, y) * w;
        }
    }
    // two integrations by parts close the oscillatory tail beyond Y1
    let h = 0.5;
    let (f0, g0) = at(Y1);
    let (fp, gp) = at(Y1 + h);
    let (fm, gm) = at(Y1 - h);
    for &(k, l, d) in &cross {
        let amp = f0[k].1 * g0[l].1.conj();
        let slope = (fp[k].1 * gp[l].1.conj() - fm[k].1 * gm[l].1.conj()) / (2.0 * h);
        let iw = Complex64::new(0.0, d * sign);
        acc += phase(d, Y1) * (-amp / iw + slope / (iw * iw));
    }
    acc
}
