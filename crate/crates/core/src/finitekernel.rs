//! Finite-`n` weighted polynomial kernels `K_n(z,w) = Σ p_j(z) conj p_j(w) e^{−n(Q(z)+Q(w))/2}`,
//! their edge rescalings and the diagnostics comparing them with the limit
//! kernels.
//!
//! Radial potentials use the monomial basis with norms `h_j` kept as
//! logarithms. Anything else goes through [`gram_basis`], which orthonormalizes
//! monomials against a polar quadrature in double-double arithmetic.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::geometry::{balayage_density, ConformalDomain, InteriorMeasure};
use crate::limitkernels::{LimitKernel, Regime};
use crate::potential::{script_v, DropletData, DropletKind, Potential};
use crate::specfun::dd::{Cdd, Dd};
use crate::specfun::{ln_gamma_fn, ln_incomplete_gamma_lower, ln_incomplete_gamma_upper, LineRule, PrecisionContext};

/// The set carrying the weight `e^{−nQ}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Constraint {
    #[default]
    None,
    /// Hard edge: the disc `D(0, radius)` is removed.
    ExcludedDisc { radius: f64 },
    /// Soft/hard edge: the weight lives on `D(0, radius)` only.
    RestrictedDisc { radius: f64 },
}

impl Constraint {
    /// Radial range `[lo, hi]` of the support.
    pub(crate) fn range(&self) -> (f64, f64) {
        match *self {
            Constraint::None => (0.0, f64::INFINITY),
            Constraint::ExcludedDisc { radius } => (radius, f64::INFINITY),
            Constraint::RestrictedDisc { radius } => (0.0, radius),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Constraint::None => Ok(()),
            Constraint::ExcludedDisc { radius } | Constraint::RestrictedDisc { radius } => {
                if radius > 0.0 && radius.is_finite() {
                    Ok(())
                } else {
                    Err(param(format!("constraint radius must be positive, got {radius}")))
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Repr {
    /// `p_j = z^j/√h_j`; `gaps[j] = ln h_{j+1} − ln h_j` is nondecreasing.
    Radial { ln_h: Vec<f64>, gaps: Vec<f64> },
    /// `p_i = Σ_k coeffs[i][k]·e^{ln_scale[k]} z^k`.
    Gram { ln_scale: Vec<f64>, coeffs: Vec<Vec<Complex64>> },
}

/// Orthonormal weighted polynomials `p_0, …, p_{n−1}`.
#[derive(Debug, Clone)]
pub struct WeightedBasis {
    pub n: usize,
    pub constraint: Constraint,
    potential: Potential,
    repr: Repr,
}

impl WeightedBasis {
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// `ln h_j` for monomial bases.
    pub fn ln_norms(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Radial { ln_h, .. } => Some(ln_h),
            Repr::Gram { .. } => None,
        }
    }

    /// `h_j`, for monomial bases.
    pub fn norm(&self, j: usize) -> Option<f64> {
        self.ln_norms().and_then(|l| l.get(j)).map(|x| x.exp())
    }

    /// Coefficients of `p_j` in the monomials `z^k`.
    pub fn coefficients(&self, j: usize) -> Vec<Complex64> {
        match &self.repr {
            Repr::Radial { ln_h, .. } => {
                let mut c = vec![Complex64::new(0.0, 0.0); j + 1];
                c[j] = Complex64::new((-0.5 * ln_h[j]).exp(), 0.0);
                c
            }
            Repr::Gram { ln_scale, coeffs } => coeffs[j].iter().zip(ln_scale).map(|(&a, &s)| a * s.exp()).collect(),
        }
    }

    /// `p_j(z)·e^{−nQ(z)/2}` for every `j`.
    pub fn weighted_values(&self, z: Complex64) -> Vec<Complex64> {
        let half = 0.5 * self.n as f64 * self.potential.evaluate(z);
        let lz = z.ln();
        match &self.repr {
            Repr::Radial { ln_h, .. } => ln_h
                .iter()
                .enumerate()
                .map(|(j, &l)| if z == Complex64::new(0.0, 0.0) { mono0(j, l, half) } else { (lz * j as f64 - 0.5 * l - half).exp() })
                .collect(),
            Repr::Gram { ln_scale, coeffs } => {
                let v = monomials(z, ln_scale, half);
                coeffs.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect()
            }
        }
    }

    pub fn kernel(&self, z: Complex64, w: Complex64) -> Complex64 {
        match &self.repr {
            Repr::Radial { ln_h, gaps } => radial_kernel(ln_h, gaps, &self.potential, self.n, z, w),
            Repr::Gram { .. } => {
                let a = self.weighted_values(z);
                let b = self.weighted_values(w);
                a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum()
            }
        }
    }
}

fn mono0(j: usize, ln_h: f64, half: f64) -> Complex64 {
    if j == 0 {
        Complex64::new((-0.5 * ln_h - half).exp(), 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// `e^{ln_scale[k] − half} z^k`, exponents combined before exponentiation.
fn monomials(z: Complex64, ln_scale: &[f64], half: f64) -> Vec<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return ln_scale.iter().enumerate().map(|(k, &s)| mono0(k, -2.0 * s, half)).collect();
    }
    let lz = z.ln();
    ln_scale.iter().enumerate().map(|(k, &s)| (lz * k as f64 + s - half).exp()).collect()
}

/// `Σ_j (z w̄)^j/h_j · e^{−n(Q(z)+Q(w))/2}`, summed outward from the largest term.
fn radial_kernel(ln_h: &[f64], gaps: &[f64], q: &Potential, n: usize, z: Complex64, w: Complex64) -> Complex64 {
    let weight = 0.5 * n as f64 * (q.evaluate(z) + q.evaluate(w));
    let x = z.norm().ln() + w.norm().ln();
    if x == f64::NEG_INFINITY {
        return Complex64::new((-ln_h[0] - weight).exp(), 0.0);
    }
    let alpha = z.arg() - w.arg();
    let top = gaps.partition_point(|&d| d < x);
    let rot = Complex64::from_polar(1.0, alpha);
    let mut sum = Complex64::new(1.0, 0.0);
    let mut t = Complex64::new(1.0, 0.0);
    for g in &gaps[top..] {
        t *= rot * (x - g).exp();
        if t.norm() < 1e-18 {
            break;
        }
        sum += t;
    }
    t = Complex64::new(1.0, 0.0);
    for g in gaps[..top].iter().rev() {
        t *= rot.conj() * (g - x).exp();
        if t.norm() < 1e-18 {
            break;
        }
        sum += t;
    }
    let lead = top as f64 * x - ln_h[top] - weight;
    sum * Complex64::from_polar(lead.exp(), top as f64 * alpha)
}

pub fn kernel(basis: &WeightedBasis, z: Complex64, w: Complex64) -> Complex64 {
    basis.kernel(z, w)
}

/// `ln ∫_lo^hi 2r^{2j+1} e^{−n q(r)} dr` by quadrature around the peak.
fn ln_radial_moment(q: &Potential, n: f64, j: usize, lo: f64, hi: f64) -> f64 {
    let g = |r: f64| if r > 0.0 { (2 * j + 1) as f64 * r.ln() - n * q.q(r) + 2f64.ln() } else { f64::NEG_INFINITY };
    let m = 4000;
    let scan = |b: f64| {
        let mut best = (f64::NEG_INFINITY, lo);
        for i in 0..=m {
            let r = lo + (b - lo) * i as f64 / m as f64;
            let v = g(r);
            if v > best.0 {
                best = (v, r);
            }
        }
        best
    };
    let mut b = if hi.is_finite() { hi } else { lo.max(1.0) };
    let mut best = scan(b);
    if !hi.is_finite() {
        while g(b) > best.0 - 60.0 && b < 1e8 {
            b *= 2.0;
            best = scan(b);
        }
    }
    let (peak, arg) = best;
    let step = (b - lo) / m as f64;
    let mut a = arg;
    while a > lo && g(a) > peak - 60.0 {
        a = (a - step).max(lo);
    }
    let mut c = arg;
    while c < b && g(c) > peak - 60.0 {
        c = (c + step).min(b);
    }
    let rule = LineRule::panels(a, c, 200, 16);
    peak + rule.integrate(|r| (g(r) - peak).exp()).ln()
}

/// Monomial basis `p_j = z^j/√h_j` of a radial weight.
pub fn radial_basis(potential: &Potential, n: usize, constraint: Constraint) -> Result<WeightedBasis> {
    if n == 0 {
        return Err(param("n must be positive"));
    }
    if !potential.is_radial() {
        return Err(Error::Unsupported("radial_basis needs a radial potential; use gram_basis".into()));
    }
    constraint.validate()?;
    let nf = n as f64;
    let mut ln_h = Vec::with_capacity(n);
    for j in 0..n {
        let l = match potential.power_params() {
            Some((c, p)) => {
                // s = |z|², t = n c s^{p/2}: h_j = (2/p)(nc)^{−a} Γ(a, ·), a = 2(j+1)/p
                let a = 2.0 * (j + 1) as f64 / p;
                let base = (2.0 / p).ln() - a * (nf * c).ln();
                base + match constraint {
                    Constraint::None => ln_gamma_fn(a),
                    Constraint::ExcludedDisc { radius } => ln_incomplete_gamma_upper(a, nf * c * radius.powf(p))?,
                    Constraint::RestrictedDisc { radius } => ln_incomplete_gamma_lower(a, nf * c * radius.powf(p))?,
                }
            }
            None => {
                let (lo, hi) = constraint.range();
                ln_radial_moment(potential, nf, j, lo, hi)
            }
        };
        if !l.is_finite() {
            return Err(Error::Precision { max_safe_n: j, failed_degree: j });
        }
        ln_h.push(l);
    }
    let gaps = ln_h.windows(2).map(|p| p[1] - p[0]).collect();
    Ok(WeightedBasis { n, constraint, potential: potential.clone(), repr: Repr::Radial { ln_h, gaps } })
}

/// Polar product rule for Gram moments: Gauss–Legendre panels in `r` on
/// `[0, radius]` (clipped to the constraint) and `angles` trapezoid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramQuadrature {
    pub radius: f64,
    #[serde(default = "default_panels")]
    pub radial_panels: usize,
    #[serde(default = "default_order")]
    pub radial_order: usize,
    /// `0` picks `max(2n + 8, 64)`.
    #[serde(default)]
    pub angles: usize,
}

fn default_panels() -> usize {
    16
}

fn default_order() -> usize {
    16
}

impl GramQuadrature {
    pub fn new(radius: f64) -> GramQuadrature {
        GramQuadrature { radius, radial_panels: default_panels(), radial_order: default_order(), angles: 0 }
    }

    pub fn doubled(&self, n: usize) -> GramQuadrature {
        GramQuadrature {
            radius: self.radius,
            radial_panels: 2 * self.radial_panels,
            radial_order: self.radial_order,
            angles: 2 * self.angle_count(n),
        }
    }

    fn angle_count(&self, n: usize) -> usize {
        if self.angles == 0 {
            (2 * n + 8).max(64)
        } else {
            self.angles
        }
    }

    /// Nodes with `ln` of the weight `w·e^{−nQ}` (`dA = 2r dr dt/2π`).
    fn nodes(&self, q: &Potential, n: usize, constraint: Constraint) -> Result<Vec<(Complex64, f64)>> {
        if !(self.radius > 0.0) || self.radial_panels == 0 || self.radial_order < 2 {
            return Err(param("gram quadrature needs positive radius, panels and order ≥ 2"));
        }
        let (lo, hi) = constraint.range();
        let hi = hi.min(self.radius);
        if hi <= lo {
            return Err(param("gram quadrature radius does not reach the support"));
        }
        let radial = LineRule::panels(lo, hi, self.radial_panels, self.radial_order);
        let na = self.angle_count(n);
        let mut out = Vec::with_capacity(radial.len() * na);
        for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
            for k in 0..na {
                let z = Complex64::from_polar(r, TAU * k as f64 / na as f64);
                out.push((z, (2.0 * r * wr / na as f64).ln() - n as f64 * q.evaluate(z)));
            }
        }
        Ok(out)
    }
}

/// Weighted moments `⟨z^j, z^k⟩·e^{−s_j − s_k}` with `s` from the diagonal.
fn moments(nodes: &[(Complex64, f64)], n: usize) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let lz: Vec<Complex64> = nodes.iter().map(|p| p.0.ln()).collect();
    let diag: Vec<f64> = (0..n)
        .map(|j| {
            let terms: Vec<f64> = nodes.iter().zip(&lz).map(|(p, l)| 2.0 * j as f64 * l.re + p.1).collect();
            let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
        })
        .collect();
    let half: Vec<f64> = diag.iter().map(|d| 0.5 * d).collect();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (p, l) in nodes.iter().zip(&lz) {
        let v: Vec<Complex64> = (0..n).map(|j| (l * j as f64 + 0.5 * p.1 - half[j]).exp()).collect();
        for j in 0..n {
            for k in 0..=j {
                g[j][k] += v[j] * v[k].conj();
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            g[k][j] = g[j][k].conj();
        }
    }
    (half.iter().map(|h| -h).collect(), g)
}

/// Orthonormalizes `1, z, …, z^{n−1}` against `e^{−nQ}·1_constraint dA` by a
/// pivot-free Cholesky factorization of the diagonally equilibrated moment
/// matrix in double-double arithmetic.
pub fn gram_basis(potential: &Potential, n: usize, constraint: Constraint, quad: &GramQuadrature, precision: &PrecisionContext) -> Result<WeightedBasis> {
    if n == 0 {
        return Err(param("n must be positive"));
    }
    constraint.validate()?;
    let nodes = quad.nodes(potential, n, constraint)?;
    let (ln_scale, g) = moments(&nodes, n);
    let budget = precision.condition_budget();
    let mut l = vec![vec![Cdd::ZERO; n]; n];
    let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
    for j in 0..n {
        for k in 0..=j {
            let mut s = Cdd::from_c64(g[j][k]);
            for m in 0..k {
                s -= l[j][m] * l[k][m].conj();
            }
            if k == j {
                let d = s.re;
                let cond = pmax.max(d.hi) / pmin.min(d.hi);
                if !(d.hi > 0.0) || !(cond <= budget) {
                    return Err(Error::Precision { max_safe_n: j, failed_degree: j });
                }
                pmax = pmax.max(d.hi);
                pmin = pmin.min(d.hi);
                l[j][j] = Cdd::new(d.sqrt(), Dd::ZERO);
            } else {
                l[j][k] = s.scale(l[k][k].re.recip());
            }
        }
    }
    // C = L^{-1}
    let mut c = vec![vec![Cdd::ZERO; n]; n];
    for i in 0..n {
        let inv = l[i][i].re.recip();
        c[i][i] = Cdd::new(inv, Dd::ZERO);
        for k in (0..i).rev() {
            let mut s = Cdd::ZERO;
            for m in k..i {
                s += l[i][m] * c[m][k];
            }
            c[i][k] = Cdd::ZERO - s.scale(inv);
        }
    }
    let coeffs = c.iter().map(|row| row.iter().map(|x| x.to_c64()).collect()).collect();
    Ok(WeightedBasis { n, constraint, potential: potential.clone(), repr: Repr::Gram { ln_scale, coeffs } })
}

/// `max |⟨p_j, p_k⟩ − δ_jk|` over `j, k < min(n, 40)` on the given rule.
pub fn gram_residual(basis: &WeightedBasis, quad: &GramQuadrature) -> Result<f64> {
    let m = basis.n.min(40);
    let nodes = quad.nodes(&basis.potential, basis.n, basis.constraint)?;
    let mut g = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for &(z, lw) in &nodes {
        let wz = (0.5 * (lw + basis.n as f64 * basis.potential.evaluate(z))).exp();
        let v = basis.weighted_values(z);
        for j in 0..m {
            for k in 0..m {
                g[j][k] += v[j] * v[k].conj() * (wz * wz);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (j, row) in g.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            let want = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((x - want).norm());
        }
    }
    Ok(worst)
}

/// Edge point, normal direction and blow-up scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescalingFrame {
    pub z0: Complex64,
    pub theta: f64,
    pub regime: Regime,
    pub scale: f64,
    pub n: usize,
    /// Balayage density `ρ(z₀)` per `ds`; hard edges only.
    pub rho: Option<f64>,
    /// `∂_n Q(z₀)` along `e^{iθ}`.
    pub normal_q: f64,
}

impl RescalingFrame {
    /// `z_n = z₀ + e^{iθ}ζ/scale`.
    pub fn point(&self, zeta: Complex64) -> Complex64 {
        self.z0 + Complex64::from_polar(1.0, self.theta) * zeta / self.scale
    }

    /// Inverse of [`RescalingFrame::point`].
    pub fn local(&self, z: Complex64) -> Complex64 {
        (z - self.z0) * self.scale * Complex64::from_polar(1.0, -self.theta)
    }
}

fn normal_derivative(q: &Potential, z: Complex64, dir: Complex64) -> f64 {
    let h = 1e-5 * z.norm().max(1.0);
    (q.evaluate(z + dir * h) - q.evaluate(z - dir * h)) / (2.0 * h)
}

/// Frame at `z₀`: hard edges on the declared hole circle, soft and soft/hard
/// edges on the outer boundary of a radial droplet.
pub fn frame(droplet: &DropletData, z0: Complex64, regime: Regime, n: usize) -> Result<RescalingFrame> {
    if n == 0 {
        return Err(param("n must be positive"));
    }
    if droplet.kind == DropletKind::UserSuppliedCurves {
        return Err(Error::Unsupported("frames need a radial droplet".into()));
    }
    let q = droplet.potential();
    let r = z0.norm();
    let theta = z0.arg();
    let dir = Complex64::from_polar(1.0, theta);
    let nf = n as f64;
    match regime {
        Regime::Hard => {
            let r0 = droplet.hard_hole.ok_or_else(|| param("hard frame needs a droplet with a hard hole"))?;
            if (r - r0).abs() > 1e-10 * r0.max(1.0) {
                return Err(domain(format!("{z0} is not on the hard edge |z| = {r0}")));
            }
            let hole = ConformalDomain::disc(Complex64::new(0.0, 0.0), r0)?;
            let dens = |z: Complex64| droplet.equilibrium_density(z);
            let mu = balayage_density(&hole, InteriorMeasure::Area(&dens))?;
            let rho = mu.density_at(theta) * hole.derivative(z0).norm();
            if !(rho > 0.0) {
                return Err(domain(format!("balayage density at {z0} is not positive")));
            }
            let theta = hole.outward_normal(z0).arg();
            let dir = Complex64::from_polar(1.0, theta);
            Ok(RescalingFrame { z0, theta, regime, scale: nf * rho, n, rho: Some(rho), normal_q: normal_derivative(q, z0, dir) })
        }
        Regime::Soft | Regime::SoftHard => {
            let big_r = droplet.outer_radius;
            if (r - big_r).abs() > 1e-10 * big_r.max(1.0) {
                return Err(domain(format!("{z0} is not on the outer boundary |z| = {big_r}")));
            }
            let lap = q.laplacian(z0);
            Ok(RescalingFrame { z0, theta, regime, scale: (nf * lap).sqrt(), n, rho: None, normal_q: normal_derivative(q, z0, dir) })
        }
        Regime::BulkGinibre => Err(param("frames are defined for edge regimes only")),
    }
}

/// Separable cocycle `c_n(ζ,η) = u(ζ)·conj u(η)`, `u = e^{−iφ_n}`.
#[derive(Debug, Clone)]
pub struct Cocycle {
    frame: RescalingFrame,
    droplet: DropletData,
}

impl Cocycle {
    pub fn new(frame: &RescalingFrame, droplet: &DropletData) -> Cocycle {
        Cocycle { frame: *frame, droplet: droplet.clone() }
    }

    /// `φ_n(ζ) = (n/2) Im 𝒱(z_n(ζ))` plus `∂_nQ(z₀) Im ζ/(2ρ)` (hard) or
    /// `Re ζ Im ζ` (soft, soft/hard).
    pub fn phase(&self, zeta: Complex64) -> Result<f64> {
        let f = &self.frame;
        let v = script_v(&self.droplet, f.point(zeta), f.z0)?;
        let extra = match f.regime {
            Regime::Hard => f.normal_q * zeta.im / (2.0 * f.rho.unwrap_or(f64::NAN)),
            _ => zeta.re * zeta.im,
        };
        Ok(0.5 * f.n as f64 * v.im + extra)
    }

    pub fn unit(&self, zeta: Complex64) -> Result<Complex64> {
        Ok(Complex64::from_polar(1.0, -self.phase(zeta)?))
    }

    pub fn eval(&self, zeta: Complex64, eta: Complex64) -> Result<Complex64> {
        Ok(self.unit(zeta)? * self.unit(eta)?.conj())
    }
}

/// `scale^{−2} K_n(z_n(ζ), z_n(η))`, times `c_n(ζ,η)` when a cocycle is given.
pub fn rescaled_kernel(basis: &WeightedBasis, frame: &RescalingFrame, cocycle: Option<&Cocycle>, zeta: Complex64, eta: Complex64) -> Result<Complex64> {
    let k = basis.kernel(frame.point(zeta), frame.point(eta)) / (frame.scale * frame.scale);
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(Error::Evaluation(format!("rescaled kernel at ({zeta}, {eta})")));
    }
    match cocycle {
        Some(c) => Ok(k * c.eval(zeta, eta)?),
        None => Ok(k),
    }
}

/// Integration region for [`mass_one_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassRegion {
    /// The limit region (`ℍ` hard, `ℂ` soft, `𝕃` soft/hard) cut at `|η| ≤ 12`.
    Limit,
    /// The whole support of the finite-`n` weight.
    FullSupport,
}

/// `∫ |k_n(ζ,η)|² dA(η) − k_n(ζ,ζ)`.
pub fn mass_one_residual(basis: &WeightedBasis, frame: &RescalingFrame, zeta: Complex64, region: MassRegion) -> Result<f64> {
    let z = frame.point(zeta);
    let s2 = frame.scale * frame.scale;
    let diag = basis.kernel(z, z).re / s2;
    let mass = match region {
        MassRegion::Limit => {
            let radial = LineRule::panels(0.0, 12.0, 10, 20);
            let angular = match frame.regime {
                Regime::Hard => LineRule::panels(-0.5 * PI, 0.5 * PI, 16, 16),
                Regime::SoftHard => LineRule::panels(0.5 * PI, 1.5 * PI, 16, 16),
                _ => {
                    let h = TAU / 256.0;
                    LineRule { nodes: (0..256).map(|k| k as f64 * h).collect(), weights: vec![h; 256] }
                }
            };
            let mut s = 0.0;
            for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
                for (&t, &wt) in angular.nodes.iter().zip(&angular.weights) {
                    let eta = Complex64::from_polar(r, t);
                    let k = basis.kernel(z, frame.point(eta)) / s2;
                    s += k.norm_sqr() * r * wr * wt / PI;
                }
            }
            s
        }
        MassRegion::FullSupport => {
            let (lo, hi) = support_window(basis);
            let radial = LineRule::panels(lo, hi, 64, 16);
            let na = basis.n + 16;
            let mut s = 0.0;
            for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
                for k in 0..na {
                    let w = Complex64::from_polar(r, TAU * k as f64 / na as f64);
                    s += basis.kernel(z, w).norm_sqr() * 2.0 * r * wr / na as f64;
                }
            }
            s / s2
        }
    };
    Ok(mass - diag)
}

/// Radial window outside which `K_n(w,w)` is below `e^{−60}` of its peak.
fn support_window(basis: &WeightedBasis) -> (f64, f64) {
    let (lo, hi) = basis.constraint.range();
    let g = |r: f64| basis.kernel(Complex64::new(r, 0.0), Complex64::new(r, 0.0)).re.ln();
    let mut b = if hi.is_finite() { hi } else { lo.max(1.0) };
    let peak = (0..=400).map(|i| g(lo + (4.0 * b - lo) * i as f64 / 400.0)).fold(f64::NEG_INFINITY, f64::max);
    if !hi.is_finite() {
        while g(b) > peak - 60.0 {
            b *= 1.05;
        }
    }
    (lo, b)
}

/// Lattice points of spacing `h` in the closed disc of radius `radius`.
pub fn edge_lattice(radius: f64, h: f64) -> Vec<Complex64> {
    let m = (radius / h).floor() as i64;
    let mut out = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            let z = Complex64::new(i as f64 * h, j as f64 * h);
            if z.norm() <= radius + 1e-12 {
                out.push(z);
            }
        }
    }
    out
}

/// All ordered pairs of `points`.
pub fn lattice_pairs(points: &[Complex64]) -> Vec<(Complex64, Complex64)> {
    points.iter().flat_map(|&a| points.iter().map(move |&b| (a, b))).collect()
}

/// One row of the CSV grid output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow {
    pub zeta_re: f64,
    pub zeta_im: f64,
    pub eta_re: f64,
    pub eta_im: f64,
    pub k_re: f64,
    pub k_im: f64,
    pub limit_re: f64,
    pub limit_im: f64,
    pub abs_err: f64,
}

/// Rescaled kernel against the limit on `pairs`. With a cocycle the error is
/// `|c_n k_n − L|`, otherwise `||k_n| − |L||`.
pub fn grid_rows(basis: &WeightedBasis, frame: &RescalingFrame, cocycle: Option<&Cocycle>, pairs: &[(Complex64, Complex64)]) -> Result<Vec<GridRow>> {
    let limit = LimitKernel::new(frame.regime);
    pairs
        .iter()
        .map(|&(z, e)| {
            let k = rescaled_kernel(basis, frame, cocycle, z, e)?;
            let l = limit.eval(z, e);
            let abs_err = if cocycle.is_some() { (k - l).norm() } else { (k.norm() - l.norm()).abs() };
            Ok(GridRow { zeta_re: z.re, zeta_im: z.im, eta_re: e.re, eta_im: e.im, k_re: k.re, k_im: k.im, limit_re: l.re, limit_im: l.im, abs_err })
        })
        .collect()
}

/// Cocycle-free edge error `max ||k_n| − |L||` on `pairs`.
pub fn edge_error(basis: &WeightedBasis, frame: &RescalingFrame, pairs: &[(Complex64, Complex64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(param("empty comparison grid"));
    }
    Ok(grid_rows(basis, frame, None, pairs)?.iter().map(|r| r.abs_err).fold(0.0, f64::max))
}
