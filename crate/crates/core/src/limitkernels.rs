//! The limiting kernels: Ginibre `G`, Faddeeva `H`, hard-edge `B` and the
//! soft/hard kernel `H_L = Ψ(ζ+η̄)·G`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::specfun::{erfcx, fourier_integral, phi, phi_real, Lower};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BulkGinibre,
    Soft,
    Hard,
    SoftHard,
}

/// One of the four limit kernels, evaluated through [`LimitKernel::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitKernel {
    pub regime: Regime,
}

impl LimitKernel {
    pub fn new(regime: Regime) -> LimitKernel {
        LimitKernel { regime }
    }

    pub fn eval(&self, zeta: Complex64, eta: Complex64) -> Complex64 {
        match self.regime {
            Regime::BulkGinibre => ginibre(zeta, eta),
            Regime::Soft => faddeeva(zeta, eta),
            Regime::Hard => hard_edge_b(zeta, eta),
            Regime::SoftHard => soft_hard_kernel(zeta, eta),
        }
    }
}

/// Exponent of the Ginibre kernel, `ζη̄ − (|ζ|² + |η|²)/2`.
fn ginibre_exponent(zeta: Complex64, eta: Complex64) -> Complex64 {
    Complex64::new(-0.5 * (zeta - eta).norm_sqr(), (zeta * eta.conj()).im)
}

/// `G(ζ,η) = e^{ζη̄ − (|ζ|²+|η|²)/2}`.
pub fn ginibre(zeta: Complex64, eta: Complex64) -> Complex64 {
    ginibre_exponent(zeta, eta).exp()
}

/// `H(ζ,η) = Φ(ζ+η̄)·G(ζ,η)`, assembled from `erfcx` so that no factor
/// overflows even when `|Im(ζ − η)|` is large.
pub fn faddeeva(zeta: Complex64, eta: Complex64) -> Complex64 {
    let s = zeta + eta.conj();
    let u = s * FRAC_1_SQRT_2;
    // ginibre exponent − u², with the real part formed without cancellation
    let dx = zeta.re - eta.re;
    let ex = Complex64::new(-0.5 * (s.re * s.re + dx * dx), (zeta * eta.conj()).im - s.re * s.im);
    if s.re >= 0.0 {
        erfcx(u) * ex.exp() * 0.5
    } else {
        ginibre(zeta, eta) - erfcx(-u) * ex.exp() * 0.5
    }
}

/// `B(ζ,η) = ∫_0^1 t e^{−t(ζ+η̄)} dt`.
pub fn hard_edge_b(zeta: Complex64, eta: Complex64) -> Complex64 {
    b_of_s(zeta + eta.conj())
}

/// `∫_0^1 t e^{−ts} dt`: closed form for `|s| ≥ 1/4`, Taylor series below.
pub fn b_of_s(s: Complex64) -> Complex64 {
    if s.norm() >= 0.25 {
        let one = Complex64::new(1.0, 0.0);
        (one - (one + s) * (-s).exp()) / (s * s)
    } else {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term * 0.5;
        for k in 1..40 {
            term *= -s / k as f64;
            let t = term / (k as f64 + 2.0);
            sum += t;
            if t.norm() < 1e-18 {
                break;
            }
        }
        sum
    }
}

/// `Ψ(z)·e^{−(Im z)²/2}`, bounded on vertical lines.
///
/// `Ψ(x+iy) e^{−y²/2} = (2π)^{−1/2} e^{−ixy} ∫_{−∞}^0 g_x(t) e^{iyt} dt` with
/// `g_x(t) = e^{−(t−x)²/2}/Φ(t)`; moderate `|y|` integrate along the real
/// `t`-axis, large `|y|` switch to the endpoint representation at `t = 0`.
pub fn psi_scaled(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    // beyond x - sqrt(x_+^2 + 80) the Gaussian factor is below e^-40 of its peak
    let t_min = (x - (x.max(0.0).powi(2) + 80.0).sqrt()).max(-(12.0f64).max(x.abs() + 12.0));
    let g = |t: Complex64| {
        let d = t - x;
        if t.im == 0.0 {
            return Complex64::new((-(d.re * d.re) * 0.5).exp() / phi_real(t.re), 0.0);
        }
        (-(d * d) * 0.5).exp() / phi(t).unwrap_or(Complex64::new(f64::NAN, 0.0))
    };
    let v = fourier_integral(g, Lower::Decaying(t_min), 0.0, y, 1.0);
    v * Complex64::from_polar((2.0 * PI).sqrt().recip(), -x * y)
}

/// `Ψ(z) = (2π)^{−1/2} ∫_{−∞}^0 e^{−(t−z)²/2}/Φ(t) dt`, entire in `z`.
pub fn psi(z: Complex64) -> Complex64 {
    psi_scaled(z) * (0.5 * z.im * z.im).exp()
}

/// `H_L(ζ,η) = Ψ(ζ+η̄)·G(ζ,η)`.
pub fn soft_hard_kernel(zeta: Complex64, eta: Complex64) -> Complex64 {
    let s = zeta + eta.conj();
    // |G|·e^{(Im s)²/2} = e^{−(Re ζ − Re η)²/2}
    let dx = zeta.re - eta.re;
    let ex = Complex64::new(-0.5 * dx * dx, (zeta * eta.conj()).im);
    psi_scaled(s) * ex.exp()
}

/// Largest modulus discrepancy `max ||A(ζ,η)| − |B(ζ,η)||` over the grid.
pub fn kernel_distance<A, B>(a: A, b: B, grid: &[(Complex64, Complex64)]) -> Result<f64>
where
    A: Fn(Complex64, Complex64) -> Complex64,
    B: Fn(Complex64, Complex64) -> Complex64,
{
    if grid.is_empty() {
        return Err(param("empty comparison grid"));
    }
    Ok(grid.iter().map(|&(z, w)| (a(z, w).norm() - b(z, w).norm()).abs()).fold(0.0, f64::max))
}
