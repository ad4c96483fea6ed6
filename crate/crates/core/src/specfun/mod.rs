//! Complex error function, the Gaussian tail Φ, incomplete gamma functions,
//! quadrature rules and the precision context for Gram computations.

pub mod dd;
pub mod quad;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, param, Error, Result};

pub use quad::{fourier_endpoints, fourier_integral, gauss_laguerre, gauss_legendre_unit, make_quadrature, LineRule, Lower, QuadratureKind, QuadratureRule};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Taylor series of erf. Only used where |Re z| is small, so the alternating
/// terms lose at most a factor e^{2 (Re z)²} in relative accuracy.
fn erf_taylor(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..4000 {
        let nf = n as f64;
        term *= -z2 / nf;
        let t = term / (2.0 * nf + 1.0);
        sum += t;
        if n > 4 && t.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * (2.0 / SQRT_PI)
}

/// Laplace continued fraction for erfcx on Re z > 0 (modified Lentz).
fn erfcx_cf(z: Complex64) -> Complex64 {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut f = z;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..20000 {
        let a = k as f64 * 0.5;
        d = z + d * a;
        if d.norm() == 0.0 {
            d = tiny;
        }
        c = z + a / c;
        if c.norm() == 0.0 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (f * SQRT_PI).inv()
}

/// Scaled complementary error function `e^{z²} erfc(z)` for `Re z ≥ 0`.
fn erfcx_right(z: Complex64) -> Complex64 {
    if z.re <= 1.5 && z.norm() <= 12.0 {
        (z * z).exp() * (Complex64::new(1.0, 0.0) - erf_taylor(z))
    } else {
        erfcx_cf(z)
    }
}

/// `e^{z²} erfc(z)`, finite and of moderate size on the closed right
/// half-plane. On the left half-plane it may overflow like `e^{Re z²}`.
pub fn erfcx(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        erfcx_right(z)
    } else {
        (z * z).exp() * 2.0 - erfcx_right(-z)
    }
}

/// Complementary error function on the complex plane.
///
/// Errors with [`Error::Overflow`] once `|erfc(z)|` leaves the double range.
pub fn erfc_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(param(format!("erfc of non-finite {z}")));
    }
    let w = if z.re >= 0.0 { z } else { -z };
    let ex = -(w * w);
    if ex.re > 700.0 {
        return Err(Error::Overflow(format!("erfc({z}) exceeds the double range")));
    }
    let v = ex.exp() * erfcx_right(w);
    Ok(if z.re >= 0.0 { v } else { Complex64::new(2.0, 0.0) - v })
}

/// `Φ(z) = ½ erfc(z/√2)`, the upper Gaussian tail on the real axis.
pub fn phi(z: Complex64) -> Result<Complex64> {
    Ok(erfc_complex(z * FRAC_1_SQRT_2)? * 0.5)
}

/// Real-axis Φ without the error plumbing.
pub fn phi_real(t: f64) -> f64 {
    0.5 * libm::erfc(t * FRAC_1_SQRT_2)
}

/// `ln Φ(t)` for real `t`, accurate far into the upper tail.
pub fn ln_phi_real(t: f64) -> f64 {
    if t > 0.0 {
        let u = t * FRAC_1_SQRT_2;
        -u * u + (0.5 * erfcx_right(Complex64::new(u, 0.0)).re).ln()
    } else {
        phi_real(t).ln()
    }
}

/// Natural log of Γ(a).
pub fn ln_gamma_fn(a: f64) -> f64 {
    ln_gamma(a)
}

/// Regularized incomplete gammas in log form: `(ln P(a,x), ln Q(a,x))`.
fn ln_pq(a: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let lpre = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut del = 1.0 / a;
        let mut sum = del;
        for _ in 0..100_000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        let lp = lpre + sum.ln();
        let p = lp.exp();
        let lq = if p < 0.5 { (-p).ln_1p() } else { (1.0 - p).ln() };
        (lp, lq)
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..100_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-17 {
                break;
            }
        }
        let lq = lpre + h.ln();
        let q = lq.exp();
        let lp = if q < 0.5 { (-q).ln_1p() } else { (1.0 - q).ln() };
        (lp, lq)
    }
}

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("incomplete gamma needs a > 0, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(domain(format!("incomplete gamma needs x ≥ 0, got {x}")));
    }
    Ok(())
}

/// `ln Γ(a, x)`.
pub fn ln_incomplete_gamma_upper(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    Ok(ln_gamma(a) + ln_pq(a, x).1)
}

/// `ln γ(a, x)`.
pub fn ln_incomplete_gamma_lower(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    Ok(ln_gamma(a) + ln_pq(a, x).0)
}

/// `Γ(a, x) = ∫_x^∞ t^{a−1} e^{−t} dt`.
pub fn incomplete_gamma_upper(a: f64, x: f64) -> Result<f64> {
    Ok(ln_incomplete_gamma_upper(a, x)?.exp())
}

/// `γ(a, x) = Γ(a) − Γ(a, x)`.
pub fn incomplete_gamma_lower(a: f64, x: f64) -> Result<f64> {
    Ok(ln_incomplete_gamma_lower(a, x)?.exp())
}

/// Working precision for Gram orthonormalization.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PrecisionContext {
    pub working_digits: u32,
    pub target_rtol: f64,
}

impl PrecisionContext {
    pub fn new(working_digits: u32, target_rtol: f64) -> Result<PrecisionContext> {
        if working_digits < 16 {
            return Err(param(format!("working_digits {working_digits} < 16")));
        }
        if !(target_rtol > 0.0 && target_rtol < 1.0) {
            return Err(param(format!("target_rtol {target_rtol} outside (0, 1)")));
        }
        let need = (-target_rtol.log10()).ceil() as u32 + 8;
        if working_digits < need {
            return Err(param(format!(
                "working_digits {working_digits} below {need} required for rtol {target_rtol:e}"
            )));
        }
        if working_digits > dd::DD_DIGITS {
            return Err(param(format!(
                "working_digits {working_digits} exceeds the {} digits of the double-double backend",
                dd::DD_DIGITS
            )));
        }
        Ok(PrecisionContext { working_digits, target_rtol })
    }

    /// Relative rounding unit of the working precision.
    pub fn unit(&self) -> f64 {
        10f64.powi(-(self.working_digits as i32))
    }

    /// Largest condition number whose amplified rounding stays inside the target.
    pub fn condition_budget(&self) -> f64 {
        self.target_rtol / self.unit()
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { working_digits: dd::DD_DIGITS, target_rtol: 1e-10 }
    }
}
