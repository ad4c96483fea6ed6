//! Exact sampling of the projection process with kernel `K_n` and empirical
//! one-point densities.
//!
//! Points are drawn one at a time. With `k` points placed, the next one has
//! density `‖A* v(z)‖² / (n − k)` where `v(z) = (ψ_0(z), …, ψ_{n−1}(z))` and the
//! columns of `A` are an orthonormal basis of the complement of
//! `v(z_1), …, v(z_k)`. Proposals come from `K_n(z,z)/n`, a uniform mixture of
//! the radial densities `|ψ_j|²`, which dominates every conditional density, so
//! each step is accepted with probability `‖A* v‖² / ‖v‖²`.
//!
//! Randomness is a ChaCha20 stream: `seed` selects the key, the run index the
//! stream. Proposal index, radius, angle and the acceptance draw come from that
//! stream in this order.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{param, Error, Result};
use crate::finitekernel::{Constraint, WeightedBasis};
use crate::specfun::{ln_gamma_fn, ln_incomplete_gamma_lower, ln_incomplete_gamma_upper, LineRule};
use crate::Complex64;

/// Proposals allowed for a single point before the envelope is declared
/// useless: at an acceptance rate of `1e−4` this many misses has probability
/// `e^{−20}`.
const MAX_TRIES: u64 = 200_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RejectionStats {
    pub proposals: u64,
    pub accepted: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRun {
    pub seed: u64,
    pub stream: u64,
    pub n: usize,
    pub constraint: Constraint,
    pub points: Vec<Complex64>,
    pub stats: RejectionStats,
}

/// Radial data of a monomial basis for `Q = c|z|^p`.
struct Monomials {
    n: usize,
    c: f64,
    p: f64,
    ln_h: Vec<f64>,
    s_lo: f64,
    s_hi: f64,
}

impl Monomials {
    fn new(basis: &WeightedBasis) -> Result<Monomials> {
        let (c, p) = basis
            .potential()
            .power_params()
            .ok_or_else(|| Error::Unsupported("the sampler needs Q = c|z|^p".into()))?;
        let ln_h = basis.ln_norms().ok_or_else(|| Error::Unsupported("the sampler needs a monomial basis".into()))?.to_vec();
        let n = basis.n;
        let (lo, hi) = basis.constraint.range();
        let nc = n as f64 * c;
        Ok(Monomials { n, c, p, ln_h, s_lo: nc * lo.powf(p), s_hi: if hi.is_finite() { nc * hi.powf(p) } else { f64::INFINITY } })
    }

    /// `v(z)` and `‖v(z)‖²`.
    fn values(&self, z: Complex64, out: &mut [Complex64]) -> f64 {
        let r = z.norm();
        let lr = r.ln();
        let base = -0.5 * self.n as f64 * self.c * r.powf(self.p);
        let u = if r > 0.0 { z / r } else { Complex64::new(1.0, 0.0) };
        let mut ph = Complex64::new(1.0, 0.0);
        let mut total = 0.0;
        for (j, o) in out.iter_mut().enumerate() {
            let m = if j == 0 { (base - 0.5 * self.ln_h[0]).exp() } else { (j as f64 * lr + base - 0.5 * self.ln_h[j]).exp() };
            *o = ph * m;
            total += m * m;
            ph *= u;
        }
        total
    }

    /// A draw from `|ψ_j|² dA` on the allowed region.
    fn propose(&self, j: usize, u_r: f64, u_t: f64) -> Complex64 {
        let a = 2.0 * (j + 1) as f64 / self.p;
        let s = truncated_gamma(a, self.s_lo, self.s_hi, u_r);
        let r = (s / (self.n as f64 * self.c)).powf(1.0 / self.p);
        Complex64::from_polar(r, TAU * u_t)
    }
}

fn ln_p(a: f64, s: f64) -> f64 {
    if s == f64::INFINITY {
        return 0.0;
    }
    ln_incomplete_gamma_lower(a, s).map(|v| v - ln_gamma_fn(a)).unwrap_or(f64::NEG_INFINITY)
}

fn ln_q(a: f64, s: f64) -> f64 {
    if s == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    ln_incomplete_gamma_upper(a, s).map(|v| v - ln_gamma_fn(a)).unwrap_or(0.0)
}

/// Inverse CDF of `Gamma(a, 1)` restricted to `[lo, hi]` at `u`. Works with
/// `ln Q` when the interval lies in the upper tail and with `ln P` otherwise.
fn truncated_gamma(a: f64, lo: f64, hi: f64, u: f64) -> f64 {
    let lg = ln_gamma_fn(a);
    let upper = lo >= a;
    let (f, target): (Box<dyn Fn(f64) -> f64>, f64) = if upper {
        let (ql, qh) = (ln_q(a, lo), ln_q(a, hi));
        (Box::new(move |s| ln_q(a, s)), ql + (-u * -(qh - ql).exp_m1()).ln_1p())
    } else {
        let (pl, ph) = (ln_p(a, lo), ln_p(a, hi));
        let d = (pl - ph).exp();
        (Box::new(move |s| ln_p(a, s)), ph + (d + u * (1.0 - d)).ln())
    };
    let sign = if upper { -1.0 } else { 1.0 };
    let g = |s: f64| sign * (f(s) - target);
    let (mut a0, mut b0) = (lo, hi);
    if !b0.is_finite() {
        b0 = (2.0 * a).max(lo + 1.0);
        while g(b0) < 0.0 {
            a0 = b0;
            b0 *= 2.0;
        }
    }
    let mut s = 0.5 * (a0 + b0);
    for _ in 0..200 {
        let v = g(s);
        if v == 0.0 {
            break;
        }
        if v < 0.0 {
            a0 = s;
        } else {
            b0 = s;
        }
        // d/ds ln P = e^{(a−1)ln s − s − lnΓ(a) − ln P}, and minus that for ln Q
        let dens = ((a - 1.0) * s.ln() - s - lg - f(s)).exp();
        let next = s - v / dens;
        let next = if next > a0 && next < b0 && dens.is_finite() && dens > 0.0 { next } else { 0.5 * (a0 + b0) };
        if (next - s).abs() <= 1e-15 * s.max(1e-300) || b0 - a0 <= 1e-15 * b0 {
            s = next;
            break;
        }
        s = next;
    }
    s.clamp(lo, hi)
}

/// One exact sample, stream 0 of `seed`.
pub fn sample(basis: &WeightedBasis, seed: u64) -> Result<SampleRun> {
    sample_stream(basis, seed, 0)
}

/// `runs` independent samples on streams `0..runs` of `seed`.
pub fn sample_runs(basis: &WeightedBasis, seed: u64, runs: usize) -> Result<Vec<SampleRun>> {
    (0..runs as u64).map(|s| sample_stream(basis, seed, s)).collect()
}

pub fn sample_stream(basis: &WeightedBasis, seed: u64, stream: u64) -> Result<SampleRun> {
    let mono = Monomials::new(basis)?;
    let n = mono.n;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    // columns of A, each of length n, stored back to back; column c starts at
    // (first + c)·n
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        a[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let mut first = 0;
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut points = Vec::with_capacity(n);
    let mut stats = RejectionStats::default();

    for k in 0..n {
        let cols = n - k;
        let mut tries = 0u64;
        let z = loop {
            if tries >= MAX_TRIES {
                return Err(Error::Envelope(format!(
                    "no acceptance in {MAX_TRIES} proposals for point {} of {n} (rate below 1e−4)",
                    k + 1
                )));
            }
            tries += 1;
            stats.proposals += 1;
            let j = rng.random_range(0..n);
            let z = mono.propose(j, rng.random::<f64>(), rng.random::<f64>());
            let u: f64 = rng.random();
            let vv = mono.values(z, &mut v);
            if !(vv > 0.0) {
                continue;
            }
            let mut xx = 0.0;
            for c in 0..cols {
                let col = &a[(first + c) * n..(first + c + 1) * n];
                let d: Complex64 = col.iter().zip(&v).map(|(p, q)| p.conj() * q).sum();
                x[c] = d;
                xx += d.norm_sqr();
            }
            if u * vv < xx {
                break z;
            }
        };
        stats.accepted += 1;
        points.push(z);
        if cols == 1 {
            break;
        }
        // Householder H with H x = α e₁; the columns 2.. of A H span the new
        // complement
        let norm = x[..cols].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
        let mut uvec = x[..cols].to_vec();
        uvec[0] += phase * norm;
        let uu: f64 = uvec.iter().map(|c| c.norm_sqr()).sum();
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for (c, uc) in uvec.iter().enumerate() {
            let col = &a[(first + c) * n..(first + c + 1) * n];
            for (yi, ai) in y.iter_mut().zip(col) {
                *yi += ai * uc;
            }
        }
        let f = 2.0 / uu;
        for (c, uc) in uvec.iter().enumerate().skip(1) {
            let w = uc.conj() * f;
            let col = &mut a[(first + c) * n..(first + c + 1) * n];
            for (ai, yi) in col.iter_mut().zip(&y) {
                *ai -= yi * w;
            }
        }
        first += 1;
    }
    Ok(SampleRun { seed, stream, n, constraint: basis.constraint, points, stats })
}

/// Cells for [`empirical_density`].
#[derive(Debug, Clone, PartialEq)]
pub enum DensityGrid {
    /// Annuli between consecutive radii.
    Annuli(Vec<f64>),
    /// `nx × ny` rectangles tiling `[x0, x1] × [y0, y1]`.
    Rect { x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize },
}

impl DensityGrid {
    pub fn len(&self) -> usize {
        match self {
            DensityGrid::Annuli(r) => r.len().saturating_sub(1),
            DensityGrid::Rect { nx, ny, .. } => nx * ny,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        match self {
            DensityGrid::Annuli(r) => {
                if r.len() < 2 || r[0] < 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(param("annulus radii must be increasing, non-negative, at least two"));
                }
            }
            DensityGrid::Rect { x0, x1, y0, y1, nx, ny } => {
                if !(x1 > x0 && y1 > y0) || *nx == 0 || *ny == 0 {
                    return Err(param("rectangle grid needs x1 > x0, y1 > y0 and positive counts"));
                }
            }
        }
        Ok(())
    }

    fn cell(&self, z: Complex64) -> Option<usize> {
        match self {
            DensityGrid::Annuli(r) => {
                let m = z.norm();
                if m < r[0] || m >= r[r.len() - 1] {
                    return None;
                }
                Some(r.partition_point(|&x| x <= m) - 1)
            }
            &DensityGrid::Rect { x0, x1, y0, y1, nx, ny } => {
                if z.re < x0 || z.re >= x1 || z.im < y0 || z.im >= y1 {
                    return None;
                }
                let i = (((z.re - x0) / (x1 - x0) * nx as f64) as usize).min(nx - 1);
                let j = (((z.im - y0) / (y1 - y0) * ny as f64) as usize).min(ny - 1);
                Some(j * nx + i)
            }
        }
    }

    /// Area of cell `i` in `dA = dx dy/π`.
    fn area(&self, i: usize) -> f64 {
        match self {
            DensityGrid::Annuli(r) => r[i + 1] * r[i + 1] - r[i] * r[i],
            DensityGrid::Rect { x0, x1, y0, y1, nx, ny } => (x1 - x0) * (y1 - y0) / (*nx * *ny) as f64 / PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDensity {
    pub count: u64,
    /// `count / (runs · n · area)`, comparable with `ΔQ 1_S` and `K_n(z,z)/n`.
    pub density: f64,
    /// Poisson standard error, `√count / (runs · n · area)`.
    pub sigma: f64,
    pub empty: bool,
}

/// Histogram of the points of `runs` over `grid`, normalized per point and per
/// unit of `dA`.
pub fn empirical_density(runs: &[SampleRun], grid: &DensityGrid) -> Result<Vec<CellDensity>> {
    if runs.len() < 50 {
        return Err(param(format!("empirical densities need at least 50 runs, got {}", runs.len())));
    }
    grid.validate()?;
    let n = runs[0].n;
    if runs.iter().any(|r| r.n != n) {
        return Err(param("runs must share n"));
    }
    let mut counts = vec![0u64; grid.len()];
    for z in runs.iter().flat_map(|r| &r.points) {
        if let Some(i) = grid.cell(*z) {
            counts[i] += 1;
        }
    }
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let norm = runs.len() as f64 * n as f64 * grid.area(i);
            CellDensity { count, density: count as f64 / norm, sigma: (count as f64).sqrt() / norm, empty: count == 0 }
        })
        .collect())
}

/// Cell averages of `K_n(z,z)/n` over `grid` in the same normalization as
/// [`empirical_density`].
pub fn expected_density(basis: &WeightedBasis, grid: &DensityGrid) -> Result<Vec<f64>> {
    grid.validate()?;
    let n = basis.n as f64;
    let (lo, hi) = basis.constraint.range();
    let diag = |z: Complex64| {
        let r = z.norm();
        if r < lo || r > hi {
            0.0
        } else {
            basis.kernel(z, z).re / n
        }
    };
    Ok(match grid {
        DensityGrid::Annuli(r) => r
            .windows(2)
            .map(|w| {
                // radial kernels: ∫ K(r,r) 2r dr
                let rule = LineRule::panels(w[0], w[1], 8, 16);
                let s: f64 = rule.nodes.iter().zip(&rule.weights).map(|(&x, &wt)| wt * 2.0 * x * diag(Complex64::new(x, 0.0))).sum();
                s / (w[1] * w[1] - w[0] * w[0])
            })
            .collect(),
        &DensityGrid::Rect { x0, x1, y0, y1, nx, ny } => {
            let (hx, hy) = ((x1 - x0) / nx as f64, (y1 - y0) / ny as f64);
            let mut out = Vec::with_capacity(nx * ny);
            for j in 0..ny {
                for i in 0..nx {
                    let rx = LineRule::panels(x0 + i as f64 * hx, x0 + (i + 1) as f64 * hx, 2, 8);
                    let ry = LineRule::panels(y0 + j as f64 * hy, y0 + (j + 1) as f64 * hy, 2, 8);
                    let mut s = 0.0;
                    for (&y, &wy) in ry.nodes.iter().zip(&ry.weights) {
                        for (&x, &wx) in rx.nodes.iter().zip(&rx.weights) {
                            s += wx * wy * diag(Complex64::new(x, y));
                        }
                    }
                    out.push(s / (hx * hy));
                }
            }
            out
        }
    })
}
