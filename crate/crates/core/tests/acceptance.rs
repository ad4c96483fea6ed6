//! Acceptance run: one PASS/FAIL line per criterion with its wall time. A
//! criterion passes only if its numbers pass and it finishes inside its time
//! budget. The binary always exits 0; the lines are the verdict.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use coulomb_edge::finitekernel::{edge_error, edge_lattice, frame, gram_basis, lattice_pairs, radial_basis, Constraint, GramQuadrature};
use coulomb_edge::geometry::{balayage_density, discretize, greens_potential, inverse_balayage, ConformalDomain, InteriorMeasure, Orientation};
use coulomb_edge::limitkernels::{hard_edge_b, psi, Regime};
use coulomb_edge::potential::{radial_droplet, DropletData, Potential};
use coulomb_edge::sampler::{empirical_density, sample_runs, sample_stream, DensityGrid};
use coulomb_edge::specfun::{make_quadrature, PrecisionContext, QuadratureKind};
use coulomb_edge::transforms::{
    laplace_isometry_residual, mass_one_residual, psi_reference, reproducing_residual, weighted_bargmann_isometry_residual, ProfileFunction, Space,
};
use coulomb_edge::trialkernel::{build_trial_kernel, local_compare, lower_bound, offdiag_mass, MassCut, TrialOptions};
use coulomb_edge::{Complex64, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn criterion(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Result<(bool, String)>) {
    let t = Instant::now();
    let out = f();
    let dt = t.elapsed();
    let (ok, detail) = match out {
        Ok((ok, d)) => (ok && dt <= budget, d),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "{} criterion {id:>2} {name}: {detail} [{:.2} s, budget {} s]",
        if ok { "PASS" } else { "FAIL" },
        dt.as_secs_f64(),
        budget.as_secs()
    );
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn ginibre() -> DropletData {
    radial_droplet(&Potential::ginibre()).unwrap()
}

fn hole() -> DropletData {
    ginibre().with_hard_hole(0.5).unwrap()
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Errors of the rescaled kernel on the 2401-pair grid for each `n`.
fn convergence(droplet: &DropletData, z0: Complex64, regime: Regime, constraint: Constraint) -> Result<Vec<f64>> {
    let pairs = lattice_pairs(&edge_lattice(2.0, 0.5));
    [64usize, 256, 1024]
        .iter()
        .map(|&n| {
            let basis = radial_basis(droplet.potential(), n, constraint)?;
            edge_error(&basis, &frame(droplet, z0, regime, n)?, &pairs)
        })
        .collect()
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

fn main() {
    criterion(1, "B closed form vs quadrature", secs(1), || {
        let q = make_quadrature(QuadratureKind::GaussLegendre, 64, (0.0, 1.0))?;
        let lattice: Vec<Complex64> =
            (0..17).flat_map(|i| (0..17).map(move |k| c(-3.0 + 0.375 * i as f64, -3.0 + 0.375 * k as f64))).filter(|z| z.norm() <= 3.0).collect();
        let mut worst: f64 = 0.0;
        for &z in &lattice {
            for &e in &lattice {
                let s = z + e.conj();
                let quad = q.integrate_c(|t| (-s * t).exp() * t);
                worst = worst.max((hard_edge_b(z, e) - quad).norm());
            }
        }
        Ok((worst <= 1e-12, format!("max |diff| = {worst:.2e} over {} pairs (≤ 1e-12)", lattice.len() * lattice.len())))
    });

    criterion(2, "reproducing identity of B on A²(ℍ)", secs(10), || {
        let pairs = [(c(0.5, 0.0), c(0.5, 0.0)), (c(0.5, 1.0), c(1.5, -2.0)), (c(1.0, 0.0), c(0.2, 0.5)), (c(2.0, -1.0), c(0.3, 3.0)), (c(0.1, 0.0), c(3.0, 0.0))];
        let r = pairs.iter().map(|&(z, x)| reproducing_residual(Space::AHard, z, x)).collect::<Result<Vec<_>>>()?;
        let worst = r.iter().cloned().fold(0.0, f64::max);
        Ok((worst <= 1e-6, format!("max residual {worst:.2e} at 5 pairs (≤ 1e-6)")))
    });

    criterion(3, "mass one for H on F²(ℂ) and H_L on F²(𝕃)", secs(30), || {
        let pts = [c(0.0, 0.0), c(1.0, 0.0), c(-1.5, 0.5), c(0.5, -2.0), c(-0.5, 1.0)];
        let h = pts.iter().map(|&z| mass_one_residual(Space::HC, z)).collect::<Result<Vec<_>>>()?;
        let hl = pts.iter().map(|&z| mass_one_residual(Space::HL, z)).collect::<Result<Vec<_>>>()?;
        let (a, b) = (h.iter().cloned().fold(0.0, f64::max), hl.iter().cloned().fold(0.0, f64::max));
        Ok((a <= 1e-5 && b <= 1e-5, format!("H max {a:.2e}, H_L max {b:.2e} (≤ 1e-5)")))
    });

    criterion(4, "Laplace and weighted Bargmann isometries", secs(30), || {
        let lap = (1..=3).map(|k| laplace_isometry_residual(&ProfileFunction::power(k))).collect::<Result<Vec<_>>>()?;
        let profiles = [
            ProfileFunction::indicator(-1.0),
            ProfileFunction::negative_halfline("e^t", |t| t.exp()),
            ProfileFunction::negative_halfline("t e^t", |t| t * t.exp()),
        ];
        let bar = profiles.iter().map(weighted_bargmann_isometry_residual).collect::<Result<Vec<_>>>()?;
        let (a, b) = (lap.iter().cloned().fold(0.0, f64::max), bar.iter().cloned().fold(0.0, f64::max));
        Ok((a <= 1e-6 && b <= 1e-5, format!("Laplace max {a:.2e} (≤ 1e-6), Bargmann max {b:.2e} (≤ 1e-5)")))
    });

    criterion(5, "Ψ against the H_L kernel integral", secs(5), || {
        let pts = [
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(2.5, 0.0),
            c(-3.0, 0.0),
            c(0.5, 1.0),
            c(-1.0, 2.0),
            c(1.5, -2.5),
            c(-2.0, -1.0),
            c(3.0, 3.0),
        ];
        let worst = pts.iter().map(|&w| (psi(w) - psi_reference(w)).norm() / psi_reference(w).norm()).fold(0.0, f64::max);
        Ok((worst <= 1e-8, format!("max relative diff {worst:.2e} at 10 points (≤ 1e-8)")))
    });

    criterion(6, "soft-edge universality, Ginibre", secs(120), || {
        let e = convergence(&ginibre(), c(1.0, 0.0), Regime::Soft, Constraint::None)?;
        let ratio = e[1] / e[2];
        let ok = decreasing(&e) && e[2] <= 0.05 && (1.4..=3.0).contains(&ratio);
        Ok((ok, format!("errors n = 64, 256, 1024: {} (final ≤ 0.05), ratio 256→1024 {ratio:.3} (in [1.4, 3])", fmt(&e))))
    });

    criterion(7, "hard-edge universality, Ginibre with hole r₀ = 1/2", secs(120), || {
        let d = hole();
        let fr = frame(&d, c(0.5, 0.0), Regime::Hard, 64)?;
        let rho = fr.rho.unwrap_or(f64::NAN);
        let bal = balayage_density(&ConformalDomain::disc(c(0.0, 0.0), 0.5)?, InteriorMeasure::Area(&|_| 1.0))?;
        let oracle = (0..bal.len()).map(|k| (bal.density(k) - 0.5).abs()).fold(0.0, f64::max);
        let e = convergence(&d, c(0.5, 0.0), Regime::Hard, Constraint::ExcludedDisc { radius: 0.5 })?;
        let ok = (rho - 0.5).abs() <= 1e-10 && oracle <= 1e-10 && decreasing(&e) && e[2] <= 0.05;
        Ok((ok, format!("ρ(z₀) − r₀ = {:.1e}, oracle {oracle:.1e}; errors {} (final ≤ 0.05)", rho - 0.5, fmt(&e))))
    });

    criterion(8, "soft/hard universality, Ginibre on the unit disc", secs(120), || {
        let e = convergence(&ginibre(), c(1.0, 0.0), Regime::SoftHard, Constraint::RestrictedDisc { radius: 1.0 })?;
        let ok = decreasing(&e) && e[2] <= 0.08;
        Ok((ok, format!("errors {} (final ≤ 0.08)", fmt(&e))))
    });

    criterion(9, "necklace approximation of U_Ω^λ", secs(30), || {
        let p = ConformalDomain::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.0)], c(0.0, 0.0), Orientation::BoundedInterior)?;
        let mu = balayage_density(&p, InteriorMeasure::Atoms(&[(c(0.2, 0.1), 1.0)]))?;
        let lambda = inverse_balayage(&p, &mu, 0.15)?.nu;
        let mesh = (0..24)
            .flat_map(|k| [0.95, 1.0].map(|s| p.inverse(Complex64::from_polar(s, TAU * k as f64 / 24.0))))
            .collect::<Result<Vec<_>>>()?;
        let js = [8usize, 16, 32, 64];
        let mut logs = Vec::new();
        for &j in &js {
            let nk = discretize(&lambda, &p, j)?;
            let mut err: f64 = 0.0;
            for &z in &mesh {
                let a = greens_potential(&p, InteriorMeasure::Curve(&lambda), z)?;
                let b = greens_potential(&p, InteriorMeasure::Necklace(&nk), z)?;
                err = err.max((a - b).abs());
            }
            logs.push(err.ln());
        }
        let x: Vec<f64> = js.iter().map(|&j| j as f64).collect();
        let (slope, r2) = linear_fit(&x, &logs);
        let ok = decreasing(&logs) && slope < 0.0 && r2 >= 0.9;
        Ok((ok, format!("log sup-errors {} for j = 8..64, slope {slope:.3}, R² {r2:.4}", fmt(&logs))))
    });

    criterion(10, "trial-kernel diagnostics", secs(600), || {
        let opts = TrialOptions::default();
        let origin = c(0.0, 0.0);
        let hd = hole();
        let fr = frame(&hd, c(0.5, 0.0), Regime::Hard, 4096)?;
        let tk = build_trial_kernel(&hd, c(0.5, 0.0), Regime::Hard, 4096, &opts)?;
        let local = local_compare(&tk, &fr, origin, origin)?.norm();
        let mut ok = local <= 0.1;
        let mut detail = format!("hard local error {local:.4} at n = 4096 (≤ 0.1)");
        let gd = ginibre();
        let setups = [
            ("hard", &hd, c(0.5, 0.0), Regime::Hard, Constraint::ExcludedDisc { radius: 0.5 }),
            ("soft", &gd, c(1.0, 0.0), Regime::Soft, Constraint::None),
            ("soft/hard", &gd, c(1.0, 0.0), Regime::SoftHard, Constraint::RestrictedDisc { radius: 1.0 }),
        ];
        for (name, d, z0, regime, cons) in setups {
            let mut outside = Vec::new();
            let mut chain = String::new();
            for n in [256usize, 1024, 4096] {
                let fr = frame(d, z0, regime, n)?;
                let tk = build_trial_kernel(d, z0, regime, n, &opts)?;
                let inside = offdiag_mass(&tk, &fr, origin, MassCut::InsideDelta)?;
                let total = if n == 1024 {
                    let basis = radial_basis(d.potential(), n, cons)?;
                    let lb = lower_bound(&basis, &tk, &fr, origin)?;
                    let holds = lb.holds(0.15);
                    ok &= holds;
                    chain = format!("K_n {:.4} vs 0.85·{:.4} {}", lb.finite, lb.bound(), if holds { "holds" } else { "fails" });
                    lb.trial_mass
                } else {
                    offdiag_mass(&tk, &fr, origin, MassCut::Total)?
                };
                outside.push(total - inside);
            }
            ok &= decreasing(&outside);
            detail += &format!("; {name}: outside-δ masses {} for n = 256, 1024, 4096, lower bound at 1024 {chain}", fmt(&outside));
        }
        Ok((ok, detail))
    });

    criterion(11, "Gram path against radial path", secs(10), || {
        let q = Potential::ginibre();
        let g = gram_basis(&q, 16, Constraint::None, &GramQuadrature::new(2.5), &PrecisionContext::default())?;
        let r = radial_basis(&q, 16, Constraint::None)?;
        let pts = [c(0.0, 0.0), c(0.7, 0.2), c(-0.4, 0.9), c(1.1, -0.3), c(0.2, -0.6), c(-0.9, -0.5)];
        let mut worst: f64 = 0.0;
        for &z in &pts {
            for &w in &pts {
                worst = worst.max((g.kernel(z, w) - r.kernel(z, w)).norm());
            }
        }
        Ok((worst <= 1e-8, format!("max |K_gram − K_radial| = {worst:.2e} at n = 16 (≤ 1e-8)")))
    });

    criterion(12, "sampler, Ginibre with hole r₀ = 1/2, n = 512", secs(300), || {
        let basis = radial_basis(&Potential::ginibre(), 512, Constraint::ExcludedDisc { radius: 0.5 })?;
        let runs = sample_runs(&basis, 7, 200)?;
        let again = sample_stream(&basis, 7, 0)?;
        let text = |pts: &[Complex64]| pts.iter().map(|z| format!("{},{}\n", z.re, z.im)).collect::<String>();
        let identical = text(&runs[0].points) == text(&again.points);
        let inside = runs.iter().flat_map(|r| &r.points).filter(|z| z.norm() < 0.5).count();
        let d = empirical_density(&runs, &DensityGrid::Annuli(vec![0.5, 0.52, 0.7, 0.85]))?;
        let (edge, bulk) = (d[0], d[2]);
        let ratio = edge.density / bulk.density;
        let band = (bulk.density - 1.0).abs() <= 3.0 * bulk.sigma;
        let ok = identical && inside == 0 && band && ratio > 1.5;
        Ok((
            ok,
            format!(
                "reproducible {identical}, points in hole {inside}, bulk density {:.4} ± {:.4} (3σ band of 1), edge/bulk ratio {ratio:.2} (> 1.5)",
                bulk.density, bulk.sigma
            ),
        ))
    });
}
