use coulomb_edge::finitekernel::{frame, radial_basis, Constraint};
use coulomb_edge::limitkernels::{hard_edge_b, Regime};
use coulomb_edge::potential::{radial_droplet, DropletData, Potential};
use coulomb_edge::trialkernel::*;
use coulomb_edge::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hole() -> DropletData {
    radial_droplet(&Potential::ginibre()).unwrap().with_hard_hole(0.5).unwrap()
}

fn ginibre() -> DropletData {
    radial_droplet(&Potential::ginibre()).unwrap()
}

fn sqrt_cut() -> ScheduleOverrides {
    ScheduleOverrides { lower_cut: Some(LowerCut::Sqrt), ..Default::default() }
}

#[test]
fn schedule_examples() {
    let s = schedule_with(Regime::Hard, 1024, 0.25, &sqrt_cut()).unwrap();
    assert_eq!(s.m, 32);
    assert!((s.epsilon.unwrap() - 0.3797).abs() < 1e-3);
    assert_eq!(s.big_m, 159);
    assert!((s.delta - 1024f64.ln() / 1024.0).abs() < 1e-15);

    let d = schedule(Regime::Hard, 1024, 0.25).unwrap();
    assert_eq!((d.m, d.big_m), (5, 159));

    let s = schedule(Regime::Soft, 1024, 1.0).unwrap();
    assert_eq!((s.m, s.big_m), (5, 84));
    assert!(s.epsilon.is_none());
    assert!(s.big_m as f64 / 32.0 > 1.0);
    assert_eq!(schedule(Regime::SoftHard, 1024, 1.0).unwrap().big_m, 84);

    let e3 = schedule(Regime::Hard, 1000, 0.25).unwrap().epsilon.unwrap();
    let e6 = schedule(Regime::Hard, 1_000_000, 0.25).unwrap().epsilon.unwrap();
    assert!(e6 < e3);

    assert!(schedule(Regime::Soft, 15, 1.0).is_err());
    assert!(schedule(Regime::BulkGinibre, 1024, 1.0).is_err());
    let bad = ScheduleOverrides { upper: Some(300), ..Default::default() };
    assert!(schedule_with(Regime::Hard, 1024, 0.25, &bad).is_err());
    let bad = ScheduleOverrides { epsilon: Some(1.5), ..Default::default() };
    assert!(schedule_with(Regime::Hard, 1024, 0.25, &bad).is_err());
}

#[test]
fn coefficient_examples() {
    let s = schedule_with(Regime::Hard, 1024, 0.25, &sqrt_cut()).unwrap();
    let h = coefficients(Regime::Hard, 1024, &s, 0.5, 0.25).unwrap();
    assert_eq!(h.len(), s.big_m - s.m + 1);
    assert!(h[0] > *h.last().unwrap());
    assert!((h[0] - 0.25 / 0.25 * (1024.0 - 32.0 / 0.25)).abs() < 1e-9);

    let s = schedule_with(Regime::Soft, 1024, 1.0, &ScheduleOverrides { lower_cut: Some(LowerCut::Sqrt), upper: Some(84), epsilon: None }).unwrap();
    let soft = coefficients(Regime::Soft, 1024, &s, 1.0, 1.0).unwrap();
    let want = (1024.0 / std::f64::consts::TAU).sqrt() * (-0.5f64).exp();
    assert!((soft[0] - want).abs() < 1e-12 * want);

    let sh = coefficients(Regime::SoftHard, 1024, &s, 1.0, 1.0).unwrap();
    assert!(sh.iter().zip(&soft).all(|(a, b)| a / b >= 1.0));
    // Φ(t) = ½erfc(t/√2), so the factor at j = 32 is 1/Φ(−1)
    assert!((sh[0] / soft[0] - 1.0 / 0.8413447460685429).abs() < 1e-9);
}

#[test]
fn hermitian_and_positive() {
    let tk = build_trial_kernel(&hole(), c(0.5, 0.0), Regime::Hard, 256, &TrialOptions::default()).unwrap();
    let pts = [c(0.5, 0.0), c(0.51, 0.02), c(0.0, 0.55), c(-0.4, 0.32), c(0.3, -0.45)];
    for &z in &pts {
        let d = tk.eval(z, z).unwrap();
        assert!(d.re >= 0.0 && d.im.abs() <= 1e-12 * d.re.max(1e-300));
        for &w in &pts {
            let a = trial_eval(&tk, z, w).unwrap();
            let b = trial_eval(&tk, w, z).unwrap().conj();
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
            let dw = tk.eval(w, w).unwrap().re;
            assert!(a.norm_sqr() <= d.re * dw * (1.0 + 1e-12));
        }
    }
}

#[test]
fn ginibre_hole_reduces_to_a_monomial_sum() {
    // uniform λ on a circle: P_j(w) = (w^j − L^j)/(1 − (Lw)^j) with w = z/r₀
    let n = 1024;
    let tk = build_trial_kernel(&hole(), c(0.5, 0.0), Regime::Hard, n, &TrialOptions::default()).unwrap();
    assert!((tk.nu_mass - 0.25).abs() < 1e-12);
    assert!((tk.local - 0.5).abs() < 1e-12);
    let l = tk.lambda_level();
    for k in 0..10 {
        let z = Complex64::from_polar(0.501 + 0.013 * k as f64, 0.3 + 0.5 * k as f64);
        let w = Complex64::from_polar(0.5 + 0.007 * k as f64, -1.0 + 0.4 * k as f64);
        let (a, b) = (z / 0.5, w / 0.5);
        let mut s = c(0.0, 0.0);
        for j in tk.schedule.m..=tk.schedule.big_m {
            let p = |x: Complex64| (x.powu(j as u32) - l.powi(j as i32)) / (1.0 - (x * l).powu(j as u32));
            s += p(a) * p(b).conj() * (0.25 / 0.25 * (n as f64 - j as f64 / 0.25));
        }
        let want = s * ((n as f64 / 2.0) * (0.5 - z.norm_sqr() - w.norm_sqr())).exp();
        let got = tk.eval(z, w).unwrap();
        assert!((got - want).norm() <= 1e-8 * want.norm(), "{z} {w}: {got} vs {want}");
    }
}

#[test]
fn fast_products_match_direct_products() {
    let d = radial_droplet(&Potential::radial_power(0.5, 4.0).unwrap()).unwrap();
    let z0 = c(d.outer_radius, 0.0);
    let tk = build_trial_kernel(&d, z0, Regime::Soft, 256, &TrialOptions::default()).unwrap();
    for z in [z0, z0 * Complex64::from_polar(1.02, 0.1), z0 * Complex64::from_polar(0.97, -2.0)] {
        let all = tk.log_blaschke_all(z).unwrap();
        for (i, j) in (tk.schedule.m..=tk.schedule.big_m).enumerate().step_by(9) {
            let direct = tk.log_blaschke_direct(j, z).unwrap();
            let dre = (all[i].re - direct.re).abs();
            let dph = (all[i].im - direct.im).rem_euclid(std::f64::consts::TAU);
            let dph = dph.min(std::f64::consts::TAU - dph);
            assert!(dre <= 1e-10 * direct.re.abs().max(1.0) && dph <= 1e-9, "j = {j}: {} vs {}", all[i], direct);
        }
    }
}

#[test]
fn level_curve_decay_into_the_droplet() {
    let tk = build_trial_kernel(&hole(), c(0.5, 0.0), Regime::Hard, 256, &TrialOptions::default()).unwrap();
    for i in 0..=20 {
        let r = 0.5 + 0.1 * i as f64 / 20.0;
        for t in 0..12 {
            let z = Complex64::from_polar(r, 0.52 * t as f64);
            let g = -2.0 * tk.nu_mass * tk.green_potential(z) + 0.25 - r * r;
            assert!(g <= 1e-6, "G({z}) = {g}");
        }
    }
}

#[test]
fn diagonal_peaks_at_the_edge() {
    let tk = build_trial_kernel(&hole(), c(0.5, 0.0), Regime::Hard, 1024, &TrialOptions::default()).unwrap();
    let peak = (0..=200)
        .map(|i| 0.5 + 0.2 * i as f64 / 200.0)
        .map(|r| (r, tk.eval(c(r, 0.0), c(r, 0.0)).unwrap().re))
        .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    assert!(peak.0 - 0.5 <= 3.0 * tk.schedule.delta);

    let tk = build_trial_kernel(&ginibre(), c(1.0, 0.0), Regime::Soft, 1024, &TrialOptions::default()).unwrap();
    let peak = (0..=200)
        .map(|i| 0.9 + 0.2 * i as f64 / 200.0)
        .map(|r| (r, tk.eval(c(r, 0.0), c(r, 0.0)).unwrap().re))
        .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    assert!((peak.0 - 1.0).abs() <= tk.schedule.delta, "peak at {}", peak.0);
}

#[test]
fn local_compare_examples() {
    let d = hole();
    let f = frame(&d, c(0.5, 0.0), Regime::Hard, 4096).unwrap();
    let tk = build_trial_kernel(&d, c(0.5, 0.0), Regime::Hard, 4096, &TrialOptions::default()).unwrap();
    assert!(local_compare(&tk, &f, c(0.0, 0.0), c(0.0, 0.0)).unwrap().norm() <= 0.1);

    let d = ginibre();
    let f = frame(&d, c(1.0, 0.0), Regime::Soft, 4096).unwrap();
    let tk = build_trial_kernel(&d, c(1.0, 0.0), Regime::Soft, 4096, &TrialOptions::default()).unwrap();
    assert!(local_compare(&tk, &f, c(0.0, 0.0), c(0.0, 0.0)).unwrap().norm() <= 0.1);

    let f = frame(&d, c(1.0, 0.0), Regime::SoftHard, 4096).unwrap();
    let tk = build_trial_kernel(&d, c(1.0, 0.0), Regime::SoftHard, 4096, &TrialOptions::default()).unwrap();
    assert!(local_compare(&tk, &f, c(1.0, 0.0), c(1.0, 0.0)).unwrap().norm() <= 0.15);
}

#[test]
fn hard_masses() {
    let d = hole();
    let mut outside = Vec::new();
    for n in [256, 1024] {
        let f = frame(&d, c(0.5, 0.0), Regime::Hard, n).unwrap();
        let tk = build_trial_kernel(&d, c(0.5, 0.0), Regime::Hard, n, &TrialOptions::default()).unwrap();
        let inside = offdiag_mass(&tk, &f, c(0.0, 0.0), MassCut::InsideDelta).unwrap();
        let total = offdiag_mass(&tk, &f, c(0.0, 0.0), MassCut::Total).unwrap();
        assert!(inside > 0.0 && inside <= total);
        if n == 1024 {
            assert!(inside <= hard_edge_b(c(0.0, 0.0), c(0.0, 0.0)).re + 0.1);
        }
        outside.push(total - inside);
    }
    assert!(outside[1] < outside[0], "{outside:?}");
}

#[test]
fn soft_outside_mass_decreases() {
    // measured 0.218, 0.119, 0.039 for n = 256, 1024, 4096
    let d = ginibre();
    let mut outside = Vec::new();
    for n in [256, 1024] {
        let f = frame(&d, c(1.0, 0.0), Regime::Soft, n).unwrap();
        let tk = build_trial_kernel(&d, c(1.0, 0.0), Regime::Soft, n, &TrialOptions::default()).unwrap();
        outside.push(offdiag_mass(&tk, &f, c(0.0, 0.0), MassCut::OutsideDelta).unwrap());
    }
    assert!(outside[1] < outside[0], "{outside:?}");
    assert!(outside[1] < 0.15);
}

#[test]
fn lower_bound_chain() {
    let d = hole();
    let n = 256;
    let basis = radial_basis(d.potential(), n, Constraint::ExcludedDisc { radius: 0.5 }).unwrap();
    let f = frame(&d, c(0.5, 0.0), Regime::Hard, n).unwrap();
    let tk = build_trial_kernel(&d, c(0.5, 0.0), Regime::Hard, n, &TrialOptions::default()).unwrap();
    let lb = lower_bound(&basis, &tk, &f, c(0.0, 0.0)).unwrap();
    assert!(lb.bound() > 0.0 && lb.finite > 0.0);
    assert!(lb.holds(0.15), "{lb:?}");
}

#[test]
fn construction_errors() {
    let d = ginibre();
    assert!(build_trial_kernel(&d, c(1.0, 0.0), Regime::Hard, 256, &TrialOptions::default()).is_err());
    assert!(build_trial_kernel(&d, c(0.9, 0.0), Regime::Soft, 256, &TrialOptions::default()).is_err());
    assert!(build_trial_kernel(&d, c(1.0, 0.0), Regime::BulkGinibre, 256, &TrialOptions::default()).is_err());
    let opts: TrialOptions = serde_json::from_str(r#"{"schedule": {"lower_cut": "sqrt"}}"#).unwrap();
    assert_eq!(opts.schedule.lower_cut, Some(LowerCut::Sqrt));
    assert!(serde_json::from_str::<TrialOptions>(r#"{"offset": 0.1}"#).is_err());
}
