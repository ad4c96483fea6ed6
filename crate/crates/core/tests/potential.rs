use std::f64::consts::PI;

use coulomb_edge::potential::*;
use coulomb_edge::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Equal-area polar discretization of the disc of radius `r`: `rings` rings
/// of `per` points each, staggered between rings.
fn disc_points(rings: usize, per: usize, r: f64) -> Vec<(Complex64, f64)> {
    let w = 1.0 / (rings * per) as f64;
    let mut out = Vec::new();
    for k in 0..rings {
        let rad = r * ((k as f64 + 0.5) / rings as f64).sqrt();
        for j in 0..per {
            let th = 2.0 * PI * (j as f64 + 0.5 * (k % 2) as f64) / per as f64;
            out.push((Complex64::from_polar(rad, th), w));
        }
    }
    out
}

#[test]
fn laplacian_convention() {
    let g = Potential::ginibre();
    for z in [c(0.1, 0.2), c(-1.0, 3.0)] {
        assert!((g.laplacian(z) - 1.0).abs() < 1e-15);
    }
    let q4 = Potential::radial_power(0.5, 4.0).unwrap();
    // Δ(|z|^4/2) = 2|z|^2
    assert!((q4.laplacian(c(0.6, 0.8)) - 2.0).abs() < 1e-14);
}

#[test]
fn radial_droplet_examples() {
    let d = radial_droplet(&Potential::ginibre()).unwrap();
    assert!((d.outer_radius - 1.0).abs() < 1e-12);
    assert_eq!(d.kind, DropletKind::Disc);
    // R q'(R) = 2R^4 = 2 for |z|^4/2, and R^4 = 2 for |z|^4/4
    let d = radial_droplet(&Potential::radial_power(0.5, 4.0).unwrap()).unwrap();
    assert!((d.outer_radius - 1.0).abs() < 1e-12);
    let d = radial_droplet(&Potential::radial_power(0.25, 4.0).unwrap()).unwrap();
    assert!((d.outer_radius - 2f64.powf(0.25)).abs() < 1e-12);
    for cf in [0.25, 2.0, 7.0] {
        let d = radial_droplet(&Potential::radial_power(cf, 2.0).unwrap()).unwrap();
        assert!((d.outer_radius - 1.0 / cf.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn droplet_mass_and_equilibrium_constant() {
    for p in [Potential::ginibre(), Potential::radial_power(0.5, 4.0).unwrap(), Potential::radial_power(3.0, 3.0).unwrap()] {
        let d = radial_droplet(&p).unwrap();
        assert!((d.total_mass() - 1.0).abs() < 1e-8, "{p:?}");
        assert!((d.mass_within(d.outer_radius) - 1.0).abs() < 1e-10);
        for t in [0.0, 0.3, 0.7, 1.0] {
            let z = Complex64::from_polar(t * d.outer_radius, 0.4);
            let v = 2.0 * d.log_potential(z) + p.evaluate(z);
            assert!((v - d.f_sigma).abs() < 1e-6, "{p:?} at {z}: {v} vs {}", d.f_sigma);
        }
    }
}

#[test]
fn custom_table_matches_power() {
    let r: Vec<f64> = (0..=400).map(|k| k as f64 * 0.01).collect();
    let q: Vec<f64> = r.iter().map(|x| x * x).collect();
    let p = Potential::radial_table(r, q, 0.0).unwrap();
    let d = radial_droplet(&p).unwrap();
    assert!((d.outer_radius - 1.0).abs() < 1e-6);
    assert!((p.laplacian(c(0.5, 0.0)) - 1.0).abs() < 1e-4);
}

#[test]
fn potential_spec_round_trip() {
    let s: PotentialSpec = serde_json::from_str(r#"{"kind": "radial", "profile": "power", "exponent": 2, "coefficient": 1}"#).unwrap();
    let p = Potential::from_spec(&s).unwrap();
    assert!((p.evaluate(c(0.0, 2.0)) - 4.0).abs() < 1e-15);
    assert!(serde_json::from_str::<PotentialSpec>(r#"{"kind": "radial", "profile": "power", "exponent": 2, "coefficient": 1, "x": 0}"#).is_err());
}

#[test]
fn validation() {
    assert!(Potential::ginibre().validate(1.0).is_ok());
    let weak = Potential::general(|z| 0.5 * z.norm_sqr().ln().max(0.0), |_| 1.0, 0.0);
    assert!(weak.validate(1.0).is_err());
    assert!(Potential::radial_power(-1.0, 2.0).is_err());
}

#[test]
fn energy_examples() {
    let zero = Potential::general(|_| 0.0, |_| 0.0, 0.0);
    let two = [(c(-0.5, 0.0), 0.5), (c(0.5, 0.0), 0.5)];
    assert!(energy(&two, &zero).unwrap().abs() < 1e-15);
    let g = Potential::ginibre();
    assert_eq!(energy(&[(c(0.0, 0.0), 1.0)], &g).unwrap(), 0.0);
    assert!(energy(&[(c(0.1, 0.0), 0.5), (c(0.1, 0.0), 0.5)], &g).is_err());
    assert!(energy(&[(c(0.1, 0.0), 0.7)], &g).is_err());
}

#[test]
fn energy_discretizations_are_consistent() {
    let g = Potential::ginibre();
    let e400 = energy(&disc_points(20, 20, 1.0), &g).unwrap();
    let e1600 = energy(&disc_points(40, 40, 1.0), &g).unwrap();
    assert!(((e400 - e1600) / e1600).abs() < 0.01, "{e400} {e1600}");
    // the equilibrium value for the Ginibre disc is 3/4
    assert!((e1600 - 0.75).abs() < 0.01);
    let perturbed = energy(&disc_points(40, 40, 1.15), &g).unwrap();
    assert!(perturbed > e1600);
}

#[test]
fn obstacle_examples() {
    let d = radial_droplet(&Potential::ginibre()).unwrap();
    assert!((obstacle_function(&d, c(1.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
    let e = std::f64::consts::E;
    assert!((obstacle_function(&d, c(0.0, e)).unwrap() - 3.0).abs() < 1e-12);
    for r in [1.1, 2.0, 5.0] {
        let z = Complex64::from_polar(r, 0.3);
        assert!(obstacle_function(&d, z).unwrap() <= d.potential().evaluate(z));
    }
    // continuity across the boundary
    let a = obstacle_function(&d, c(1.0 - 1e-9, 0.0)).unwrap();
    let b = obstacle_function(&d, c(1.0 + 1e-9, 0.0)).unwrap();
    assert!((a - b).abs() < 1e-8);
    let user = DropletData::user_supplied(Potential::ginibre(), Vec::new(), 1.0);
    assert!(obstacle_function(&user, c(0.0, 0.0)).is_err());
}

#[test]
fn script_v_examples() {
    let d = radial_droplet(&Potential::ginibre()).unwrap();
    let z0 = c(1.0, 0.0);
    assert!((script_v(&d, z0, z0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    let e = std::f64::consts::E;
    assert!((script_v(&d, c(e, 0.0), z0).unwrap() - c(3.0, 0.0)).norm() < 1e-14);
    assert!(script_v(&d, c(-2.0, 0.0), z0).is_err());
    for z in [c(1.2, 0.5), c(0.3, -2.0), c(-1.5, 0.1)] {
        let v = script_v(&d, z, z0).unwrap();
        assert!((v.re - obstacle_function(&d, z).unwrap()).abs() < 1e-12);
    }
    // holomorphy: Cauchy-Riemann by central differences
    let z = c(1.1, 0.4);
    let h = 1e-5;
    let dx = (script_v(&d, z + h, z0).unwrap() - script_v(&d, z - h, z0).unwrap()) / (2.0 * h);
    let dy = (script_v(&d, z + c(0.0, h), z0).unwrap() - script_v(&d, z - c(0.0, h), z0).unwrap()) / (2.0 * h);
    assert!((dy - dx * c(0.0, 1.0)).norm() < 1e-6);
}

#[test]
fn hard_hole_normal_derivative() {
    let r0 = 0.5;
    let d = radial_droplet(&Potential::ginibre()).unwrap().with_hard_hole(r0).unwrap();
    let z0 = c(0.0, r0);
    let v = script_v(&d, z0, z0).unwrap();
    assert_eq!(v, c(0.25, 0.0));
    // outward from the hole: (V − Q)(z0 + h n) with n = z0/|z0|
    let n = z0 / r0;
    let h = 1e-6;
    let f = |t: f64| script_v(&d, z0 + n * t, z0).unwrap().re - d.potential().evaluate(z0 + n * t);
    let deriv = (f(h) - f(-h)) / (2.0 * h);
    assert!((deriv + 2.0 * r0).abs() < 1e-6, "{deriv}");
}
