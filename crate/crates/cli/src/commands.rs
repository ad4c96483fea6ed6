//! The five subcommands. Each writes its files into the output directory and
//! returns a JSON summary with an overall verdict.

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use coulomb_edge::finitekernel::{
    edge_lattice, frame, gram_basis, grid_rows, lattice_pairs, radial_basis, Cocycle, Constraint, GramQuadrature, WeightedBasis,
};
use coulomb_edge::limitkernels::{LimitKernel, Regime};
use coulomb_edge::potential::{radial_droplet, DropletData, Potential};
use coulomb_edge::sampler::{empirical_density, expected_density, sample_runs, DensityGrid, SampleRun};
use coulomb_edge::specfun::PrecisionContext;
use coulomb_edge::transforms::{
    hl_kernel_identity_residual, laplace_isometry_residual, reproducing_residual, weighted_bargmann_isometry_residual, ProfileFunction, Space,
};
use coulomb_edge::trialkernel::{build_trial_kernel, local_compare, lower_bound, offdiag_mass, MassCut, TrialKernel};
use coulomb_edge::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::*;
use crate::CliError;

pub struct Outcome {
    pub summary: Value,
    pub pass: bool,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, v).map_err(|e| CliError::Io(e.into()))?;
    writeln!(f)?;
    Ok(())
}

#[derive(Serialize)]
struct KernelRow {
    zeta_re: f64,
    zeta_im: f64,
    eta_re: f64,
    eta_im: f64,
    k_re: f64,
    k_im: f64,
    abs: f64,
}

impl KernelRow {
    fn new(z: Complex64, e: Complex64, k: Complex64) -> KernelRow {
        KernelRow { zeta_re: z.re, zeta_im: z.im, eta_re: e.re, eta_im: e.im, k_re: k.re, k_im: k.im, abs: k.norm() }
    }
}

pub fn limits(cfg: &LimitsConfig, out: &Path) -> Result<Outcome, CliError> {
    let g = cfg.grid;
    if g.points == 0 || !(g.max >= g.min) || !g.min.is_finite() || !g.max.is_finite() || (g.points > 1 && g.max == g.min) {
        return Err(config_err(format!("bad grid: [{}, {}] with {} points", g.min, g.max, g.points)));
    }
    let kern = LimitKernel::new(cfg.kernel.regime());
    let mut rows = Vec::new();
    for z in g.nodes() {
        match cfg.slice {
            Slice::Diagonal => rows.push(KernelRow::new(z, z, kern.eval(z, z))),
            Slice::Section { eta } => rows.push(KernelRow::new(z, cplx(eta), kern.eval(z, cplx(eta)))),
            Slice::TangentialShift { eta, shift } => {
                let e = cplx(eta);
                let s = Complex64::new(0.0, shift);
                rows.push(KernelRow::new(z, e, kern.eval(z, e)));
                rows.push(KernelRow::new(z + s, e + s, kern.eval(z + s, e + s)));
            }
        }
    }
    if rows.iter().any(|r| !(r.k_re.is_finite() && r.k_im.is_finite())) {
        return Err(CliError::Core(coulomb_edge::Error::Evaluation("limit kernel is not finite on the grid".into())));
    }
    write_csv(&out.join("limits.csv"), &rows)?;
    Ok(Outcome { summary: json!({"command": "limits", "kernel": cfg.kernel, "rows": rows.len(), "pass": true}), pass: true })
}

/// Droplet, edge point and basis constraint of a regime.
fn edge(setup: &EdgeSetup) -> Result<(DropletData, Complex64, Constraint), CliError> {
    let pot = Potential::from_spec(&setup.potential)?;
    let d = radial_droplet(&pot)?;
    let u = Complex64::from_polar(1.0, setup.edge_angle);
    Ok(match setup.regime {
        Regime::Hard => {
            let r0 = setup.hole_radius;
            let d = d.with_hard_hole(r0)?;
            (d, u * r0, Constraint::ExcludedDisc { radius: r0 })
        }
        Regime::Soft => {
            let r = d.outer_radius;
            (d, u * r, Constraint::None)
        }
        Regime::SoftHard => {
            let r = d.outer_radius;
            (d, u * r, Constraint::RestrictedDisc { radius: r })
        }
        Regime::BulkGinibre => return Err(config_err("regime must be soft, hard or soft_hard")),
    })
}

fn check_n_list(n: &[usize], min: usize) -> Result<(), CliError> {
    if n.is_empty() || n.iter().any(|&k| k < min) {
        return Err(config_err(format!("n must be a non-empty list of values ≥ {min}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct NormRow {
    j: usize,
    ln_h: f64,
    h: f64,
}

fn write_norms(path: &Path, basis: &WeightedBasis) -> Result<(), CliError> {
    if let Some(ln) = basis.ln_norms() {
        let rows: Vec<NormRow> = ln.iter().enumerate().map(|(j, &l)| NormRow { j, ln_h: l, h: l.exp() }).collect();
        write_csv(path, &rows)?;
    }
    Ok(())
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn converge(cfg: &ConvergeConfig, out: &Path) -> Result<Outcome, CliError> {
    check_n_list(&cfg.n, 1)?;
    if !(cfg.grid.radius >= 0.0 && cfg.grid.spacing > 0.0) {
        return Err(config_err("grid needs radius ≥ 0 and spacing > 0"));
    }
    let (droplet, z0, constraint) = edge(&cfg.setup())?;
    let regime = cfg.regime;
    let tol = cfg.tolerance.unwrap_or(if regime == Regime::SoftHard { 0.08 } else { 0.05 });
    let ctx = match cfg.precision_digits {
        Some(d) => PrecisionContext::new(d, PrecisionContext::default().target_rtol)?,
        None => PrecisionContext::default(),
    };
    let pairs = lattice_pairs(&edge_lattice(cfg.grid.radius, cfg.grid.spacing));
    let mut errors = Vec::new();
    for &n in &cfg.n {
        let basis = match cfg.basis {
            BasisKind::Radial => radial_basis(droplet.potential(), n, constraint)?,
            BasisKind::Gram => {
                let r = cfg.quadrature_radius.unwrap_or(droplet.outer_radius + 8.0 / (n as f64).sqrt());
                gram_basis(droplet.potential(), n, constraint, &GramQuadrature::new(r), &ctx)?
            }
        };
        let fr = frame(&droplet, z0, regime, n)?;
        let cy = cfg.cocycle.then(|| Cocycle::new(&fr, &droplet));
        let rows = grid_rows(&basis, &fr, cy.as_ref(), &pairs)?;
        let err = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
        eprintln!("converge {regime:?} n = {n}: error {err:.4e}");
        write_csv(&out.join(format!("grid_n{n}.csv")), &rows)?;
        write_norms(&out.join(format!("norms_n{n}.csv")), &basis)?;
        errors.push(err);
    }
    let last = *errors.last().unwrap_or(&f64::NAN);
    let dec = decreasing(&errors);
    let pass = dec && last <= tol;
    let summary = json!({
        "command": "converge",
        "regime": regime,
        "n": cfg.n,
        "error": errors,
        "decreasing": dec,
        "final_error": last,
        "tolerance": tol,
        "pass": pass,
    });
    write_json(&out.join("converge.json"), &summary)?;
    Ok(Outcome { summary, pass })
}

#[derive(Serialize)]
struct CoeffRow {
    j: usize,
    h: f64,
}

#[derive(Serialize)]
struct ProfileRow {
    t: f64,
    trial: f64,
    limit: f64,
}

fn write_trial_tables(tk: &TrialKernel, fr: &coulomb_edge::finitekernel::RescalingFrame, cfg: &TrialConfig, out: &Path) -> Result<(), CliError> {
    let n = tk.n;
    let rows: Vec<CoeffRow> = tk.h.iter().enumerate().map(|(i, &h)| CoeffRow { j: tk.schedule.m + i, h }).collect();
    write_csv(&out.join(format!("coefficients_n{n}.csv")), &rows)?;
    let lim = LimitKernel::new(fr.regime);
    let k = cfg.profile_points.max(2);
    let s2 = fr.scale * fr.scale;
    let rows: Vec<ProfileRow> = (0..k)
        .map(|i| {
            let t = -cfg.profile_width + 2.0 * cfg.profile_width * i as f64 / (k - 1) as f64;
            let z = Complex64::new(t, 0.0);
            let p = fr.point(z);
            let trial = tk.eval(p, p).map(|v| v.re / s2).unwrap_or(f64::NAN);
            ProfileRow { t, trial, limit: lim.eval(z, z).re }
        })
        .collect();
    write_csv(&out.join(format!("profile_n{n}.csv")), &rows)
}

pub fn trial(cfg: &TrialConfig, out: &Path) -> Result<Outcome, CliError> {
    check_n_list(&cfg.n, 16)?;
    let (droplet, z0, constraint) = edge(&cfg.setup())?;
    let regime = cfg.regime;
    let zeta = cfg.zeta.map(cplx).unwrap_or(if regime == Regime::SoftHard { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    let mz = cplx(cfg.mass_zeta);
    let local_tol = cfg.tolerance.local.unwrap_or(if regime == Regime::SoftHard { 0.15 } else { 0.1 });
    let mut entries = Vec::new();
    let mut outside = Vec::new();
    let mut bounds_hold = true;
    for &n in &cfg.n {
        let fr = frame(&droplet, z0, regime, n)?;
        let tk = build_trial_kernel(&droplet, z0, regime, n, &cfg.options)?;
        let local = local_compare(&tk, &fr, zeta, zeta)?.norm();
        let mut e = json!({
            "n": n,
            "schedule": tk.schedule,
            "nu_mass": tk.nu_mass,
            "lambda_offset": tk.offset,
            "local_error": local,
        });
        if cfg.masses {
            let inside = offdiag_mass(&tk, &fr, mz, MassCut::InsideDelta)?;
            let total = offdiag_mass(&tk, &fr, mz, MassCut::Total)?;
            e["inside_mass"] = json!(inside);
            e["total_mass"] = json!(total);
            e["outside_mass"] = json!(total - inside);
            outside.push(total - inside);
        }
        if cfg.lower_bound {
            let basis = radial_basis(droplet.potential(), n, constraint)?;
            let lb = lower_bound(&basis, &tk, &fr, mz)?;
            let holds = lb.holds(cfg.tolerance.lower_bound);
            bounds_hold &= holds;
            e["lower_bound"] = json!({
                "finite": lb.finite,
                "trial_diagonal": lb.trial_diagonal,
                "trial_mass": lb.trial_mass,
                "bound": lb.bound(),
                "holds": holds,
            });
        }
        eprintln!("trial {regime:?} n = {n}: {e}");
        write_trial_tables(&tk, &fr, cfg, out)?;
        entries.push(e);
    }
    let last_local = entries.last().and_then(|e| e["local_error"].as_f64()).unwrap_or(f64::NAN);
    let local_ok = last_local <= local_tol;
    let outside_ok = outside.len() < 2 || decreasing(&outside);
    let pass = local_ok && outside_ok && bounds_hold;
    let summary = json!({
        "command": "trial",
        "regime": regime,
        "zeta": [zeta.re, zeta.im],
        "entries": entries,
        "local_tolerance": local_tol,
        "local_pass": local_ok,
        "outside_decreasing": outside_ok,
        "lower_bound_pass": bounds_hold,
        "pass": pass,
    });
    write_json(&out.join("trial.json"), &summary)?;
    Ok(Outcome { summary, pass })
}

fn write_points(path: &Path, run: &SampleRun) -> Result<(), CliError> {
    let mut f = File::create(path)?;
    let cons = serde_json::to_string(&run.constraint).map_err(|e| CliError::Io(e.into()))?;
    writeln!(f, "# seed={} stream={} n={} constraint={}", run.seed, run.stream, run.n, cons)?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(["re", "im"])?;
    for z in &run.points {
        w.write_record([z.re.to_string(), z.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DensityRow {
    cell: usize,
    count: u64,
    density: f64,
    sigma: f64,
    expected: f64,
    empty: bool,
}

pub fn sample(cfg: &SampleConfig, out: &Path) -> Result<Outcome, CliError> {
    if cfg.n == 0 || cfg.runs == 0 {
        return Err(config_err("n and runs must be positive"));
    }
    let grid = match &cfg.density {
        Some(GridSpec::Annuli { radii }) => Some(DensityGrid::Annuli(radii.clone())),
        Some(GridSpec::Rect { x0, x1, y0, y1, nx, ny }) => Some(DensityGrid::Rect { x0: *x0, x1: *x1, y0: *y0, y1: *y1, nx: *nx, ny: *ny }),
        None => None,
    };
    if grid.is_some() && cfg.runs < 50 {
        return Err(config_err(format!("densities need at least 50 runs, got {}", cfg.runs)));
    }
    let pot = Potential::from_spec(&cfg.potential)?;
    let basis = radial_basis(&pot, cfg.n, cfg.constraint)?;
    let runs = sample_runs(&basis, cfg.seed, cfg.runs)?;
    let written = if cfg.all_points { runs.len() } else { 1 };
    for r in &runs[..written] {
        write_points(&out.join(format!("points_seed{}_run{}.csv", r.seed, r.stream)), r)?;
    }
    let proposals: u64 = runs.iter().map(|r| r.stats.proposals).sum();
    let accepted: u64 = runs.iter().map(|r| r.stats.accepted).sum();
    let mut summary = json!({
        "command": "sample",
        "n": cfg.n,
        "seed": cfg.seed,
        "runs": runs.len(),
        "constraint": cfg.constraint,
        "proposals": proposals,
        "accepted": accepted,
    });
    if let Some(g) = grid {
        let emp = empirical_density(&runs, &g)?;
        let exp = expected_density(&basis, &g)?;
        let rows: Vec<DensityRow> = emp
            .iter()
            .zip(&exp)
            .enumerate()
            .map(|(cell, (e, &x))| DensityRow { cell, count: e.count, density: e.density, sigma: e.sigma, expected: x, empty: e.empty })
            .collect();
        summary["empty_cells"] = json!(rows.iter().filter(|r| r.empty).count());
        write_csv(&out.join("density.csv"), &rows)?;
    }
    summary["pass"] = json!(true);
    write_json(&out.join("sample.json"), &summary)?;
    Ok(Outcome { summary, pass: true })
}

fn halfline(p: HalflineProfile) -> ProfileFunction {
    match p {
        HalflineProfile::Indicator => ProfileFunction::indicator(-1.0),
        HalflineProfile::Exp => ProfileFunction::negative_halfline("e^t", |t| t.exp()),
        HalflineProfile::TExp => ProfileFunction::negative_halfline("t e^t", |t| t * t.exp()),
    }
}

pub fn spaces(cfg: &SpacesConfig, out: &Path) -> Result<Outcome, CliError> {
    let tol = cfg.tolerance;
    let mut results = Vec::new();
    let mut push = |identity: &str, args: Value, residual: f64, tolerance: f64| {
        results.push(json!({
            "identity": identity,
            "args": args,
            "residual": residual,
            "tolerance": tolerance,
            "pass": residual <= tolerance,
        }));
    };
    for &k in &cfg.laplace_powers {
        let r = laplace_isometry_residual(&ProfileFunction::power(k))?;
        push("laplace_isometry", json!(format!("t^{k}")), r, tol.laplace);
    }
    for &p in &cfg.bargmann_profiles {
        let r = weighted_bargmann_isometry_residual(&halfline(p))?;
        push("weighted_bargmann_isometry", json!(p), r, tol.bargmann);
    }
    for (space, t, name) in [(Space::AHard, tol.a_hard, "reproducing_A_hard"), (Space::HC, tol.h_c, "reproducing_H_C"), (Space::HL, tol.h_l, "reproducing_H_L")] {
        for &[z, x] in &cfg.pairs {
            let r = reproducing_residual(space, cplx(z), cplx(x))?;
            push(name, json!([z, x]), r, t);
        }
    }
    for &[z, e] in &cfg.psi_pairs {
        push("psi_kernel_identity", json!([z, e]), hl_kernel_identity_residual(cplx(z), cplx(e)), tol.psi);
    }
    let pass = results.iter().all(|r| r["pass"] == json!(true));
    let summary = json!({"command": "spaces", "results": results, "pass": pass});
    write_json(&out.join("spaces.json"), &summary)?;
    Ok(Outcome { summary, pass })
}

pub fn ensure_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    Ok(())
}
