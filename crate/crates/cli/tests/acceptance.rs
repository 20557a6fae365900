//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use mesoscat::config::Command;
use mesoscat::{execute, Invocation};
use mesoscat_core::cluster::{uniform_circle_cluster, ClusterGeometry, Inclusion};
use mesoscat_core::eigen::{find_first_eigenvalue, EigenConfig, EigenfunctionEvaluator};
use mesoscat_core::greens::{
    disk_helmholtz_green, disk_laplace_green, disk_laplace_regular, disk_resonances,
    helmholtz_free, DiskDomain, MediumParams,
};
use mesoscat_core::interface::{
    discrete_vs_interface, make_interface_model, solve_interface, Side,
};
use mesoscat_core::oracle::{
    collocation_solve, fd_first_eigenvalue, highprec_j_f64, highprec_y_f64,
};
use mesoscat_core::quasistatic::QuasiStaticProblem;
use mesoscat_core::scatter::{
    assemble_identical_system, boundary_residuals, evaluate_total_field, solve_betas,
    ScatterOptions,
};
use mesoscat_core::specfun::{bessel_j, bessel_y};
use mesoscat_core::{Exec, Point};
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

/// Id, name, runtime limit in seconds, body. Bodies share the `N` selected by criterion 1.
type Criterion = (
    u32,
    &'static str,
    f64,
    Box<dyn FnOnce(&mut usize) -> Outcome>,
);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: f64, o: Outcome) -> Outcome {
    let t = elapsed.as_secs_f64();
    match o {
        Ok(d) if t <= limit_s => Ok(format!("{d}; {t:.1} s")),
        Ok(d) => Err(format!("{d}; {t:.1} s exceeds {limit_s} s")),
        Err(d) => Err(format!("{d}; {t:.1} s")),
    }
}

fn disk7() -> DiskDomain {
    DiskDomain::new(7.0).unwrap()
}

fn ring(n: usize) -> ClusterGeometry {
    uniform_circle_cluster(n, 0.1, 1.0, Point::new(1.0, 0.0), 2.0).unwrap()
}

/// Five-point Laplacian.
fn lap<T>(f: impl Fn(Point) -> T, x: Point, h: f64) -> T
where
    T: std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>
        + Copy,
{
    let s = f(x + Point::new(h, 0.0))
        + f(x - Point::new(h, 0.0))
        + f(x + Point::new(0.0, h))
        + f(x - Point::new(0.0, h));
    (s - f(x) * 4.0) * (1.0 / (h * h))
}

const REFERENCE_LAMBDA: f64 = 0.30678;

fn c1_sweep(selected: &mut usize) -> Outcome {
    let mut best = (f64::INFINITY, 0usize, 0.0);
    for n in [16, 20, 24, 28, 32, 40, 48] {
        let cfg = EigenConfig::dirichlet(disk7(), ring(n)).map_err(|e| e.to_string())?;
        let r = find_first_eigenvalue(&cfg, Exec::default()).map_err(|e| format!("N={n}: {e}"))?;
        let d = (r.lambda0 - REFERENCE_LAMBDA).abs();
        println!(
            "      N = {n:>2}   lambda0 = {:.7}   |lambda0 - {REFERENCE_LAMBDA}| = {d:.5}",
            r.lambda0
        );
        if d < best.0 {
            best = (d, n, r.lambda0);
        }
    }
    *selected = best.1;
    check(
        best.0 <= 0.005,
        format!(
            "best N = {} gives lambda0 = {:.6}, off by {:.4}",
            best.1, best.2, best.0
        ),
    )
}

fn c2_fd(n: usize) -> Outcome {
    let cluster = ring(n);
    let cfg = EigenConfig::dirichlet(disk7(), cluster.clone()).map_err(|e| e.to_string())?;
    let lam = find_first_eigenvalue(&cfg, Exec::default())
        .map_err(|e| e.to_string())?
        .lambda0;
    let fd = fd_first_eigenvalue(&disk7(), &cluster, 0.02).map_err(|e| e.to_string())?;
    let rel = (fd - lam).abs() / fd;
    check(
        rel <= 0.02,
        format!("N = {n}: lambda0 = {lam:.6}, FD(h = 0.02) = {fd:.6}, relative gap {rel:.4}"),
    )
}

fn c3_empty_disk() -> Outcome {
    let exact = 0.118_024_4;
    let pole = disk_resonances(&disk7(), 0.2).map_err(|e| e.to_string())?[0];
    let empty = ClusterGeometry::new(Vec::new(), 0.1).map_err(|e| e.to_string())?;
    let fd = fd_first_eigenvalue(&disk7(), &empty, 0.01).map_err(|e| e.to_string())?;
    let rel = (fd - pole).abs() / pole;
    check(
        (pole - exact).abs() <= 1e-6 && rel <= 0.005,
        format!("pole {pole:.8}, FD(h = 0.01) = {fd:.7}, relative gap {rel:.2e}"),
    )
}

fn c4_specfun() -> Outcome {
    let orders: Vec<i32> = (0..25).map(|i| (32 * i + 12) / 24).collect();
    let xs: Vec<f64> = (0..20)
        .map(|i| 1e-3 * (5e4f64).powf(i as f64 / 19.0))
        .collect();
    let (mut worst, mut wr) = (0.0f64, 0.0f64);
    for &n in &orders {
        for &x in &xs {
            let (j, y) = (
                bessel_j(n, x).map_err(|e| e.to_string())?,
                bessel_y(n, x).map_err(|e| e.to_string())?,
            );
            let (jr, yr) = (
                highprec_j_f64(n, x).map_err(|e| e.to_string())?,
                highprec_y_f64(n, x).map_err(|e| e.to_string())?,
            );
            worst = worst.max((j - jr).abs() / jr.abs().max(1.0));
            worst = worst.max((y - yr).abs() / yr.abs().max(1.0));
            let j1 = bessel_j(n + 1, x).map_err(|e| e.to_string())?;
            let y1 = bessel_y(n + 1, x).map_err(|e| e.to_string())?;
            let w = 2.0 / (PI * x);
            wr = wr.max((j1 * y - j * y1 - w).abs() / w);
        }
    }
    check(
        worst <= 1e-10 && wr <= 1e-9,
        format!(
            "{} lattice points, max |err| / max(1, |ref|) = {worst:.2e}, Wronskian relative {wr:.2e}",
            orders.len() * xs.len()
        ),
    )
}

fn c5_scatter() -> Outcome {
    let medium = MediumParams::new(1.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    let y = Point::new(3.0, 0.7);
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [3, 8] {
        let c =
            uniform_circle_cluster(n, 0.01, 0.3, Point::ORIGIN, 1.0).map_err(|e| e.to_string())?;
        let sol = solve_betas(
            &assemble_identical_system(&c, &medium, y, &ScatterOptions::default())
                .map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let res = boundary_residuals(&sol, 64).map_err(|e| e.to_string())?;
        let spread = res.iter().map(|r| r.spread).fold(0.0, f64::max);
        let momentum = res.iter().map(|r| r.momentum).fold(0.0, f64::max);
        let col = collocation_solve(&c, &medium, y, 32).map_err(|e| e.to_string())?;
        let rel = sol
            .betas
            .iter()
            .zip(&col.betas)
            .map(|(a, b)| (a - b).norm() / b.norm())
            .fold(0.0, f64::max);
        ok &= spread <= 0.05 && momentum <= 0.05 && rel <= 0.05;
        parts.push(format!(
            "N = {n}: spread {spread:.2e}, momentum {momentum:.2e}, vs collocation {rel:.2e}"
        ));
    }
    check(ok, parts.join("; "))
}

fn c6_interface() -> Outcome {
    let medium = MediumParams::unit(1.0).map_err(|e| e.to_string())?;
    let (eps, y) = (0.005, Point::new(2.0, 0.5));
    for n in [32usize, 128] {
        let d = 2.0 * (PI / n as f64).sin();
        if eps >= d.powf(1.5) {
            return Err(format!(
                "epsilon {eps} violates the sparsity bound at N = {n}"
            ));
        }
    }
    let a = discrete_vs_interface(32, eps, 1.0, &medium, y, 128).map_err(|e| e.to_string())?;
    let b = discrete_vs_interface(128, eps, 1.0, &medium, y, 128).map_err(|e| e.to_string())?;
    let ratio = b.abs_error / a.abs_error;
    let ratio_rel = b.rel_error / a.rel_error;
    check(
        ratio <= 0.6 && ratio_rel <= 0.6,
        format!(
            "error N = 32: {:.3e} (rel {:.3e}), N = 128: {:.3e} (rel {:.3e}), ratio {ratio:.3} (rel {ratio_rel:.3})",
            a.abs_error, a.rel_error, b.abs_error, b.rel_error
        ),
    )
}

fn c7_transmission() -> Outcome {
    let medium = MediumParams::unit(1.0).map_err(|e| e.to_string())?;
    let model =
        make_interface_model(1.0 / 128.0, 1.0, 0.005, &medium).map_err(|e| e.to_string())?;
    let field = solve_interface(&model, Point::new(2.0, 0.5), 128).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for i in 0..32 {
        let (c, j) = field
            .transmission_residuals(2.0 * PI * i as f64 / 32.0)
            .map_err(|e| e.to_string())?;
        worst = worst.max(c).max(j);
    }
    let identity =
        (model.jump_coeff - model.jump_coeff_from_source()).norm() / model.jump_coeff.norm();
    check(
        worst <= 1e-8 && identity <= 1e-14,
        format!("max transmission residual {worst:.2e} at 32 angles, jump formulas differ by {identity:.1e}"),
    )
}

fn quasi_cluster(eps: f64) -> mesoscat_core::Result<ClusterGeometry> {
    let centers = [(1.0, 0.0), (-1.0, 1.5), (0.5, -2.0), (6.5, 0.0)];
    let inc = centers
        .iter()
        .map(|&(x, y)| Inclusion::new(Point::new(x, y), 1.0, 0.0))
        .collect::<mesoscat_core::Result<Vec<_>>>()?;
    ClusterGeometry::new(inc, eps)
}

fn quasi(eps: f64) -> mesoscat_core::Result<QuasiStaticProblem> {
    QuasiStaticProblem::new(disk7(), quasi_cluster(eps)?, 0.01, 1.0)
}

fn c8_quasistatic() -> Outcome {
    let m1 = quasi(0.01)
        .and_then(|p| p.boundary_misfit(128))
        .map_err(|e| e.to_string())?;
    let m2 = quasi(0.02)
        .and_then(|p| p.boundary_misfit(128))
        .map_err(|e| e.to_string())?;
    let ratio = m2 / m1;
    check(
        m1 <= 0.05 && (1.3..=3.0).contains(&ratio),
        format!("misfit(0.01) = {m1:.3e}, misfit(0.02) = {m2:.3e}, ratio {ratio:.3}"),
    )
}

/// Each entry: name, worst residual, threshold.
fn c9_residuals(selected: usize) -> Outcome {
    let e = |e: mesoscat_core::Error| e.to_string();
    let h = 1e-3;
    let mut rows: Vec<(&str, f64, f64)> = Vec::new();

    let medium = MediumParams::unit(1.0).map_err(e)?;
    let k2 = medium.k0().powi(2);
    let probes = [
        Point::new(0.7, 0.2),
        Point::new(-1.3, 2.1),
        Point::new(2.5, -0.4),
    ];
    let mut w = 0.0f64;
    for x in probes {
        let g = |p: Point| helmholtz_free(p, Point::ORIGIN, &medium).unwrap();
        w = w.max((lap(g, x, h) + g(x) * k2).norm());
    }
    rows.push(("free-space Helmholtz kernel", w, 1e-3));

    let mut w = 0.0f64;
    for (y, lam) in [
        (Point::ORIGIN, 0.3),
        (Point::new(1.0, 0.0), 0.3),
        (Point::new(-2.0, 3.0), 0.25),
    ] {
        for x in [
            Point::new(2.0, 0.0),
            Point::new(-1.0, 3.5),
            Point::new(4.0, -4.0),
        ] {
            let g = |p: Point| disk_helmholtz_green(p, y, lam, &disk7(), 64).unwrap();
            w = w.max((lap(g, x, h) + lam * g(x)).abs());
        }
    }
    rows.push(("disk Helmholtz Green's function", w, 1e-3));

    let (mut wg, mut wh) = (0.0f64, 0.0f64);
    for y in [Point::ORIGIN, Point::new(1.0, 0.0), Point::new(-3.0, 4.0)] {
        for x in [
            Point::new(2.0, 1.0),
            Point::new(-1.0, -3.5),
            Point::new(5.0, 2.0),
        ] {
            wg = wg.max(lap(|p| disk_laplace_green(p, y, &disk7()).unwrap(), x, h).abs());
            wh = wh.max(lap(|p| disk_laplace_regular(p, y, &disk7()).unwrap(), x, h).abs());
        }
    }
    rows.push(("disk Laplace Green's function", wg, 1e-4));
    rows.push(("disk Laplace regular part", wh, 1e-4));

    let c = uniform_circle_cluster(8, 0.01, 0.3, Point::ORIGIN, 1.0).map_err(e)?;
    let sol = solve_betas(
        &assemble_identical_system(
            &c,
            &medium,
            Point::new(3.0, 0.7),
            &ScatterOptions::default(),
        )
        .map_err(e)?,
    )
    .map_err(e)?;
    let mut w = 0.0f64;
    for x in [
        Point::ORIGIN,
        Point::new(2.0, -1.0),
        Point::new(-1.5, 1.2),
        Point::new(0.3, 0.4),
    ] {
        let u = |p: Point| evaluate_total_field(&sol, p).unwrap();
        w = w.max((lap(u, x, h) + u(x) * k2).norm());
    }
    rows.push(("scattered total field", w, 1e-3));

    let model = make_interface_model(0.05, 1.0, 0.01, &medium).map_err(e)?;
    let field = solve_interface(&model, Point::new(2.0, 0.5), 64).map_err(e)?;
    let mut w = 0.0f64;
    for x in [
        Point::new(0.3, -0.2),
        Point::new(-1.8, 0.4),
        Point::new(0.0, 3.0),
    ] {
        let side = if x.norm() < 1.0 {
            Side::Inner
        } else {
            Side::Outer
        };
        let u = |p: Point| field.evaluate_side(p, side).unwrap();
        w = w.max((lap(u, x, h) + u(x) * k2).norm());
    }
    rows.push(("interface field", w, 1e-3));

    let p = quasi(0.01).map_err(e)?;
    let source = p.cluster().inclusions()[0].center;
    let cap = p.lambda() * p.capacity_coefficient();
    let (mut wv, mut wu) = (0.0f64, 0.0f64);
    for x in [
        Point::new(3.0, 1.0),
        Point::new(-2.0, -2.0),
        Point::new(0.0, 5.0),
        Point::new(1.3, 0.2),
    ] {
        let g = disk_laplace_green(x, source, p.domain()).map_err(e)?;
        wv = wv.max((lap(|q| p.auxiliary_v(q).unwrap(), x, h) + cap * g).abs());
        let u = |q: Point| p.approximate_field(q).unwrap();
        wu = wu.max((lap(u, x, h) + p.f() * p.lambda() * u(x)).abs());
    }
    rows.push(("quasi-static auxiliary field", wv, 1e-2));
    rows.push(("quasi-static two-term field", wu, 0.1 * p.f()));

    let cfg = EigenConfig::dirichlet(disk7(), ring(selected)).map_err(e)?;
    let r = find_first_eigenvalue(&cfg, Exec::default()).map_err(e)?;
    let ev = EigenfunctionEvaluator::new(&r, &cfg).map_err(e)?;
    let mut w = 0.0f64;
    for x in [
        Point::new(-3.0, 0.5),
        Point::new(1.0, 0.0),
        Point::new(4.5, -2.0),
        Point::new(0.0, 5.5),
    ] {
        let u = |q: Point| ev.eval(q).unwrap();
        w = w.max((lap(u, x, h) + r.lambda0 * u(x)).abs());
    }
    rows.push(("first eigenfunction", w, 1e-3));

    let mut ok = true;
    for (name, v, t) in &rows {
        let pass = v.is_finite() && v <= t;
        ok &= pass;
        println!(
            "      {:<32} {v:.2e}  (threshold {t:.0e}){}",
            name,
            if pass { "" } else { "  <-- fails" }
        );
    }
    check(ok, format!("{} fields checked", rows.len()))
}

fn c10_determinism() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut configs: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    configs.sort();
    if configs.is_empty() {
        return Err("no example configs found".into());
    }
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for cfg in &configs {
        let text = std::fs::read_to_string(cfg).map_err(|e| e.to_string())?;
        let json: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let key = json
            .as_object()
            .and_then(|o| o.keys().find(|k| *k != "output").cloned())
            .ok_or_else(|| format!("{}: no problem section", cfg.display()))?;
        let command = <Command as clap::ValueEnum>::from_str(&key, false)?;
        let stem = cfg.file_stem().unwrap().to_string_lossy().into_owned();
        let mut runs = Vec::new();
        for run in 0..2 {
            let inv = Invocation {
                command,
                config: cfg.clone(),
                output_dir: Some(tmp.path().join(format!("{stem}-{run}"))),
                threads: None,
                verbose: false,
            };
            let written = execute(&inv).map_err(|e| format!("{stem}: {e}"))?;
            let mut out: Vec<(String, Vec<u8>)> = written
                .iter()
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().into_owned(),
                        std::fs::read(p).unwrap(),
                    )
                })
                .collect();
            out.sort();
            runs.push(out);
        }
        if runs[0].is_empty() || runs[0] != runs[1] {
            return Err(format!("{stem}: outputs differ between runs"));
        }
        files += runs[0].len();
    }
    Ok(format!(
        "{} configs, {files} files byte-identical across two runs",
        configs.len()
    ))
}

fn main() {
    let mut selected = 16usize;
    let criteria: Vec<Criterion> = vec![
        (1, "eigenvalue benchmark sweep", 10.0, Box::new(c1_sweep)),
        (
            2,
            "finite-difference cross-check",
            300.0,
            Box::new(|n: &mut usize| c2_fd(*n)),
        ),
        (
            3,
            "unperturbed disk",
            f64::INFINITY,
            Box::new(|_: &mut usize| c3_empty_disk()),
        ),
        (
            4,
            "special functions",
            30.0,
            Box::new(|_: &mut usize| c4_specfun()),
        ),
        (
            5,
            "scattering residuals",
            60.0,
            Box::new(|_: &mut usize| c5_scatter()),
        ),
        (
            6,
            "interface convergence",
            60.0,
            Box::new(|_: &mut usize| c6_interface()),
        ),
        (
            7,
            "transmission conditions",
            f64::INFINITY,
            Box::new(|_: &mut usize| c7_transmission()),
        ),
        (
            8,
            "quasi-static scaling",
            60.0,
            Box::new(|_: &mut usize| c8_quasistatic()),
        ),
        (
            9,
            "PDE residual suite",
            60.0,
            Box::new(|n: &mut usize| c9_residuals(*n)),
        ),
        (
            10,
            "determinism",
            f64::INFINITY,
            Box::new(|_: &mut usize| c10_determinism()),
        ),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        println!("criterion {id}: {name}");
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut selected))).unwrap_or_else(|p| {
            Err(format!(
                "panicked: {}",
                p.downcast_ref::<String>().cloned().unwrap_or_else(|| {
                    p.downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .unwrap_or_default()
                })
            ))
        });
        match within(t.elapsed(), limit, outcome) {
            Ok(d) => println!("PASS {id:>2} {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
