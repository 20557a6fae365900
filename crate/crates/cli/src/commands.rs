//! One function per command. Each returns the artifacts it would write.

use crate::config::*;
use crate::field::{num, render_heatmap, FieldGrid, Table};
use crate::{Artifact, CliError};
use mesoscat_core::cluster::ClusterGeometry;
use mesoscat_core::eigen::{
    find_first_eigenvalue, EigenConfig, EigenfunctionEvaluator, SearchWindow,
};
use mesoscat_core::interface::{discrete_vs_interface, make_interface_model, solve_interface};
use mesoscat_core::oracle::{
    collocation_solve, fd_first_eigenpair, highprec_bessel, highprec_bessel_y,
};
use mesoscat_core::quasistatic::QuasiStaticProblem;
use mesoscat_core::scatter::{
    assemble_general_system, assemble_identical_system, boundary_residuals, evaluate_total_field,
    solve_betas, AreaRule, ScatterOptions, ScatterSolution,
};
use mesoscat_core::Exec;
use std::f64::consts::PI;

type Log<'a> = &'a (dyn Fn(&str) + Sync);

pub fn dispatch(
    cmd: Command,
    cfg: &RunConfig,
    exec: Exec,
    log: Log,
) -> Result<Vec<Artifact>, CliError> {
    let missing = || CliError::Config(format!("config has no `{}` block", cmd.key()));
    match cmd {
        Command::Scatter => scatter(cfg.scatter.as_ref().ok_or_else(missing)?, exec, true, log),
        Command::Interface => {
            interface(cfg.interface.as_ref().ok_or_else(missing)?, exec, true, log)
        }
        Command::Quasistatic => quasistatic(
            cfg.quasistatic.as_ref().ok_or_else(missing)?,
            exec,
            true,
            log,
        ),
        Command::Eigen => eigen(cfg.eigen.as_ref().ok_or_else(missing)?, exec, true, log),
        Command::Oracle => oracle(cfg.oracle.as_ref().ok_or_else(missing)?, exec, log),
        Command::Fieldmap => fieldmap(cfg.fieldmap.as_ref().ok_or_else(missing)?, exec, log),
    }
}

fn csv(name: &str, t: Table) -> Result<Artifact, CliError> {
    Ok(Artifact {
        name: name.into(),
        format: Format::Csv,
        bytes: t.finish()?,
    })
}

fn field_artifacts(grid: &FieldGrid) -> Result<Vec<Artifact>, CliError> {
    Ok(vec![
        Artifact {
            name: "field.csv".into(),
            format: Format::Csv,
            bytes: grid.to_csv()?,
        },
        Artifact {
            name: "field.ppm".into(),
            format: Format::Ppm,
            bytes: render_heatmap(grid)?,
        },
    ])
}

fn checked_grid(key: &str, g: Option<GridSpec>) -> Result<Option<GridSpec>, CliError> {
    if let Some(g) = &g {
        g.validate(&format!("{key}.grid"))?;
    }
    Ok(g)
}

fn scatter_solution(p: &ScatterProblem, key: &str) -> Result<ScatterSolution, CliError> {
    let medium = p.medium.build(&format!("{key}.medium"))?;
    let cluster = p.cluster.build(&format!("{key}.cluster"))?;
    let y = require_point(&format!("{key}.source"), p.source)?;
    require_count(&format!("{key}.boundary_points"), p.boundary_points, 4)?;
    let mut opts = ScatterOptions::default();
    if let Some(g) = p.source_guard {
        opts.source_guard = require_non_negative(&format!("{key}.source_guard"), g)?;
    }
    opts.area_rule = match p.area_rule {
        AreaRuleChoice::Midpoint => AreaRule::Midpoint,
        AreaRuleChoice::Cubature7 => AreaRule::Cubature7,
    };
    let identical = match p.system {
        SystemChoice::Auto => cluster.is_identical(),
        SystemChoice::Identical if !cluster.is_identical() => {
            return Err(CliError::Config(format!(
                "{key}.system: `identical` needs equal masses and radius factors"
            )))
        }
        SystemChoice::Identical => true,
        SystemChoice::General => false,
    };
    let system = if identical {
        assemble_identical_system(&cluster, &medium, y, &opts)?
    } else {
        assemble_general_system(&cluster, &medium, y, &opts)?
    };
    Ok(solve_betas(&system)?)
}

fn scatter(
    p: &ScatterProblem,
    exec: Exec,
    tables: bool,
    log: Log,
) -> Result<Vec<Artifact>, CliError> {
    let grid = checked_grid("scatter", p.grid)?;
    let sol = scatter_solution(p, "scatter")?;
    log(&format!("solved for {} coefficients", sol.betas.len()));
    let mut out = Vec::new();
    if tables {
        let mut t = Table::new(&[
            "index",
            "x",
            "y",
            "mass",
            "alpha_re",
            "alpha_im",
            "beta_re",
            "beta_im",
            "displacement_re",
            "displacement_im",
        ]);
        for (j, inc) in sol.cluster.inclusions().iter().enumerate() {
            t.push(vec![
                (j + 1).to_string(),
                num(inc.center.x),
                num(inc.center.y),
                num(inc.mass),
                num(sol.alphas[j].re),
                num(sol.alphas[j].im),
                num(sol.betas[j].re),
                num(sol.betas[j].im),
                num(sol.displacements[j].re),
                num(sol.displacements[j].im),
            ]);
        }
        out.push(csv("betas.csv", t)?);
        let mut r = Table::new(&["index", "spread", "momentum"]);
        for (j, res) in boundary_residuals(&sol, p.boundary_points)?
            .iter()
            .enumerate()
        {
            r.push(vec![
                (j + 1).to_string(),
                num(res.spread),
                num(res.momentum),
            ]);
        }
        out.push(csv("residuals.csv", r)?);
    }
    if let Some(g) = grid {
        let fg = FieldGrid::sample_complex(&g, exec, |x| evaluate_total_field(&sol, x).ok());
        out.extend(field_artifacts(&fg)?);
    }
    Ok(out)
}

fn interface(
    p: &InterfaceProblem,
    exec: Exec,
    tables: bool,
    log: Log,
) -> Result<Vec<Artifact>, CliError> {
    let key = "interface";
    let grid = checked_grid(key, p.grid)?;
    let medium = p.medium.build(&format!("{key}.medium"))?;
    require_non_negative(&format!("{key}.inclusion_mass"), p.inclusion_mass)?;
    require_non_negative(&format!("{key}.total_mass"), p.total_mass)?;
    require_positive(&format!("{key}.epsilon"), p.epsilon)?;
    let y = require_point(&format!("{key}.source"), p.source)?;
    require_count(&format!("{key}.n_modes"), p.n_modes, 1)?;
    require_count(
        &format!("{key}.transmission_samples"),
        p.transmission_samples,
        1,
    )?;
    for (i, n) in p.compare.iter().enumerate() {
        require_count(&format!("{key}.compare[{i}]"), *n, 2)?;
    }
    let model = make_interface_model(p.inclusion_mass, p.total_mass, p.epsilon, &medium)?;
    let field = solve_interface(&model, y, p.n_modes)?;
    log(&format!("interface solved with {} modes", p.n_modes));
    let mut out = Vec::new();
    if tables {
        let mut m = Table::new(&[
            "inclusion_mass",
            "total_mass",
            "epsilon",
            "alpha_re",
            "alpha_im",
            "source_strength_re",
            "source_strength_im",
            "jump_coeff_re",
            "jump_coeff_im",
        ]);
        m.push(vec![
            num(model.m),
            num(model.total_mass),
            num(model.epsilon),
            num(model.alpha.re),
            num(model.alpha.im),
            num(model.source_strength.re),
            num(model.source_strength.im),
            num(model.jump_coeff.re),
            num(model.jump_coeff.im),
        ]);
        out.push(csv("model.csv", m)?);
        let mut t = Table::new(&["theta", "continuity", "jump"]);
        for k in 0..p.transmission_samples {
            let theta = 2.0 * PI * k as f64 / p.transmission_samples as f64;
            let (c, j) = field.transmission_residuals(theta)?;
            t.push(vec![num(theta), num(c), num(j)]);
        }
        out.push(csv("transmission.csv", t)?);
        if !p.compare.is_empty() {
            let mut c = Table::new(&["n", "epsilon", "abs_error", "rel_error"]);
            for n in &p.compare {
                let cmp =
                    discrete_vs_interface(*n, p.epsilon, p.total_mass, &medium, y, p.n_modes)?;
                log(&format!("N = {n}: relative error {:.3e}", cmp.rel_error));
                c.push(vec![
                    n.to_string(),
                    num(p.epsilon),
                    num(cmp.abs_error),
                    num(cmp.rel_error),
                ]);
            }
            out.push(csv("comparison.csv", c)?);
        }
    }
    if let Some(g) = grid {
        let fg = FieldGrid::sample_complex(&g, exec, |x| field.evaluate(x).ok());
        out.extend(field_artifacts(&fg)?);
    }
    Ok(out)
}

fn quasistatic(
    p: &QuasistaticProblem,
    exec: Exec,
    tables: bool,
    log: Log,
) -> Result<Vec<Artifact>, CliError> {
    let key = "quasistatic";
    let grid = checked_grid(key, p.grid)?;
    let domain = build_disk(&format!("{key}.radius"), p.radius)?;
    let cluster = p.cluster.build(&format!("{key}.cluster"))?;
    require_non_negative(&format!("{key}.f"), p.f)?;
    if !p.lambda.is_finite() {
        return Err(CliError::Config(format!("{key}.lambda: must be finite")));
    }
    require_count(&format!("{key}.boundary_points"), p.boundary_points, 4)?;
    let prob = QuasiStaticProblem::new(domain, cluster, p.f, p.lambda)?;
    log(&format!(
        "capacity coefficient {:.6}",
        prob.capacity_coefficient()
    ));
    let mut out = Vec::new();
    if tables {
        let mut s = Table::new(&["capacity_coefficient", "boundary_misfit"]);
        s.push(vec![
            num(prob.capacity_coefficient()),
            num(prob.boundary_misfit(p.boundary_points)?),
        ]);
        out.push(csv("quasistatic.csv", s)?);
        let mut d = Table::new(&["index", "x", "y", "displacement"]);
        for (j, a) in prob.rigid_displacements()?.iter().enumerate() {
            let c = prob.cluster().inclusions()[j + 1].center;
            d.push(vec![(j + 2).to_string(), num(c.x), num(c.y), num(*a)]);
        }
        out.push(csv("displacements.csv", d)?);
    }
    if let Some(g) = grid {
        let fg = FieldGrid::sample_real(&g, exec, |x| prob.approximate_field(x).ok());
        out.extend(field_artifacts(&fg)?);
    }
    Ok(out)
}

fn eigen_config(p: &EigenProblem, key: &str) -> Result<EigenConfig, CliError> {
    let domain = build_disk(&format!("{key}.radius"), p.radius)?;
    let cluster = p.cluster.build(&format!("{key}.cluster"))?;
    let base = if p.dirichlet_limit {
        EigenConfig::dirichlet(domain, cluster)
    } else {
        let rho = p.rho.ok_or_else(|| {
            CliError::Config(format!(
                "{key}.rho: required unless dirichlet_limit is true"
            ))
        })?;
        require_positive(&format!("{key}.rho"), rho)?;
        EigenConfig::inertial(domain, cluster, rho)
    };
    let mut cfg = base.map_err(|e| CliError::Config(format!("{key}: {e}")))?;
    cfg.n_modes = require_count(&format!("{key}.n_modes"), p.n_modes, 1)?;
    if let Some(s) = p.search {
        cfg.search = SearchWindow {
            lo: s.lo,
            hi: s.hi,
            scan_steps: s.steps,
            tolerance: s.tolerance,
        };
    }
    cfg.validate()
        .map_err(|e| CliError::Config(format!("{key}: {e}")))?;
    Ok(cfg)
}

fn eigen(p: &EigenProblem, exec: Exec, tables: bool, log: Log) -> Result<Vec<Artifact>, CliError> {
    let key = "eigen";
    let grid = checked_grid(key, p.grid)?;
    let cfg = eigen_config(p, key)?;
    let r = find_first_eigenvalue(&cfg, exec)?;
    log(&format!(
        "lambda0 = {:.10} in [{}, {}]",
        r.lambda0, r.bracket.0, r.bracket.1
    ));
    let mut out = Vec::new();
    if tables {
        let mut t = Table::new(&["quantity", "index", "value"]);
        for (name, v) in [
            ("lambda0", r.lambda0),
            ("bracket_lo", r.bracket.0),
            ("bracket_hi", r.bracket.1),
            ("det_residual", r.det_residual),
            ("null_residual", r.null_residual),
        ] {
            t.push(vec![name.into(), String::new(), num(v)]);
        }
        for (j, c) in r.intensities.iter().enumerate() {
            t.push(vec!["intensity".into(), (j + 1).to_string(), num(*c)]);
        }
        for (j, b) in r.betas.iter().enumerate() {
            t.push(vec!["beta".into(), (j + 1).to_string(), num(*b)]);
        }
        for (j, pole) in r.excised_poles.iter().enumerate() {
            t.push(vec!["excised_pole".into(), (j + 1).to_string(), num(*pole)]);
        }
        out.push(csv("eigenvalue.csv", t)?);
        let mut s = Table::new(&["lambda", "sign"]);
        for (l, sg) in &r.scan {
            s.push(vec![num(*l), num(*sg)]);
        }
        out.push(csv("scan.csv", s)?);
    }
    if let Some(g) = grid {
        let ev = EigenfunctionEvaluator::new(&r, &cfg)?;
        let mut fg = FieldGrid::sample_real(&g, exec, |x| ev.eval(x).ok());
        fg.normalize_max_abs();
        out.extend(field_artifacts(&fg)?);
    }
    Ok(out)
}

fn oracle(p: &OracleProblem, exec: Exec, log: Log) -> Result<Vec<Artifact>, CliError> {
    let key = "oracle";
    match p {
        OracleProblem::FdEigen(s) => {
            let k = format!("{key}.fd_eigen");
            let domain = build_disk(&format!("{k}.radius"), s.radius)?;
            let cluster = match &s.cluster {
                Some(c) => c.build(&format!("{k}.cluster"))?,
                None => ClusterGeometry::new(Vec::new(), 1.0)?,
            };
            require_positive(&format!("{k}.h"), s.h)?;
            let grid = checked_grid(&k, s.grid)?;
            let fd = fd_first_eigenpair(&domain, &cluster, s.h, exec)?;
            log(&format!("finite differences: lambda = {:.8}", fd.lambda));
            let mut t = Table::new(&["h", "lambda", "iterations", "interior_nodes"]);
            t.push(vec![
                num(s.h),
                num(fd.lambda),
                fd.iterations.to_string(),
                fd.grid.interior_count().to_string(),
            ]);
            let mut out = vec![csv("oracle.csv", t)?];
            if let Some(g) = grid {
                let inside =
                    |x: mesoscat_core::Point| domain.contains(x) && cluster.containing(x).is_none();
                let mut fg =
                    FieldGrid::sample_real(&g, exec, |x| inside(x).then(|| fd.value_at(x)));
                fg.normalize_max_abs();
                out.extend(field_artifacts(&fg)?);
            }
            Ok(out)
        }
        OracleProblem::Collocation(s) => {
            let k = format!("{key}.collocation");
            let medium = s.medium.build(&format!("{k}.medium"))?;
            let cluster = s.cluster.build(&format!("{k}.cluster"))?;
            let y = require_point(&format!("{k}.source"), s.source)?;
            require_count(
                &format!("{k}.points_per_boundary"),
                s.points_per_boundary,
                4,
            )?;
            let c = collocation_solve(&cluster, &medium, y, s.points_per_boundary)?;
            let mut t = Table::new(&[
                "index",
                "beta_re",
                "beta_im",
                "strength_re",
                "strength_im",
                "displacement_re",
                "displacement_im",
                "condition",
                "residual",
            ]);
            for j in 0..c.betas.len() {
                t.push(vec![
                    (j + 1).to_string(),
                    num(c.betas[j].re),
                    num(c.betas[j].im),
                    num(c.strengths[j].re),
                    num(c.strengths[j].im),
                    num(c.displacements[j].re),
                    num(c.displacements[j].im),
                    num(c.condition),
                    num(c.residual),
                ]);
            }
            Ok(vec![csv("oracle.csv", t)?])
        }
        OracleProblem::Bessel(s) => {
            let k = format!("{key}.bessel");
            if s.orders.is_empty() || s.x.is_empty() {
                return Err(CliError::Config(format!(
                    "{k}: orders and x must be non-empty"
                )));
            }
            if !(1..=50).contains(&s.digits) {
                return Err(CliError::Config(format!(
                    "{k}.digits: must lie in 1..=50, got {}",
                    s.digits
                )));
            }
            let mut t = Table::new(&["n", "x", "j", "y"]);
            for &n in &s.orders {
                for &x in &s.x {
                    let j = highprec_bessel(n, x, s.digits)?;
                    let y = if x > 0.0 {
                        highprec_bessel_y(n, x, s.digits)?
                    } else {
                        String::new()
                    };
                    t.push(vec![n.to_string(), num(x), j, y]);
                }
            }
            Ok(vec![csv("oracle.csv", t)?])
        }
    }
}

fn fieldmap(p: &FieldmapProblem, exec: Exec, log: Log) -> Result<Vec<Artifact>, CliError> {
    if p.grid().is_none() {
        return Err(CliError::Config(
            "fieldmap: the problem block needs a `grid`".into(),
        ));
    }
    match p {
        FieldmapProblem::Scatter(s) => scatter(s, exec, false, log),
        FieldmapProblem::Interface(s) => interface(s, exec, false, log),
        FieldmapProblem::Quasistatic(s) => quasistatic(s, exec, false, log),
        FieldmapProblem::Eigen(s) => eigen(s, exec, false, log),
    }
}
