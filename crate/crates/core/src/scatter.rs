//! Meso-scale coefficient systems for a point source scattered by a cluster
//! of small inertial inclusions, and the resulting approximate field
//!
//! `G_total(x) = G(|x - y|) + sum_j beta_j alpha_j G(|x - O_j|)`.

use crate::cluster::{alpha_eps, ClusterGeometry};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{circle_samples, Point};
use crate::greens::{
    helmholtz_free, helmholtz_free_gradient, helmholtz_free_radial,
    helmholtz_free_radial_derivative, MediumParams,
};
use crate::linalg::{solve_dense, ComplexMatrix};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Quadrature for the area integrals of `G` over an inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AreaRule {
    /// `pi a^2 G(centre)`.
    #[default]
    Midpoint,
    /// Seven-point rule, exact for polynomials of degree 5.
    Cubature7,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterOptions {
    /// Minimum distance from the source to every inclusion boundary.
    pub source_guard: f64,
    pub area_rule: AreaRule,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self {
            source_guard: 1.0,
            area_rule: AreaRule::Midpoint,
        }
    }
}

/// Which form of the coefficient system was assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    General,
    Identical,
}

/// Assembled `A beta = b` together with what is needed to interpret `beta`.
#[derive(Debug, Clone)]
pub struct ScatterSystem {
    pub kind: SystemKind,
    pub matrix: ComplexMatrix,
    pub rhs: Vec<Complex64>,
    pub alphas: Vec<Complex64>,
    pub cluster: ClusterGeometry,
    pub medium: MediumParams,
    pub source: Point,
}

#[derive(Debug, Clone)]
pub struct ScatterSolution {
    pub betas: Vec<Complex64>,
    pub displacements: Vec<Complex64>,
    pub alphas: Vec<Complex64>,
    pub source: Point,
    pub medium: MediumParams,
    pub cluster: ClusterGeometry,
}

fn check_inputs(
    cluster: &ClusterGeometry,
    medium: &MediumParams,
    y: Point,
    opts: &ScatterOptions,
) -> Result<()> {
    if medium.omega() <= 0.0 {
        return Err(Error::InvalidParameter(
            "scattering needs omega > 0; the zero-frequency regime is handled by the quasi-static model".into(),
        ));
    }
    if !y.is_finite() {
        return Err(Error::Domain(format!("source point {y} is not finite")));
    }
    for (j, inc) in cluster.inclusions().iter().enumerate() {
        let gap = y.dist(inc.center) - cluster.physical_radius(j);
        if gap < opts.source_guard {
            return Err(Error::Domain(format!(
                "source {y} is {gap:.6} from inclusion {}; it must stay at least the finite distance {} from the cluster",
                j + 1,
                opts.source_guard
            )));
        }
    }
    Ok(())
}

fn alphas(cluster: &ClusterGeometry, medium: &MediumParams) -> Result<Vec<Complex64>> {
    cluster
        .inclusions()
        .iter()
        .map(|inc| alpha_eps(medium, cluster.epsilon(), inc.radius_factor))
        .collect()
}

/// `int_{|x - c| < a} G(|x - p|) dx`.
fn area_integral(
    c: Point,
    a: f64,
    p: Point,
    medium: &MediumParams,
    rule: AreaRule,
) -> Result<Complex64> {
    let area = PI * a * a;
    match rule {
        AreaRule::Midpoint => Ok(helmholtz_free(c, p, medium)? * area),
        AreaRule::Cubature7 => {
            let mut s = helmholtz_free(c, p, medium)? * 0.25;
            let r = a * (2.0f64 / 3.0).sqrt();
            for i in 0..6 {
                let q = c + Point::polar(r, i as f64 * PI / 3.0);
                s += helmholtz_free(q, p, medium)? * 0.125;
            }
            Ok(s * area)
        }
    }
}

/// General system: row `k` reads
///
/// ```text
/// beta_k (m_k + 2 pi mu a_k alpha_k G'(a_k) / omega^2)
///   + sum_{j != k} beta_j alpha_j (m_k G(O_k - O_j) - rho int_{F_k} G(x - O_j))
///   = -(m_k G(O_k - y) - rho int_{F_k} G(x - y))
/// ```
///
/// with `a_k = epsilon r_k`.
pub fn assemble_general_system(
    cluster: &ClusterGeometry,
    medium: &MediumParams,
    y: Point,
    opts: &ScatterOptions,
) -> Result<ScatterSystem> {
    check_inputs(cluster, medium, y, opts)?;
    let n = cluster.len();
    let al = alphas(cluster, medium)?;
    let incs = cluster.inclusions();
    let w2 = medium.omega().powi(2);
    let rho = medium.rho();
    let mut a = ComplexMatrix::zeros(n);
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let ak = cluster.physical_radius(k);
        let ok = incs[k].center;
        let mk = incs[k].mass;
        let flux =
            helmholtz_free_radial_derivative(ak, medium)? * (2.0 * PI * medium.mu() * ak) * al[k]
                / w2;
        a.set(k, k, flux + mk);
        for j in 0..n {
            if j == k {
                continue;
            }
            let g = helmholtz_free(ok, incs[j].center, medium)?;
            let integral = area_integral(ok, ak, incs[j].center, medium, opts.area_rule)?;
            a.set(k, j, al[j] * (g * mk - integral * rho));
        }
        let gy = helmholtz_free(ok, y, medium)?;
        let iy = area_integral(ok, ak, y, medium, opts.area_rule)?;
        b[k] = -(gy * mk - iy * rho);
    }
    Ok(ScatterSystem {
        kind: SystemKind::General,
        matrix: a,
        rhs: b,
        alphas: al,
        cluster: cluster.clone(),
        medium: *medium,
        source: y,
    })
}

/// Leading-order system for identical inclusions:
/// `m G(O_k - y) + beta_k (m - alpha / omega^2) + m alpha sum_{j != k} beta_j G(O_k - O_j) = 0`.
pub fn assemble_identical_system(
    cluster: &ClusterGeometry,
    medium: &MediumParams,
    y: Point,
    opts: &ScatterOptions,
) -> Result<ScatterSystem> {
    check_inputs(cluster, medium, y, opts)?;
    if !cluster.is_identical() {
        return Err(Error::InvalidParameter(
            "identical-inclusion system requires equal radii and masses".into(),
        ));
    }
    let n = cluster.len();
    let al = alphas(cluster, medium)?;
    let incs = cluster.inclusions();
    let mut a = ComplexMatrix::zeros(n);
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    if n > 0 {
        let m = incs[0].mass;
        let alpha = al[0];
        let w2 = medium.omega().powi(2);
        for k in 0..n {
            a.set(k, k, m - alpha / w2);
            for j in 0..n {
                if j != k {
                    a.set(
                        k,
                        j,
                        alpha * m * helmholtz_free(incs[k].center, incs[j].center, medium)?,
                    );
                }
            }
            b[k] = -helmholtz_free(incs[k].center, y, medium)? * m;
        }
    }
    Ok(ScatterSystem {
        kind: SystemKind::Identical,
        matrix: a,
        rhs: b,
        alphas: al,
        cluster: cluster.clone(),
        medium: *medium,
        source: y,
    })
}

/// Solves for `beta` and evaluates the rigid displacements
/// `C_k = G(O_k - y) + beta_k + sum_{j != k} beta_j alpha_j G(O_k - O_j)`.
pub fn solve_betas(system: &ScatterSystem) -> Result<ScatterSolution> {
    let betas = solve_dense(&system.matrix, &system.rhs)?;
    let incs = system.cluster.inclusions();
    let med = &system.medium;
    let mut displacements = Vec::with_capacity(betas.len());
    for k in 0..betas.len() {
        let mut c = helmholtz_free(incs[k].center, system.source, med)? + betas[k];
        for j in 0..betas.len() {
            if j != k {
                c += betas[j]
                    * system.alphas[j]
                    * helmholtz_free(incs[k].center, incs[j].center, med)?;
            }
        }
        displacements.push(c);
    }
    Ok(ScatterSolution {
        betas,
        displacements,
        alphas: system.alphas.clone(),
        source: system.source,
        medium: system.medium,
        cluster: system.cluster.clone(),
    })
}

fn check_field_point(sol: &ScatterSolution, x: Point) -> Result<()> {
    if let Some(j) = sol.cluster.containing(x) {
        // Points on the boundary itself are admissible.
        let r = x.dist(sol.cluster.inclusions()[j].center);
        if r < sol.cluster.physical_radius(j) * (1.0 - 1e-12) {
            return Err(Error::Domain(format!(
                "field point {x} lies inside inclusion {}",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Approximate total field at `x`.
pub fn evaluate_total_field(sol: &ScatterSolution, x: Point) -> Result<Complex64> {
    check_field_point(sol, x)?;
    let mut u = helmholtz_free(x, sol.source, &sol.medium)?;
    for (j, inc) in sol.cluster.inclusions().iter().enumerate() {
        u += sol.betas[j] * sol.alphas[j] * helmholtz_free(x, inc.center, &sol.medium)?;
    }
    Ok(u)
}

/// Gradient of the approximate total field.
pub fn total_field_gradient(sol: &ScatterSolution, x: Point) -> Result<[Complex64; 2]> {
    check_field_point(sol, x)?;
    let mut g = helmholtz_free_gradient(x, sol.source, &sol.medium)?;
    for (j, inc) in sol.cluster.inclusions().iter().enumerate() {
        let c = sol.betas[j] * sol.alphas[j];
        let d = helmholtz_free_gradient(x, inc.center, &sol.medium)?;
        g[0] += c * d[0];
        g[1] += c * d[1];
    }
    Ok(g)
}

/// Field on a list of points; `None` where the field is undefined.
pub fn evaluate_total_field_many(
    sol: &ScatterSolution,
    points: &[Point],
    exec: Exec,
) -> Vec<Option<Complex64>> {
    exec.map(points.len(), |i| evaluate_total_field(sol, points[i]).ok())
}

/// Boundary residuals of the approximate field for one inclusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResidual {
    /// `max |G_total - C_k| / |C_k|` over the samples.
    pub spread: f64,
    /// `|m_k omega^2 C_k + mu flux| / |m_k omega^2 C_k|`, flux by trapezoid rule.
    pub momentum: f64,
}

/// Samples the constant-boundary and momentum conditions on every inclusion.
pub fn boundary_residuals(sol: &ScatterSolution, n_points: usize) -> Result<Vec<BoundaryResidual>> {
    let w2 = sol.medium.omega().powi(2);
    let mut out = Vec::with_capacity(sol.cluster.len());
    for (k, inc) in sol.cluster.inclusions().iter().enumerate() {
        let a = sol.cluster.physical_radius(k);
        let ck = sol.displacements[k];
        let mut spread: f64 = 0.0;
        let mut flux = Complex64::new(0.0, 0.0);
        for (p, n) in circle_samples(inc.center, a, n_points) {
            spread = spread.max((evaluate_total_field(sol, p)? - ck).norm() / ck.norm());
            let g = total_field_gradient(sol, p)?;
            flux += g[0] * n.x + g[1] * n.y;
        }
        flux *= 2.0 * PI * a / n_points as f64;
        let inertia = ck * (inc.mass * w2);
        let momentum = (inertia + flux * sol.medium.mu()).norm() / inertia.norm();
        out.push(BoundaryResidual { spread, momentum });
    }
    Ok(out)
}

/// Exact single-inclusion field `alpha G(r)` evaluated at the inclusion radius;
/// equals 1 by construction of `alpha`.
pub fn model_boundary_value(
    medium: &MediumParams,
    epsilon: f64,
    radius_factor: f64,
) -> Result<Complex64> {
    Ok(alpha_eps(medium, epsilon, radius_factor)?
        * helmholtz_free_radial(epsilon * radius_factor, medium)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{uniform_circle_cluster, Inclusion};
    use crate::specfun::hankel1;

    fn unit() -> MediumParams {
        MediumParams::unit(1.0).unwrap()
    }

    #[test]
    fn single_inclusion_closed_form() {
        let m = unit();
        let c = ClusterGeometry::new(vec![Inclusion::new(Point::ORIGIN, 1.0, 0.1).unwrap()], 0.01)
            .unwrap();
        let y = Point::new(5.0, 0.0);
        let sol =
            solve_betas(&assemble_general_system(&c, &m, y, &ScatterOptions::default()).unwrap())
                .unwrap();
        // Independent substitution with Hankel values written out.
        let a = 0.01;
        let alpha = Complex64::new(0.0, -4.0) / hankel1(0, a).unwrap();
        let dg = Complex64::new(0.0, -0.25) * hankel1(1, a).unwrap();
        let g5 = Complex64::new(0.0, 0.25) * hankel1(0, 5.0).unwrap();
        let diag = 0.1 + 2.0 * PI * a * alpha * dg;
        let beta = -(g5 * 0.1 - g5 * (PI * a * a)) / diag;
        assert!((sol.betas[0] - beta).norm() < 1e-14 * beta.norm());
        assert!((sol.displacements[0] - (g5 + beta)).norm() < 1e-14);
    }

    #[test]
    fn massless_single_inclusion_is_small() {
        let m = unit();
        for eps in [1e-2, 1e-3] {
            let c =
                ClusterGeometry::new(vec![Inclusion::new(Point::ORIGIN, 1.0, 0.0).unwrap()], eps)
                    .unwrap();
            let sol = solve_betas(
                &assemble_general_system(&c, &m, Point::new(5.0, 0.0), &ScatterOptions::default())
                    .unwrap(),
            )
            .unwrap();
            assert!(sol.betas[0].norm() < 2.0 * eps * eps);
        }
    }

    #[test]
    fn zero_rhs_gives_zero_betas() {
        let m = unit();
        let c = uniform_circle_cluster(5, 0.01, 0.0, Point::ORIGIN, 1.0).unwrap();
        let sys =
            assemble_identical_system(&c, &m, Point::new(4.0, 0.0), &ScatterOptions::default())
                .unwrap();
        let sol = solve_betas(&sys).unwrap();
        assert!(sol.betas.iter().all(|b| b.norm() == 0.0));
    }

    #[test]
    fn identical_agrees_with_general() {
        let m = unit();
        let c = uniform_circle_cluster(8, 1e-3, 0.4, Point::ORIGIN, 1.0).unwrap();
        let y = Point::new(3.0, 0.5);
        let o = ScatterOptions::default();
        let g = solve_betas(&assemble_general_system(&c, &m, y, &o).unwrap()).unwrap();
        let i = solve_betas(&assemble_identical_system(&c, &m, y, &o).unwrap()).unwrap();
        let scale = g.betas.iter().map(|b| b.norm()).fold(0.0, f64::max);
        for (a, b) in g.betas.iter().zip(&i.betas) {
            assert!((a - b).norm() < 1e-3 * scale);
        }
    }

    #[test]
    fn identical_requires_identical() {
        let incs = vec![
            Inclusion::new(Point::new(1.0, 0.0), 1.0, 0.1).unwrap(),
            Inclusion::new(Point::new(-1.0, 0.0), 1.0, 0.2).unwrap(),
        ];
        let c = ClusterGeometry::new(incs, 0.01).unwrap();
        assert!(assemble_identical_system(
            &c,
            &unit(),
            Point::new(0.0, 5.0),
            &ScatterOptions::default()
        )
        .is_err());
    }

    #[test]
    fn centred_source_gives_equal_betas() {
        let c = uniform_circle_cluster(12, 0.01, 0.5, Point::ORIGIN, 1.0).unwrap();
        let o = ScatterOptions {
            source_guard: 0.5,
            ..Default::default()
        };
        let sol = solve_betas(&assemble_identical_system(&c, &unit(), Point::ORIGIN, &o).unwrap())
            .unwrap();
        for b in &sol.betas {
            assert!((b - sol.betas[0]).norm() < 1e-12 * sol.betas[0].norm());
        }
        let c2 = uniform_circle_cluster(2, 0.01, 0.5, Point::ORIGIN, 1.0).unwrap();
        let sol = solve_betas(
            &assemble_identical_system(&c2, &unit(), Point::new(0.0, 4.0), &o).unwrap(),
        )
        .unwrap();
        assert!((sol.betas[0] - sol.betas[1]).norm() < 1e-12 * sol.betas[0].norm());
    }

    #[test]
    fn guard_and_frequency_errors() {
        let c = uniform_circle_cluster(3, 0.01, 0.3, Point::ORIGIN, 1.0).unwrap();
        let o = ScatterOptions::default();
        assert!(matches!(
            assemble_general_system(&c, &unit(), Point::new(1.5, 0.0), &o),
            Err(Error::Domain(_))
        ));
        let still = MediumParams::new(1.0, 1.0, 0.0).unwrap();
        assert!(assemble_general_system(&c, &still, Point::new(5.0, 0.0), &o).is_err());
    }

    #[test]
    fn empty_cluster_is_free_field() {
        let c = ClusterGeometry::new(vec![], 0.01).unwrap();
        let y = Point::new(0.3, 0.2);
        let sol = solve_betas(
            &assemble_general_system(&c, &unit(), y, &ScatterOptions::default()).unwrap(),
        )
        .unwrap();
        let x = Point::new(-2.0, 1.0);
        assert_eq!(
            evaluate_total_field(&sol, x).unwrap(),
            helmholtz_free(x, y, &unit()).unwrap()
        );
    }

    #[test]
    fn inside_inclusion_rejected() {
        let c = uniform_circle_cluster(3, 0.01, 0.3, Point::ORIGIN, 1.0).unwrap();
        let sol = solve_betas(
            &assemble_general_system(
                &c,
                &unit(),
                Point::new(5.0, 0.0),
                &ScatterOptions::default(),
            )
            .unwrap(),
        )
        .unwrap();
        assert!(matches!(
            evaluate_total_field(&sol, Point::new(1.001, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            evaluate_total_field(&sol, Point::new(5.0, 0.0)),
            Err(Error::Singularity(_))
        ));
        assert!(evaluate_total_field(&sol, Point::new(1.01, 0.0)).is_ok());
    }

    #[test]
    fn cubature_close_to_midpoint() {
        let c = uniform_circle_cluster(6, 0.01, 0.6, Point::ORIGIN, 1.0).unwrap();
        let y = Point::new(4.0, 1.0);
        let a = solve_betas(
            &assemble_general_system(&c, &unit(), y, &ScatterOptions::default()).unwrap(),
        )
        .unwrap();
        let o = ScatterOptions {
            area_rule: AreaRule::Cubature7,
            ..Default::default()
        };
        let b = solve_betas(&assemble_general_system(&c, &unit(), y, &o).unwrap()).unwrap();
        for (p, q) in a.betas.iter().zip(&b.betas) {
            assert!((p - q).norm() < 1e-6 * p.norm());
        }
    }

    #[test]
    fn fig1_matrix_diagonally_dominant() {
        let c = uniform_circle_cluster(24, 0.1, 1.0, Point::ORIGIN, 2.0).unwrap();
        let sys = assemble_general_system(
            &c,
            &unit(),
            Point::new(5.0, 0.0),
            &ScatterOptions::default(),
        )
        .unwrap();
        for k in 0..24 {
            let off: f64 = (0..24)
                .filter(|&j| j != k)
                .map(|j| sys.matrix.get(k, j).norm())
                .sum();
            assert!(sys.matrix.get(k, k).norm() > off, "row {k}");
        }
    }

    #[test]
    fn model_value_is_one() {
        assert!((model_boundary_value(&unit(), 0.01, 1.0).unwrap() - 1.0).norm() < 1e-14);
    }
}
