//! Boundary collocation for point-source scattering by a few inertial inclusions.
//!
//! Each inclusion carries one outgoing monopole `s_j Phi(x - O_j)` with
//! `Phi(r) = (i / 4 mu) H_0(k_0 r)` and a rigid displacement `C_j`. The
//! unknowns `(s, C)` are fitted in the least-squares sense to
//!
//! - `G(x, y) + sum_l s_l Phi(x - O_l) = C_j` at points of `|x - O_j| = a_j`,
//! - `m_j omega^2 C_j + mu (flux of the total field out of inclusion j) = 0`.
//!
//! The reported `beta_j` is `s_j / alpha_j` with `alpha_j = -4 i mu / H_0(k_0 a_j)`.

use crate::cluster::ClusterGeometry;
use crate::error::{Error, Result};
use crate::geometry::{circle_samples, Point};
use crate::greens::MediumParams;
use crate::specfun::hankel1;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest cluster accepted.
pub const MAX_INCLUSIONS: usize = 8;
/// Ratio of extreme singular values beyond which the fit is rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct CollocationResult {
    pub betas: Vec<Complex64>,
    pub strengths: Vec<Complex64>,
    pub displacements: Vec<Complex64>,
    pub condition: f64,
    /// Weighted least-squares residual norm relative to the right-hand side.
    pub residual: f64,
}

struct Monopole {
    k0: f64,
    scale: Complex64,
}

impl Monopole {
    fn new(medium: &MediumParams) -> Self {
        Self {
            k0: medium.k0(),
            scale: Complex64::new(0.0, 0.25 / medium.mu()),
        }
    }

    fn value(&self, x: Point, c: Point) -> Result<Complex64> {
        Ok(self.scale * hankel1(0, self.k0 * x.dist(c))?)
    }

    /// Derivative along `n` at `x`.
    fn normal_derivative(&self, x: Point, c: Point, n: Point) -> Result<Complex64> {
        let d = x - c;
        let r = d.norm();
        // H_0' = -H_1.
        let dr = -self.scale * self.k0 * hankel1(1, self.k0 * r)?;
        Ok(dr * (d.dot(n) / r))
    }
}

/// Equivalent `beta_j` from the collocation fit.
pub fn collocation_betas(
    cluster: &ClusterGeometry,
    medium: &MediumParams,
    y: Point,
    points_per_boundary: usize,
) -> Result<Vec<Complex64>> {
    Ok(collocation_solve(cluster, medium, y, points_per_boundary)?.betas)
}

pub fn collocation_solve(
    cluster: &ClusterGeometry,
    medium: &MediumParams,
    y: Point,
    points_per_boundary: usize,
) -> Result<CollocationResult> {
    let n = cluster.len();
    if n == 0 || n > MAX_INCLUSIONS {
        return Err(Error::InvalidParameter(format!(
            "collocation handles 1..={MAX_INCLUSIONS} inclusions, got {n}"
        )));
    }
    if points_per_boundary < 4 {
        return Err(Error::InvalidParameter(format!(
            "need at least 4 points per boundary, got {points_per_boundary}"
        )));
    }
    if !y.is_finite() {
        return Err(Error::Domain("source point is not finite".into()));
    }
    for (j, inc) in cluster.inclusions().iter().enumerate() {
        if y.dist(inc.center) <= 2.0 * cluster.physical_radius(j) {
            return Err(Error::Domain(format!(
                "source lies on or near inclusion {}",
                j + 1
            )));
        }
    }
    let phi = Monopole::new(medium);
    let p = points_per_boundary;
    let w2 = medium.omega().powi(2);
    let rows = n * p + n;
    let mut a = DMatrix::<Complex64>::zeros(rows, 2 * n);
    let mut b = DVector::<Complex64>::zeros(rows);
    let wb = 1.0 / (p as f64).sqrt();
    let one = Complex64::new(1.0, 0.0);
    for (j, inc) in cluster.inclusions().iter().enumerate() {
        let aj = cluster.physical_radius(j);
        let quad = 2.0 * PI * aj / p as f64;
        let wm = 1.0 / (inc.mass * w2).max(1.0);
        let mrow = n * p + j;
        for (i, (x, nrm)) in circle_samples(inc.center, aj, p).into_iter().enumerate() {
            let row = j * p + i;
            for (l, other) in cluster.inclusions().iter().enumerate() {
                a[(row, l)] = phi.value(x, other.center)? * wb;
                a[(mrow, l)] +=
                    phi.normal_derivative(x, other.center, nrm)? * (medium.mu() * quad * wm);
            }
            a[(row, n + j)] = -one * wb;
            b[row] = -phi.value(x, y)? * wb;
            b[mrow] -= phi.normal_derivative(x, y, nrm)? * (medium.mu() * quad * wm);
        }
        a[(mrow, n + j)] = one * (inc.mass * w2 * wm);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::OracleFailure(format!(
            "collocation matrix condition {condition:e} exceeds {MAX_CONDITION:e}"
        )));
    }
    let sol = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::OracleFailure(format!("least-squares solve failed: {e}")))?;
    let residual = (&a * &sol - &b).norm() / b.norm().max(f64::MIN_POSITIVE);
    let strengths: Vec<Complex64> = sol.iter().take(n).copied().collect();
    let displacements: Vec<Complex64> = sol.iter().skip(n).copied().collect();
    let betas = strengths
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let h0 = hankel1(0, medium.k0() * cluster.physical_radius(j))?;
            let alpha = Complex64::new(0.0, -4.0 * medium.mu()) / h0;
            Ok(s / alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CollocationResult {
        betas,
        strengths,
        displacements,
        condition,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Inclusion;

    fn medium() -> MediumParams {
        MediumParams::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn massless_single_inclusion_is_weak() {
        let c = ClusterGeometry::new(vec![Inclusion::new(Point::ORIGIN, 1.0, 0.0).unwrap()], 0.01)
            .unwrap();
        let r = collocation_solve(&c, &medium(), Point::new(2.0, 0.5), 32).unwrap();
        let g = Monopole::new(&medium())
            .value(Point::ORIGIN, Point::new(2.0, 0.5))
            .unwrap();
        assert!(r.strengths[0].norm() < 1e-3 * g.norm(), "{:?}", r.strengths);
    }

    #[test]
    fn symmetric_pair_has_equal_strengths() {
        let c = ClusterGeometry::new(
            vec![
                Inclusion::new(Point::new(0.0, 0.3), 1.0, 0.2).unwrap(),
                Inclusion::new(Point::new(0.0, -0.3), 1.0, 0.2).unwrap(),
            ],
            0.01,
        )
        .unwrap();
        let r = collocation_solve(&c, &medium(), Point::new(2.0, 0.0), 32).unwrap();
        assert!((r.betas[0] - r.betas[1]).norm() < 1e-10 * r.betas[0].norm());
    }

    #[test]
    fn single_inclusion_satisfies_balance() {
        // For one inclusion the monopole fit is exact up to the incident
        // field's variation across the boundary.
        let c = ClusterGeometry::new(vec![Inclusion::new(Point::ORIGIN, 1.0, 0.3).unwrap()], 0.01)
            .unwrap();
        let r = collocation_solve(&c, &medium(), Point::new(3.0, 0.7), 64).unwrap();
        assert!(r.residual < 1e-2, "{}", r.residual);
        assert!(r.condition < 1e6);
    }

    #[test]
    fn rejects_large_clusters_and_near_sources() {
        let incs: Vec<_> = (0..9)
            .map(|i| Inclusion::new(Point::new(i as f64, 0.0), 1.0, 0.1).unwrap())
            .collect();
        let c = ClusterGeometry::new(incs, 0.01).unwrap();
        assert!(collocation_solve(&c, &medium(), Point::new(0.0, 5.0), 16).is_err());
        let c1 = ClusterGeometry::new(vec![Inclusion::new(Point::ORIGIN, 1.0, 0.1).unwrap()], 0.01)
            .unwrap();
        assert!(matches!(
            collocation_solve(&c1, &medium(), Point::new(0.015, 0.0), 16),
            Err(Error::Domain(_))
        ));
    }
}
