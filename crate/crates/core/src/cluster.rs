//! Cluster geometry and single-inclusion scattering strengths.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::greens::MediumParams;
use crate::specfun::hankel1;
use num_complex::Complex64;
use std::f64::consts::PI;

/// A small circular inclusion of radius `epsilon * radius_factor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inclusion {
    pub center: Point,
    pub radius_factor: f64,
    pub mass: f64,
}

impl Inclusion {
    pub fn new(center: Point, radius_factor: f64, mass: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::Geometry(format!(
                "inclusion center {center} is not finite"
            )));
        }
        if !(radius_factor > 0.0 && radius_factor.is_finite()) {
            return Err(Error::Geometry(format!(
                "radius factor must be > 0, got {radius_factor}"
            )));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::Geometry(format!(
                "inclusion mass must be >= 0, got {mass}"
            )));
        }
        Ok(Self {
            center,
            radius_factor,
            mass,
        })
    }
}

/// Ordered collection of pairwise disjoint inclusions.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterGeometry {
    inclusions: Vec<Inclusion>,
    epsilon: f64,
    min_separation: f64,
    sparsity_constant: f64,
}

impl ClusterGeometry {
    pub fn new(inclusions: Vec<Inclusion>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Geometry(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        let mut d = f64::INFINITY;
        for (j, a) in inclusions.iter().enumerate() {
            for (k, b) in inclusions.iter().enumerate().skip(j + 1) {
                let s = a.center.dist(b.center);
                if s <= epsilon * (a.radius_factor + b.radius_factor) {
                    return Err(Error::Geometry(format!(
                        "inclusions {} and {} overlap: centre distance {s} <= {}",
                        j + 1,
                        k + 1,
                        epsilon * (a.radius_factor + b.radius_factor)
                    )));
                }
                d = d.min(s);
            }
        }
        Ok(Self {
            inclusions,
            epsilon,
            min_separation: d,
            sparsity_constant: 1.0,
        })
    }

    /// Replace the constant `C` of the sparsity test `epsilon < C d^{3/2}`.
    pub fn with_sparsity_constant(mut self, c: f64) -> Self {
        self.sparsity_constant = c;
        self
    }

    pub fn inclusions(&self) -> &[Inclusion] {
        &self.inclusions
    }

    pub fn len(&self) -> usize {
        self.inclusions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inclusions.is_empty()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Minimum centre-to-centre (chord) distance; infinite for fewer than two inclusions.
    pub fn min_separation(&self) -> f64 {
        self.min_separation
    }

    pub fn total_mass(&self) -> f64 {
        self.inclusions.iter().map(|i| i.mass).sum()
    }

    pub fn physical_radius(&self, j: usize) -> f64 {
        self.epsilon * self.inclusions[j].radius_factor
    }

    pub fn centers(&self) -> Vec<Point> {
        self.inclusions.iter().map(|i| i.center).collect()
    }

    pub fn is_sparse(&self) -> bool {
        self.epsilon < self.sparsity_constant * self.min_separation.powf(1.5)
    }

    /// True when all radii and masses coincide.
    pub fn is_identical(&self) -> bool {
        match self.inclusions.first() {
            None => true,
            Some(first) => self
                .inclusions
                .iter()
                .all(|i| i.radius_factor == first.radius_factor && i.mass == first.mass),
        }
    }

    /// Index of the inclusion containing `x` (closed), if any.
    pub fn containing(&self, x: Point) -> Option<usize> {
        (0..self.len()).find(|&j| x.dist(self.inclusions[j].center) <= self.physical_radius(j))
    }

    /// Smallest distance from `x` to any inclusion centre.
    pub fn distance_to_centers(&self, x: Point) -> f64 {
        self.inclusions
            .iter()
            .map(|i| x.dist(i.center))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `n` identical inclusions (`r = 1`, `m = mass_total / n`) equally spaced on a
/// circle, the first at angle 0.
pub fn uniform_circle_cluster(
    n: usize,
    epsilon: f64,
    mass_total: f64,
    circle_center: Point,
    circle_radius: f64,
) -> Result<ClusterGeometry> {
    if n == 0 {
        return Err(Error::Geometry(
            "a circle cluster needs at least one inclusion".into(),
        ));
    }
    if !(circle_radius > 0.0 && circle_radius.is_finite()) {
        return Err(Error::Geometry(format!(
            "circle radius must be > 0, got {circle_radius}"
        )));
    }
    let mass = mass_total / n as f64;
    let inclusions = (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            Inclusion::new(circle_center + Point::polar(circle_radius, t), 1.0, mass)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut c = ClusterGeometry::new(inclusions, epsilon)?;
    if n > 1 {
        // Exact chord length; the computed minimum differs in the last bits.
        c.min_separation = 2.0 * circle_radius * (PI / n as f64).sin();
    }
    Ok(c)
}

/// `alpha = -4 i mu / H_0^(1)(k0 epsilon r)`, normalizing the model field
/// `alpha G(|x - O|)` to 1 on the inclusion boundary.
pub fn alpha_eps(medium: &MediumParams, epsilon: f64, radius_factor: f64) -> Result<Complex64> {
    if medium.omega() <= 0.0 {
        return Err(Error::InvalidParameter(
            "alpha_eps is undefined at omega = 0; use the quasi-static model".into(),
        ));
    }
    let arg = medium.k0() * epsilon * radius_factor;
    if !(arg > 0.0 && arg.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "k0 epsilon r must be > 0, got {arg}"
        )));
    }
    Ok(Complex64::new(0.0, -4.0 * medium.mu()) / hankel1(0, arg)?)
}
