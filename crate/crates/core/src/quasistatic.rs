//! Low-frequency approximation for massless inclusions in a clamped disk.
//!
//! Inclusion 1 is driven with unit displacement, the others move rigidly with
//! zero net flux. With `rho omega^2 = f lambda` and `mu = 1` the field is
//! approximated by `u = P + f (V - V(O_1) P)`, where `P = B_1 G(x, O_1)` is the
//! leading capacitary potential and `V` solves `Lap V + lambda B_1 G(x, O_1) = 0`,
//! `V = 0` on the outer boundary.

use crate::cluster::ClusterGeometry;
use crate::error::{Error, Result};
use crate::geometry::{circle_samples, Point};
use crate::greens::{
    disk_laplace_green, disk_laplace_green_gradient, disk_laplace_regular, disk_resonances,
    DiskDomain,
};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Harmonic function in a disk, `Re sum_n c_n (z / R)^n`.
#[derive(Debug, Clone)]
struct DiskHarmonic {
    radius: f64,
    coeffs: Vec<Complex64>,
}

impl DiskHarmonic {
    /// Harmonic extension of boundary data sampled at `M` equispaced angles
    /// starting at 0 (trapezoid Fourier coefficients).
    fn from_boundary(radius: f64, samples: &[f64]) -> Self {
        let m = samples.len();
        let nmax = m / 2 - 1;
        let mut coeffs = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            let mut c = Complex64::new(0.0, 0.0);
            for (j, &g) in samples.iter().enumerate() {
                let t = 2.0 * PI * ((n * j) % m) as f64 / m as f64;
                c += Complex64::from_polar(g, -t);
            }
            coeffs.push(
                c * if n == 0 {
                    1.0 / m as f64
                } else {
                    2.0 / m as f64
                },
            );
        }
        Self { radius, coeffs }
    }

    /// Value and gradient.
    fn eval(&self, x: Point) -> (f64, Point) {
        let z = Complex64::new(x.x, x.y) / self.radius;
        let mut val = Complex64::new(0.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        let mut zn = Complex64::new(1.0, 0.0);
        let mut zn1 = Complex64::new(0.0, 0.0);
        for (n, c) in self.coeffs.iter().enumerate() {
            val += c * zn;
            der += c * zn1 * n as f64;
            zn1 = zn;
            zn *= z;
        }
        der /= self.radius;
        (val.re, Point::new(der.re, -der.im))
    }
}

/// Particular solution `W` of `Lap W = G(x, s)` for the disk Laplace Green's function.
#[derive(Debug, Clone)]
struct Particular {
    radius: f64,
    source: Point,
    /// `(conj(s) / R^2)^n / (n (n + 1))`, `n >= 1`.
    image: Vec<Complex64>,
}

impl Particular {
    fn new(radius: f64, source: Point) -> Self {
        let t = Complex64::new(source.x, -source.y) / (radius * radius);
        let q = source.norm() / radius;
        let mut image = Vec::new();
        let mut p = Complex64::new(1.0, 0.0);
        for n in 1..100_000usize {
            p *= t;
            let nf = n as f64;
            if q.powi(n as i32) / (nf * (nf + 1.0)) < 1e-18 || p.norm() == 0.0 {
                break;
            }
            image.push(p / (nf * (nf + 1.0)));
        }
        Self {
            radius,
            source,
            image,
        }
    }

    fn eval(&self, x: Point) -> (f64, Point) {
        // -(1/8pi) rho^2 (log rho - 1) has Laplacian -(1/2pi) log rho.
        let d = x - self.source;
        let rho = d.norm();
        let (w1, g1) = if rho == 0.0 {
            (0.0, Point::ORIGIN)
        } else {
            let l = rho.ln();
            (
                -(rho * rho) * (l - 1.0) / (8.0 * PI),
                d * (-(2.0 * l - 1.0) / (8.0 * PI)),
            )
        };
        // (1/2pi) log(R |1 - z conj(s) / R^2|) is the harmonic image part of G;
        // r^2 z^n / (4 (n + 1)) inverts the Laplacian on z^n.
        let z = Complex64::new(x.x, x.y);
        let mut f = Complex64::new(0.0, 0.0);
        let mut fp = Complex64::new(0.0, 0.0);
        let mut zn = Complex64::new(1.0, 0.0);
        let mut zn1 = Complex64::new(0.0, 0.0);
        for (i, a) in self.image.iter().enumerate() {
            let n = (i + 1) as f64;
            zn1 = if i == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                zn1 * z
            };
            zn *= z;
            f += a * zn;
            fp += a * zn1 * n;
        }
        let r2 = x.norm_sq();
        let lr = self.radius.ln();
        let w2 = (lr * r2 / 4.0 - r2 * f.re / 4.0) / (2.0 * PI);
        let grad_re_f = Point::new(fp.re, -fp.im);
        let g2 = (x * (lr / 2.0) - x * (f.re / 2.0) - grad_re_f * (r2 / 4.0)) * (1.0 / (2.0 * PI));
        (w1 + w2, g1 + g2)
    }
}

/// Massless cluster in a disk, inclusion 1 driven at unit displacement.
#[derive(Debug, Clone)]
pub struct QuasiStaticProblem {
    domain: DiskDomain,
    cluster: ClusterGeometry,
    f: f64,
    lambda: f64,
    b1: f64,
    particular: Particular,
    harmonic: DiskHarmonic,
    v_at_o1: f64,
}

impl QuasiStaticProblem {
    pub fn new(domain: DiskDomain, cluster: ClusterGeometry, f: f64, lambda: f64) -> Result<Self> {
        if cluster.is_empty() {
            return Err(Error::Geometry(
                "the quasi-static problem needs at least the driven inclusion".into(),
            ));
        }
        if !(f >= 0.0 && f.is_finite()) || !(lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need f >= 0 and finite lambda, got f={f}, lambda={lambda}"
            )));
        }
        let r = domain.radius();
        for (j, inc) in cluster.inclusions().iter().enumerate() {
            let clearance = r - inc.center.norm() - cluster.physical_radius(j);
            if clearance <= 0.0 {
                return Err(Error::Geometry(format!(
                    "inclusion {} does not fit inside the disk",
                    j + 1
                )));
            }
        }
        let k2 = f * lambda;
        if k2 > 0.0 {
            let poles = disk_resonances(&domain, 2.0 * k2)?;
            if let Some(p) = poles.iter().find(|p| (**p - k2).abs() <= 1e-6 * p.abs()) {
                return Err(Error::Resonance(format!(
                    "f lambda = {k2} coincides with the disk eigenvalue {p}"
                )));
            }
        }
        let o1 = cluster.inclusions()[0].center;
        let denom =
            (cluster.physical_radius(0)).ln() / (2.0 * PI) + disk_laplace_regular(o1, o1, &domain)?;
        if denom.abs() < 1e-12 {
            return Err(Error::CapacityResonance(format!(
                "log capacity term vanishes for inclusion 1 (denominator {denom:e})"
            )));
        }
        let b1 = -1.0 / denom;
        let particular = Particular::new(r, o1);
        // Enough boundary samples for the geometric decay (|O_1| / R)^n.
        let q = o1.norm() / r;
        let mut m = 256usize;
        while m < 16384 && q.powi((m / 2) as i32) > 1e-17 {
            m *= 2;
        }
        let samples: Vec<f64> = (0..m)
            .map(|j| {
                particular
                    .eval(Point::polar(r, 2.0 * PI * j as f64 / m as f64))
                    .0
            })
            .collect();
        let harmonic = DiskHarmonic::from_boundary(r, &samples);
        let mut p = Self {
            domain,
            cluster,
            f,
            lambda,
            b1,
            particular,
            harmonic,
            v_at_o1: 0.0,
        };
        p.v_at_o1 = p.v_and_grad(o1).0;
        Ok(p)
    }

    pub fn domain(&self) -> &DiskDomain {
        &self.domain
    }

    pub fn cluster(&self) -> &ClusterGeometry {
        &self.cluster
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `B_1 = -((1/2pi) log(epsilon r_1) + H(O_1, O_1))^{-1}`.
    pub fn capacity_coefficient(&self) -> f64 {
        self.b1
    }

    fn o1(&self) -> Point {
        self.cluster.inclusions()[0].center
    }

    fn check_point(&self, x: Point, allow_inclusions: bool) -> Result<()> {
        if !x.is_finite() || !self.domain.contains(x) {
            return Err(Error::Domain(format!("point {x} lies outside the disk")));
        }
        if !allow_inclusions {
            for (j, inc) in self.cluster.inclusions().iter().enumerate() {
                if x.dist(inc.center) < self.cluster.physical_radius(j) * (1.0 - 1e-12) {
                    return Err(Error::Domain(format!(
                        "point {x} lies inside inclusion {}",
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Leading-order capacitary potential `B_1 G(x, O_1)`.
    pub fn capacitary_potential(&self, x: Point) -> Result<f64> {
        self.check_point(x, false)?;
        if x.norm() >= self.domain.radius() {
            return Ok(0.0);
        }
        Ok(self.b1 * disk_laplace_green(x, self.o1(), &self.domain)?)
    }

    fn capacitary_gradient(&self, x: Point) -> Result<Point> {
        Ok(disk_laplace_green_gradient(x, self.o1(), &self.domain)? * self.b1)
    }

    fn v_and_grad(&self, x: Point) -> (f64, Point) {
        let c = self.lambda * self.b1;
        let (w, gw) = self.particular.eval(x);
        let (h, gh) = self.harmonic.eval(x);
        (-c * (w - h), (gw - gh) * (-c))
    }

    /// Auxiliary field `V(x) = lambda B_1 int G(z, x) G(z, O_1) dz`, in closed form.
    pub fn auxiliary_v(&self, x: Point) -> Result<f64> {
        self.check_point(x, true)?;
        Ok(self.v_and_grad(x).0)
    }

    pub fn auxiliary_v_gradient(&self, x: Point) -> Result<Point> {
        self.check_point(x, true)?;
        Ok(self.v_and_grad(x).1)
    }

    /// Rigid displacements `A_j = P(O_j) + f (V(O_j) - V(O_1) P(O_j))` for `j >= 2`.
    pub fn rigid_displacements(&self) -> Result<Vec<f64>> {
        self.cluster.inclusions()[1..]
            .iter()
            .map(|inc| {
                let p = self.b1 * disk_laplace_green(inc.center, self.o1(), &self.domain)?;
                Ok(p + self.f * (self.v_and_grad(inc.center).0 - self.v_at_o1 * p))
            })
            .collect()
    }

    /// Two-term approximation `P + f (V - V(O_1) P)`.
    pub fn approximate_field(&self, x: Point) -> Result<f64> {
        let p = self.capacitary_potential(x)?;
        Ok(p + self.f * (self.v_and_grad(x).0 - self.v_at_o1 * p))
    }

    pub fn approximate_field_gradient(&self, x: Point) -> Result<Point> {
        self.check_point(x, false)?;
        let gp = self.capacitary_gradient(x)?;
        let gv = self.v_and_grad(x).1;
        Ok(gp + (gv - gp * self.v_at_o1) * self.f)
    }

    /// `max |u - 1|` over `n_points` samples of the driven inclusion boundary.
    pub fn boundary_misfit(&self, n_points: usize) -> Result<f64> {
        let a = self.cluster.physical_radius(0);
        let mut worst: f64 = 0.0;
        for (p, _) in circle_samples(self.o1(), a, n_points) {
            worst = worst.max((self.approximate_field(p)? - 1.0).abs());
        }
        Ok(worst)
    }

    /// Trapezoid flux `int du/dn ds` over the boundary of inclusion `j` (0-based),
    /// normal pointing out of the inclusion.
    pub fn flux(&self, j: usize, n_points: usize) -> Result<f64> {
        let inc = self.cluster.inclusions()[j];
        let a = self.cluster.physical_radius(j);
        let mut s = 0.0;
        for (p, n) in circle_samples(inc.center, a, n_points) {
            s += self.approximate_field_gradient(p)?.dot(n);
        }
        Ok(s * 2.0 * PI * a / n_points as f64)
    }
}
