//! Green's kernels: the outgoing free-space Helmholtz function, the Dirichlet
//! Helmholtz Green's function of a disk (regular part by Graf's addition
//! theorem) and the Dirichlet Laplace Green's function of a disk.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::specfun::{self, bessel_j_seq, bessel_y, hankel1, j_ratios, y_ratios};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default Graf truncation.
pub const DEFAULT_MODES: usize = 64;
/// Upper bound for doubling-until-stable truncation.
pub const MAX_MODES: usize = 512;
/// Relative change below which doubling stops.
pub const MODE_TOLERANCE: f64 = 1e-10;
/// `|J_n(sqrt(lambda) R)|` below this is a resonance of the disk.
pub const RESONANCE_GUARD: f64 = 1e-13;

/// Homogeneous isotropic membrane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    mu: f64,
    rho: f64,
    omega: f64,
}

impl MediumParams {
    pub fn new(mu: f64, rho: f64, omega: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shear modulus must be > 0, got {mu}"
            )));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass density must be > 0, got {rho}"
            )));
        }
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "frequency must be >= 0, got {omega}"
            )));
        }
        Ok(Self { mu, rho, omega })
    }

    /// Medium with `mu = rho = 1` and wavenumber `k0`.
    pub fn unit(k0: f64) -> Result<Self> {
        Self::new(1.0, 1.0, k0)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `rho omega^2 / mu`.
    pub fn lambda(&self) -> f64 {
        self.rho * self.omega * self.omega / self.mu
    }

    /// `sqrt(rho omega^2 / mu)`.
    pub fn k0(&self) -> f64 {
        self.lambda().sqrt()
    }
}

/// The disk `|x| < radius` centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskDomain {
    radius: f64,
}

impl DiskDomain {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "disk radius must be > 0, got {radius}"
            )));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Closed disk membership with a relative tolerance on the boundary.
    pub fn contains(&self, p: Point) -> bool {
        p.norm() <= self.radius * (1.0 + 1e-12)
    }

    pub fn contains_strictly(&self, p: Point) -> bool {
        p.norm() < self.radius
    }

    fn check_closed(&self, p: Point, what: &str) -> Result<()> {
        if !p.is_finite() || !self.contains(p) {
            return Err(Error::Domain(format!(
                "{what} {p} lies outside the disk of radius {}",
                self.radius
            )));
        }
        Ok(())
    }

    fn check_open(&self, p: Point, what: &str) -> Result<()> {
        if !p.is_finite() || !self.contains_strictly(p) {
            return Err(Error::Domain(format!(
                "{what} {p} must lie strictly inside the disk of radius {}",
                self.radius
            )));
        }
        Ok(())
    }
}

/// `G(|x - y|) = (i / 4 mu) H^(1)_0(k0 |x - y|)`.
pub fn helmholtz_free(x: Point, y: Point, medium: &MediumParams) -> Result<Complex64> {
    helmholtz_free_radial(x.dist(y), medium)
}

/// Free-space kernel as a function of distance.
pub fn helmholtz_free_radial(r: f64, medium: &MediumParams) -> Result<Complex64> {
    if medium.omega() <= 0.0 {
        return Err(Error::InvalidParameter(
            "dynamic Green's function needs omega > 0".into(),
        ));
    }
    if r == 0.0 {
        return Err(Error::Singularity(
            "free-space Green's function at x = y".into(),
        ));
    }
    let h = hankel1(0, medium.k0() * r)?;
    Ok(Complex64::new(0.0, 0.25 / medium.mu()) * h)
}

/// `dG/dr = -(i k0 / 4 mu) H^(1)_1(k0 r)`.
pub fn helmholtz_free_radial_derivative(r: f64, medium: &MediumParams) -> Result<Complex64> {
    if medium.omega() <= 0.0 {
        return Err(Error::InvalidParameter(
            "dynamic Green's function needs omega > 0".into(),
        ));
    }
    if r == 0.0 {
        return Err(Error::Singularity(
            "free-space Green's function at x = y".into(),
        ));
    }
    let k = medium.k0();
    let h1 = hankel1(1, k * r)?;
    Ok(Complex64::new(0.0, -0.25 * k / medium.mu()) * h1)
}

/// Gradient in `x` of `G(|x - y|)`.
pub fn helmholtz_free_gradient(
    x: Point,
    y: Point,
    medium: &MediumParams,
) -> Result<[Complex64; 2]> {
    let d = x - y;
    let r = d.norm();
    let g = helmholtz_free_radial_derivative(r, medium)?;
    Ok([g * (d.x / r), g * (d.y / r)])
}

/// Per-`lambda` data for the Graf expansion of the disk regular part
///
/// `R(x, y) = -1/4 sum_n (Y_n(kR) / J_n(kR)) J_n(k|x|) J_n(k|y|) cos(n (theta_x - theta_y))`.
///
/// Each term is factored as `P_n q_n(|x|) q_n(|y|)` with `P_n = Y_n(kR) J_n(kR)`
/// and `q_n(r) = J_n(kr) / J_n(kR)`. Beyond the oscillatory range `n > kR`
/// all three are carried as ratio products, which neither overflow nor
/// underflow prematurely.
#[derive(Debug, Clone)]
pub struct GrafTable {
    k: f64,
    kr: f64,
    n_modes: usize,
    /// Last order evaluated from direct values.
    direct: usize,
    jb: Vec<f64>,
    products: Vec<f64>,
    jb_ratios: Vec<f64>,
}

impl GrafTable {
    pub fn new(lambda: f64, domain: &DiskDomain, n_modes: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be > 0, got {lambda}"
            )));
        }
        if n_modes == 0 || n_modes > specfun::MAX_ORDER as usize - 1 {
            return Err(Error::InvalidParameter(format!(
                "n_modes must be in 1..{}",
                specfun::MAX_ORDER
            )));
        }
        let k = lambda.sqrt();
        let kr = k * domain.radius();
        let direct = (kr.ceil() as usize + 1).min(n_modes);
        let (jb, yb) = specfun::bessel_jy_seq(direct, kr)?;
        // Zeros of J_n lie above n, so only n < kR can resonate.
        for (n, &j) in jb.iter().enumerate() {
            if (n as f64) < kr && j.abs() < RESONANCE_GUARD {
                return Err(Error::NearResonance {
                    order: n as i32,
                    value: j,
                });
            }
        }
        let mut products: Vec<f64> = jb.iter().zip(&yb).map(|(j, y)| j * y).collect();
        let mut jb_ratios = Vec::new();
        if n_modes > direct {
            jb_ratios = j_ratios(kr, direct + 1, n_modes);
            let yr = y_ratios(kr, direct + 1, n_modes)?;
            let mut p = products[direct];
            for (rj, ry) in jb_ratios.iter().zip(&yr) {
                p *= rj * ry;
                products.push(p);
            }
        }
        Ok(Self {
            k,
            kr,
            n_modes,
            direct,
            jb,
            products,
            jb_ratios,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    /// `q_n(r) = J_n(k r) / J_n(k R)` for `n = 0..=n_modes`.
    pub fn radial_factors(&self, r: f64) -> Vec<f64> {
        let a = self.k * r;
        let mut q = Vec::with_capacity(self.n_modes + 1);
        let ja = bessel_j_seq(self.direct, a).expect("radius validated by caller");
        q.extend(ja.iter().zip(&self.jb).map(|(x, b)| x / b));
        if self.n_modes > self.direct {
            let ra = j_ratios(a, self.direct + 1, self.n_modes);
            let mut cur = q[self.direct];
            for (x, b) in ra.iter().zip(&self.jb_ratios) {
                cur *= x / b;
                q.push(cur);
            }
        }
        q
    }

    /// Term `n` of the cosine series without the angular factor.
    #[inline]
    pub fn coefficient(&self, n: usize, qx: &[f64], qy: &[f64]) -> f64 {
        // Y_n/J_n * J_n(a) J_n(b) = P_n q_n(a) q_n(b)
        self.products[n] * qx[n] * qy[n]
    }

    /// Regular part from precomputed radial factors, truncated at `modes`.
    pub fn regular_part(&self, qx: &[f64], qy: &[f64], dtheta: f64, modes: usize) -> f64 {
        let modes = modes.min(self.n_modes);
        let mut sum = self.coefficient(0, qx, qy);
        for n in 1..=modes {
            let c = self.coefficient(n, qx, qy);
            if c == 0.0 {
                continue;
            }
            sum += 2.0 * c * (n as f64 * dtheta).cos();
        }
        -0.25 * sum
    }

    /// Closed form at `y = 0`: `-Y_0(kR) J_0(k|x|) / (4 J_0(kR))`.
    pub fn regular_part_at_center(&self, x_radius: f64) -> Result<f64> {
        let j0x = specfun::bessel_j(0, self.k * x_radius)?;
        let y0 = bessel_y(0, self.kr)?;
        Ok(-y0 * j0x / (4.0 * self.jb[0]))
    }
}

/// Regular part `R_Omega(x, y, lambda)` of the disk Helmholtz Green's function,
/// Graf series truncated at `|n| <= n_modes`. Uses the closed form when `y = 0`.
pub fn disk_helmholtz_regular(
    x: Point,
    y: Point,
    lambda: f64,
    domain: &DiskDomain,
    n_modes: usize,
) -> Result<f64> {
    domain.check_closed(x, "field point")?;
    domain.check_open(y, "source point")?;
    let table = GrafTable::new(lambda, domain, n_modes)?;
    if y == Point::ORIGIN {
        return table.regular_part_at_center(x.norm());
    }
    let qx = table.radial_factors(x.norm());
    let qy = table.radial_factors(y.norm());
    Ok(table.regular_part(&qx, &qy, x.angle() - y.angle(), n_modes))
}

/// As [`disk_helmholtz_regular`] with the truncation doubled from
/// [`DEFAULT_MODES`] until the relative change is below [`MODE_TOLERANCE`].
pub fn disk_helmholtz_regular_auto(
    x: Point,
    y: Point,
    lambda: f64,
    domain: &DiskDomain,
) -> Result<f64> {
    domain.check_closed(x, "field point")?;
    domain.check_open(y, "source point")?;
    let table = GrafTable::new(lambda, domain, MAX_MODES)?;
    if y == Point::ORIGIN {
        return table.regular_part_at_center(x.norm());
    }
    let qx = table.radial_factors(x.norm());
    let qy = table.radial_factors(y.norm());
    let dtheta = x.angle() - y.angle();
    let mut modes = DEFAULT_MODES;
    let mut prev = table.regular_part(&qx, &qy, dtheta, modes);
    while modes < MAX_MODES {
        modes *= 2;
        let next = table.regular_part(&qx, &qy, dtheta, modes);
        if (next - prev).abs() <= MODE_TOLERANCE * next.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NotConverged(format!(
        "Graf series for R_Omega at x={x}, y={y} not stable within {MAX_MODES} modes"
    )))
}

/// `G_Omega(x, y, lambda) = -Y_0(sqrt(lambda)|x - y|)/4 - R_Omega(x, y, lambda)`:
/// Dirichlet Green's function of `Delta + lambda` in the disk.
pub fn disk_helmholtz_green(
    x: Point,
    y: Point,
    lambda: f64,
    domain: &DiskDomain,
    n_modes: usize,
) -> Result<f64> {
    if x == y {
        return Err(Error::Singularity(
            "disk Helmholtz Green's function at x = y".into(),
        ));
    }
    let reg = disk_helmholtz_regular(x, y, lambda, domain, n_modes)?;
    Ok(-0.25 * bessel_y(0, lambda.sqrt() * x.dist(y))? - reg)
}

/// Dirichlet Laplace Green's function of the disk (`Delta G + delta = 0`):
/// `G = (1/2pi) log(|x - y*| |y| / (R |x - y|))` with `y* = R^2 y / |y|^2`.
pub fn disk_laplace_green(x: Point, y: Point, domain: &DiskDomain) -> Result<f64> {
    domain.check_closed(x, "field point")?;
    domain.check_closed(y, "source point")?;
    let d = x.dist(y);
    if d == 0.0 {
        return Err(Error::Singularity(
            "disk Laplace Green's function at x = y".into(),
        ));
    }
    let r = domain.radius();
    if x.norm() >= r || y.norm() >= r {
        return Ok(0.0);
    }
    Ok(image_log(x, y, r) - (d.ln()) / (2.0 * PI))
}

/// `(1/2pi) log(|x - y*| |y| / R)`, the harmonic image term. For `y = 0` this
/// is the limit `(1/2pi) log R`.
fn image_log(x: Point, y: Point, r: f64) -> f64 {
    let ny2 = y.norm_sq();
    if ny2 == 0.0 {
        return r.ln() / (2.0 * PI);
    }
    // |x - y*| |y| = | x|y| - R^2 y/|y| |
    let ny = ny2.sqrt();
    let v = x * ny - y * (r * r / ny);
    (v.norm() / r).ln() / (2.0 * PI)
}

/// Regular part `H(x, y) = (1/2pi) log(1/|x - y|) - G(x, y)`, with the diagonal
/// limit `H(y, y) = (1/2pi) log(R / (R^2 - |y|^2))`.
pub fn disk_laplace_regular(x: Point, y: Point, domain: &DiskDomain) -> Result<f64> {
    domain.check_open(y, "source point")?;
    domain.check_closed(x, "field point")?;
    Ok(-image_log(x, y, domain.radius()))
}

/// Gradient in `x` of [`disk_laplace_green`].
pub fn disk_laplace_green_gradient(x: Point, y: Point, domain: &DiskDomain) -> Result<Point> {
    domain.check_open(y, "source point")?;
    let d = x - y;
    if d.norm_sq() == 0.0 {
        return Err(Error::Singularity(
            "gradient of the Laplace Green's function at x = y".into(),
        ));
    }
    let r = domain.radius();
    let mut g = d * (-1.0 / (2.0 * PI * d.norm_sq()));
    let ny2 = y.norm_sq();
    if ny2 > 0.0 {
        let star = y * (r * r / ny2);
        let e = x - star;
        g = g + e * (1.0 / (2.0 * PI * e.norm_sq()));
    }
    Ok(g)
}

/// Dirichlet eigenvalues `(j_{n,k} / R)^2 < lambda_max` of the disk, sorted.
/// These are the poles of the Graf series in `lambda`.
pub fn disk_resonances(domain: &DiskDomain, lambda_max: f64) -> Result<Vec<f64>> {
    if !(lambda_max > 0.0) {
        return Ok(Vec::new());
    }
    let zmax = lambda_max.sqrt() * domain.radius();
    let mut out = Vec::new();
    let mut n = 0;
    while (n as f64) < zmax {
        let zeros = specfun::bessel_j_zeros(n, zmax)?;
        if zeros.is_empty() {
            break;
        }
        out.extend(zeros.into_iter().map(|z| (z / domain.radius()).powi(2)));
        n += 1;
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
