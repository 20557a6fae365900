//! First eigenvalue of a clamped disk containing a cluster of small inertial
//! inclusions, from the determinant equation `det(I - D + S) = 0` with
//!
//! - `beta_j(lambda) = -(Y_0(sqrt(lambda) a_j) / 4 + R(O_j, O_j, lambda))^{-1}`,
//! - `D = diag(beta_j / (gamma_j lambda))` (zero for clamped inclusions),
//! - `S_kj = beta_j G(O_k, O_j, lambda)` for `k != j`.
//!
//! The literal determinant changes sign wherever some `beta_j` has a pole. The
//! root search therefore works with the symmetric matrix
//! `M_kj = delta_kj (1/beta_k - 1/(gamma_k lambda)) + (1 - delta_kj) G(O_k, O_j)`,
//! for which `I - D + S = M diag(beta)`, and skips the poles of the disk
//! Green's function (the Dirichlet eigenvalues of the empty disk).

use crate::cluster::ClusterGeometry;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::Point;
use crate::greens::{disk_resonances, DiskDomain, GrafTable, DEFAULT_MODES};
use crate::linalg::{signed_log_determinant, solve_dense, RealMatrix};
use crate::specfun::bessel_y;

/// Root search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchWindow {
    pub lo: f64,
    pub hi: f64,
    pub scan_steps: usize,
    /// Final bracket width.
    pub tolerance: f64,
}

impl SearchWindow {
    /// `(0.12, 0.6]`, just above the first eigenvalue of the empty `R = 7` disk.
    pub fn clamped_default() -> Self {
        Self {
            lo: 0.12,
            hi: 0.6,
            scan_steps: 200,
            tolerance: 1e-8,
        }
    }

    /// `(1e-3, 0.6]`: with finite masses the first root can lie far below
    /// the empty-disk eigenvalue.
    pub fn inertial_default() -> Self {
        Self {
            lo: 1e-3,
            hi: 0.6,
            scan_steps: 400,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenConfig {
    pub domain: DiskDomain,
    pub cluster: ClusterGeometry,
    /// `gamma_j = m_j / rho`; ignored in the clamped limit.
    pub gammas: Vec<f64>,
    pub dirichlet_limit: bool,
    pub n_modes: usize,
    pub search: SearchWindow,
}

impl EigenConfig {
    /// Clamped (infinite mass) inclusions.
    pub fn dirichlet(domain: DiskDomain, cluster: ClusterGeometry) -> Result<Self> {
        let n = cluster.len();
        let c = Self {
            domain,
            cluster,
            gammas: vec![f64::INFINITY; n],
            dirichlet_limit: true,
            n_modes: DEFAULT_MODES,
            search: SearchWindow::clamped_default(),
        };
        c.validate()?;
        Ok(c)
    }

    /// Inertial inclusions with `gamma_j = m_j / rho`.
    pub fn inertial(domain: DiskDomain, cluster: ClusterGeometry, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass density must be > 0, got {rho}"
            )));
        }
        let gammas = cluster.inclusions().iter().map(|i| i.mass / rho).collect();
        let c = Self {
            domain,
            cluster,
            gammas,
            dirichlet_limit: false,
            n_modes: DEFAULT_MODES,
            search: SearchWindow::inertial_default(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.cluster.len();
        if n == 0 {
            return Err(Error::Geometry(
                "eigenvalue problem needs at least one inclusion".into(),
            ));
        }
        if self.dirichlet_limit && n == 1 {
            return Err(Error::InvalidParameter(
                "a single clamped inclusion gives det = 1 identically; use N >= 2 or finite masses"
                    .into(),
            ));
        }
        if self.gammas.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} gammas for {n} inclusions",
                self.gammas.len()
            )));
        }
        if !self.dirichlet_limit && self.gammas.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter(
                "finite-mass mode needs every gamma_j > 0".into(),
            ));
        }
        let r = self.domain.radius();
        for (j, inc) in self.cluster.inclusions().iter().enumerate() {
            if inc.center.norm() + self.cluster.physical_radius(j) >= r {
                return Err(Error::Geometry(format!(
                    "inclusion {} touches or crosses the outer boundary",
                    j + 1
                )));
            }
        }
        let s = &self.search;
        if !(s.lo > 0.0 && s.hi > s.lo && s.hi.is_finite())
            || s.scan_steps < 2
            || !(s.tolerance > 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "search window must satisfy 0 < lo < hi with >= 2 steps, got ({}, {}] x {}",
                s.lo, s.hi, s.scan_steps
            )));
        }
        if self.n_modes == 0 {
            return Err(Error::InvalidParameter("n_modes must be >= 1".into()));
        }
        Ok(())
    }
}

/// Everything that depends on `lambda` alone.
struct Kernel {
    k: f64,
    table: GrafTable,
    /// Radial factors at the inclusion centres.
    q: Vec<Vec<f64>>,
    n_modes: usize,
}

impl Kernel {
    fn new(config: &EigenConfig, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be > 0, got {lambda}"
            )));
        }
        let table = GrafTable::new(lambda, &config.domain, config.n_modes)?;
        let q = config
            .cluster
            .inclusions()
            .iter()
            .map(|i| table.radial_factors(i.center.norm()))
            .collect();
        Ok(Self {
            k: lambda.sqrt(),
            table,
            q,
            n_modes: config.n_modes,
        })
    }

    fn green(&self, x: Point, qx: &[f64], y: Point, qy: &[f64]) -> Result<f64> {
        let reg = if y == Point::ORIGIN || x == Point::ORIGIN {
            let other = if y == Point::ORIGIN { x } else { y };
            self.table.regular_part_at_center(other.norm())?
        } else {
            self.table
                .regular_part(qx, qy, x.angle() - y.angle(), self.n_modes)
        };
        Ok(-0.25 * bessel_y(0, self.k * x.dist(y))? - reg)
    }

    /// `1 / beta_j = -(Y_0(k a_j)/4 + R(O_j, O_j))`.
    fn inverse_beta(&self, config: &EigenConfig, j: usize) -> Result<f64> {
        let o = config.cluster.inclusions()[j].center;
        let reg = if o == Point::ORIGIN {
            self.table.regular_part_at_center(0.0)?
        } else {
            self.table
                .regular_part(&self.q[j], &self.q[j], 0.0, self.n_modes)
        };
        let a = config.cluster.physical_radius(j);
        Ok(-(0.25 * bessel_y(0, self.k * a)? + reg))
    }

    fn green_matrix(&self, config: &EigenConfig) -> Result<RealMatrix> {
        let incs = config.cluster.inclusions();
        let n = incs.len();
        let mut g = RealMatrix::zeros(n);
        for k in 0..n {
            for j in k + 1..n {
                let v = self.green(incs[k].center, &self.q[k], incs[j].center, &self.q[j])?;
                g.set(k, j, v);
                g.set(j, k, v);
            }
        }
        Ok(g)
    }
}

/// `beta_eps` for inclusion `j` (0-based).
pub fn beta_eps_coefficient(config: &EigenConfig, j: usize, lambda: f64) -> Result<f64> {
    let kern = Kernel::new(config, lambda)?;
    beta_from_inverse(kern.inverse_beta(config, j)?, j, lambda)
}

fn beta_from_inverse(inv: f64, j: usize, lambda: f64) -> Result<f64> {
    if inv.abs() < 1e-12 {
        return Err(Error::CapacityResonance(format!(
            "beta for inclusion {} has a pole at lambda = {lambda}",
            j + 1
        )));
    }
    Ok(1.0 / inv)
}

fn inertial_term(config: &EigenConfig, j: usize, lambda: f64) -> f64 {
    if config.dirichlet_limit {
        0.0
    } else {
        1.0 / (config.gammas[j] * lambda)
    }
}

/// `(D, S)` at `lambda`.
pub fn assemble_eigen_matrices(
    config: &EigenConfig,
    lambda: f64,
) -> Result<(RealMatrix, RealMatrix)> {
    let kern = Kernel::new(config, lambda)?;
    let n = config.cluster.len();
    let betas = (0..n)
        .map(|j| beta_from_inverse(kern.inverse_beta(config, j)?, j, lambda))
        .collect::<Result<Vec<_>>>()?;
    let g = kern.green_matrix(config)?;
    let d = RealMatrix::from_fn(n, |i, j| {
        if i == j {
            betas[j] * inertial_term(config, j, lambda)
        } else {
            0.0
        }
    });
    let s = RealMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { betas[j] * g.get(i, j) });
    Ok((d, s))
}

fn literal_matrix(d: &RealMatrix, s: &RealMatrix) -> RealMatrix {
    RealMatrix::from_fn(
        d.dim(),
        |i, j| if i == j { 1.0 } else { 0.0 } - d.get(i, j) + s.get(i, j),
    )
}

/// `(sign, log|det|)` of `I - D + S`.
pub fn eigen_determinant(config: &EigenConfig, lambda: f64) -> Result<(f64, f64)> {
    let (d, s) = assemble_eigen_matrices(config, lambda)?;
    Ok(signed_log_determinant(&literal_matrix(&d, &s)))
}

/// The symmetric matrix `M` with `I - D + S = M diag(beta)`; finite at the poles of `beta`.
pub fn regularized_matrix(config: &EigenConfig, lambda: f64) -> Result<RealMatrix> {
    let kern = Kernel::new(config, lambda)?;
    let n = config.cluster.len();
    let mut m = kern.green_matrix(config)?;
    for j in 0..n {
        m.set(
            j,
            j,
            kern.inverse_beta(config, j)? - inertial_term(config, j, lambda),
        );
    }
    Ok(m)
}

/// `(sign, log|det|)` of [`regularized_matrix`].
pub fn regularized_determinant(config: &EigenConfig, lambda: f64) -> Result<(f64, f64)> {
    Ok(signed_log_determinant(&regularized_matrix(config, lambda)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub lambda0: f64,
    /// Intensities `C_j`, scaled to `max |C_j| = 1` with the first nonzero entry positive.
    pub intensities: Vec<f64>,
    pub betas: Vec<f64>,
    pub bracket: (f64, f64),
    /// `|det(I - D + S)|` at `lambda0`.
    pub det_residual: f64,
    /// `||(I - D + S) C||_inf / ||C||_inf`.
    pub null_residual: f64,
    /// Whether the literal determinant also changes sign across the bracket.
    pub literal_sign_change: bool,
    /// Empty-disk eigenvalues removed from the search window.
    pub excised_poles: Vec<f64>,
    /// `(lambda, sign of det M)` at every scan point, 0 where evaluation failed.
    pub scan: Vec<(f64, f64)>,
}

fn sign_at(config: &EigenConfig, lambda: f64) -> f64 {
    regularized_determinant(config, lambda)
        .map(|(s, _)| s)
        .unwrap_or(0.0)
}

/// Scan points of the search window, split at the empty-disk poles.
fn scan_grid(config: &EigenConfig, poles: &[f64]) -> Vec<Vec<f64>> {
    let s = config.search;
    let mut edges = vec![s.lo];
    edges.extend(poles.iter().copied().filter(|p| *p > s.lo && *p < s.hi));
    edges.push(s.hi);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let margin = 1e-6 * w[1].max(w[0]);
        let a = if poles.contains(&w[0]) {
            w[0] + margin
        } else {
            w[0]
        };
        let b = if poles.contains(&w[1]) {
            w[1] - margin
        } else {
            w[1]
        };
        if b <= a {
            continue;
        }
        let steps = ((s.scan_steps as f64 * (b - a) / (s.hi - s.lo)).ceil() as usize).max(8);
        out.push(
            (0..=steps)
                .map(|i| a + (b - a) * i as f64 / steps as f64)
                .collect(),
        );
    }
    out
}

/// Smallest root of the determinant equation in the search window.
pub fn find_first_eigenvalue(config: &EigenConfig, exec: Exec) -> Result<EigenResult> {
    config.validate()?;
    let poles = disk_resonances(&config.domain, config.search.hi * 1.01)?;
    let grids = scan_grid(config, &poles);
    let mut scan = Vec::new();
    let mut bracket = None;
    for grid in &grids {
        let signs = exec.map(grid.len(), |i| sign_at(config, grid[i]));
        let start = scan.len();
        scan.extend(grid.iter().copied().zip(signs.iter().copied()));
        if bracket.is_some() {
            continue;
        }
        let pts = &scan[start..];
        let mut prev: Option<(f64, f64)> = None;
        for &(l, s) in pts {
            if s == 0.0 {
                continue;
            }
            if let Some((pl, ps)) = prev {
                if ps != s {
                    bracket = Some((pl, l, ps));
                    break;
                }
            }
            prev = Some((l, s));
        }
    }
    let (mut lo, mut hi, s_lo) = bracket.ok_or_else(|| Error::NoRoot {
        lo: config.search.lo,
        hi: config.search.hi,
        scan: scan.clone(),
    })?;
    while hi - lo > config.search.tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = regularized_determinant(config, mid)?.0;
        if s == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda0 = 0.5 * (lo + hi);
    let literal_sign_change = match (eigen_determinant(config, lo), eigen_determinant(config, hi)) {
        (Ok((a, _)), Ok((b, _))) => a != b || a == 0.0,
        _ => false,
    };
    let (d, s) = assemble_eigen_matrices(config, lambda0)?;
    let a = literal_matrix(&d, &s);
    let (_, log_det) = signed_log_determinant(&a);
    let m = regularized_matrix(config, lambda0)?;
    let q = inverse_iteration(&m)?;
    let kern = Kernel::new(config, lambda0)?;
    let n = config.cluster.len();
    let betas = (0..n)
        .map(|j| beta_from_inverse(kern.inverse_beta(config, j)?, j, lambda0))
        .collect::<Result<Vec<_>>>()?;
    let mut c: Vec<f64> = q.iter().zip(&betas).map(|(qj, bj)| qj / bj).collect();
    normalize_intensities(&mut c);
    let ac = a.mul_vec(&c);
    let null_residual = ac.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        / c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(EigenResult {
        lambda0,
        intensities: c,
        betas,
        bracket: (lo, hi),
        det_residual: log_det.exp(),
        null_residual,
        literal_sign_change,
        excised_poles: poles
            .into_iter()
            .filter(|p| *p > config.search.lo && *p < config.search.hi)
            .collect(),
        scan,
    })
}

/// Direction of the smallest singular value of a nearly singular matrix.
fn inverse_iteration(m: &RealMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mut shifted = m.clone();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
    let mut shift = 0.0;
    for _ in 0..4 {
        match solve_dense(&shifted, &x) {
            Ok(_) => break,
            Err(Error::SingularMatrix { .. }) => {
                shift = if shift == 0.0 {
                    1e-14 * scale
                } else {
                    shift * 100.0
                };
                shifted =
                    RealMatrix::from_fn(n, |i, j| m.get(i, j) + if i == j { shift } else { 0.0 });
            }
            Err(e) => return Err(e),
        }
    }
    for _ in 0..6 {
        let y = solve_dense(&shifted, &x)?;
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Ok(x)
}

fn normalize_intensities(c: &mut [f64]) {
    let max = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let first = c
        .iter()
        .copied()
        .find(|v| v.abs() > 1e-12 * max)
        .unwrap_or(1.0);
    let s = first.signum() / max;
    c.iter_mut().for_each(|v| *v *= s);
}

/// Evaluates `sigma(x) = sum_j C_j beta_j G(x, O_j, lambda0)`.
pub struct EigenfunctionEvaluator<'a> {
    config: &'a EigenConfig,
    result: &'a EigenResult,
    kern: Kernel,
}

impl<'a> EigenfunctionEvaluator<'a> {
    pub fn new(result: &'a EigenResult, config: &'a EigenConfig) -> Result<Self> {
        Ok(Self {
            config,
            result,
            kern: Kernel::new(config, result.lambda0)?,
        })
    }

    pub fn eval(&self, x: Point) -> Result<f64> {
        if !x.is_finite() || !self.config.domain.contains(x) {
            return Err(Error::Domain(format!("point {x} lies outside the disk")));
        }
        if let Some(j) = self.config.cluster.containing(x) {
            let r = x.dist(self.config.cluster.inclusions()[j].center);
            if r < self.config.cluster.physical_radius(j) * (1.0 - 1e-12) {
                return Err(Error::Domain(format!(
                    "point {x} lies inside inclusion {}",
                    j + 1
                )));
            }
        }
        let qx = self
            .kern
            .table
            .radial_factors(x.norm().min(self.config.domain.radius()));
        let mut s = 0.0;
        for (j, inc) in self.config.cluster.inclusions().iter().enumerate() {
            let g = self.kern.green(x, &qx, inc.center, &self.kern.q[j])?;
            s += self.result.intensities[j] * self.result.betas[j] * g;
        }
        Ok(s)
    }
}

/// Unnormalized eigenfunction at a single point.
pub fn eigenfunction(result: &EigenResult, config: &EigenConfig, x: Point) -> Result<f64> {
    EigenfunctionEvaluator::new(result, config)?.eval(x)
}
