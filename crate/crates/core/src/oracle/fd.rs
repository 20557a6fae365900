//! Finite-difference Dirichlet eigensolver on a perforated disk.
//!
//! Nodes sit on a square lattice centred at the origin. Unknowns are the
//! nodes strictly inside the disk and outside every inclusion. Where a stencil
//! arm leaves the domain at fraction `theta` of the spacing, the missing
//! neighbour is replaced by the linear extrapolation through the boundary zero,
//! which only adds `(1/theta - 1)/h^2` to the diagonal and keeps the matrix
//! symmetric positive definite.

use crate::cluster::ClusterGeometry;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::Point;
use crate::greens::DiskDomain;

/// Largest lattice (all nodes of the bounding box) accepted.
pub const MAX_NODES: usize = 40_000_000;
/// Outer inverse-iteration cap.
pub const MAX_ITERATIONS: usize = 10_000;
/// Convergence threshold on successive Rayleigh quotients.
pub const RAYLEIGH_TOLERANCE: f64 = 1e-8;
const MIN_THETA: f64 = 1e-3;
const CG_TOLERANCE: f64 = 1e-11;
/// Grids coarser than this are solved from a flat start.
const COARSEST_SPACING: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Exterior,
    Inclusion,
}

/// Lattice, mask and the scaled operator `h^2 (-Delta_h)` restricted to interior nodes.
#[derive(Debug, Clone)]
pub struct FdGrid {
    h: f64,
    /// Lattice index range is `-half..=half` on both axes.
    half: i64,
    kind: Vec<NodeKind>,
    /// Unknown number of each lattice node, `usize::MAX` if pinned.
    unknown: Vec<usize>,
    /// Lattice node of each unknown.
    nodes: Vec<usize>,
    diag: Vec<f64>,
    /// `[east, west, north, south]`, `usize::MAX` for a cut arm.
    neighbours: Vec<[usize; 4]>,
}

impl FdGrid {
    pub fn new(domain: &DiskDomain, cluster: &ClusterGeometry, h: f64) -> Result<Self> {
        let r = domain.radius();
        if !(h > 0.0 && h.is_finite() && h < r) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must lie in (0, R), got {h}"
            )));
        }
        let half = (r / h).floor() as i64;
        let side = (2 * half + 1) as usize;
        if side.checked_mul(side).is_none_or(|n| n > MAX_NODES) {
            return Err(Error::OracleFailure(format!(
                "grid of {side}x{side} nodes exceeds the {MAX_NODES}-node limit"
            )));
        }
        let at = |i: i64, j: i64| Point::new(i as f64 * h, j as f64 * h);
        let idx = |i: i64, j: i64| ((j + half) as usize) * side + (i + half) as usize;
        let mut kind = vec![NodeKind::Exterior; side * side];
        for j in -half..=half {
            for i in -half..=half {
                if at(i, j).norm() < r {
                    kind[idx(i, j)] = NodeKind::Interior;
                }
            }
        }
        for (n, inc) in cluster.inclusions().iter().enumerate() {
            let a = cluster.physical_radius(n);
            let lo_i = ((inc.center.x - a) / h).floor().max(-half as f64) as i64;
            let hi_i = ((inc.center.x + a) / h).ceil().min(half as f64) as i64;
            let lo_j = ((inc.center.y - a) / h).floor().max(-half as f64) as i64;
            let hi_j = ((inc.center.y + a) / h).ceil().min(half as f64) as i64;
            for j in lo_j..=hi_j {
                for i in lo_i..=hi_i {
                    if at(i, j).dist(inc.center) <= a {
                        kind[idx(i, j)] = NodeKind::Inclusion;
                    }
                }
            }
        }
        let mut unknown = vec![usize::MAX; side * side];
        let mut nodes = Vec::new();
        for (l, k) in kind.iter().enumerate() {
            if *k == NodeKind::Interior {
                unknown[l] = nodes.len();
                nodes.push(l);
            }
        }
        let steps = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
        let mut diag = Vec::with_capacity(nodes.len());
        let mut neighbours = Vec::with_capacity(nodes.len());
        for &l in &nodes {
            let i = (l % side) as i64 - half;
            let j = (l / side) as i64 - half;
            let p = at(i, j);
            let mut d = 4.0;
            let mut nb = [usize::MAX; 4];
            for (s, (di, dj)) in steps.iter().enumerate() {
                let (ni, nj) = (i + di, j + dj);
                let inside = ni.abs() <= half && nj.abs() <= half;
                if inside && kind[idx(ni, nj)] == NodeKind::Interior {
                    nb[s] = unknown[idx(ni, nj)];
                } else {
                    let dir = Point::new(*di as f64 * h, *dj as f64 * h);
                    let theta = cut_fraction(p, dir, r, cluster).max(MIN_THETA);
                    d += 1.0 / theta - 1.0;
                }
            }
            diag.push(d);
            neighbours.push(nb);
        }
        Ok(Self {
            h,
            half,
            kind,
            unknown,
            nodes,
            diag,
            neighbours,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn side(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    pub fn interior_count(&self) -> usize {
        self.nodes.len()
    }

    /// Classification of lattice node `(i, j)`, indices in `-half..=half`.
    pub fn kind(&self, i: i64, j: i64) -> Option<NodeKind> {
        if i.abs() > self.half || j.abs() > self.half {
            return None;
        }
        Some(self.kind[self.lattice(i, j)])
    }

    fn lattice(&self, i: i64, j: i64) -> usize {
        ((j + self.half) as usize) * self.side() + (i + self.half) as usize
    }

    /// `y = h^2 (-Delta_h) x` over the unknowns.
    pub fn apply(&self, x: &[f64], y: &mut [f64], exec: Exec) {
        exec.fill(y, |u| {
            let mut s = self.diag[u] * x[u];
            for &n in &self.neighbours[u] {
                if n != usize::MAX {
                    s -= x[n];
                }
            }
            s
        });
    }

    /// Value of a grid function at an arbitrary point by bilinear interpolation,
    /// with pinned nodes read as zero.
    fn sample(&self, v: &[f64], p: Point) -> f64 {
        let fx = p.x / self.h;
        let fy = p.y / self.h;
        let (i0, j0) = (fx.floor() as i64, fy.floor() as i64);
        let (tx, ty) = (fx - i0 as f64, fy - j0 as f64);
        let mut s = 0.0;
        for (di, dj, w) in [
            (0, 0, (1.0 - tx) * (1.0 - ty)),
            (1, 0, tx * (1.0 - ty)),
            (0, 1, (1.0 - tx) * ty),
            (1, 1, tx * ty),
        ] {
            let (i, j) = (i0 + di, j0 + dj);
            if i.abs() <= self.half && j.abs() <= self.half {
                let u = self.unknown[self.lattice(i, j)];
                if u != usize::MAX {
                    s += w * v[u];
                }
            }
        }
        s
    }

    fn position(&self, u: usize) -> Point {
        let l = self.nodes[u];
        let side = self.side();
        Point::new(
            ((l % side) as i64 - self.half) as f64 * self.h,
            ((l / side) as i64 - self.half) as f64 * self.h,
        )
    }
}

/// Fraction `t` in `(0, 1]` at which `p + t dir` first meets the outer circle
/// or an inclusion boundary.
fn cut_fraction(p: Point, dir: Point, r: f64, cluster: &ClusterGeometry) -> f64 {
    let mut t = first_crossing(p, dir, Point::ORIGIN, r).unwrap_or(1.0);
    for (n, inc) in cluster.inclusions().iter().enumerate() {
        if let Some(s) = first_crossing(p, dir, inc.center, cluster.physical_radius(n)) {
            t = t.min(s);
        }
    }
    t
}

/// Smallest root in `(0, 1]` of `|p + t dir - c| = a`.
fn first_crossing(p: Point, dir: Point, c: Point, a: f64) -> Option<f64> {
    let q = Point::new(p.x - c.x, p.y - c.y);
    let qa = dir.norm_sq();
    let qb = 2.0 * q.dot(dir);
    let qc = q.norm_sq() - a * a;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)]
        .into_iter()
        .filter(|t| *t > 0.0 && *t <= 1.0)
        .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.min(t))))
}

/// Output of [`fd_first_eigenpair`].
#[derive(Debug, Clone)]
pub struct FdEigen {
    pub lambda: f64,
    pub iterations: usize,
    pub grid: FdGrid,
    /// Unit-norm eigenvector over the unknowns.
    pub vector: Vec<f64>,
}

impl FdEigen {
    /// Eigenvector interpolated at `p`, zero on pinned nodes.
    pub fn value_at(&self, p: Point) -> f64 {
        self.grid.sample(&self.vector, p)
    }
}

/// Smallest eigenvalue of `-Delta` with zero data on the disk and inclusion boundaries.
pub fn fd_first_eigenvalue(domain: &DiskDomain, cluster: &ClusterGeometry, h: f64) -> Result<f64> {
    Ok(fd_first_eigenpair(domain, cluster, h, Exec::default())?.lambda)
}

pub fn fd_first_eigenpair(
    domain: &DiskDomain,
    cluster: &ClusterGeometry,
    h: f64,
    exec: Exec,
) -> Result<FdEigen> {
    let grid = FdGrid::new(domain, cluster, h)?;
    if grid.interior_count() == 0 {
        return Err(Error::OracleFailure("no interior grid nodes".into()));
    }
    let start = if 2.0 * h <= domain.radius() / 4.0 && h < COARSEST_SPACING {
        let coarse = fd_first_eigenpair(domain, cluster, 2.0 * h, exec)?;
        (0..grid.interior_count())
            .map(|u| coarse.value_at(grid.position(u)))
            .collect::<Vec<_>>()
    } else {
        vec![1.0; grid.interior_count()]
    };
    inverse_iteration(grid, start, exec)
}

fn dot(a: &[f64], b: &[f64], exec: Exec) -> f64 {
    exec.sum(a.len(), |i| a[i] * b[i])
}

fn inverse_iteration(grid: FdGrid, start: Vec<f64>, exec: Exec) -> Result<FdEigen> {
    let n = grid.interior_count();
    let h2 = grid.h * grid.h;
    let pre = Mic::new(&grid);
    let mut x = start;
    let norm = dot(&x, &x, exec).sqrt();
    if !(norm > 0.0) {
        x = vec![1.0; n];
    }
    let norm = dot(&x, &x, exec).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    let mut ax = vec![0.0; n];
    grid.apply(&x, &mut ax, exec);
    let mut rq = dot(&x, &ax, exec);
    let mut y: Vec<f64> = x.iter().map(|v| v / rq).collect();
    for it in 1..=MAX_ITERATIONS {
        conjugate_gradient(&grid, &pre, &x, &mut y, exec)?;
        let norm = dot(&y, &y, exec).sqrt();
        x.iter_mut().zip(&y).for_each(|(a, b)| *a = b / norm);
        grid.apply(&x, &mut ax, exec);
        let next = dot(&x, &ax, exec);
        let done = ((next - rq) / h2).abs() < RAYLEIGH_TOLERANCE;
        rq = next;
        if done {
            return Ok(FdEigen {
                lambda: rq / h2,
                iterations: it,
                grid,
                vector: x,
            });
        }
        y.iter_mut().zip(&x).for_each(|(a, b)| *a = b / rq);
    }
    Err(Error::OracleFailure(format!(
        "inverse iteration did not converge in {MAX_ITERATIONS} steps"
    )))
}

/// Modified incomplete Cholesky factor `(D + L) D^-1 (D + L^T)` of the
/// scaled operator, in lattice order (west and south precede a node).
struct Mic {
    d: Vec<f64>,
}

const MIC_RELAXATION: f64 = 0.97;

impl Mic {
    fn new(grid: &FdGrid) -> Self {
        let n = grid.interior_count();
        let mut d = vec![0.0; n];
        for u in 0..n {
            let [_, w, _, s] = grid.neighbours[u];
            let mut v = grid.diag[u];
            if w != usize::MAX {
                let fill = if grid.neighbours[w][2] != usize::MAX {
                    1.0
                } else {
                    0.0
                };
                v -= (1.0 + MIC_RELAXATION * fill) / d[w];
            }
            if s != usize::MAX {
                let fill = if grid.neighbours[s][0] != usize::MAX {
                    1.0
                } else {
                    0.0
                };
                v -= (1.0 + MIC_RELAXATION * fill) / d[s];
            }
            // Fall back to the unmodified diagonal if the factor degenerates.
            d[u] = if v > 0.25 * grid.diag[u] {
                v
            } else {
                grid.diag[u]
            };
        }
        Self { d }
    }

    fn solve(&self, grid: &FdGrid, r: &[f64], z: &mut [f64]) {
        let n = r.len();
        for u in 0..n {
            let [_, w, _, s] = grid.neighbours[u];
            let mut v = r[u];
            if w != usize::MAX {
                v += z[w];
            }
            if s != usize::MAX {
                v += z[s];
            }
            z[u] = v / self.d[u];
        }
        for u in (0..n).rev() {
            let [e, _, nn, _] = grid.neighbours[u];
            let mut v = 0.0;
            if e != usize::MAX {
                v += z[e];
            }
            if nn != usize::MAX {
                v += z[nn];
            }
            z[u] += v / self.d[u];
        }
    }
}

/// Preconditioned CG for `A y = b`, starting from the current `y`.
fn conjugate_gradient(
    grid: &FdGrid,
    pre: &Mic,
    b: &[f64],
    y: &mut [f64],
    exec: Exec,
) -> Result<()> {
    let n = b.len();
    let mut ap = vec![0.0; n];
    grid.apply(y, &mut ap, exec);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut z = vec![0.0; n];
    pre.solve(grid, &r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z, exec);
    let target = CG_TOLERANCE * CG_TOLERANCE * dot(b, b, exec);
    let cap = 20 * n.max(100);
    for _ in 0..cap {
        if dot(&r, &r, exec) <= target {
            return Ok(());
        }
        grid.apply(&p, &mut ap, exec);
        let alpha = rz / dot(&p, &ap, exec);
        y.iter_mut().zip(&p).for_each(|(v, q)| *v += alpha * q);
        r.iter_mut().zip(&ap).for_each(|(v, q)| *v -= alpha * q);
        pre.solve(grid, &r, &mut z);
        let next = dot(&r, &z, exec);
        let beta = next / rz;
        rz = next;
        p.iter_mut().zip(&z).for_each(|(v, q)| *v = q + beta * *v);
    }
    Err(Error::OracleFailure(
        "conjugate gradient did not converge".into(),
    ))
}
