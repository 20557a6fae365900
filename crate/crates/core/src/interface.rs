//! Homogenized inertial interface on the unit circle.
//!
//! The interface field solves `mu Lap G + rho omega^2 G + r delta_y = 0` off the
//! unit circle, is continuous across it and has the derivative jump
//! `[dG/dr] = (kappa / mu) G`, where `r = m omega^2 / (alpha - m omega^2)` and
//! `kappa = M omega^2 alpha / (2 pi (m omega^2 - alpha))`. It is solved by
//! matching cylindrical harmonics mode by mode.

use crate::cluster::{alpha_eps, uniform_circle_cluster};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::greens::{helmholtz_free, MediumParams};
use crate::scatter::{assemble_identical_system, solve_betas, ScatterOptions};
use crate::specfun::{bessel_j_seq, bessel_jy_seq, j_ratios, y_ratios};
use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, PI};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Parameters of the structured interface formed by `N = M / m` inclusions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceModel {
    pub m: f64,
    pub total_mass: f64,
    pub epsilon: f64,
    pub medium: MediumParams,
    pub alpha: Complex64,
    /// Source strength `m omega^2 / (alpha - m omega^2)`.
    pub source_strength: Complex64,
    /// `M omega^2 alpha / (2 pi (m omega^2 - alpha))`.
    pub jump_coeff: Complex64,
}

pub fn make_interface_model(
    m: f64,
    total_mass: f64,
    epsilon: f64,
    medium: &MediumParams,
) -> Result<InterfaceModel> {
    if !(m >= 0.0 && m.is_finite()) || !(total_mass >= 0.0 && total_mass.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "masses must be finite and >= 0, got m={m}, M={total_mass}"
        )));
    }
    let alpha = alpha_eps(medium, epsilon, 1.0)?;
    let mw2 = m * medium.omega().powi(2);
    let gap = alpha - mw2;
    if gap.norm() <= 1e-10 * mw2.max(f64::MIN_POSITIVE) {
        return Err(Error::Resonance(format!(
            "alpha_eps = {alpha} coincides with m omega^2 = {mw2}; the interface is resonant"
        )));
    }
    let source_strength = mw2 / gap;
    let jump_coeff = total_mass * medium.omega().powi(2) * alpha / (-gap * 2.0 * PI);
    Ok(InterfaceModel {
        m,
        total_mass,
        epsilon,
        medium: *medium,
        alpha,
        source_strength,
        jump_coeff,
    })
}

impl InterfaceModel {
    /// Jump coefficient in the form `-(M / (2 pi m)) alpha r`.
    pub fn jump_coeff_from_source(&self) -> Complex64 {
        -(self.total_mass / (2.0 * PI * self.m)) * self.alpha * self.source_strength
    }

    /// Coefficient of `G` in the derivative jump, `kappa / mu`.
    pub fn effective_jump(&self) -> Complex64 {
        self.jump_coeff / self.medium.mu()
    }
}

/// Which side of the unit circle a trace is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Inner,
    Outer,
}

/// `J_n(a) H_n(b)` and its derivative in `a` (`wrt_first`) or in `b`, for
/// `n = 0..=nmax`. High orders are carried by ratio products, so nothing
/// overflows even where `H_n(b)` alone would.
fn cross_products(
    a: f64,
    b: f64,
    nmax: usize,
    wrt_first: bool,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n0 = ((a.max(b)).ceil() as usize + 1).min(nmax);
    let ja = bessel_j_seq(n0 + 1, a)?;
    let (jb, yb) = bessel_jy_seq(n0 + 1, b)?;
    let hb = |n: isize| -> Complex64 {
        let s = if n < 0 { -1.0 } else { 1.0 };
        let u = n.unsigned_abs();
        Complex64::new(jb[u], yb[u]) * s
    };
    let jaa = |n: isize| -> f64 {
        if n < 0 {
            -ja[1]
        } else {
            ja[n as usize]
        }
    };
    let mut val = Vec::with_capacity(nmax + 1);
    let mut der = Vec::with_capacity(nmax + 1);
    for n in 0..=n0 as isize {
        val.push(jaa(n) * hb(n));
        der.push(if wrt_first {
            0.5 * (jaa(n - 1) - jaa(n + 1)) * hb(n)
        } else {
            jaa(n) * 0.5 * (hb(n - 1) - hb(n + 1))
        });
    }
    if nmax > n0 {
        let ra = j_ratios(a, n0 + 1, nmax);
        let rb = j_ratios(b, n0 + 1, nmax);
        let sb = y_ratios(b, n0 + 1, nmax)?;
        let mut re = ja[n0] * jb[n0];
        let mut im = ja[n0] * yb[n0];
        for (i, n) in (n0 + 1..=nmax).enumerate() {
            re *= ra[i] * rb[i];
            im *= ra[i] * sb[i];
            let c = Complex64::new(re, im);
            let prev = val[n - 1];
            let nf = n as f64;
            let d = if wrt_first {
                // J_{n-1}(a) H_n(b) = c / r_n(a); J'_n = J_{n-1} - (n/a) J_n.
                if c == Complex64::new(0.0, 0.0) {
                    c
                } else {
                    c / ra[i] - c * (nf / a)
                }
            } else {
                // J_n(a) H_{n-1}(b) = r_n(a) J_{n-1}(a) H_{n-1}(b); H'_n = H_{n-1} - (n/b) H_n.
                prev * ra[i] - c * (nf / b)
            };
            val.push(c);
            der.push(d);
        }
    }
    Ok((val, der))
}

/// Mode-matched interface field for a fixed source.
#[derive(Debug, Clone)]
pub struct InterfaceField {
    pub model: InterfaceModel,
    pub source: Point,
    pub n_modes: usize,
    k: f64,
    /// `kappa r (i / 4 mu) J_n(k) H_n(k|y|) / det_n`, `n = 0..=n_modes`.
    weights: Vec<Complex64>,
}

/// Minimal distance of the source from the unit circle.
pub const SOURCE_GUARD: f64 = 1e-3;

/// Solves the transmission problem with `|n| <= n_modes`.
pub fn solve_interface(model: &InterfaceModel, y: Point, n_modes: usize) -> Result<InterfaceField> {
    if !(y.norm() > 1.0 + SOURCE_GUARD) || !y.is_finite() {
        return Err(Error::Domain(format!(
            "source {y} must lie outside the unit circle with |y| > 1 + {SOURCE_GUARD}"
        )));
    }
    if n_modes == 0 || n_modes >= crate::specfun::MAX_ORDER as usize {
        return Err(Error::InvalidParameter(format!(
            "n_modes must be in 1..{}",
            crate::specfun::MAX_ORDER
        )));
    }
    let k = model.medium.k0();
    let kap = model.effective_jump();
    let (p, _) = cross_products(k, k, n_modes, true)?;
    let (q, _) = cross_products(k, k * y.norm(), n_modes, true)?;
    let pre = kap * model.source_strength * I / (4.0 * model.medium.mu());
    let mut weights = Vec::with_capacity(n_modes + 1);
    for n in 0..=n_modes {
        // Wronskian: k (J H' - J' H) = 2i / pi.
        let det = I * FRAC_2_PI - kap * p[n];
        if det.norm() <= 1e-12 * (FRAC_2_PI + (kap * p[n]).norm()) {
            return Err(Error::ModeResonance { mode: n as i32 });
        }
        weights.push(pre * q[n] / det);
    }
    Ok(InterfaceField {
        model: *model,
        source: y,
        n_modes,
        k,
        weights,
    })
}

impl InterfaceField {
    fn series(&self, x: Point, side: Side, derivative: bool) -> Result<Complex64> {
        let r = x.norm();
        let dtheta = x.angle() - self.source.angle();
        let (val, der) = match side {
            // inside: J_n(kr) H_n(k); outside: J_n(k) H_n(kr)
            Side::Inner => cross_products(self.k * r, self.k, self.n_modes, true)?,
            Side::Outer => {
                if r == 0.0 {
                    return Err(Error::Domain(
                        "outer expansion is not defined at the origin".into(),
                    ));
                }
                cross_products(self.k, self.k * r, self.n_modes, false)?
            }
        };
        let terms = if derivative { &der } else { &val };
        let mut s = self.weights[0] * terms[0];
        for (n, (w, t)) in self
            .weights
            .iter()
            .zip(terms.iter())
            .enumerate()
            .take(self.n_modes + 1)
            .skip(1)
        {
            s += w * t * (2.0 * (n as f64 * dtheta).cos());
        }
        Ok(if derivative { s * self.k } else { s })
    }

    /// Scattered part on the given side (analytic continuation is used off that side).
    pub fn scattered(&self, x: Point, side: Side) -> Result<Complex64> {
        self.series(x, side, false)
    }

    /// `G_interface(x, y)`, choosing the side from `|x|`; on the circle the outer trace is used.
    pub fn evaluate(&self, x: Point) -> Result<Complex64> {
        let side = if x.norm() < 1.0 {
            Side::Inner
        } else {
            Side::Outer
        };
        self.evaluate_side(x, side)
    }

    pub fn evaluate_side(&self, x: Point, side: Side) -> Result<Complex64> {
        let inc = helmholtz_free(x, self.source, &self.model.medium)? * self.model.source_strength;
        Ok(inc + self.scattered(x, side)?)
    }

    /// Radial derivative of the field from the given side.
    pub fn radial_derivative_side(&self, x: Point, side: Side) -> Result<Complex64> {
        let r = x.norm();
        if r == 0.0 {
            return Err(Error::Domain(
                "radial derivative undefined at the origin".into(),
            ));
        }
        let d = x - self.source;
        let dist = d.norm();
        let dg = crate::greens::helmholtz_free_radial_derivative(dist, &self.model.medium)?;
        let inc = dg * (d.dot(x) / (dist * r)) * self.model.source_strength;
        Ok(inc + self.series(x, side, true)?)
    }

    /// `(|[G]|, |[dG/dr] - (kappa/mu) G|)` at the point of the unit circle with angle `theta`.
    pub fn transmission_residuals(&self, theta: f64) -> Result<(f64, f64)> {
        let x = Point::polar(1.0, theta);
        let outer = self.evaluate_side(x, Side::Outer)?;
        let inner = self.evaluate_side(x, Side::Inner)?;
        let jump = self.radial_derivative_side(x, Side::Outer)?
            - self.radial_derivative_side(x, Side::Inner)?;
        Ok((
            (outer - inner).norm(),
            (jump - self.model.effective_jump() * outer).norm(),
        ))
    }
}

/// Convenience wrapper: one evaluation of the interface field.
pub fn solve_interface_green(
    model: &InterfaceModel,
    x: Point,
    y: Point,
    n_modes: usize,
) -> Result<Complex64> {
    solve_interface(model, y, n_modes)?.evaluate(x)
}

/// Doubles the truncation from 64 until the trace at `probe` changes by less
/// than `1e-10` relative (cap 512).
pub fn solve_interface_auto(
    model: &InterfaceModel,
    y: Point,
    probe: Point,
) -> Result<InterfaceField> {
    let mut n = 64;
    let mut field = solve_interface(model, y, n)?;
    let mut prev = field.evaluate(probe)?;
    while n < 512 {
        n *= 2;
        let next_field = solve_interface(model, y, n)?;
        let next = next_field.evaluate(probe)?;
        let done = (next - prev).norm() <= 1e-10 * next.norm().max(1e-300);
        field = next_field;
        prev = next;
        if done {
            return Ok(field);
        }
    }
    Err(Error::NotConverged(
        "interface mode series not stable within 512 modes".into(),
    ))
}

/// Discrepancy between the discrete coefficients and the interface trace.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceComparison {
    pub betas: Vec<Complex64>,
    pub traces: Vec<Complex64>,
    /// `max_j |beta_j - G_interface(O_j)|`.
    pub abs_error: f64,
    /// `abs_error / max_j |G_interface(O_j)|`.
    pub rel_error: f64,
}

/// Compares `beta_j` of `n` identical inclusions (mass `M / n`) on the unit
/// circle with the interface field at their centres.
pub fn discrete_vs_interface(
    n: usize,
    epsilon: f64,
    total_mass: f64,
    medium: &MediumParams,
    y: Point,
    n_modes: usize,
) -> Result<InterfaceComparison> {
    let cluster = uniform_circle_cluster(n, epsilon, total_mass, Point::ORIGIN, 1.0)?;
    let guard = (y.norm() - 1.0 - epsilon) * 0.5;
    let opts = ScatterOptions {
        source_guard: guard.min(1.0),
        ..Default::default()
    };
    let sol = solve_betas(&assemble_identical_system(&cluster, medium, y, &opts)?)?;
    let model = make_interface_model(total_mass / n as f64, total_mass, epsilon, medium)?;
    let field = solve_interface(&model, y, n_modes)?;
    let traces = cluster
        .centers()
        .into_iter()
        .map(|o| field.evaluate_side(o, Side::Outer))
        .collect::<Result<Vec<_>>>()?;
    let abs_error = sol
        .betas
        .iter()
        .zip(&traces)
        .map(|(b, t)| (b - t).norm())
        .fold(0.0, f64::max);
    let scale = traces.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let rel_error = if scale > 0.0 { abs_error / scale } else { 0.0 };
    Ok(InterfaceComparison {
        betas: sol.betas,
        traces,
        abs_error,
        rel_error,
    })
}

/// `max_j |beta_j(y) - G_interface(O_j, y)|`.
pub fn discrete_vs_interface_error(
    n: usize,
    epsilon: f64,
    total_mass: f64,
    medium: &MediumParams,
    y: Point,
    n_modes: usize,
) -> Result<f64> {
    Ok(discrete_vs_interface(n, epsilon, total_mass, medium, y, n_modes)?.abs_error)
}
