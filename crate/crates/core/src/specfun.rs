//! Integer-order Bessel functions of real argument.
//!
//! `J_n` is evaluated for all orders at once by Miller's backward recurrence
//! normalised with `J_0 + 2 sum J_2k = 1`. `Y_0` and `Y_1` come from the
//! Neumann series in the even/odd `J_k` (no cancellation against a log term
//! beyond the leading factor), or from the Hankel asymptotic expansion for
//! large arguments. Higher `Y_n` use forward recurrence, which is stable.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, PI};

/// Largest admissible |order|.
pub const MAX_ORDER: i32 = 1024;

/// Arguments at or above this use the Hankel asymptotic expansion for
/// `J_0, J_1, Y_0, Y_1`.
pub const ASYMPTOTIC_THRESHOLD: f64 = 30.0;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const RESCALE_ABOVE: f64 = 1e200;
const RESCALE_BY: f64 = 1e-200;

/// Validated Bessel order, `|n| <= MAX_ORDER`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BesselOrder(i32);

impl BesselOrder {
    pub fn new(n: i32) -> Result<Self> {
        if n.abs() > MAX_ORDER {
            return Err(Error::InvalidParameter(format!(
                "Bessel order {n} exceeds the bound {MAX_ORDER}"
            )));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> i32 {
        self.0
    }

    fn reflection_sign(self) -> f64 {
        if self.0 < 0 && self.0 % 2 != 0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl TryFrom<i32> for BesselOrder {
    type Error = Error;
    fn try_from(n: i32) -> Result<Self> {
        Self::new(n)
    }
}

fn check_nonneg(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(())
}

fn check_positive(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and > 0 (logarithmic singularity at 0), got {x}"
        )));
    }
    Ok(())
}

/// `J_n(x)` for `x >= 0`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    let order = BesselOrder::new(n)?;
    check_nonneg(x)?;
    let m = n.unsigned_abs() as usize;
    let seq = j_sequence(m, x);
    Ok(order.reflection_sign() * seq[m])
}

/// `Y_n(x)` for `x > 0`. Returns `-inf` once the forward recurrence overflows.
pub fn bessel_y(n: i32, x: f64) -> Result<f64> {
    let order = BesselOrder::new(n)?;
    check_positive(x)?;
    let m = n.unsigned_abs() as usize;
    let seq = y_sequence(m, x);
    Ok(order.reflection_sign() * seq[m])
}

/// `H^(1)_n(x) = J_n(x) + i Y_n(x)` for `x > 0`.
pub fn hankel1(n: i32, x: f64) -> Result<Complex64> {
    Ok(Complex64::new(bessel_j(n, x)?, bessel_y(n, x)?))
}

/// `d/dx H^(1)_n(x)`.
pub fn hankel1_derivative(n: i32, x: f64) -> Result<Complex64> {
    BesselOrder::new(n)?;
    BesselOrder::new(n.abs() + 1)?;
    check_positive(x)?;
    let (j, y) = jy_sequences(n.unsigned_abs() as usize + 1, x);
    let h = |k: i32| -> Complex64 {
        let m = k.unsigned_abs() as usize;
        let s = BesselOrder(k).reflection_sign();
        Complex64::new(s * j[m], s * y[m])
    };
    Ok((h(n - 1) - h(n + 1)) * 0.5)
}

/// `[J_0(x), ..., J_nmax(x)]`, `x >= 0`.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Result<Vec<f64>> {
    check_nonneg(x)?;
    check_len(nmax)?;
    Ok(j_sequence(nmax, x))
}

/// `[Y_0(x), ..., Y_nmax(x)]`, `x > 0`.
pub fn bessel_y_seq(nmax: usize, x: f64) -> Result<Vec<f64>> {
    check_positive(x)?;
    check_len(nmax)?;
    Ok(y_sequence(nmax, x))
}

/// Both sequences from one Miller pass.
pub fn bessel_jy_seq(nmax: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_positive(x)?;
    check_len(nmax)?;
    Ok(jy_sequences(nmax, x))
}

fn check_len(nmax: usize) -> Result<()> {
    if nmax > MAX_ORDER as usize {
        return Err(Error::InvalidParameter(format!(
            "Bessel order {nmax} exceeds the bound {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// Ratios `J_n(x) / J_{n-1}(x)` for `n = first..=last` from the backward
/// continued fraction. Exact for `x = 0` (all zero). Only meaningful where
/// `J_{n-1}(x) != 0`, which always holds for `n - 1 >= x`.
pub fn j_ratios(x: f64, first: usize, last: usize) -> Vec<f64> {
    assert!(first >= 1 && first <= last);
    if x == 0.0 {
        return vec![0.0; last - first + 1];
    }
    let start = miller_start(last, x);
    let mut r = 0.0;
    let mut out = vec![0.0; last - first + 1];
    for n in (first..=start).rev() {
        r = 1.0 / (2.0 * n as f64 / x - r);
        if n <= last {
            out[n - first] = r;
        }
    }
    out
}

/// Ratios `Y_n(x) / Y_{n-1}(x)` for `n = first..=last` by forward recurrence
/// started from the exact `Y_{first-1}, Y_{first-2}`.
pub fn y_ratios(x: f64, first: usize, last: usize) -> Result<Vec<f64>> {
    check_positive(x)?;
    assert!(first >= 1 && first <= last);
    let head = y_sequence(first.max(1), x);
    let mut s = head[first] / head[first - 1];
    let mut out = Vec::with_capacity(last - first + 1);
    out.push(s);
    for n in first..last {
        s = 2.0 * n as f64 / x - 1.0 / s;
        out.push(s);
    }
    Ok(out)
}

/// Positive zeros of `J_n` below `upper`, located by a sign scan followed by
/// bisection to machine precision.
pub fn bessel_j_zeros(n: i32, upper: f64) -> Result<Vec<f64>> {
    BesselOrder::new(n)?;
    check_positive(upper)?;
    let f = |z: f64| bessel_j(n, z).unwrap_or(f64::NAN);
    // J_n has no zeros in (0, |n|]; consecutive zeros are more than pi apart.
    let step = 0.05;
    let mut zeros = Vec::new();
    let mut a = (n.unsigned_abs() as f64).max(step);
    let mut fa = f(a);
    while a < upper {
        let b = (a + step).min(upper);
        let fb = f(b);
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    Ok(zeros)
}

fn miller_start(nmax: usize, x: f64) -> usize {
    let top = nmax.max(x.ceil() as usize);
    let m = top + 20 + (60.0 * top as f64).sqrt() as usize;
    m + (m % 2)
}

/// `J_0..=J_nmax` for `x >= 0`.
fn j_sequence(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < 1e-5 {
        // Two-term ascending series; the next term is below 1e-21 relative.
        let h = 0.5 * x;
        let mut lead = 1.0;
        for (n, v) in out.iter_mut().enumerate() {
            if n > 0 {
                lead *= h / n as f64;
            }
            *v = lead * (1.0 - h * h / (n as f64 + 1.0));
        }
        return out;
    }
    if x >= ASYMPTOTIC_THRESHOLD && (nmax as f64) < x {
        let (j0, _) = hankel_asymptotic(0, x);
        let (j1, _) = hankel_asymptotic(1, x);
        out[0] = j0;
        if nmax >= 1 {
            out[1] = j1;
        }
        for n in 1..nmax {
            out[n + 1] = 2.0 * n as f64 / x * out[n] - out[n - 1];
        }
        return out;
    }
    miller(nmax, x, &mut out);
    out
}

fn miller(nmax: usize, x: f64, out: &mut [f64]) {
    let start = miller_start(nmax, x);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k <= nmax {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_BY;
            next *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in out.iter_mut().skip(k).take(nmax + 1 - k.min(nmax + 1)) {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
}

/// Hankel asymptotic expansion of `(J_nu(x), Y_nu(x))` for `nu` in {0, 1}.
fn hankel_asymptotic(nu: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (nu * nu) as f64;
    let chi = x - (0.5 * nu as f64 + 0.25) * PI;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k / x^k with sign pattern applied below
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if a.abs() > last {
            break;
        }
        last = a.abs();
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 * p.abs().max(1e-300) {
            break;
        }
    }
    let amp = (FRAC_2_PI / x).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

fn y01_from_j(j: &[f64], x: f64) -> (f64, f64) {
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 < j.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = FRAC_2_PI * lg * j[0] - 2.0 * FRAC_2_PI * s0;
    let y1 = FRAC_2_PI * (lg * j[1] - j[0] / x) + FRAC_2_PI * s1;
    (y0, y1)
}

fn y01(x: f64) -> (f64, f64) {
    if x >= ASYMPTOTIC_THRESHOLD {
        (hankel_asymptotic(0, x).1, hankel_asymptotic(1, x).1)
    } else {
        // Terms J_k are negligible beyond k ~ x + 40.
        let kmax = (x.ceil() as usize + 40) | 1;
        let j = j_sequence(kmax + 1, x);
        y01_from_j(&j, x)
    }
}

fn y_forward(y0: f64, y1: f64, nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    out[0] = y0;
    if nmax >= 1 {
        out[1] = y1;
    }
    for n in 1..nmax {
        let v = 2.0 * n as f64 / x * out[n] - out[n - 1];
        if !v.is_finite() || v.abs() > 1e305 {
            for w in out.iter_mut().skip(n + 1) {
                *w = f64::NEG_INFINITY;
            }
            break;
        }
        out[n + 1] = v;
    }
    out
}

fn y_sequence(nmax: usize, x: f64) -> Vec<f64> {
    let (y0, y1) = y01(x);
    y_forward(y0, y1, nmax, x)
}

fn jy_sequences(nmax: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    if x >= ASYMPTOTIC_THRESHOLD {
        return (j_sequence(nmax, x), y_sequence(nmax, x));
    }
    let kmax = ((x.ceil() as usize + 40) | 1).max(nmax + 1);
    let j = j_sequence(kmax + 1, x);
    let (y0, y1) = y01_from_j(&j, x);
    (j[..=nmax].to_vec(), y_forward(y0, y1, nmax, x))
}
