//! Bessel functions from their ascending series in integer-scaled fixed point.
//!
//! A value `v` is held as the integer `round(v * 10^p)`. The working
//! precision `p` is the requested number of decimals plus guard digits for
//! the cancellation in the alternating series (about `x / ln 10`) and, for
//! `Y_n` at small `x`, for the `(x/2)^(-n)` growth.

use crate::error::{Error, Result};
use num_bigint::{BigInt, Sign};

pub const MAX_DIGITS: u32 = 50;
pub const MAX_ARGUMENT: f64 = 100.0;
pub const MAX_ORDER: i32 = 200;
const MAX_TERMS: usize = 10_000;
const GUARD_DIGITS: u32 = 10;

// 105 decimals.
const EULER_GAMMA: &str = "0.577215664901532860606512090082402431042159335939923598805767234884867726777664670936947063291746749514631";

/// Fixed-point arithmetic at `p` decimals.
struct Fixed {
    p: u32,
    one: BigInt,
}

impl Fixed {
    fn new(p: u32) -> Self {
        Self {
            p,
            one: BigInt::from(10u32).pow(p),
        }
    }

    fn int(&self, n: u64) -> BigInt {
        &self.one * n
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) / &self.one
    }

    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * &self.one) / b
    }

    /// Exact binary value of `x`, rounded to `p` decimals.
    fn fixed_from_f64(&self, x: f64) -> BigInt {
        let bits = x.abs().to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let scaled = BigInt::from(mant) * &self.one;
        let v = if e >= 0 {
            scaled << (e as usize)
        } else {
            let sh = (-e) as usize;
            (scaled + (BigInt::from(1u8) << (sh - 1))) >> sh
        };
        if x < 0.0 {
            -v
        } else {
            v
        }
    }

    fn parse(&self, s: &str) -> BigInt {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        let mut digits: String = frac.chars().take(self.p as usize).collect();
        while digits.len() < self.p as usize {
            digits.push('0');
        }
        format!("{int}{digits}").parse().expect("constant literal")
    }

    /// `sum (-1)^i / ((2i+1) m^(2i+1))`.
    fn atan_inv(&self, m: u64) -> BigInt {
        let m2 = BigInt::from(m * m);
        let mut pow = &self.one / m;
        let mut sum = BigInt::from(0u8);
        let mut i = 0u64;
        while pow.sign() != Sign::NoSign {
            let t = &pow / (2 * i + 1);
            if i.is_multiple_of(2) {
                sum += t;
            } else {
                sum -= t;
            }
            pow /= &m2;
            i += 1;
        }
        sum
    }

    fn pi(&self) -> BigInt {
        self.atan_inv(5) * 16 - self.atan_inv(239) * 4
    }

    /// `sum z^(2i+1) / (2i+1)` for `|z| < 1`.
    fn atanh(&self, z: &BigInt) -> BigInt {
        let z2 = self.mul(z, z);
        let mut pow = z.clone();
        let mut sum = BigInt::from(0u8);
        let mut i = 0u64;
        while pow.sign() != Sign::NoSign {
            sum += &pow / (2 * i + 1);
            pow = self.mul(&pow, &z2);
            i += 1;
        }
        sum
    }

    fn ln(&self, v: &BigInt) -> BigInt {
        let ln2 = self.atanh(&self.div(&self.one, &self.int(3))) * 2;
        let mut w = v.clone();
        let mut k: i64 = 0;
        let hi = &self.one * 4 / 3;
        let lo = &self.one * 2 / 3;
        while w > hi {
            w /= 2;
            k += 1;
        }
        while w < lo {
            w *= 2;
            k -= 1;
        }
        let z = self.div(&(&w - &self.one), &(&w + &self.one));
        ln2 * k + self.atanh(&z) * 2
    }

    /// Rounds to `digits` decimals and formats without trailing zeros.
    fn format(&self, v: &BigInt, digits: u32) -> String {
        let drop = BigInt::from(10u32).pow(self.p - digits);
        let neg = v.sign() == Sign::Minus;
        let mag = if neg { -v } else { v.clone() };
        let q: BigInt = (mag + &drop / 2) / &drop;
        let mut s = q.to_string();
        let d = digits as usize;
        if s.len() <= d {
            s = format!("{}{s}", "0".repeat(d + 1 - s.len()));
        }
        let (int, frac) = s.split_at(s.len() - d);
        let frac = frac.trim_end_matches('0');
        let body = if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        };
        if neg && body != "0" {
            format!("-{body}")
        } else {
            body
        }
    }
}

fn check(n: i32, x: f64, digits: u32) -> Result<()> {
    if !(1..=MAX_DIGITS).contains(&digits) {
        return Err(Error::InvalidParameter(format!(
            "digits must lie in 1..={MAX_DIGITS}, got {digits}"
        )));
    }
    if !(x.is_finite() && x.abs() <= MAX_ARGUMENT) {
        return Err(Error::InvalidParameter(format!(
            "|x| must be <= {MAX_ARGUMENT}, got {x}"
        )));
    }
    if n.abs() > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "|n| must be <= {MAX_ORDER}, got {n}"
        )));
    }
    Ok(())
}

fn working_precision(n: u32, x: f64, digits: u32) -> u32 {
    let cancel = (x.abs() / std::f64::consts::LN_10).ceil() as u32;
    let growth = if x > 0.0 && x < 2.0 {
        (n as f64 * (2.0 / x).log10()).ceil() as u32
    } else {
        0
    };
    digits + GUARD_DIGITS + cancel + 2 * growth + 5
}

/// Terms `t_k = (-1)^k (x/2)^(2k+n) / (k! (n+k)!)` until they vanish at precision `f.p`.
fn series_terms(f: &Fixed, n: u32, half_x: &BigInt, x: f64) -> Result<Vec<BigInt>> {
    let q = f.mul(half_x, half_x);
    let mut t = f.one.clone();
    for i in 1..=n {
        t = f.mul(&t, half_x) / i;
    }
    let mut out = Vec::new();
    // Terms grow until k is about x/2; only stop once past that.
    let peak = (x.abs() / 2.0).ceil() as usize + 1;
    for k in 0..MAX_TERMS {
        if t.sign() == Sign::NoSign && k > peak {
            return Ok(out);
        }
        out.push(t.clone());
        t = -f.mul(&t, &q) / ((k as u64 + 1) * (n as u64 + k as u64 + 1));
    }
    Err(Error::NotConverged(format!(
        "Bessel series did not converge in {MAX_TERMS} terms"
    )))
}

fn j_fixed(f: &Fixed, n: u32, x: f64) -> Result<BigInt> {
    let half_x = f.fixed_from_f64(x.abs()) / 2;
    let s: BigInt = series_terms(f, n, &half_x, x)?.iter().sum();
    Ok(if x < 0.0 && n % 2 == 1 { -s } else { s })
}

/// `J_n(x)` rounded to `digits` decimals.
pub fn highprec_bessel(n: i32, x: f64, digits: u32) -> Result<String> {
    check(n, x, digits)?;
    let m = n.unsigned_abs();
    let f = Fixed::new(working_precision(m, x, digits));
    let v = j_fixed(&f, m, x)?;
    let v = if n < 0 && m % 2 == 1 { -v } else { v };
    Ok(f.format(&v, digits))
}

/// `Y_n(x)` for `x > 0`, rounded to `digits` decimals.
pub fn highprec_bessel_y(n: i32, x: f64, digits: u32) -> Result<String> {
    check(n, x, digits)?;
    if x <= 0.0 {
        return Err(Error::Domain(format!("Y_n needs x > 0, got {x}")));
    }
    let m = n.unsigned_abs();
    let f = Fixed::new(working_precision(m, x, digits));
    let half_x = f.fixed_from_f64(x) / 2;
    let terms = series_terms(&f, m, &half_x, x)?;
    let jn: BigInt = terms.iter().sum();
    // Harmonic-number weighted sum: sum (H_k + H_{m+k}) t_k.
    let mut hk = BigInt::from(0u8);
    let mut hmk: BigInt = (1..=m as u64).map(|i| &f.one / i).sum();
    let mut psi_sum = BigInt::from(0u8);
    for (k, t) in terms.iter().enumerate() {
        psi_sum += f.mul(&(&hk + &hmk), t);
        hk += &f.one / (k as u64 + 1);
        hmk += &f.one / (m as u64 + k as u64 + 1);
    }
    // Finite sum: sum_{k<m} (m-k-1)!/k! (x/2)^(2k-m).
    let mut finite = BigInt::from(0u8);
    if m > 0 {
        let inv = f.div(&f.one, &half_x);
        let mut term = f.one.clone();
        for _ in 0..m {
            term = f.mul(&term, &inv);
        }
        term *= (1..m as u64).map(BigInt::from).product::<BigInt>();
        let q = f.mul(&half_x, &half_x);
        for k in 0..m as u64 {
            finite += &term;
            if k + 1 < m as u64 {
                term = f.mul(&term, &q) / ((k + 1) * (m as u64 - k - 1));
            }
        }
    }
    let pi = f.pi();
    let gamma = f.parse(EULER_GAMMA);
    let log_term = f.mul(&f.ln(&half_x), &jn) * 2;
    let gamma_term = f.mul(&gamma, &jn) * 2;
    let v = f.div(&(log_term + gamma_term - finite - psi_sum), &pi);
    let v = if n < 0 && m % 2 == 1 { -v } else { v };
    Ok(f.format(&v, digits))
}

/// [`highprec_bessel`] parsed to `f64`.
pub fn highprec_j_f64(n: i32, x: f64) -> Result<f64> {
    parse(&highprec_bessel(n, x, 30)?)
}

/// [`highprec_bessel_y`] parsed to `f64`.
pub fn highprec_y_f64(n: i32, x: f64) -> Result<f64> {
    parse(&highprec_bessel_y(n, x, 30)?)
}

fn parse(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|e| Error::OracleFailure(format!("cannot parse {s}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_examples() {
        assert_eq!(
            highprec_bessel(0, 1.0, 20).unwrap(),
            "0.76519768655796655145"
        );
        assert_eq!(highprec_bessel(0, 0.0, 20).unwrap(), "1");
        assert_eq!(highprec_bessel(3, 0.0, 20).unwrap(), "0");
        let a = highprec_bessel(0, 1.0, 40).unwrap();
        assert!(a.starts_with("0.765197686557966551449717526102663220909"));
    }

    #[test]
    fn y_examples() {
        let y5 = highprec_bessel_y(5, 0.001, 20).unwrap();
        // Reference from the exact binary value of 0.001.
        assert_eq!(y5, "-244462007868026383.73831818188532357317");
        let y32 = highprec_y_f64(32, 0.001).unwrap();
        assert!((y32 / -1.124_169_403_198_614_6e139 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symmetry_rules() {
        assert_eq!(
            highprec_bessel(-3, 2.0, 25).unwrap(),
            format!("-{}", highprec_bessel(3, 2.0, 25).unwrap())
        );
        assert_eq!(
            highprec_bessel(3, -2.0, 25).unwrap(),
            format!("-{}", highprec_bessel(3, 2.0, 25).unwrap())
        );
        assert_eq!(
            highprec_bessel_y(-2, 2.0, 25).unwrap(),
            highprec_bessel_y(2, 2.0, 25).unwrap()
        );
    }

    #[test]
    fn wronskian_at_two() {
        // J_1 Y_0 - J_0 Y_1 = 2 / (pi x).
        let f = Fixed::new(40);
        let g = |s: String| {
            f.parse(s.trim_start_matches('-')) * if s.starts_with('-') { -1 } else { 1 }
        };
        let j0 = g(highprec_bessel(0, 2.0, 30).unwrap());
        let j1 = g(highprec_bessel(1, 2.0, 30).unwrap());
        let y0 = g(highprec_bessel_y(0, 2.0, 30).unwrap());
        let y1 = g(highprec_bessel_y(1, 2.0, 30).unwrap());
        let w = f.mul(&j1, &y0) - f.mul(&j0, &y1);
        let expect = f.div(&f.one, &f.pi());
        let diff = w - expect;
        assert!(diff.magnitude() < &num_bigint::BigUint::from(10u32).pow(40 - 18));
    }

    #[test]
    fn large_argument_cancellation() {
        let a = highprec_j_f64(0, 100.0).unwrap();
        assert!((a - 0.019_985_850_304_223_122).abs() < 1e-17);
    }

    #[test]
    fn limits() {
        assert!(highprec_bessel(0, 101.0, 20).is_err());
        assert!(highprec_bessel(0, 1.0, 51).is_err());
        assert!(highprec_bessel_y(0, 0.0, 20).is_err());
    }
}
