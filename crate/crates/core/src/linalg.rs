//! Dense linear algebra over `f64` and `Complex64`, backed by nalgebra's LU.

use crate::error::{Error, Result};
use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

/// Square dense matrix. Thin wrapper over [`DMatrix`] that enforces shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T: ComplexField + Copy> {
    inner: DMatrix<T>,
}

pub type RealMatrix = DenseMatrix<f64>;
pub type ComplexMatrix = DenseMatrix<Complex64>;

impl<T: ComplexField<RealField = f64> + Copy> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    /// Builds an `n x n` matrix from `f(row, col)`.
    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> T) -> Self {
        Self {
            inner: DMatrix::from_fn(n, n, f),
        }
    }

    pub fn from_row_major(n: usize, entries: &[T]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(n, n, entries),
        })
    }

    pub fn from_nalgebra(m: DMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidParameter(format!(
                "matrix is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { inner: m })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.inner[(i, j)] = v;
    }

    pub fn as_nalgebra(&self) -> &DMatrix<T> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<T> {
        self.inner
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|v| v.is_finite())
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let v = &self.inner * DVector::from_column_slice(x);
        v.as_slice().to_vec()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner * &other.inner,
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }
}

/// Solves `a x = b` by partially pivoted LU.
pub fn solve_dense<T: ComplexField<RealField = f64> + Copy>(
    a: &DenseMatrix<T>,
    b: &[T],
) -> Result<Vec<T>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::InvalidParameter(format!(
            "rhs has length {}, matrix is {n}x{n}",
            b.len()
        )));
    }
    if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "non-finite entries in linear system".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let lu = a.inner.clone().lu();
    let scale = a.max_abs();
    let u = lu.u();
    for i in 0..n {
        if u[(i, i)].modulus() <= 1e-300 * scale || scale == 0.0 {
            return Err(Error::SingularMatrix { pivot: i });
        }
    }
    let x = lu
        .solve(&DVector::from_column_slice(b))
        .ok_or(Error::SingularMatrix { pivot: n - 1 })?;
    Ok(x.as_slice().to_vec())
}

/// Determinant as `(phase, log|det|)`. Real matrices give a phase of exactly
/// `+1`, `-1` or `0`; a zero determinant returns `(0, -inf)`.
pub fn signed_log_determinant<T: ComplexField<RealField = f64> + Copy>(
    a: &DenseMatrix<T>,
) -> (T, f64) {
    let n = a.dim();
    if n == 0 {
        return (T::one(), 0.0);
    }
    let lu = a.inner.clone().lu();
    let mut phase = if lu.p().determinant::<f64>() < 0.0 {
        -T::one()
    } else {
        T::one()
    };
    let mut log_mag = 0.0;
    let u = lu.u();
    for i in 0..n {
        let d = u[(i, i)];
        let m = d.modulus();
        if m == 0.0 {
            return (T::zero(), f64::NEG_INFINITY);
        }
        log_mag += m.ln();
        phase *= d.scale(1.0 / m);
    }
    // Renormalize once so that real phases are exactly +-1.
    let pm = phase.modulus();
    (phase.unscale(pm), log_mag)
}

/// Sign of a real determinant from [`signed_log_determinant`].
pub fn determinant_sign(a: &RealMatrix) -> f64 {
    let (s, _) = signed_log_determinant(a);
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}
