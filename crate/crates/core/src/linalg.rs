//! Small dense complex linear algebra used by the propagators.
//!
//! The matrix exponential uses scaling and squaring around a truncated
//! Taylor series. Matrices here are at most a few hundred rows, so the
//! kernel favours accuracy over speed: the scaled matrix has 1-norm at
//! most 1/2 and the series is carried to degree 18, which puts the
//! truncation error far below 1e-10 per entry before squaring.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64 as C64;

const TAYLOR_DEGREE: usize = 18;
const SCALED_NORM: f64 = 0.5;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Maximum absolute column sum.
pub fn norm_1(a: &Array2<C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry magnitude.
pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Max-entry distance between `a` and its conjugate transpose.
pub fn hermiticity_error(a: &Array2<C64>) -> f64 {
    max_abs(&(a - &dagger(a)))
}

/// Max-entry distance of `u† u` from the identity.
pub fn unitarity_error(u: &Array2<C64>) -> f64 {
    let n = u.nrows();
    let prod = dagger(u).dot(u);
    max_abs(&(prod - Array2::<C64>::eye(n)))
}

pub fn commutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b) - b.dot(a)
}

/// Matrix exponential `exp(a)` by scaling and squaring.
///
/// Panics if `a` is not square.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }

    let norm = norm_1(a);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::new(2f64.powi(-squarings), 0.0);

    // Horner form: I + A(I + A/2(I + A/3(...)))
    let eye = Array2::<C64>::eye(n);
    let mut acc = eye.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = &eye + &(scaled.dot(&acc) * C64::new(1.0 / k as f64, 0.0));
    }

    for _ in 0..squarings {
        acc = acc.dot(&acc);
    }
    acc
}

/// Integer power by repeated squaring.
pub fn matrix_power(a: &Array2<C64>, mut exponent: u64) -> Array2<C64> {
    let mut result = Array2::<C64>::eye(a.nrows());
    let mut base = a.clone();
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = result.dot(&base);
        }
        exponent >>= 1;
        if exponent > 0 {
            base = base.dot(&base);
        }
    }
    result
}

pub fn vector_norm(v: ArrayView1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &Array1<C64>, b: &Array1<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
