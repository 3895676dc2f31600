//! Dense complex matrix helpers shared by the exponential, evolution and
//! test-oracle code paths.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// `C = A * B` for column-major complex matrices.
///
/// Small products go through nalgebra; larger ones use the blocked complex
/// kernel from `matrixmultiply`, which is several times faster than the
/// generic fallback.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "inner dimensions differ");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    if m * k * n <= 4096 {
        return a * b;
    }
    let mut c = CMatrix::zeros(m, n);
    // SAFETY: nalgebra DMatrix storage is contiguous column-major, so element
    // (r, c) sits at offset r + c * nrows. Complex64 is repr(C) { re, im },
    // layout-compatible with [f64; 2]. `c` does not alias `a` or `b`.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||U U^H - I||_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let uh = u.adjoint();
    let mut p = matmul(u, &uh);
    for d in 0..p.nrows() {
        p[(d, d)] -= ONE;
    }
    frobenius(&p)
}

/// Infinity norm (max absolute row sum); bounds the spectral norm.
pub fn max_row_sum(a: &CMatrix) -> f64 {
    (0..a.nrows())
        .map(|r| a.row(r).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn all_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Euclidean distance between two states.
pub fn state_distance(a: &CVector, b: &CVector) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_matmul_agrees_with_naive_product() {
        let n = 40;
        let a = CMatrix::from_fn(n, n, |r, c| Complex64::new((r as f64).sin(), (c as f64 * 0.3).cos()));
        let b = CMatrix::from_fn(n, n + 3, |r, c| Complex64::new((r * c) as f64 * 1e-2, r as f64 - c as f64));
        let fast = matmul(&a, &b);
        let slow = &a * &b;
        assert!(frobenius(&(fast - slow)) < 1e-10);
    }

    #[test]
    fn identity_has_no_unitarity_defect() {
        assert_eq!(unitarity_defect(&CMatrix::identity(5, 5)), 0.0);
    }
}
