//! `exp(-i H)` for Hermitian `H` by scaling and squaring a truncated Taylor
//! series.

use rayon::prelude::*;

use crate::dense::{all_finite, matmul, max_row_sum, unitarity_defect, CMatrix, CVector, I};
use crate::error::{Error, Result};
use crate::operator::HermitianOperator;

/// Taylor degree used after scaling.
pub const TAYLOR_ORDER: usize = 18;
/// Scaled infinity-norm bound before the Taylor step.
pub const SCALED_NORM_BOUND: f64 = 0.5;

/// A dense unitary, `exp(-i H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPropagator {
    matrix: CMatrix,
}

impl UnitaryPropagator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        &self.matrix * psi
    }

    /// `||U U^H - I||_F`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

/// Number of squarings `s` such that `||H||_inf / 2^s <= 0.5`.
pub fn squaring_count(norm: f64) -> u32 {
    if norm <= SCALED_NORM_BOUND {
        0
    } else {
        (norm / SCALED_NORM_BOUND).log2().ceil() as u32
    }
}

/// `exp(-i H)`.
pub fn expm_unitary(h: &HermitianOperator) -> Result<UnitaryPropagator> {
    expm_minus_i(&h.to_dense()).map(|matrix| UnitaryPropagator { matrix })
}

/// `exp(-i H)` for every item; items are computed by parallel workers and
/// share no state. Errors carry the failing item index.
pub fn expm_batch(hs: &[HermitianOperator]) -> Result<Vec<UnitaryPropagator>> {
    if let Some(first) = hs.first() {
        if let Some(bad) = hs.iter().find(|h| h.dim() != first.dim()) {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: bad.dim(),
            });
        }
    }
    hs.par_iter()
        .enumerate()
        .map(|(k, h)| {
            expm_unitary(h).map_err(|e| match e {
                Error::NonFinite { .. } => Error::NonFinite { item: Some(k) },
                other => other,
            })
        })
        .collect()
}

/// `exp(-i h)` for a dense Hermitian `h`.
pub(crate) fn expm_minus_i(h: &CMatrix) -> Result<CMatrix> {
    if !all_finite(h) {
        return Err(Error::NonFinite { item: None });
    }
    let s = squaring_count(max_row_sum(h));
    let a = h * (-I / f64::powi(2.0, s as i32));
    let mut e = taylor_paterson_stockmeyer(&a);
    for _ in 0..s {
        e = matmul(&e, &e);
    }
    Ok(e)
}

/// Degree-18 Taylor polynomial of `exp(a)` evaluated with blocks of four:
/// three products form `a^2, a^3, a^4` and four Horner steps in `a^4` finish
/// the sum, 7 products instead of 17.
fn taylor_paterson_stockmeyer(a: &CMatrix) -> CMatrix {
    const BLOCK: usize = 4;
    let n = a.nrows();
    let mut coeff = [0.0f64; TAYLOR_ORDER + 1];
    coeff[0] = 1.0;
    for k in 1..=TAYLOR_ORDER {
        coeff[k] = coeff[k - 1] / k as f64;
    }
    let id = CMatrix::identity(n, n);
    let a2 = matmul(a, a);
    let a3 = matmul(&a2, a);
    let a4 = matmul(&a2, &a2);
    let powers = [&id, a, &a2, &a3];

    let block_sum = |b: usize| -> CMatrix {
        let mut acc = CMatrix::zeros(n, n);
        for (r, p) in powers.iter().enumerate() {
            let m = BLOCK * b + r;
            if m <= TAYLOR_ORDER {
                acc.zip_apply(*p, |x, y| *x += y * coeff[m]);
            }
        }
        acc
    };
    let blocks = TAYLOR_ORDER / BLOCK;
    let mut acc = block_sum(blocks);
    for b in (0..blocks).rev() {
        acc = matmul(&a4, &acc) + block_sum(b);
    }
    acc
}

/// Reference `exp(-i h)` through the eigendecomposition `h = V diag(w) V^H`.
pub fn expm_by_eigendecomposition(h: &CMatrix) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|w| (-I * w).exp()));
    v * phases * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{frobenius, ONE};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            m[(r, r)] = Complex64::new(scale * rng.random_range(-1.0..1.0), 0.0);
            for c in (r + 1)..n {
                let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
                m[(c, r)] = v;
                m[(r, c)] = v.conj();
            }
        }
        m
    }

    fn op(m: CMatrix) -> HermitianOperator {
        HermitianOperator::from_dense(m).unwrap()
    }

    #[test]
    fn zero_gives_identity() {
        let u = expm_unitary(&op(CMatrix::zeros(4, 4))).unwrap();
        assert_eq!(u.matrix(), &CMatrix::identity(4, 4));
    }

    #[test]
    fn half_pi_sigma_x_gives_minus_i_sigma_x() {
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(std::f64::consts::FRAC_PI_2, 0.0),
                Complex64::new(std::f64::consts::FRAC_PI_2, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let u = expm_unitary(&op(h)).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), -I, -I, Complex64::new(0.0, 0.0)]);
        assert!(frobenius(&(u.matrix() - expected)) < 1e-14);
    }

    #[test]
    fn matches_eigendecomposition_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, scale) in [(8usize, 1.0), (8, 10.0), (16, 0.1), (32, 3.0)] {
            let h = random_hermitian(&mut rng, n, scale);
            let u = expm_unitary(&op(h.clone())).unwrap();
            let oracle = expm_by_eigendecomposition(&h);
            let err = frobenius(&(u.matrix() - oracle));
            assert!(err <= 1e-10 * n as f64, "n={n} scale={scale} err={err}");
            assert!(u.unitarity_defect() <= 1e-10);
            let det = u.matrix().clone().determinant().norm();
            assert!((det - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn forward_and_backward_cancel() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for scale in [0.01, 1.0, 10.0, 30.0] {
            let h = random_hermitian(&mut rng, 6, scale);
            let fwd = expm_unitary(&op(h.clone())).unwrap();
            let back = expm_unitary(&op(-h.clone())).unwrap();
            let mut p = matmul(fwd.matrix(), back.matrix());
            for d in 0..6 {
                p[(d, d)] -= ONE;
            }
            assert!(frobenius(&p) <= 1e-9, "scale {scale}");
        }
    }

    #[test]
    fn group_property_on_commuting_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 5, 2.0);
        let (a, b) = (0.7, 2.9);
        let ua = expm_unitary(&op(&h * Complex64::new(a, 0.0))).unwrap();
        let ub = expm_unitary(&op(&h * Complex64::new(b, 0.0))).unwrap();
        let uab = expm_unitary(&op(&h * Complex64::new(a + b, 0.0))).unwrap();
        assert!(frobenius(&(matmul(ua.matrix(), ub.matrix()) - uab.matrix())) <= 1e-9);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        let bad = HermitianOperator::from_dense_unchecked(h).unwrap();
        assert_eq!(expm_unitary(&bad), Err(Error::NonFinite { item: None }));
        let good = op(CMatrix::zeros(2, 2));
        assert_eq!(
            expm_batch(&[good.clone(), good, bad]),
            Err(Error::NonFinite { item: Some(2) })
        );
    }

    #[test]
    fn batch_agrees_with_single_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let hs: Vec<_> = (0..50).map(|_| op(random_hermitian(&mut rng, 32, 1.5))).collect();
        let batch = expm_batch(&hs).unwrap();
        for (h, u) in hs.iter().zip(&batch) {
            assert_eq!(u, &expm_unitary(h).unwrap());
        }
        assert_eq!(expm_batch(&hs[..1]).unwrap()[0], expm_unitary(&hs[0]).unwrap());
        let zeros = vec![op(CMatrix::zeros(3, 3)); 4];
        assert!(expm_batch(&zeros).unwrap().iter().all(|u| u.matrix() == &CMatrix::identity(3, 3)));
        assert!(matches!(
            expm_batch(&[op(CMatrix::zeros(2, 2)), op(CMatrix::zeros(3, 3))]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn squaring_count_keeps_scaled_norm_bounded() {
        for norm in [0.0, 0.3, 0.5, 0.51, 1.0, 7.3, 1e3] {
            let s = squaring_count(norm);
            assert!(norm / f64::powi(2.0, s as i32) <= SCALED_NORM_BOUND);
        }
    }
}
