use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;

/// `a^dag a + a + a^dag` truncated to `n` levels, sparse. Couplings are
/// `sqrt(k)` between levels `k - 1` and `k`; the smallest is `(0, 1)`.
pub fn ladder_test_hamiltonian(n: usize) -> Result<HermitianOperator> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("ladder needs at least 2 levels, got {n}")));
    }
    let mut trip = Vec::new();
    trip.try_reserve_exact(3 * n).map_err(|_| Error::OutOfMemory { size: n })?;
    for k in 0..n {
        trip.push((k, k, Complex64::new(k as f64, 0.0)));
        if k > 0 {
            let v = Complex64::new((k as f64).sqrt(), 0.0);
            trip.push((k - 1, k, v));
            trip.push((k, k - 1, v));
        }
    }
    HermitianOperator::from_triplets(n, trip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Layout;

    #[test]
    fn four_levels() {
        let h = ladder_test_hamiltonian(4).unwrap();
        assert_eq!(h.layout(), Layout::Sparse);
        let cs = h.couplings();
        let mags: Vec<f64> = cs.iter().map(|c| c.magnitude).collect();
        assert_eq!(mags, vec![1.0, 2f64.sqrt(), 3f64.sqrt()]);
        let smallest = cs.iter().min_by(|a, b| a.magnitude.partial_cmp(&b.magnitude).unwrap()).unwrap();
        assert_eq!((smallest.row, smallest.col), (0, 1));
        assert_eq!(h.diagonal().unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_single_level() {
        assert!(ladder_test_hamiltonian(1).is_err());
    }
}
