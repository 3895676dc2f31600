//! Periodic Ising chain with global X and Y controls.
//!
//! Basis index bits: bit `j` is qubit `j`, with `sigma_z = +1` for a 0 bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magnus::{ControlledHamiltonian, StateVector};
use crate::operator::HermitianOperator;

/// Longest chain accepted by default (dimension `2^14`).
pub const DEFAULT_MAX_CHAIN: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinChainParams {
    pub length: usize,
    /// Uniform qubit frequency.
    pub omega_q: f64,
    /// Nearest-neighbour ZZ coupling.
    pub j_coupling: f64,
    /// Next-nearest-neighbour ZZ coupling.
    pub g_nnn: f64,
}

impl SpinChainParams {
    pub fn dim(&self) -> usize {
        1 << self.length
    }
}

fn z(state: usize, j: usize) -> i64 {
    1 - 2 * (state >> j & 1) as i64
}

/// Drift `(omega_q/2) sum z_j - J sum z_j z_{j+1} - g2 sum z_j z_{j+2}` and
/// controls `[sum_j X_j, sum_j Y_j]`, all sparse.
pub fn spin_chain_hamiltonians(p: &SpinChainParams) -> Result<ControlledHamiltonian> {
    spin_chain_hamiltonians_with_limit(p, DEFAULT_MAX_CHAIN)
}

pub fn spin_chain_hamiltonians_with_limit(p: &SpinChainParams, max_length: usize) -> Result<ControlledHamiltonian> {
    let l = p.length;
    if l < 3 {
        return Err(Error::InvalidParameter(format!("chain length must be >= 3, got {l}")));
    }
    if l > max_length || l >= usize::BITS as usize - 1 {
        return Err(Error::ChainTooLarge {
            length: l,
            limit: max_length,
        });
    }
    if ![p.omega_q, p.j_coupling, p.g_nnn].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("chain parameters must be finite".into()));
    }
    let dim = p.dim();
    // Integer spin sums keep the diagonal exactly translation invariant.
    let diag: Vec<f64> = (0..dim)
        .map(|s| {
            let (mut sz, mut nn, mut nnn) = (0i64, 0i64, 0i64);
            for j in 0..l {
                sz += z(s, j);
                nn += z(s, j) * z(s, (j + 1) % l);
                nnn += z(s, j) * z(s, (j + 2) % l);
            }
            0.5 * p.omega_q * sz as f64 - p.j_coupling * nn as f64 - p.g_nnn * nnn as f64
        })
        .collect();
    let drift = HermitianOperator::from_real_diagonal(&diag)?.to_sparse_operator();

    let mut x = Vec::with_capacity(dim * l);
    let mut y = Vec::with_capacity(dim * l);
    for s in 0..dim {
        for j in 0..l {
            let t = s ^ (1 << j);
            x.push((t, s, Complex64::new(1.0, 0.0)));
            // Y|0> = i|1>, Y|1> = -i|0>.
            let amp = if s >> j & 1 == 0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) };
            y.push((t, s, amp));
        }
    }
    let controls = vec![
        HermitianOperator::from_triplets(dim, x)?,
        HermitianOperator::from_triplets(dim, y)?,
    ];
    ControlledHamiltonian::new(drift, controls)
}

/// `(P_0, P_1, P_rest)`: populations of `|0...0>`, `|1...1>` and everything
/// else.
pub fn spin_chain_populations(psi: &StateVector, length: usize) -> (f64, f64, f64) {
    let all_ones = (1usize << length) - 1;
    let p0 = psi.population(0);
    let p1 = psi.population(all_ones);
    let total = psi.amplitudes().norm_squared();
    (p0, p1, total - p0 - p1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{matmul, CMatrix};

    fn params(l: usize) -> SpinChainParams {
        SpinChainParams {
            length: l,
            omega_q: 0.3,
            j_coupling: 0.2,
            g_nnn: 0.05,
        }
    }

    fn translate(s: usize, l: usize) -> usize {
        ((s << 1) | (s >> (l - 1))) & ((1 << l) - 1)
    }

    #[test]
    fn drift_is_diagonal_and_controls_hermitian() {
        let ch = spin_chain_hamiltonians(&params(5)).unwrap();
        assert!(ch.drift().couplings().is_empty());
        for c in ch.controls() {
            c.check_hermitian().unwrap();
            assert_eq!(c.nnz(), 32 * 5);
        }
    }

    #[test]
    fn translation_invariance() {
        for l in [3, 4, 6] {
            let ch = spin_chain_hamiltonians(&params(l)).unwrap();
            for op in std::iter::once(ch.drift()).chain(ch.controls()) {
                op.for_each_entry(|r, c, v| assert_eq!(op.get(translate(r, l), translate(c, l)), v));
            }
        }
    }

    #[test]
    fn all_up_and_all_down_degenerate_only_without_field() {
        let zero_field = SpinChainParams { omega_q: 0.0, ..params(6) };
        let d = spin_chain_hamiltonians(&zero_field).unwrap().drift().diagonal().unwrap();
        assert_eq!(d[0], d[63]);
        assert_eq!(d[0], -0.2 * 6.0 - 0.05 * 6.0);
        let d = spin_chain_hamiltonians(&params(6)).unwrap().drift().diagonal().unwrap();
        assert!((d[0] - d[63] - 6.0 * 0.3).abs() < 1e-14);
    }

    #[test]
    fn drift_does_not_commute_with_x_control() {
        let ch = spin_chain_hamiltonians(&params(4)).unwrap();
        let h = ch.drift().to_dense();
        let x = ch.controls()[0].to_dense();
        let comm: CMatrix = matmul(&h, &x) - matmul(&x, &h);
        assert!(comm.iter().any(|v| v.norm() > 0.1));
    }

    #[test]
    fn single_site_y_action() {
        let ch = spin_chain_hamiltonians(&params(3)).unwrap();
        let y = &ch.controls()[1];
        // |000> -> i(|001> + |010> + |100>).
        assert_eq!(y.get(1, 0), Complex64::new(0.0, 1.0));
        assert_eq!(y.get(0, 1), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn size_limits() {
        assert!(matches!(
            spin_chain_hamiltonians(&params(15)),
            Err(Error::ChainTooLarge { length: 15, limit: 14 })
        ));
        assert!(matches!(
            spin_chain_hamiltonians_with_limit(&params(6), 5),
            Err(Error::ChainTooLarge { .. })
        ));
        assert!(spin_chain_hamiltonians(&params(2)).is_err());
    }

    #[test]
    fn populations_sum_to_one() {
        let psi = StateVector::normalized(crate::dense::CVector::from_fn(16, |k, _| Complex64::new(1.0 + k as f64, 0.5))).unwrap();
        let (a, b, c) = spin_chain_populations(&psi, 4);
        assert!((a + b + c - 1.0).abs() < 1e-12);
        assert!(c > 0.0);
    }
}
