//! Builders for the model systems used by the experiments, with their
//! closed-form reference values.

mod driven_qubit;
mod jc;
mod ladder;
mod pulse;
mod spin_chain;

pub use driven_qubit::{
    driven_qubit_lab_hamiltonian, driven_qubit_rotating_hamiltonian, driven_qubit_rwa_hamiltonian, DrivenQubitParams,
    Envelope, EXCITED, GROUND,
};
pub use jc::{
    jc_doublet_energies, jc_onsite_hamiltonian, jch_lattice_hamiltonian, mott_lobe_boundaries_npad,
    mott_lobe_boundary_analytic, mott_lobe_boundary_dense, mott_lobe_boundary_npad, JCSiteParams,
};
pub use ladder::ladder_test_hamiltonian;
pub use pulse::{synthetic_transfer_pulse, SyntheticPulse};
pub use spin_chain::{
    spin_chain_hamiltonians, spin_chain_hamiltonians_with_limit, spin_chain_populations, SpinChainParams,
    DEFAULT_MAX_CHAIN,
};

use num_complex::Complex64;

use crate::operator::HermitianOperator;

pub(crate) fn pauli_x() -> HermitianOperator {
    let one = Complex64::new(1.0, 0.0);
    HermitianOperator::from_triplets_unchecked(2, vec![(0, 1, one), (1, 0, one)]).expect("static operator")
}

pub(crate) fn pauli_y() -> HermitianOperator {
    let i = Complex64::new(0.0, 1.0);
    HermitianOperator::from_triplets_unchecked(2, vec![(0, 1, -i), (1, 0, i)]).expect("static operator")
}
