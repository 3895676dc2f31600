//! Effective-Hamiltonian numerics: Givens-rotation diagonalization of
//! Hermitian operators (NPAD), unitary matrix exponentials, and first-order
//! Magnus time evolution, plus the model systems and experiment drivers
//! built on them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod error;
pub mod experiments;
pub mod expm;
pub mod magnus;
pub mod mmio;
pub mod models;
pub mod npad;
pub mod operator;
pub mod reference;

pub use dense::{CMatrix, CVector};
pub use error::{Error, Result};
pub use expm::{expm_batch, expm_unitary, UnitaryPropagator};
pub use magnus::{
    assemble_effective_hams, evolve, infidelity, magnus_coefficients, ControlGrid, ControlledHamiltonian,
    EvolveOptions, EvolvePath, MagnusEvolver, MagnusIntervalSet, StateVector, Trajectory,
};
pub use npad::{
    givens_rotation_matrix, npad_run, unitary_transformation, GivensRotation, NpadOutcome, NpadState, Target,
};
pub use operator::{Coupling, HermitianOperator, Layout};
