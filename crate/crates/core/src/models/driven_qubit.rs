//! Strongly driven two-level system.
//!
//! Basis ordering follows `sigma_z = diag(1, -1)`: index 0 is the excited
//! state, index 1 the ground state.

use serde::{Deserialize, Serialize};

use super::{pauli_x, pauli_y};
use crate::error::{Error, Result};
use crate::magnus::{ControlGrid, ControlledHamiltonian};
use crate::operator::HermitianOperator;

pub const EXCITED: usize = 0;
pub const GROUND: usize = 1;

/// Fewest grid samples per period of the `2 omega` counter-rotating terms.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 20.0;

/// Drive envelope `Omega(t) / Omega_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Envelope {
    Constant,
    /// `sin^2(pi t / T)`.
    SinSquared,
    Gaussian { center: f64, width: f64 },
}

impl Envelope {
    pub fn value(&self, t: f64, duration: f64) -> f64 {
        match *self {
            Envelope::Constant => 1.0,
            Envelope::SinSquared => (std::f64::consts::PI * t / duration).sin().powi(2),
            Envelope::Gaussian { center, width } => (-0.5 * ((t - center) / width).powi(2)).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrivenQubitParams {
    /// Qubit frequency, also the drive frequency.
    pub omega: f64,
    /// Peak drive amplitude `Omega_0`.
    pub peak_amplitude: f64,
    pub envelope: Envelope,
    /// Pulse runs over `[0, duration]`.
    pub duration: f64,
    /// Grid points, including both ends.
    pub samples: usize,
}

impl DrivenQubitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.peak_amplitude >= 0.0 && self.peak_amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "peak amplitude must be >= 0, got {}",
                self.peak_amplitude
            )));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidParameter(format!("duration must be positive, got {}", self.duration)));
        }
        if let Envelope::Gaussian { width, .. } = self.envelope {
            if !(width > 0.0) {
                return Err(Error::InvalidParameter("gaussian width must be positive".into()));
            }
        }
        if self.samples < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {}", self.samples)));
        }
        let per_period = self.samples_per_fast_period();
        if per_period < MIN_SAMPLES_PER_PERIOD {
            return Err(Error::InvalidGrid(format!(
                "{per_period:.1} samples per 2*omega period, need {MIN_SAMPLES_PER_PERIOD}"
            )));
        }
        Ok(())
    }

    fn samples_per_fast_period(&self) -> f64 {
        let step = self.duration / (self.samples - 1) as f64;
        std::f64::consts::PI / self.omega / step
    }

    /// Smallest sample count resolving the `2 omega` terms whose interval
    /// count `S - 1` is a multiple of `multiple`.
    pub fn min_samples(omega: f64, duration: f64, multiple: usize) -> usize {
        let multiple = multiple.max(1);
        let needed = (MIN_SAMPLES_PER_PERIOD * duration * omega / std::f64::consts::PI).ceil() as usize;
        needed.div_ceil(multiple).max(1) * multiple + 1
    }

    /// `Omega(t)`.
    pub fn amplitude(&self, t: f64) -> f64 {
        self.peak_amplitude * self.envelope.value(t, self.duration)
    }
}

fn zero_drift() -> HermitianOperator {
    HermitianOperator::from_real_diagonal(&[0.0, 0.0]).expect("static operator")
}

/// Rotating-frame model: no drift and three channels
/// `[sigma_x, sigma_x, sigma_y]` carrying `Omega/4`, `(Omega/4) cos(2 omega t)`
/// and `-(Omega/4) sin(2 omega t)`.
pub fn driven_qubit_rotating_hamiltonian(p: &DrivenQubitParams) -> Result<(ControlledHamiltonian, ControlGrid)> {
    p.validate()?;
    let ch = ControlledHamiltonian::new(zero_drift(), vec![pauli_x(), pauli_x(), pauli_y()])?;
    let grid = ControlGrid::from_fn(0.0, p.duration, p.samples, 3, |t| {
        let a = 0.25 * p.amplitude(t);
        let phase = 2.0 * p.omega * t;
        vec![a, a * phase.cos(), -a * phase.sin()]
    })?;
    Ok((ch, grid))
}

/// Rotating-wave approximation: only the `(Omega/4) sigma_x` channel.
pub fn driven_qubit_rwa_hamiltonian(p: &DrivenQubitParams) -> Result<(ControlledHamiltonian, ControlGrid)> {
    p.validate()?;
    let ch = ControlledHamiltonian::new(zero_drift(), vec![pauli_x()])?;
    let grid = ControlGrid::from_fn(0.0, p.duration, p.samples, 1, |t| vec![0.25 * p.amplitude(t)])?;
    Ok((ch, grid))
}

/// Lab frame: `(omega/2) sigma_z + (Omega(t)/2) cos(omega t) sigma_x`.
/// Populations agree with the rotating frame, which differs by a
/// `sigma_z` rotation only.
pub fn driven_qubit_lab_hamiltonian(p: &DrivenQubitParams) -> Result<(ControlledHamiltonian, ControlGrid)> {
    p.validate()?;
    let drift = HermitianOperator::from_real_diagonal(&[0.5 * p.omega, -0.5 * p.omega])?;
    let ch = ControlledHamiltonian::new(drift, vec![pauli_x()])?;
    let grid = ControlGrid::from_fn(0.0, p.duration, p.samples, 1, |t| {
        vec![0.5 * p.amplitude(t) * (p.omega * t).cos()]
    })?;
    Ok((ch, grid))
}
