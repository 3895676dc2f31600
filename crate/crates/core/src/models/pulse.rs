//! Seeded band-limited control pulses for the spin-chain experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magnus::ControlGrid;

pub const MAX_MODES: usize = 8;

/// Two signals `u_x, u_y`, each `sum_{m=1..modes} a_m sin(m pi t / T)` with
/// seeded random `a_m`, rescaled so the larger of the two peaks equals
/// `peak`. Every mode vanishes at both ends of the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticPulse {
    pub duration: f64,
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_peak")]
    pub peak: f64,
}

fn default_modes() -> usize {
    MAX_MODES
}

fn default_peak() -> f64 {
    0.02
}

impl SyntheticPulse {
    pub fn new(duration: f64, samples: usize, seed: u64) -> Self {
        SyntheticPulse {
            duration,
            samples,
            seed,
            modes: default_modes(),
            peak: default_peak(),
        }
    }

    /// Mode amplitudes `[u_x, u_y]` before rescaling.
    fn raw_amplitudes(&self) -> [Vec<f64>; 2] {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut draw = || (1..=self.modes).map(|m| rng.random_range(-1.0..1.0) / m as f64).collect::<Vec<_>>();
        let x = draw();
        let y = draw();
        [x, y]
    }

    pub fn grid(&self) -> Result<ControlGrid> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidParameter(format!("pulse duration must be positive, got {}", self.duration)));
        }
        if self.modes == 0 || self.modes > MAX_MODES {
            return Err(Error::InvalidParameter(format!("modes must be in 1..={MAX_MODES}, got {}", self.modes)));
        }
        if !(self.peak >= 0.0 && self.peak.is_finite()) {
            return Err(Error::InvalidParameter(format!("peak must be >= 0, got {}", self.peak)));
        }
        let amps = self.raw_amplitudes();
        let t_end = self.duration;
        let modes = self.modes;
        let mut grid_vals = ControlGrid::from_fn(0.0, t_end, self.samples, 2, |t| {
            amps.iter()
                .map(|a| {
                    (0..modes)
                        .map(|m| a[m] * ((m + 1) as f64 * std::f64::consts::PI * t / t_end).sin())
                        .sum()
                })
                .collect()
        })?
        .signals()
        .to_vec();
        let max = grid_vals.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let scale = if max > 0.0 { self.peak / max } else { 0.0 };
        for s in &mut grid_vals {
            for v in s.iter_mut() {
                *v *= scale;
            }
            // sin(m pi) is not exactly zero in floating point.
            s[0] = 0.0;
            *s.last_mut().expect("at least two samples") = 0.0;
        }
        ControlGrid::new(0.0, t_end, self.samples, grid_vals)
    }
}

/// Pulse with the default mode count and peak.
pub fn synthetic_transfer_pulse(duration: f64, samples: usize, seed: u64) -> Result<ControlGrid> {
    SyntheticPulse::new(duration, samples, seed).grid()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_vanish() {
        let g = synthetic_transfer_pulse(25.0, 2001, 7).unwrap();
        assert_eq!(g.num_controls(), 2);
        for s in g.signals() {
            assert_eq!(s[0], 0.0);
            assert_eq!(*s.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn seed_reproducible() {
        let a = synthetic_transfer_pulse(10.0, 501, 42).unwrap();
        let b = synthetic_transfer_pulse(10.0, 501, 42).unwrap();
        let c = synthetic_transfer_pulse(10.0, 501, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn peak_is_respected() {
        let p = SyntheticPulse { peak: 0.7, ..SyntheticPulse::new(5.0, 1001, 1) };
        let g = p.grid().unwrap();
        let max = g.signals().iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!((max - 0.7).abs() < 1e-12);
    }

    #[test]
    fn band_limited() {
        // Projection onto sin(k pi t / T) for k above the mode count vanishes.
        let p = SyntheticPulse { modes: 3, ..SyntheticPulse::new(1.0, 4001, 9) };
        let g = p.grid().unwrap();
        let h = g.step();
        for s in g.signals() {
            for k in 1..=12 {
                let proj: f64 = s
                    .iter()
                    .enumerate()
                    .map(|(n, v)| v * (k as f64 * std::f64::consts::PI * n as f64 * h).sin() * h)
                    .sum();
                if k > 3 {
                    assert!(proj.abs() < 1e-10, "mode {k}: {proj}");
                }
            }
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(synthetic_transfer_pulse(0.0, 10, 1).is_err());
        assert!(SyntheticPulse { modes: 9, ..SyntheticPulse::new(1.0, 10, 1) }.grid().is_err());
        assert!(SyntheticPulse { modes: 0, ..SyntheticPulse::new(1.0, 10, 1) }.grid().is_err());
        assert!(synthetic_transfer_pulse(1.0, 1, 1).is_err());
    }
}
