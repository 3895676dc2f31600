//! Strongly driven qubit: Magnus at a coarse interval count against a fine
//! Magnus reference and the rotating-wave approximation.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{check_experiment_name, gcd, lcm, log_log_slope, sibling_path, write_rows};
use crate::error::{Error, Result};
use crate::magnus::{evolve, EvolveOptions, StateVector, Trajectory};
use crate::models::{
    driven_qubit_rotating_hamiltonian, driven_qubit_rwa_hamiltonian, DrivenQubitParams, Envelope, EXCITED, GROUND,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrivenQubitConfig {
    pub experiment: Option<String>,
    pub out: Option<PathBuf>,
    pub omega: f64,
    /// `Omega_0 / omega`.
    pub drive_ratio: f64,
    pub envelope: Envelope,
    pub duration: f64,
    /// Grid samples; chosen automatically when absent.
    pub samples: Option<usize>,
    pub intervals: usize,
    pub reference_intervals: usize,
    /// Interval counts for the convergence sweep.
    pub sweep: Vec<usize>,
}

impl Default for DrivenQubitConfig {
    fn default() -> Self {
        DrivenQubitConfig {
            experiment: None,
            out: None,
            omega: 2.0 * std::f64::consts::PI,
            drive_ratio: 0.33,
            envelope: Envelope::SinSquared,
            duration: 10.0,
            samples: None,
            intervals: 50,
            reference_intervals: 5000,
            sweep: vec![25, 50, 100, 200, 400],
        }
    }
}

impl DrivenQubitConfig {
    fn all_interval_counts(&self) -> impl Iterator<Item = usize> + '_ {
        [self.intervals, self.reference_intervals].into_iter().chain(self.sweep.iter().copied())
    }

    pub fn params(&self) -> Result<DrivenQubitParams> {
        check_experiment_name(&self.experiment, "driven-qubit")?;
        if self.all_interval_counts().any(|m| m == 0) {
            return Err(Error::InvalidParameter("interval counts must be positive".into()));
        }
        if self.sweep.len() < 2 {
            return Err(Error::InvalidParameter("sweep needs at least two interval counts".into()));
        }
        if !(self.drive_ratio >= 0.0) {
            return Err(Error::InvalidParameter("drive_ratio must be >= 0".into()));
        }
        let multiple = self.all_interval_counts().fold(1, lcm);
        let samples = match self.samples {
            Some(s) => s,
            None => DrivenQubitParams::min_samples(self.omega, self.duration, multiple),
        };
        if samples < 2 || (samples - 1) % multiple != 0 {
            return Err(Error::GridMismatch {
                intervals: multiple,
                steps: samples.saturating_sub(1),
            });
        }
        let p = DrivenQubitParams {
            omega: self.omega,
            peak_amplitude: self.drive_ratio * self.omega,
            envelope: self.envelope,
            duration: self.duration,
            samples,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.params().map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrobeRow {
    pub t_strobe: f64,
    pub pop_excited_full_ref: f64,
    pub pop_excited_magnus: f64,
    pub pop_excited_rwa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub intervals: usize,
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct DrivenQubitReport {
    pub intervals: usize,
    pub rows: Vec<StrobeRow>,
    pub magnus_max_deviation: f64,
    pub rwa_max_deviation: f64,
    pub sweep: Vec<SweepRow>,
    /// Log-log slope of sweep deviation against interval length.
    pub sweep_slope: f64,
    /// Largest `||U U^H - I||_F` over every propagator built.
    pub max_unitarity_defect: f64,
}

/// `(index in coarse, index in fine)` for strobe times shared by both.
fn common_strobes(coarse: usize, fine: usize) -> impl Iterator<Item = (usize, usize)> {
    let stride = coarse / gcd(coarse, fine);
    (0..=coarse).step_by(stride).map(move |k| (k, k * fine / coarse))
}

fn excited(traj: &Trajectory, k: usize) -> f64 {
    traj.states[k].population(EXCITED)
}

fn max_deviation(coarse: &Trajectory, reference: &Trajectory) -> f64 {
    let (m, r) = (coarse.states.len() - 1, reference.states.len() - 1);
    common_strobes(m, r)
        .map(|(k, j)| (excited(coarse, k) - excited(reference, j)).abs())
        .fold(0.0, f64::max)
}

pub fn run(cfg: &DrivenQubitConfig) -> Result<DrivenQubitReport> {
    let p = cfg.params()?;
    let psi0 = StateVector::basis(2, GROUND);
    let opts = EvolveOptions {
        check_unitarity: true,
        ..Default::default()
    };
    let (ch, grid) = driven_qubit_rotating_hamiltonian(&p)?;
    let (rwa_ch, rwa_grid) = driven_qubit_rwa_hamiltonian(&p)?;
    let mut defect = 0.0f64;
    let mut run_m = |ch, grid, m| -> Result<Trajectory> {
        let t = evolve(ch, grid, m, &psi0, opts)?;
        defect = defect.max(t.max_unitarity_defect.unwrap_or(0.0));
        Ok(t)
    };
    let reference = run_m(&ch, &grid, cfg.reference_intervals)?;
    let rwa = run_m(&rwa_ch, &rwa_grid, cfg.reference_intervals)?;
    let coarse = run_m(&ch, &grid, cfg.intervals)?;

    let (m, r) = (cfg.intervals, cfg.reference_intervals);
    let rows = common_strobes(m, r)
        .map(|(k, j)| StrobeRow {
            t_strobe: coarse.times[k],
            pop_excited_full_ref: excited(&reference, j),
            pop_excited_magnus: excited(&coarse, k),
            pop_excited_rwa: excited(&rwa, j),
        })
        .collect();
    let magnus_max_deviation = max_deviation(&coarse, &reference);
    let rwa_max_deviation = max_deviation(&rwa, &reference);

    let mut sweep = Vec::with_capacity(cfg.sweep.len());
    for &mi in &cfg.sweep {
        let traj = if mi == m { coarse.clone() } else { run_m(&ch, &grid, mi)? };
        sweep.push(SweepRow {
            intervals: mi,
            max_deviation: max_deviation(&traj, &reference),
        });
    }
    let dts: Vec<f64> = sweep.iter().map(|s| p.duration / s.intervals as f64).collect();
    let devs: Vec<f64> = sweep.iter().map(|s| s.max_deviation.max(1e-300)).collect();
    Ok(DrivenQubitReport {
        intervals: m,
        rows,
        magnus_max_deviation,
        rwa_max_deviation,
        sweep,
        sweep_slope: log_log_slope(&dts, &devs),
        max_unitarity_defect: defect,
    })
}

impl DrivenQubitReport {
    pub fn write_strobes<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let magnus_col = format!("pop_excited_magnus_{}", self.intervals);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        wr.write_record(["t_strobe", "pop_excited_full_ref", magnus_col.as_str(), "pop_excited_rwa"])
            .map_err(csv_err)?;
        for r in &self.rows {
            wr.write_record(
                [r.t_strobe, r.pop_excited_full_ref, r.pop_excited_magnus, r.pop_excited_rwa].map(|v| v.to_string()),
            )
            .map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Writes `out` (strobe populations) and `<stem>_sweep.csv`.
    pub fn write(&self, out: &Path) -> Result<()> {
        let file = std::fs::File::create(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
        self.write_strobes(std::io::BufWriter::new(file))?;
        write_rows(&sibling_path(out, "sweep"), &self.sweep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strobe_alignment() {
        let v: Vec<_> = common_strobes(400, 5000).collect();
        assert_eq!(v.len(), 201);
        assert_eq!(v[1], (2, 25));
        assert_eq!(common_strobes(50, 5000).nth(3), Some((3, 300)));
    }

    #[test]
    fn auto_samples_divide_all_interval_counts() {
        let p = DrivenQubitConfig::default().params().unwrap();
        assert_eq!((p.samples - 1) % 10000, 0);
        let bad = DrivenQubitConfig { samples: Some(5001), ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn small_run() {
        let cfg = DrivenQubitConfig {
            duration: 2.0,
            reference_intervals: 800,
            intervals: 20,
            sweep: vec![20, 40, 80],
            ..Default::default()
        };
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 21);
        let first = rep.rows[0];
        assert_eq!(first.pop_excited_full_ref, 0.0);
        assert_eq!(first.pop_excited_magnus, 0.0);
        assert_eq!(first.pop_excited_rwa, 0.0);
        assert!(rep.magnus_max_deviation < rep.rwa_max_deviation);
        let mut buf = Vec::new();
        rep.write_strobes(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t_strobe,pop_excited_full_ref,pop_excited_magnus_20,pop_excited_rwa\n"));
        assert_eq!(text.lines().count(), 22);
    }
}
