//! Spin-chain state transfer driven by a band-limited pulse: population
//! trajectories, error against interval count, and timing against length.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{check_experiment_name, sibling_path, time_repeated, write_rows, TimingStats, MIN_REPEATS};
use crate::dense::{state_distance, CVector};
use crate::error::{Error, Result};
use crate::magnus::{evolve, ControlGrid, ControlledHamiltonian, EvolveOptions, StateVector};
use crate::models::{spin_chain_hamiltonians, spin_chain_populations, SpinChainParams, SyntheticPulse};
use crate::reference::rk4_evolve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    pub length: usize,
    pub omega_q: f64,
    pub j_coupling: f64,
    pub g_nnn: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            length: 6,
            omega_q: 0.0,
            j_coupling: 0.02,
            g_nnn: 0.005,
        }
    }
}

impl ChainConfig {
    pub fn params(&self, length: usize) -> SpinChainParams {
        SpinChainParams {
            length,
            omega_q: self.omega_q,
            j_coupling: self.j_coupling,
            g_nnn: self.g_nnn,
        }
    }
}

/// Synthetic pulse settings, or a CSV file with columns `t,u1,u2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseConfig {
    pub duration: f64,
    pub samples: usize,
    pub modes: usize,
    pub peak: f64,
    pub csv: Option<PathBuf>,
}

impl Default for PulseConfig {
    fn default() -> Self {
        PulseConfig {
            duration: 25.0,
            samples: 4001,
            modes: 8,
            peak: 0.02,
            csv: None,
        }
    }
}

impl PulseConfig {
    pub fn grid(&self, seed: u64) -> Result<ControlGrid> {
        let grid = match &self.csv {
            Some(path) => {
                let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                ControlGrid::read_csv(file)?
            }
            None => SyntheticPulse {
                duration: self.duration,
                samples: self.samples,
                seed,
                modes: self.modes,
                peak: self.peak,
            }
            .grid()?,
        };
        if grid.num_controls() != 2 {
            return Err(Error::InvalidGrid(format!(
                "spin-chain pulse needs 2 signals (u_x, u_y), found {}",
                grid.num_controls()
            )));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinChainConfig {
    pub experiment: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub repeats: usize,
    pub chain: ChainConfig,
    pub pulse: PulseConfig,
    /// Interval count for the population trajectory.
    pub intervals: usize,
    /// RK4 steps of the reference solution.
    pub reference_steps: usize,
    pub sweep: Vec<usize>,
    /// Chain lengths for the timing table.
    pub timing_lengths: Vec<usize>,
}

impl Default for SpinChainConfig {
    fn default() -> Self {
        SpinChainConfig {
            experiment: None,
            out: None,
            seed: 7,
            repeats: MIN_REPEATS,
            chain: ChainConfig::default(),
            pulse: PulseConfig::default(),
            intervals: 20,
            reference_steps: 1000,
            sweep: vec![10, 20, 40, 80, 160],
            timing_lengths: vec![6, 7, 8],
        }
    }
}

/// Validated inputs shared by the spin-chain runs.
pub struct ChainSetup {
    pub params: SpinChainParams,
    pub hamiltonian: ControlledHamiltonian,
    pub grid: ControlGrid,
}

impl ChainSetup {
    pub fn new(chain: &ChainConfig, pulse: &PulseConfig, seed: u64) -> Result<Self> {
        Self::with_length(chain, pulse, seed, chain.length)
    }

    pub fn with_length(chain: &ChainConfig, pulse: &PulseConfig, seed: u64, length: usize) -> Result<Self> {
        let params = chain.params(length);
        Ok(ChainSetup {
            params,
            hamiltonian: spin_chain_hamiltonians(&params)?,
            grid: pulse.grid(seed)?,
        })
    }

    pub fn initial_state(&self) -> StateVector {
        StateVector::basis(self.params.dim(), 0)
    }

    /// Final state of `steps` RK4 steps.
    pub fn rk4_final(&self, steps: usize) -> Result<CVector> {
        let states = rk4_evolve(&self.hamiltonian, &self.grid, steps, &self.initial_state())?;
        Ok(states.into_iter().next_back().expect("at least one state"))
    }

    pub fn check_intervals(&self, intervals: usize) -> Result<()> {
        let steps = self.grid.samples() - 1;
        if intervals == 0 || !steps.is_multiple_of(intervals) {
            return Err(Error::GridMismatch { intervals, steps });
        }
        Ok(())
    }
}

impl SpinChainConfig {
    pub fn validate(&self) -> Result<ChainSetup> {
        check_experiment_name(&self.experiment, "spin-chain")?;
        if self.repeats < MIN_REPEATS {
            return Err(Error::InvalidParameter(format!("repeats must be >= {MIN_REPEATS}")));
        }
        if self.reference_steps == 0 {
            return Err(Error::InvalidParameter("reference_steps must be positive".into()));
        }
        let setup = ChainSetup::new(&self.chain, &self.pulse, self.seed)?;
        for &m in std::iter::once(&self.intervals).chain(&self.sweep) {
            setup.check_intervals(m)?;
        }
        for &l in &self.timing_lengths {
            spin_chain_hamiltonians(&self.chain.params(l))?;
        }
        Ok(setup)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationRow {
    pub t: f64,
    pub p0: f64,
    pub p1: f64,
    pub p_rest: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRow {
    pub intervals: usize,
    pub state_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingRow {
    pub length: usize,
    pub dim: usize,
    pub intervals: usize,
    pub repeats: usize,
    pub median_s: f64,
    pub min_s: f64,
    pub max_s: f64,
    pub parallelism: usize,
    pub backend: &'static str,
}

impl TimingRow {
    pub(crate) fn new(length: usize, intervals: usize, t: TimingStats, backend: &'static str) -> Self {
        TimingRow {
            length,
            dim: 1 << length,
            intervals,
            repeats: t.repeats,
            median_s: t.median_s,
            min_s: t.min_s,
            max_s: t.max_s,
            parallelism: rayon::current_num_threads(),
            backend,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpinChainReport {
    pub populations: Vec<PopulationRow>,
    /// Distance between the Magnus final state and the RK4 reference.
    pub final_error: f64,
    pub sweep: Vec<ErrorRow>,
    pub timing: Vec<TimingRow>,
    pub max_unitarity_defect: f64,
}

pub fn run(cfg: &SpinChainConfig) -> Result<SpinChainReport> {
    let setup = cfg.validate()?;
    let psi0 = setup.initial_state();
    let opts = EvolveOptions {
        check_unitarity: true,
        ..Default::default()
    };
    let reference = setup.rk4_final(cfg.reference_steps)?;
    let traj = evolve(&setup.hamiltonian, &setup.grid, cfg.intervals, &psi0, opts)?;
    let mut defect = traj.max_unitarity_defect.unwrap_or(0.0);
    let populations = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| {
            let (p0, p1, p_rest) = spin_chain_populations(s, setup.params.length);
            PopulationRow { t, p0, p1, p_rest }
        })
        .collect();
    let final_error = state_distance(traj.final_state().amplitudes(), &reference);

    let mut sweep = Vec::with_capacity(cfg.sweep.len());
    for &m in &cfg.sweep {
        let t = evolve(&setup.hamiltonian, &setup.grid, m, &psi0, opts)?;
        defect = defect.max(t.max_unitarity_defect.unwrap_or(0.0));
        sweep.push(ErrorRow {
            intervals: m,
            state_error: state_distance(t.final_state().amplitudes(), &reference),
        });
    }

    let mut timing = Vec::with_capacity(cfg.timing_lengths.len());
    for &l in &cfg.timing_lengths {
        let s = ChainSetup::with_length(&cfg.chain, &cfg.pulse, cfg.seed, l)?;
        let psi = s.initial_state();
        let stats = time_repeated(
            cfg.repeats,
            || (),
            |_| evolve(&s.hamiltonian, &s.grid, cfg.intervals, &psi, EvolveOptions::default()),
        )?;
        timing.push(TimingRow::new(l, cfg.intervals, stats, "dense-batched"));
    }
    Ok(SpinChainReport {
        populations,
        final_error,
        sweep,
        timing,
        max_unitarity_defect: defect,
    })
}

impl SpinChainReport {
    /// Writes `out` plus `<stem>_sweep.csv` and `<stem>_timing.csv`.
    pub fn write(&self, out: &Path) -> Result<()> {
        write_rows(out, &self.populations)?;
        write_rows(&sibling_path(out, "sweep"), &self.sweep)?;
        write_rows(&sibling_path(out, "timing"), &self.timing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SpinChainConfig {
        SpinChainConfig {
            chain: ChainConfig { length: 4, ..Default::default() },
            pulse: PulseConfig { duration: 5.0, samples: 801, ..Default::default() },
            intervals: 20,
            reference_steps: 400,
            sweep: vec![10, 20, 40],
            timing_lengths: vec![3, 4],
            ..Default::default()
        }
    }

    #[test]
    fn populations_complete_and_sweep_improves() {
        let rep = run(&small()).unwrap();
        assert_eq!(rep.populations.len(), 21);
        for r in &rep.populations {
            assert!((r.p0 + r.p1 + r.p_rest - 1.0).abs() < 1e-9);
        }
        assert_eq!(rep.populations[0].p0, 1.0);
        let e: Vec<f64> = rep.sweep.iter().map(|r| r.state_error).collect();
        assert!(e[0] > e[1] && e[1] > e[2]);
        assert_eq!(rep.timing.len(), 2);
        assert!(rep.timing.iter().all(|t| t.median_s > 0.0 && t.repeats == 5));
    }

    #[test]
    fn validation_errors() {
        let bad = SpinChainConfig { intervals: 7, ..small() };
        assert!(matches!(bad.validate(), Err(Error::GridMismatch { .. })));
        let bad = SpinChainConfig { timing_lengths: vec![15], ..small() };
        assert!(matches!(bad.validate(), Err(Error::ChainTooLarge { .. })));
        let bad = SpinChainConfig { repeats: 3, ..small() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn pulse_from_csv() {
        let grid = SyntheticPulse::new(5.0, 801, 3).grid().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pulse.csv");
        grid.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
        let cfg = PulseConfig { csv: Some(path), ..Default::default() };
        let back = cfg.grid(0).unwrap();
        assert_eq!(back.samples(), 801);
        for k in 0..2 {
            for (a, b) in back.signal(k).iter().zip(grid.signal(k)) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }
}
