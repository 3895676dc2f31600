//! Timing harnesses: one Givens rotation on the sparse ladder operator, and
//! Magnus against fixed-step RK4 on the spin chain.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::spin_chain::{ChainConfig, ChainSetup, PulseConfig};
use super::{check_experiment_name, log_log_slope, time_repeated, MIN_REPEATS};
use crate::dense::{state_distance, CVector};
use crate::error::{Error, Result};
use crate::magnus::{evolve, EvolveOptions};
use crate::models::ladder_test_hamiltonian;
use crate::npad::NpadState;
use crate::reference::adaptive_evolve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchGivensConfig {
    pub experiment: Option<String>,
    pub out: Option<PathBuf>,
    pub repeats: usize,
    /// Truncation levels of the ladder operator.
    pub sizes: Vec<usize>,
}

impl Default for BenchGivensConfig {
    fn default() -> Self {
        BenchGivensConfig {
            experiment: None,
            out: None,
            repeats: MIN_REPEATS,
            sizes: vec![1_000, 10_000, 100_000, 1_000_000],
        }
    }
}

impl BenchGivensConfig {
    pub fn validate(&self) -> Result<()> {
        check_experiment_name(&self.experiment, "bench-givens")?;
        if self.repeats < MIN_REPEATS {
            return Err(Error::InvalidParameter(format!("repeats must be >= {MIN_REPEATS}")));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter("sizes must be non-empty and each >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub case: String,
    pub n: usize,
    pub nnz: usize,
    pub repeats: usize,
    pub median_s: f64,
    pub min_s: f64,
    pub max_s: f64,
    pub parallelism: usize,
    pub backend: &'static str,
}

/// Times the elimination of the smallest coupling `(0, 1)` of the ladder
/// operator. Operator construction and the copy handed to each run stay
/// outside the timed region; unitary tracking is off.
pub fn bench_givens(cfg: &BenchGivensConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.sizes.len());
    for &n in &cfg.sizes {
        let h = ladder_test_hamiltonian(n)?;
        let nnz = h.nnz();
        let stats = time_repeated(
            cfg.repeats,
            || NpadState::new(h.clone()),
            |mut state| {
                state.eliminate_coupling(0, 1)?;
                Ok(state)
            },
        )?;
        out.push(BenchRecord {
            case: "givens_smallest_coupling".into(),
            n,
            nnz,
            repeats: stats.repeats,
            median_s: stats.median_s,
            min_s: stats.min_s,
            max_s: stats.max_s,
            parallelism: rayon::current_num_threads(),
            backend: "sparse-rows",
        });
    }
    Ok(out)
}

/// Log-log slope of median time against size.
pub fn givens_scaling_exponent(records: &[BenchRecord]) -> f64 {
    let n: Vec<f64> = records.iter().map(|r| r.n as f64).collect();
    let t: Vec<f64> = records.iter().map(|r| r.median_s).collect();
    log_log_slope(&n, &t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchMagnusConfig {
    pub experiment: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub repeats: usize,
    pub chain: ChainConfig,
    pub pulse: PulseConfig,
    pub lengths: Vec<usize>,
    pub intervals: usize,
    pub rk4_steps: usize,
    /// Tolerance of the adaptive integrator that supplies the exact state.
    pub oracle_tol: f64,
}

impl Default for BenchMagnusConfig {
    fn default() -> Self {
        BenchMagnusConfig {
            experiment: None,
            out: None,
            seed: 7,
            repeats: MIN_REPEATS,
            chain: ChainConfig::default(),
            pulse: PulseConfig::default(),
            lengths: vec![6],
            intervals: 20,
            rk4_steps: 1000,
            oracle_tol: 1e-11,
        }
    }
}

impl BenchMagnusConfig {
    pub fn validate(&self) -> Result<()> {
        check_experiment_name(&self.experiment, "bench-magnus")?;
        if self.repeats < MIN_REPEATS {
            return Err(Error::InvalidParameter(format!("repeats must be >= {MIN_REPEATS}")));
        }
        if self.lengths.is_empty() || self.rk4_steps == 0 || !(self.oracle_tol > 0.0) {
            return Err(Error::InvalidParameter("need lengths, rk4_steps > 0 and oracle_tol > 0".into()));
        }
        for &l in &self.lengths {
            ChainSetup::with_length(&self.chain, &self.pulse, self.seed, l)?.check_intervals(self.intervals)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnusBenchRow {
    pub method: &'static str,
    pub length: usize,
    pub dim: usize,
    /// Magnus intervals or RK4 steps.
    pub steps: usize,
    pub repeats: usize,
    pub median_s: f64,
    pub min_s: f64,
    pub max_s: f64,
    /// Distance of the final state from the adaptive-integrator oracle.
    pub error: f64,
    /// Whether this row's error is within a factor 2 of the Magnus error.
    pub matched_within_2x: bool,
    /// Distance between this row's final state and the Magnus final state.
    pub distance_to_magnus: f64,
    pub parallelism: usize,
}

fn within_2x(a: f64, b: f64) -> bool {
    a <= 2.0 * b && b <= 2.0 * a
}

/// Smallest RK4 step count whose error is at most twice `target`, found by
/// doubling then bisection (error falls monotonically with steps here).
fn matched_rk4_steps(err: &impl Fn(usize) -> Result<f64>, target: f64) -> Result<usize> {
    let mut hi = 1usize;
    while err(hi)? > 2.0 * target {
        hi *= 2;
        if hi > 1 << 24 {
            return Err(Error::InvalidParameter("RK4 cannot reach the Magnus error".into()));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if err(mid)? > 2.0 * target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi.max(1))
}

/// Rows per length: Magnus at the configured interval count, RK4 at the
/// configured step count, and RK4 at the fewest steps matching the Magnus
/// error within a factor 2.
pub fn bench_magnus(cfg: &BenchMagnusConfig) -> Result<Vec<MagnusBenchRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &l in &cfg.lengths {
        let s = ChainSetup::with_length(&cfg.chain, &cfg.pulse, cfg.seed, l)?;
        let psi0 = s.initial_state();
        let grid = &s.grid;
        let exact = adaptive_evolve(
            &s.hamiltonian,
            |t, u| grid.values_at(t, u),
            grid.t_start(),
            grid.t_end(),
            psi0.amplitudes(),
            cfg.oracle_tol,
        )?;
        let magnus_final = |m| -> Result<CVector> {
            Ok(evolve(&s.hamiltonian, grid, m, &psi0, EvolveOptions::default())?.final_state().amplitudes().clone())
        };
        let rk4_final = |n| s.rk4_final(n);
        let magnus_state = magnus_final(cfg.intervals)?;
        let magnus_err = state_distance(&magnus_state, &exact);
        let rk4_err = |n: usize| -> Result<f64> { Ok(state_distance(&rk4_final(n)?, &exact)) };
        let matched = matched_rk4_steps(&rk4_err, magnus_err)?;

        let mut push = |method, steps: usize, state: CVector, stats: super::TimingStats| {
            let error = state_distance(&state, &exact);
            rows.push(MagnusBenchRow {
                method,
                length: l,
                dim: s.params.dim(),
                steps,
                repeats: stats.repeats,
                median_s: stats.median_s,
                min_s: stats.min_s,
                max_s: stats.max_s,
                error,
                matched_within_2x: within_2x(error, magnus_err),
                distance_to_magnus: state_distance(&state, &magnus_state),
                parallelism: rayon::current_num_threads(),
            });
        };
        let t = time_repeated(cfg.repeats, || (), |_| magnus_final(cfg.intervals))?;
        push("magnus", cfg.intervals, magnus_state.clone(), t);
        let t = time_repeated(cfg.repeats, || (), |_| rk4_final(cfg.rk4_steps))?;
        push("rk4", cfg.rk4_steps, rk4_final(cfg.rk4_steps)?, t);
        let t = time_repeated(cfg.repeats, || (), |_| rk4_final(matched))?;
        push("rk4_matched", matched, rk4_final(matched)?, t);
    }
    Ok(rows)
}
