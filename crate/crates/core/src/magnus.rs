//! First-order Magnus coarse-grained time evolution for
//! `H(t) = H_0 + sum_k u_k(t) H_k`.
//!
//! The pulse window is cut into `M` equal intervals. On interval `n` the
//! effective Hamiltonian is
//!
//! ```text
//! Hbar_n = dt * H_0 + sum_k c_{k,n} H_k,    c_{k,n} = int_{t_n}^{t_n + dt} u_k(t) dt
//! ```
//!
//! and the state advances by `psi_{n+1} = exp(-i Hbar_n) psi_n`. Only the
//! interval boundaries are reported; the method says nothing about the state
//! inside an interval.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dense::{CMatrix, CVector, ZERO};
use crate::error::{Error, Result};
use crate::expm::{expm_batch, expm_unitary, UnitaryPropagator};
use crate::operator::HermitianOperator;

/// Normalization tolerance for states handed to `evolve`.
pub const NORM_TOL: f64 = 1e-9;
/// Norm deviation that aborts an evolution.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Drift plus control operators, all of one dimension.
#[derive(Debug, Clone)]
pub struct ControlledHamiltonian {
    drift: HermitianOperator,
    controls: Vec<HermitianOperator>,
}

impl ControlledHamiltonian {
    pub fn new(drift: HermitianOperator, controls: Vec<HermitianOperator>) -> Result<Self> {
        for c in &controls {
            if c.dim() != drift.dim() {
                return Err(Error::DimensionMismatch {
                    expected: drift.dim(),
                    found: c.dim(),
                });
            }
        }
        Ok(ControlledHamiltonian { drift, controls })
    }

    pub fn time_independent(drift: HermitianOperator) -> Self {
        ControlledHamiltonian {
            drift,
            controls: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    pub fn drift(&self) -> &HermitianOperator {
        &self.drift
    }

    pub fn controls(&self) -> &[HermitianOperator] {
        &self.controls
    }

    pub fn num_controls(&self) -> usize {
        self.controls.len()
    }

    /// `drift_weight * H_0 + sum_k weights[k] * H_k` as a dense matrix.
    pub fn combine(&self, drift_weight: f64, weights: &[f64]) -> Result<CMatrix> {
        if weights.len() != self.controls.len() {
            return Err(Error::DimensionMismatch {
                expected: self.controls.len(),
                found: weights.len(),
            });
        }
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        self.drift.add_scaled_to(drift_weight, &mut acc);
        for (h, &w) in self.controls.iter().zip(weights) {
            if w != 0.0 {
                h.add_scaled_to(w, &mut acc);
            }
        }
        Ok(acc)
    }

    /// `H(t) psi` for control values `u`, without forming `H(t)`.
    pub fn apply(&self, u: &[f64], psi: &CVector) -> CVector {
        let mut out = self.drift.apply(psi);
        for (h, &w) in self.controls.iter().zip(u) {
            if w != 0.0 {
                out.axpy(Complex64::new(w, 0.0), &h.apply(psi), Complex64::new(1.0, 0.0));
            }
        }
        out
    }
}

/// Control signals sampled on a uniform grid of `samples` points spanning
/// `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlGrid {
    t_start: f64,
    t_end: f64,
    signals: Vec<Vec<f64>>,
    samples: usize,
}

impl ControlGrid {
    /// `signals[k]` holds the samples of control `k`. With no controls the
    /// grid still needs a sample count.
    pub fn new(t_start: f64, t_end: f64, samples: usize, signals: Vec<Vec<f64>>) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
            return Err(Error::InvalidGrid(format!("bad time window [{t_start}, {t_end}]")));
        }
        if samples < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {samples}")));
        }
        for (k, s) in signals.iter().enumerate() {
            if s.len() != samples {
                return Err(Error::InvalidGrid(format!(
                    "signal {k} has {} samples, expected {samples}",
                    s.len()
                )));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidGrid(format!("signal {k} has non-finite samples")));
            }
        }
        Ok(ControlGrid {
            t_start,
            t_end,
            signals,
            samples,
        })
    }

    /// Samples `f(t)` (one value per control) at every grid point.
    pub fn from_fn(
        t_start: f64,
        t_end: f64,
        samples: usize,
        num_controls: usize,
        mut f: impl FnMut(f64) -> Vec<f64>,
    ) -> Result<Self> {
        let h = (t_end - t_start) / (samples.max(2) - 1) as f64;
        let mut signals = vec![Vec::with_capacity(samples); num_controls];
        for n in 0..samples {
            let vals = f(t_start + n as f64 * h);
            if vals.len() != num_controls {
                return Err(Error::InvalidGrid(format!(
                    "sampler returned {} values for {num_controls} controls",
                    vals.len()
                )));
            }
            for (s, v) in signals.iter_mut().zip(vals) {
                s.push(v);
            }
        }
        Self::new(t_start, t_end, samples, signals)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn num_controls(&self) -> usize {
        self.signals.len()
    }

    pub fn step(&self) -> f64 {
        self.duration() / (self.samples - 1) as f64
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t_start + n as f64 * self.step()
    }

    pub fn signal(&self, k: usize) -> &[f64] {
        &self.signals[k]
    }

    pub fn signals(&self) -> &[Vec<f64>] {
        &self.signals
    }

    /// Linear interpolation of every control at time `t` (clamped to the window).
    pub fn values_at(&self, t: f64, out: &mut [f64]) {
        let x = ((t - self.t_start) / self.step()).clamp(0.0, (self.samples - 1) as f64);
        let lo = (x.floor() as usize).min(self.samples - 2);
        let w = x - lo as f64;
        for (o, s) in out.iter_mut().zip(&self.signals) {
            *o = if w == 0.0 { s[lo] } else { s[lo] * (1.0 - w) + s[lo + 1] * w };
        }
    }

    /// Reads `t,u1,u2,...` CSV with a header row. Spacing must be uniform to
    /// 1e-9 relative.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.is_empty() {
            return Err(Error::Parse("empty header".into()));
        }
        let k = headers.len() - 1;
        let mut times = Vec::new();
        let mut signals = vec![Vec::new(); k];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                .collect::<Result<_>>()?;
            times.push(vals[0]);
            for (s, v) in signals.iter_mut().zip(&vals[1..]) {
                s.push(*v);
            }
        }
        if times.len() < 2 {
            return Err(Error::InvalidGrid("need at least 2 rows".into()));
        }
        let (t0, t1) = (times[0], times[times.len() - 1]);
        let h = (t1 - t0) / (times.len() - 1) as f64;
        for (n, &t) in times.iter().enumerate() {
            if (t - (t0 + n as f64 * h)).abs() > 1e-9 * (t1 - t0).abs().max(1.0) {
                return Err(Error::InvalidGrid(format!("non-uniform time at row {n}: {t}")));
            }
        }
        Self::new(t0, t1, times.len(), signals)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.num_controls()).map(|k| format!("u{k}")));
        w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        for n in 0..self.samples {
            let mut row = vec![self.time(n).to_string()];
            row.extend(self.signals.iter().map(|s| s[n].to_string()));
            w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Interval integrals `c_{k,n}` of every control (an `M x K` matrix) by the
/// composite trapezoid rule on the grid samples.
///
/// `M` must divide `samples - 1` so each interval holds whole sample steps.
pub fn magnus_coefficients(grid: &ControlGrid, intervals: usize) -> Result<DMatrix<f64>> {
    let steps = grid.samples() - 1;
    if intervals == 0 || !steps.is_multiple_of(intervals) {
        return Err(Error::GridMismatch { intervals, steps });
    }
    let per = steps / intervals;
    let h = grid.step();
    Ok(DMatrix::from_fn(intervals, grid.num_controls(), |n, k| {
        let s = &grid.signal(k)[n * per..=(n + 1) * per];
        let inner: f64 = s[1..per].iter().sum();
        h * (0.5 * (s[0] + s[per]) + inner)
    }))
}

/// `Hbar_n = dt * H_0 + sum_k c_{k,n} H_k` for every interval, as dense
/// operators.
pub fn assemble_effective_hams(
    ch: &ControlledHamiltonian,
    coefficients: &DMatrix<f64>,
    dt: f64,
) -> Result<Vec<HermitianOperator>> {
    if coefficients.ncols() != ch.num_controls() {
        return Err(Error::DimensionMismatch {
            expected: ch.num_controls(),
            found: coefficients.ncols(),
        });
    }
    (0..coefficients.nrows())
        .map(|n| interval_ham(ch, coefficients, dt, n))
        .collect()
}

fn interval_ham(ch: &ControlledHamiltonian, coefficients: &DMatrix<f64>, dt: f64, n: usize) -> Result<HermitianOperator> {
    let weights: Vec<f64> = coefficients.row(n).iter().copied().collect();
    HermitianOperator::from_dense_unchecked(ch.combine(dt, &weights)?)
}

/// Per-interval data of a Magnus discretization.
#[derive(Debug, Clone)]
pub struct MagnusIntervalSet {
    pub num_intervals: usize,
    pub dt: f64,
    pub coefficients: DMatrix<f64>,
    pub effective_hams: Vec<HermitianOperator>,
}

impl MagnusIntervalSet {
    pub fn build(ch: &ControlledHamiltonian, grid: &ControlGrid, intervals: usize) -> Result<Self> {
        check_grid(ch, grid)?;
        let coefficients = magnus_coefficients(grid, intervals)?;
        let dt = grid.duration() / intervals as f64;
        let effective_hams = assemble_effective_hams(ch, &coefficients, dt)?;
        Ok(MagnusIntervalSet {
            num_intervals: intervals,
            dt,
            coefficients,
            effective_hams,
        })
    }

    pub fn propagators(&self) -> Result<Vec<UnitaryPropagator>> {
        expm_batch(&self.effective_hams)
    }
}

fn check_grid(ch: &ControlledHamiltonian, grid: &ControlGrid) -> Result<()> {
    if grid.num_controls() != ch.num_controls() {
        return Err(Error::InvalidGrid(format!(
            "grid carries {} signals for {} control operators",
            grid.num_controls(),
            ch.num_controls()
        )));
    }
    Ok(())
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    /// Wraps `amplitudes`, requiring unit norm within [`NORM_TOL`].
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("state norm is {n}, expected 1")));
        }
        Ok(StateVector(amplitudes))
    }

    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(StateVector(amplitudes / Complex64::new(n, 0.0)))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::from_element(dim, ZERO);
        v[k] = Complex64::new(1.0, 0.0);
        StateVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn into_amplitudes(self) -> CVector {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn population(&self, k: usize) -> f64 {
        self.0[k].norm_sqr()
    }

    /// Euclidean distance to `other` (phase sensitive).
    pub fn distance(&self, other: &StateVector) -> f64 {
        (&self.0 - &other.0).norm()
    }
}

/// `1 - |<target|psi>|^2`, clamped to `[0, 1]`.
pub fn infidelity(psi: &StateVector, target: &StateVector) -> f64 {
    assert_eq!(psi.dim(), target.dim(), "state dimensions differ");
    let overlap = target.0.dotc(&psi.0);
    (1.0 - overlap.norm_sqr()).clamp(0.0, 1.0)
}

/// How per-interval propagators are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvolvePath {
    /// All interval Hamiltonians and exponentials are built up front (in
    /// parallel), then applied in order.
    #[default]
    Batched,
    /// One interval at a time; memory stays at a single propagator.
    Streamed,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolveOptions {
    pub path: EvolvePath,
    /// Record `max_n ||U_n U_n^H - I||_F` (one extra product per interval).
    pub check_unitarity: bool,
}

/// Stroboscopic states at `t_start + n * dt`, `n = 0..=M`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub max_unitarity_defect: Option<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Evolves `psi0` through `intervals` Magnus intervals.
pub fn evolve(
    ch: &ControlledHamiltonian,
    grid: &ControlGrid,
    intervals: usize,
    psi0: &StateVector,
    options: EvolveOptions,
) -> Result<Trajectory> {
    check_grid(ch, grid)?;
    if psi0.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: psi0.dim(),
        });
    }
    StateVector::new(psi0.0.clone())?;
    let coefficients = magnus_coefficients(grid, intervals)?;
    let dt = grid.duration() / intervals as f64;

    let mut states = Vec::with_capacity(intervals + 1);
    states.push(psi0.clone());
    let mut defect: Option<f64> = options.check_unitarity.then_some(0.0);
    let mut step = |n: usize, u: &UnitaryPropagator, states: &mut Vec<StateVector>| -> Result<()> {
        if let Some(d) = defect.as_mut() {
            *d = d.max(u.unitarity_defect());
        }
        let next = u.apply(states[n].amplitudes());
        let norm = next.norm();
        if (norm - 1.0).abs() > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift { interval: n, norm });
        }
        states.push(StateVector(next));
        Ok(())
    };

    match options.path {
        EvolvePath::Batched => {
            let hams = (0..intervals)
                .into_par_iter()
                .map(|n| interval_ham(ch, &coefficients, dt, n))
                .collect::<Result<Vec<_>>>()?;
            let props = expm_batch(&hams)?;
            for (n, u) in props.iter().enumerate() {
                step(n, u, &mut states)?;
            }
        }
        EvolvePath::Streamed => {
            for n in 0..intervals {
                let u = expm_unitary(&interval_ham(ch, &coefficients, dt, n)?)?;
                step(n, &u, &mut states)?;
            }
        }
    }
    let times = (0..=intervals).map(|n| grid.t_start() + n as f64 * dt).collect();
    Ok(Trajectory {
        times,
        states,
        max_unitarity_defect: defect,
    })
}

/// Holds a controlled Hamiltonian and its current pulse, mirroring the
/// update-then-evolve usage pattern.
#[derive(Debug, Clone)]
pub struct MagnusEvolver {
    hamiltonian: ControlledHamiltonian,
    grid: ControlGrid,
    options: EvolveOptions,
}

impl MagnusEvolver {
    pub fn new(hamiltonian: ControlledHamiltonian, grid: ControlGrid) -> Result<Self> {
        check_grid(&hamiltonian, &grid)?;
        Ok(MagnusEvolver {
            hamiltonian,
            grid,
            options: EvolveOptions::default(),
        })
    }

    pub fn with_options(mut self, options: EvolveOptions) -> Self {
        self.options = options;
        self
    }

    pub fn hamiltonian(&self) -> &ControlledHamiltonian {
        &self.hamiltonian
    }

    pub fn grid(&self) -> &ControlGrid {
        &self.grid
    }

    /// Replaces the control pulse.
    pub fn update_control_sigs(&mut self, grid: ControlGrid) -> Result<()> {
        check_grid(&self.hamiltonian, &grid)?;
        self.grid = grid;
        Ok(())
    }

    pub fn evolve(&self, intervals: usize, psi0: &StateVector) -> Result<Trajectory> {
        evolve(&self.hamiltonian, &self.grid, intervals, psi0, self.options)
    }
}
