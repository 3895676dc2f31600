//! C ABI over `effham`.
//!
//! Every function returns an [`EffhamStatus`]. On failure a message is kept
//! per thread and can be copied out with [`effham_last_error_message`].
//! Handles are opaque; each `*_new` / constructor has a matching `*_free`.
//! Dense matrices cross the boundary row-major.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use effham::models::{mott_lobe_boundary_analytic, mott_lobe_boundary_npad, JCSiteParams};
use effham::{
    expm_unitary, npad_run, CMatrix, CVector, ControlGrid, ControlledHamiltonian, Error, HermitianOperator,
    MagnusEvolver, NpadState, StateVector, Target,
};
use num_complex::Complex64;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffhamStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    HermiticityViolation = 3,
    IndexOutOfRange = 4,
    DimensionMismatch = 5,
    ZeroCoupling = 6,
    OverlappingPairs = 7,
    UnitaryDrift = 8,
    NonFinite = 9,
    GridMismatch = 10,
    InvalidGrid = 11,
    NormDrift = 12,
    TruncationTooSmall = 13,
    ChainTooLarge = 14,
    OutOfMemory = 15,
    Parse = 16,
    Io = 17,
    BufferTooSmall = 18,
    Panic = 19,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffhamComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for EffhamComplex {
    fn from(z: Complex64) -> Self {
        EffhamComplex { re: z.re, im: z.im }
    }
}

impl From<EffhamComplex> for Complex64 {
    fn from(z: EffhamComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Hermitian operator handle.
pub struct EffhamOperator(HermitianOperator);

/// NPAD state handle: the partially diagonalized operator and its history.
pub struct EffhamNpad(NpadState);

/// Magnus evolver handle: controlled Hamiltonian plus its current pulse.
pub struct EffhamEvolver(MagnusEvolver);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_message(msg: String) {
    LAST_ERROR.with(|m| *m.borrow_mut() = msg);
}

fn status_of(e: &Error) -> EffhamStatus {
    match e {
        Error::HermiticityViolation { .. } => EffhamStatus::HermiticityViolation,
        Error::IndexOutOfRange { .. } => EffhamStatus::IndexOutOfRange,
        Error::DimensionMismatch { .. } => EffhamStatus::DimensionMismatch,
        Error::InvalidOperator(_) | Error::InvalidParameter(_) => EffhamStatus::InvalidArgument,
        Error::ZeroCoupling { .. } => EffhamStatus::ZeroCoupling,
        Error::OverlappingPairs { .. } => EffhamStatus::OverlappingPairs,
        Error::UnitaryDrift { .. } => EffhamStatus::UnitaryDrift,
        Error::NonFinite { .. } => EffhamStatus::NonFinite,
        Error::GridMismatch { .. } => EffhamStatus::GridMismatch,
        Error::InvalidGrid(_) => EffhamStatus::InvalidGrid,
        Error::NormDrift { .. } => EffhamStatus::NormDrift,
        Error::TruncationTooSmall { .. } => EffhamStatus::TruncationTooSmall,
        Error::ChainTooLarge { .. } => EffhamStatus::ChainTooLarge,
        Error::OutOfMemory { .. } => EffhamStatus::OutOfMemory,
        Error::Parse(_) => EffhamStatus::Parse,
        Error::Io(_) => EffhamStatus::Io,
    }
}

/// Internal failure: a status plus message.
struct Fail(EffhamStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(EffhamStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EffhamStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_message(String::new());
            EffhamStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_message(msg);
            status
        }
        Err(_) => {
            set_message("internal panic".into());
            EffhamStatus::Panic
        }
    }
}

unsafe fn slice_in<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a, T>(p: *mut T, len: usize, needed: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len < needed {
        return Err(Fail(
            EffhamStatus::BufferTooSmall,
            format!("{what} holds {len} elements, {needed} needed"),
        ));
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, needed))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn dense_row_major(dim: usize, data: &[EffhamComplex]) -> CMatrix {
    CMatrix::from_fn(dim, dim, |r, c| data[r * dim + c].into())
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `len` bytes. Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn effham_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|m| {
        let msg = m.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds an operator from a row-major `dim x dim` array. The input must be
/// Hermitian within a relative tolerance of 1e-12.
///
/// # Safety
/// `data` must point to `dim * dim` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effham_operator_from_dense(
    dim: usize,
    data: *const EffhamComplex,
    out: *mut *mut EffhamOperator,
) -> EffhamStatus {
    guard(|| {
        let n2 = dim.checked_mul(dim).ok_or_else(|| Fail(EffhamStatus::InvalidArgument, "dim overflows".into()))?;
        let data = slice_in(data, n2, "data")?;
        let op = HermitianOperator::from_dense(dense_row_major(dim, data))?;
        write_out(out, Box::into_raw(Box::new(EffhamOperator(op))), "out")
    })
}

/// Builds a sparse operator from `nnz` coordinate entries; duplicates are
/// summed.
///
/// # Safety
/// `rows`, `cols` and `values` must each point to `nnz` elements.
#[no_mangle]
pub unsafe extern "C" fn effham_operator_from_triplets(
    dim: usize,
    nnz: usize,
    rows: *const usize,
    cols: *const usize,
    values: *const EffhamComplex,
    out: *mut *mut EffhamOperator,
) -> EffhamStatus {
    guard(|| {
        let (r, c, v) = (slice_in(rows, nnz, "rows")?, slice_in(cols, nnz, "cols")?, slice_in(values, nnz, "values")?);
        let trip = (0..nnz).map(|k| (r[k], c[k], Complex64::from(v[k])));
        let op = HermitianOperator::from_triplets(dim, trip)?;
        write_out(out, Box::into_raw(Box::new(EffhamOperator(op))), "out")
    })
}

/// # Safety
/// `op` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn effham_operator_free(op: *mut EffhamOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effham_operator_dim(op: *const EffhamOperator, out: *mut usize) -> EffhamStatus {
    guard(|| write_out(out, handle(op, "op")?.0.dim(), "out"))
}

/// Entry `(row, col)`.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effham_operator_get(
    op: *const EffhamOperator,
    row: usize,
    col: usize,
    out: *mut EffhamComplex,
) -> EffhamStatus {
    guard(|| {
        let op = &handle(op, "op")?.0;
        if row >= op.dim() || col >= op.dim() {
            return Err(Error::IndexOutOfRange { row, col, dim: op.dim() }.into());
        }
        write_out(out, op.get(row, col).into(), "out")
    })
}

/// Real diagonal into `out[0..dim]`.
///
/// # Safety
/// `op` must be a live handle; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn effham_operator_diagonal(op: *const EffhamOperator, out: *mut f64, len: usize) -> EffhamStatus {
    guard(|| {
        let op = &handle(op, "op")?.0;
        let d = op.diagonal()?;
        slice_out(out, len, d.len(), "out")?.copy_from_slice(&d);
        Ok(())
    })
}

/// Writes `exp(-i H)` row-major into `out[0..dim*dim]`.
///
/// # Safety
/// `op` must be a live handle; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn effham_expm_unitary(
    op: *const EffhamOperator,
    out: *mut EffhamComplex,
    len: usize,
) -> EffhamStatus {
    guard(|| {
        let op = &handle(op, "op")?.0;
        let n = op.dim();
        let u = expm_unitary(op)?;
        let buf = slice_out(out, len, n * n, "out")?;
        for r in 0..n {
            for c in 0..n {
                buf[r * n + c] = u.matrix()[(r, c)].into();
            }
        }
        Ok(())
    })
}

/// Starts NPAD on a copy of `op`. With `track_unitary` set the
/// accumulated rotation is kept as a dense matrix.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effham_npad_new(
    op: *const EffhamOperator,
    track_unitary: bool,
    out: *mut *mut EffhamNpad,
) -> EffhamStatus {
    guard(|| {
        let op = handle(op, "op")?.0.clone();
        let state = if track_unitary {
            NpadState::with_unitary_tracking(op)
        } else {
            NpadState::new(op)
        };
        write_out(out, Box::into_raw(Box::new(EffhamNpad(state))), "out")
    })
}

/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn effham_npad_free(state: *mut EffhamNpad) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Rotates away the coupling between `i < j`.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn effham_npad_eliminate_coupling(state: *mut EffhamNpad, i: usize, j: usize) -> EffhamStatus {
    guard(|| {
        handle_mut(state, "state")?.0.eliminate_coupling(i, j)?;
        Ok(())
    })
}

/// Eliminates `count` index-disjoint couplings given as `pairs[2k], pairs[2k+1]`.
///
/// # Safety
/// `state` must be a live handle; `pairs` must point to `2 * count` indices.
#[no_mangle]
pub unsafe extern "C" fn effham_npad_eliminate_couplings(
    state: *mut EffhamNpad,
    pairs: *const usize,
    count: usize,
) -> EffhamStatus {
    guard(|| {
        let state = handle_mut(state, "state")?;
        let flat = slice_in(pairs, 2 * count, "pairs")?;
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        state.0.eliminate_couplings(&pairs)?;
        Ok(())
    })
}

/// Runs NPAD on a copy of `op` until the relevant couplings fall below
/// `tol * max|H|`. With `subspace_len == 0` every coupling counts; otherwise
/// only couplings between `subspace` and its complement. `max_iter == 0`
/// picks the default budget. The resulting state is returned even when the
/// budget runs out; check `converged`.
///
/// # Safety
/// Pointers must be valid for the given lengths; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn effham_npad_run(
    op: *const EffhamOperator,
    subspace: *const usize,
    subspace_len: usize,
    tol: f64,
    max_iter: usize,
    out_state: *mut *mut EffhamNpad,
    converged: *mut bool,
    iterations: *mut usize,
) -> EffhamStatus {
    guard(|| {
        let op = handle(op, "op")?.0.clone();
        let target = if subspace_len == 0 {
            Target::FullDiagonal
        } else {
            Target::Subspace(slice_in(subspace, subspace_len, "subspace")?.to_vec())
        };
        if out_state.is_null() || converged.is_null() || iterations.is_null() {
            return Err(null("output"));
        }
        let out = npad_run(op, target, tol, (max_iter > 0).then_some(max_iter))?;
        converged.write(out.converged);
        iterations.write(out.iterations);
        out_state.write(Box::into_raw(Box::new(EffhamNpad(out.state))));
        Ok(())
    })
}

/// Copy of the current operator as a new handle.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effham_npad_current(state: *const EffhamNpad, out: *mut *mut EffhamOperator) -> EffhamStatus {
    guard(|| {
        let op = handle(state, "state")?.0.current().clone();
        write_out(out, Box::into_raw(Box::new(EffhamOperator(op))), "out")
    })
}

/// Accumulated unitary, row-major, when tracking is on.
///
/// # Safety
/// `state` must be a live handle; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn effham_npad_unitary(
    state: *const EffhamNpad,
    out: *mut EffhamComplex,
    len: usize,
) -> EffhamStatus {
    guard(|| {
        let w = handle(state, "state")?
            .0
            .accumulated_unitary()
            .ok_or_else(|| Fail(EffhamStatus::InvalidArgument, "unitary tracking is off".into()))?;
        let n = w.nrows();
        let buf = slice_out(out, len, n * n, "out")?;
        for r in 0..n {
            for c in 0..n {
                buf[r * n + c] = w[(r, c)].into();
            }
        }
        Ok(())
    })
}

unsafe fn read_grid(t_start: f64, t_end: f64, samples: usize, k: usize, signals: *const f64) -> Result<ControlGrid, Fail> {
    let flat = slice_in(signals, k * samples, "signals")?;
    let sig = (0..k).map(|c| flat[c * samples..(c + 1) * samples].to_vec()).collect();
    Ok(ControlGrid::new(t_start, t_end, samples, sig)?)
}

/// Magnus evolver for `drift + sum_k u_k(t) controls[k]`. `signals` holds
/// `num_controls` rows of `samples` values on a uniform grid over
/// `[t_start, t_end]`. Operators are copied.
///
/// # Safety
/// `drift` and each `controls[k]` must be live handles; `signals` must hold
/// `num_controls * samples` values.
#[no_mangle]
pub unsafe extern "C" fn effham_evolver_new(
    drift: *const EffhamOperator,
    controls: *const *const EffhamOperator,
    num_controls: usize,
    t_start: f64,
    t_end: f64,
    samples: usize,
    signals: *const f64,
    out: *mut *mut EffhamEvolver,
) -> EffhamStatus {
    guard(|| {
        let drift = handle(drift, "drift")?.0.clone();
        let ctrl = slice_in(controls, num_controls, "controls")?
            .iter()
            .map(|&p| handle(p, "control").map(|h| h.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let ch = ControlledHamiltonian::new(drift, ctrl)?;
        let grid = read_grid(t_start, t_end, samples, num_controls, signals)?;
        let ev = MagnusEvolver::new(ch, grid)?;
        write_out(out, Box::into_raw(Box::new(EffhamEvolver(ev))), "out")
    })
}

/// # Safety
/// `ev` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn effham_evolver_free(ev: *mut EffhamEvolver) {
    if !ev.is_null() {
        drop(Box::from_raw(ev));
    }
}

/// Replaces the pulse; same layout as in [`effham_evolver_new`].
///
/// # Safety
/// `ev` must be a live handle; `signals` must hold `K * samples` values.
#[no_mangle]
pub unsafe extern "C" fn effham_evolver_update_controls(
    ev: *mut EffhamEvolver,
    t_start: f64,
    t_end: f64,
    samples: usize,
    signals: *const f64,
) -> EffhamStatus {
    guard(|| {
        let ev = handle_mut(ev, "ev")?;
        let k = ev.0.hamiltonian().num_controls();
        let grid = read_grid(t_start, t_end, samples, k, signals)?;
        ev.0.update_control_sigs(grid)?;
        Ok(())
    })
}

/// Evolves the normalized `psi0[0..dim]` through `intervals` Magnus
/// intervals and writes the final state to `out[0..dim]`.
///
/// # Safety
/// `ev` must be a live handle; `psi0` and `out` must each hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn effham_evolver_evolve(
    ev: *const EffhamEvolver,
    intervals: usize,
    psi0: *const EffhamComplex,
    dim: usize,
    out: *mut EffhamComplex,
) -> EffhamStatus {
    guard(|| {
        let ev = handle(ev, "ev")?;
        let psi = slice_in(psi0, dim, "psi0")?;
        let psi = StateVector::new(CVector::from_iterator(dim, psi.iter().map(|&z| z.into())))?;
        let traj = ev.0.evolve(intervals, &psi)?;
        let buf = slice_out(out, dim, dim, "out")?;
        for (b, z) in buf.iter_mut().zip(traj.final_state().amplitudes().iter()) {
            *b = (*z).into();
        }
        Ok(())
    })
}

/// Mott-lobe boundary `(mu* - omega) / g` between lobes `n` and `n + 1`
/// from NPAD on the on-site JC Hamiltonian.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effham_mott_boundary_npad(
    omega: f64,
    epsilon: f64,
    g: f64,
    n_max: usize,
    n: usize,
    out: *mut f64,
) -> EffhamStatus {
    guard(|| {
        let p = JCSiteParams { omega, epsilon, g, mu: 0.0, n_max };
        write_out(out, mott_lobe_boundary_npad(&p, n)?, "out")
    })
}

/// Closed-form boundary for comparison.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effham_mott_boundary_analytic(n: usize, detuning_over_g: f64, out: *mut f64) -> EffhamStatus {
    guard(|| {
        if n == 0 {
            return Err(Fail(EffhamStatus::InvalidArgument, "n must be >= 1".into()));
        }
        write_out(out, mott_lobe_boundary_analytic(n, detuning_over_g), "out")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping_covers_parse_and_io() {
        assert_eq!(status_of(&Error::Parse("x".into())), EffhamStatus::Parse);
        assert_eq!(status_of(&Error::Io("x".into())), EffhamStatus::Io);
        assert_eq!(status_of(&Error::ZeroCoupling { i: 0, j: 1 }), EffhamStatus::ZeroCoupling);
    }

    #[test]
    fn error_message_is_truncated_and_terminated() {
        set_message("abcdef".into());
        let mut buf = [1 as c_char; 4];
        let n = unsafe { effham_last_error_message(buf.as_mut_ptr(), buf.len()) };
        assert_eq!(n, 6);
        assert_eq!(buf, [b'a' as c_char, b'b' as c_char, b'c' as c_char, 0]);
        assert_eq!(unsafe { effham_last_error_message(ptr::null_mut(), 0) }, 6);
    }

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, EffhamStatus::Panic);
    }
}
