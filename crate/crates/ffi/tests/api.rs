use std::ffi::{c_char, CStr};
use std::ptr;

use effham_ffi::*;

fn c(re: f64, im: f64) -> EffhamComplex {
    EffhamComplex { re, im }
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        effham_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn dense(dim: usize, data: &[EffhamComplex]) -> *mut EffhamOperator {
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { effham_operator_from_dense(dim, data.as_ptr(), &mut op) }, EffhamStatus::Ok);
    op
}

#[test]
fn two_level_rotation_through_handles() {
    let op = dense(2, &[c(3.0, 0.0), c(0.0, -0.8), c(0.0, 0.8), c(1.0, 0.0)]);
    unsafe {
        let mut st = ptr::null_mut();
        assert_eq!(effham_npad_new(op, true, &mut st), EffhamStatus::Ok);
        assert_eq!(effham_npad_eliminate_coupling(st, 0, 1), EffhamStatus::Ok);
        let mut cur = ptr::null_mut();
        assert_eq!(effham_npad_current(st, &mut cur), EffhamStatus::Ok);
        let mut d = [0.0; 2];
        assert_eq!(effham_operator_diagonal(cur, d.as_mut_ptr(), 2), EffhamStatus::Ok);
        let r = 1.64f64.sqrt();
        assert!((d[0] - 2.0 - r).abs() < 1e-12 && (d[1] - 2.0 + r).abs() < 1e-12);
        let mut off = c(1.0, 1.0);
        assert_eq!(effham_operator_get(cur, 1, 0, &mut off), EffhamStatus::Ok);
        assert!(off.re.abs() < 1e-15 && off.im.abs() < 1e-15);
        let mut w = [c(0.0, 0.0); 4];
        assert_eq!(effham_npad_unitary(st, w.as_mut_ptr(), 4), EffhamStatus::Ok);
        let norm: f64 = w.iter().map(|z| z.re * z.re + z.im * z.im).sum();
        assert!((norm - 2.0).abs() < 1e-14);
        effham_operator_free(cur);
        effham_npad_free(st);
        effham_operator_free(op);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut op = ptr::null_mut();
        let bad = [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(
            effham_operator_from_dense(2, bad.as_ptr(), &mut op),
            EffhamStatus::HermiticityViolation
        );
        assert!(op.is_null());
        assert!(!last_error().is_empty());

        let op = dense(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let mut st = ptr::null_mut();
        assert_eq!(effham_npad_new(op, false, &mut st), EffhamStatus::Ok);
        assert_eq!(effham_npad_eliminate_coupling(st, 0, 1), EffhamStatus::ZeroCoupling);
        assert_eq!(effham_npad_eliminate_coupling(st, 0, 5), EffhamStatus::IndexOutOfRange);
        let mut w = [c(0.0, 0.0); 4];
        assert_eq!(effham_npad_unitary(st, w.as_mut_ptr(), 4), EffhamStatus::InvalidArgument);
        let mut d = [0.0; 1];
        assert_eq!(effham_operator_diagonal(op, d.as_mut_ptr(), 1), EffhamStatus::BufferTooSmall);
        assert_eq!(effham_operator_dim(ptr::null(), ptr::null_mut()), EffhamStatus::NullPointer);
        assert_eq!(effham_npad_eliminate_couplings(st, [0usize, 1, 0, 1].as_ptr(), 2), EffhamStatus::OverlappingPairs);
        effham_npad_free(st);
        effham_operator_free(op);
        // Freeing null is a no-op.
        effham_operator_free(ptr::null_mut());
    }
}

#[test]
fn sparse_npad_run_reaches_eigenvalues() {
    let rows = [0usize, 1, 1, 2, 0, 1, 2];
    let cols = [1usize, 0, 2, 1, 0, 1, 2];
    let vals = [c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.3), c(0.0, -0.3), c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)];
    unsafe {
        let mut op = ptr::null_mut();
        assert_eq!(
            effham_operator_from_triplets(3, 7, rows.as_ptr(), cols.as_ptr(), vals.as_ptr(), &mut op),
            EffhamStatus::Ok
        );
        let mut st = ptr::null_mut();
        let (mut converged, mut iters) = (false, 0usize);
        assert_eq!(
            effham_npad_run(op, ptr::null(), 0, 1e-12, 0, &mut st, &mut converged, &mut iters),
            EffhamStatus::Ok
        );
        assert!(converged && iters > 0);
        let mut cur = ptr::null_mut();
        effham_npad_current(st, &mut cur);
        let mut d = [0.0; 3];
        effham_operator_diagonal(cur, d.as_mut_ptr(), 3);
        let trace: f64 = d.iter().sum();
        assert!(trace.abs() < 1e-12);
        let sq: f64 = d.iter().map(|x| x * x).sum();
        // Frobenius norm is invariant: 1 + 1 + 2 * (0.25 + 0.09).
        assert!((sq - 2.68).abs() < 1e-10);
        effham_operator_free(cur);
        effham_npad_free(st);
        effham_operator_free(op);
    }
}

#[test]
fn expm_and_evolver() {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let x = dense(2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let zero = dense(2, &[c(0.0, 0.0); 4]);
    unsafe {
        let scaled = dense(2, &[c(0.0, 0.0), c(half_pi, 0.0), c(half_pi, 0.0), c(0.0, 0.0)]);
        let mut u = [c(0.0, 0.0); 4];
        assert_eq!(effham_expm_unitary(scaled, u.as_mut_ptr(), 4), EffhamStatus::Ok);
        assert!((u[1].im + 1.0).abs() < 1e-14 && u[0].re.abs() < 1e-14);
        effham_operator_free(scaled);

        // Constant unit drive on sigma_x over [0, pi/2] flips the state.
        let samples = 11;
        let signal = vec![1.0; samples];
        let controls = [x as *const EffhamOperator];
        let mut ev = ptr::null_mut();
        assert_eq!(
            effham_evolver_new(zero, controls.as_ptr(), 1, 0.0, half_pi, samples, signal.as_ptr(), &mut ev),
            EffhamStatus::Ok
        );
        let psi0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let mut out = [c(0.0, 0.0); 2];
        assert_eq!(effham_evolver_evolve(ev, 5, psi0.as_ptr(), 2, out.as_mut_ptr()), EffhamStatus::Ok);
        assert!((out[1].im + 1.0).abs() < 1e-12);
        assert_eq!(effham_evolver_evolve(ev, 3, psi0.as_ptr(), 2, out.as_mut_ptr()), EffhamStatus::GridMismatch);

        let half = vec![0.5; samples];
        assert_eq!(effham_evolver_update_controls(ev, 0.0, half_pi, samples, half.as_ptr()), EffhamStatus::Ok);
        assert_eq!(effham_evolver_evolve(ev, 10, psi0.as_ptr(), 2, out.as_mut_ptr()), EffhamStatus::Ok);
        let p1 = out[1].re * out[1].re + out[1].im * out[1].im;
        assert!((p1 - 0.5).abs() < 1e-12);
        let unnormalized = [c(2.0, 0.0), c(0.0, 0.0)];
        assert_ne!(effham_evolver_evolve(ev, 10, unnormalized.as_ptr(), 2, out.as_mut_ptr()), EffhamStatus::Ok);
        effham_evolver_free(ev);
        effham_operator_free(x);
        effham_operator_free(zero);
    }
}

#[test]
fn mott_boundaries() {
    let (mut npad, mut exact) = (0.0, 0.0);
    unsafe {
        assert_eq!(effham_mott_boundary_npad(1.0, 1.0, 0.1, 10, 3, &mut npad), EffhamStatus::Ok);
        assert_eq!(effham_mott_boundary_analytic(3, 0.0, &mut exact), EffhamStatus::Ok);
        assert!(((npad - exact) / exact).abs() < 1e-9);
        assert_eq!(
            effham_mott_boundary_npad(1.0, 1.0, 0.1, 4, 3, &mut npad),
            EffhamStatus::TruncationTooSmall
        );
    }
}
