//! Direct integrators of `d psi / dt = -i H(t) psi`, used as comparators for
//! the Magnus path.

use num_complex::Complex64;

use crate::dense::CVector;
use crate::error::{Error, Result};
use crate::magnus::{ControlGrid, ControlledHamiltonian, StateVector};

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

fn rhs(ch: &ControlledHamiltonian, u: &[f64], psi: &CVector) -> CVector {
    ch.apply(u, psi) * MINUS_I
}

/// Classical fixed-step fourth-order Runge-Kutta over the grid window, with
/// controls linearly interpolated between samples. Returns the state at each
/// of the `steps + 1` step boundaries.
///
/// The state is not renormalized; its norm drift is part of the method error.
pub fn rk4_evolve(
    ch: &ControlledHamiltonian,
    grid: &ControlGrid,
    steps: usize,
    psi0: &StateVector,
) -> Result<Vec<CVector>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("RK4 needs at least one step".into()));
    }
    if grid.num_controls() != ch.num_controls() {
        return Err(Error::InvalidGrid(format!(
            "grid carries {} signals for {} control operators",
            grid.num_controls(),
            ch.num_controls()
        )));
    }
    if psi0.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: psi0.dim(),
        });
    }
    let h = grid.duration() / steps as f64;
    let k = ch.num_controls();
    let (mut u0, mut um, mut u1) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    let hc = Complex64::new(h, 0.0);
    let mut psi = psi0.amplitudes().clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(psi.clone());
    for n in 0..steps {
        let t = grid.t_start() + n as f64 * h;
        grid.values_at(t, &mut u0);
        grid.values_at(t + 0.5 * h, &mut um);
        grid.values_at(t + h, &mut u1);
        let k1 = rhs(ch, &u0, &psi);
        let k2 = rhs(ch, &um, &(&psi + &k1 * (hc * 0.5)));
        let k3 = rhs(ch, &um, &(&psi + &k2 * (hc * 0.5)));
        let k4 = rhs(ch, &u1, &(&psi + &k3 * hc));
        psi += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * (hc / 6.0);
        out.push(psi.clone());
    }
    Ok(out)
}

/// Adaptive Dormand-Prince 5(4) integration from `t0` to `t1` with controls
/// given as a function of time. Step size is controlled on the max-norm of
/// the embedded error estimate against `tol`.
pub fn adaptive_evolve(
    ch: &ControlledHamiltonian,
    controls: impl Fn(f64, &mut [f64]),
    t0: f64,
    t1: f64,
    psi0: &CVector,
    tol: f64,
) -> Result<CVector> {
    if !(tol > 0.0) || !(t1 > t0) {
        return Err(Error::InvalidParameter("need tol > 0 and t1 > t0".into()));
    }
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut u = vec![0.0; ch.num_controls()];
    let mut f = |t: f64, psi: &CVector| {
        controls(t, &mut u);
        rhs(ch, &u, psi)
    };
    let mut t = t0;
    let mut psi = psi0.clone();
    let mut h = (t1 - t0) / 100.0;
    let mut steps = 0usize;
    while t < t1 {
        if steps > 10_000_000 {
            return Err(Error::InvalidParameter("adaptive integrator exceeded step budget".into()));
        }
        h = h.min(t1 - t);
        let mut k: Vec<CVector> = Vec::with_capacity(7);
        for s in 0..7 {
            let mut y = psi.clone();
            for (r, kr) in k.iter().enumerate() {
                if A[s][r] != 0.0 {
                    y.axpy(Complex64::new(h * A[s][r], 0.0), kr, Complex64::new(1.0, 0.0));
                }
            }
            k.push(f(t + C[s] * h, &y));
        }
        let mut y5 = psi.clone();
        let mut err = CVector::zeros(psi.len());
        for s in 0..7 {
            y5.axpy(Complex64::new(h * B5[s], 0.0), &k[s], Complex64::new(1.0, 0.0));
            err.axpy(Complex64::new(h * (B5[s] - B4[s]), 0.0), &k[s], Complex64::new(1.0, 0.0));
        }
        let e = err.iter().map(|z| z.norm()).fold(0.0, f64::max) / tol;
        if e <= 1.0 {
            t += h;
            psi = y5;
            steps += 1;
        }
        let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expm::expm_by_eigendecomposition;
    use crate::operator::HermitianOperator;

    fn sigma_x() -> HermitianOperator {
        HermitianOperator::from_triplets(
            2,
            vec![(0, 1, Complex64::new(1.0, 0.0)), (1, 0, Complex64::new(1.0, 0.0))],
        )
        .unwrap()
    }

    #[test]
    fn rk4_is_fourth_order() {
        let h0 = HermitianOperator::from_real_diagonal(&[0.5, -0.5]).unwrap();
        let ch = ControlledHamiltonian::new(h0, vec![sigma_x()]).unwrap();
        let grid = ControlGrid::from_fn(0.0, 2.0, 2001, 1, |t| vec![0.3 * t]).unwrap();
        let psi0 = StateVector::basis(2, 0);
        let reference = adaptive_evolve(&ch, |t, u| u[0] = 0.3 * t, 0.0, 2.0, psi0.amplitudes(), 1e-13).unwrap();
        let err = |n: usize| (rk4_evolve(&ch, &grid, n, &psi0).unwrap().last().unwrap() - &reference).norm();
        let (e1, e2) = (err(20), err(40));
        let order = (e1 / e2).log2();
        assert!(order > 3.7 && order < 4.3, "observed order {order}");
    }

    #[test]
    fn adaptive_matches_exact_constant_evolution() {
        let h = HermitianOperator::from_triplets(
            2,
            vec![
                (0, 0, Complex64::new(0.2, 0.0)),
                (0, 1, Complex64::new(0.7, 0.3)),
                (1, 0, Complex64::new(0.7, -0.3)),
            ],
        )
        .unwrap();
        let psi0 = StateVector::basis(2, 1);
        let exact = expm_by_eigendecomposition(&(h.to_dense() * Complex64::new(4.0, 0.0))) * psi0.amplitudes();
        let ch = ControlledHamiltonian::time_independent(h);
        let got = adaptive_evolve(&ch, |_, _| {}, 0.0, 4.0, psi0.amplitudes(), 1e-12).unwrap();
        assert!((got - exact).norm() < 1e-9);
    }

    #[test]
    fn rk4_rejects_zero_steps() {
        let ch = ControlledHamiltonian::time_independent(sigma_x());
        let grid = ControlGrid::new(0.0, 1.0, 2, vec![]).unwrap();
        assert!(rk4_evolve(&ch, &grid, 0, &StateVector::basis(2, 0)).is_err());
    }
}
