//! Iterative Schrieffer-Wolff block diagonalization by exact two-level
//! (Givens) rotations.
//!
//! Each rotation diagonalizes one 2x2 subspace `span{|i>, |j>}` exactly and is
//! applied as a unitary conjugation `U H U^H`. Iterating over the undesired
//! couplings, largest first, decouples a target subspace or, in the limit,
//! diagonalizes the whole operator (a Hermitian Jacobi iteration).

use std::collections::HashSet;

use num_complex::Complex64;

use crate::dense::{unitarity_defect, CMatrix, ZERO};
use crate::error::{Error, Result};
use crate::operator::{Coupling, HermitianOperator, SparseRows, Storage};

/// Entries produced by a rotation below this fraction of `||H||_max` are dropped.
pub const FILL_IN_DROP: f64 = 1e-15;

/// Accumulated-unitary drift bound, checked every [`DRIFT_CHECK_INTERVAL`] rotations.
pub const UNITARY_DRIFT_TOL: f64 = 1e-10;
pub const DRIFT_CHECK_INTERVAL: usize = 100;

/// A two-level unitary embedded at indices `i < j`.
///
/// On `span{|i>, |j>}` the rotation acts as
///
/// ```text
/// U = [[ c,             e^{-i phase} s ],
///      [ -e^{i phase} s, c             ]]
/// ```
///
/// with `c = cos_half`, `s = sin_half`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub i: usize,
    pub j: usize,
    pub cos_half: f64,
    pub sin_half: f64,
    pub phase: f64,
    /// Set when the two diagonal entries were equal; the rotation then uses
    /// the quarter-turn branch and ordering preservation is vacuous.
    pub degenerate: bool,
}

impl GivensRotation {
    pub fn identity(i: usize, j: usize) -> Self {
        GivensRotation {
            i,
            j,
            cos_half: 1.0,
            sin_half: 0.0,
            phase: 0.0,
            degenerate: false,
        }
    }

    /// Entries `(U_ii, U_ij, U_ji, U_jj)` of the embedded block.
    pub fn block(&self) -> [Complex64; 4] {
        let e = Complex64::from_polar(1.0, self.phase);
        let c = Complex64::new(self.cos_half, 0.0);
        [c, e.conj() * self.sin_half, -e * self.sin_half, c]
    }

    /// The full `dim x dim` unitary, for testing against dense conjugation.
    pub fn to_dense(&self, dim: usize) -> CMatrix {
        let mut u = CMatrix::identity(dim, dim);
        let [a, b, cc, d] = self.block();
        u[(self.i, self.i)] = a;
        u[(self.i, self.j)] = b;
        u[(self.j, self.i)] = cc;
        u[(self.j, self.j)] = d;
        u
    }
}

/// Builds the rotation that zeroes `H[i,j]` and `H[j,i]`.
///
/// With `delta = (H_ii - H_jj) / 2` and `H_ji = g e^{i phi}`, the rotation
/// angle satisfies `tan(theta) = g / delta`. Half-angle factors come from
/// `r = hypot(delta, g)` alone:
///
/// ```text
/// c = sqrt((1 + |delta| / r) / 2),   s = sign(delta) * g / (2 r c)
/// ```
///
/// `c >= 1/sqrt(2)` keeps both expressions free of cancellation, and the
/// sign choice keeps the larger diagonal entry in the same slot.
pub fn givens_rotation_matrix(op: &HermitianOperator, i: usize, j: usize) -> Result<GivensRotation> {
    check_pair(op.dim(), i, j)?;
    let lower = op.get(j, i);
    if lower == ZERO {
        return Err(Error::ZeroCoupling { i, j });
    }
    let delta = 0.5 * (op.get(i, i).re - op.get(j, j).re);
    let g = lower.norm();
    let r = delta.hypot(g);
    let cos_half = (0.5 * (1.0 + delta.abs() / r)).sqrt();
    let sign = if delta < 0.0 { -1.0 } else { 1.0 };
    let sin_half = sign * g / (2.0 * r * cos_half);
    Ok(GivensRotation {
        i,
        j,
        cos_half,
        sin_half,
        phase: lower.arg(),
        degenerate: delta == 0.0,
    })
}

fn check_pair(dim: usize, i: usize, j: usize) -> Result<()> {
    if i >= dim || j >= dim {
        return Err(Error::IndexOutOfRange { row: i, col: j, dim });
    }
    if i >= j {
        return Err(Error::InvalidParameter(format!(
            "rotation indices must satisfy i < j, got ({i}, {j})"
        )));
    }
    Ok(())
}

/// Returns `U H U^H`. Only rows and columns `i` and `j` change.
pub fn unitary_transformation(op: &HermitianOperator, rot: &GivensRotation) -> Result<HermitianOperator> {
    check_pair(op.dim(), rot.i, rot.j)?;
    let mut out = op.clone();
    let drop = FILL_IN_DROP * op.max_abs();
    rotate_in_place(&mut out, rot, drop);
    Ok(out)
}

/// New values of an (i-row, j-row) entry pair at a column k outside {i, j}.
#[inline]
fn rotate_pair(alpha: f64, beta: Complex64, hik: Complex64, hjk: Complex64) -> (Complex64, Complex64) {
    (hik * alpha + beta * hjk, -beta.conj() * hik + hjk * alpha)
}

#[inline]
fn chop(v: Complex64, drop: f64) -> Complex64 {
    if v.norm() < drop {
        ZERO
    } else {
        v
    }
}

/// Conjugated 2x2 block `(H'_ii, H'_jj, H'_ji)`.
fn rotate_block(alpha: f64, beta: Complex64, a: f64, b: f64, hij: Complex64) -> (f64, f64, Complex64) {
    let hji = hij.conj();
    let bb = beta.norm_sqr();
    let cross = 2.0 * alpha * (beta * hji).re;
    let new_i = alpha * alpha * a + cross + bb * b;
    let new_j = bb * a - cross + alpha * alpha * b;
    let bc = beta.conj();
    let new_ji = bc * alpha * (b - a) + hji * (alpha * alpha) - bc * bc * hij;
    (new_i, new_j, new_ji)
}

pub(crate) fn rotate_in_place(op: &mut HermitianOperator, rot: &GivensRotation, drop: f64) {
    let (i, j) = (rot.i, rot.j);
    let alpha = rot.cos_half;
    let beta = Complex64::from_polar(rot.sin_half, -rot.phase);
    match &mut op.storage {
        Storage::Dense(m) => {
            let n = m.nrows();
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let (nik, njk) = rotate_pair(alpha, beta, m[(i, k)], m[(j, k)]);
                let (nik, njk) = (chop(nik, drop), chop(njk, drop));
                m[(i, k)] = nik;
                m[(j, k)] = njk;
                m[(k, i)] = nik.conj();
                m[(k, j)] = njk.conj();
            }
            let (di, dj, hji) = rotate_block(alpha, beta, m[(i, i)].re, m[(j, j)].re, m[(i, j)]);
            let hji = chop(hji, drop);
            m[(i, i)] = Complex64::new(di, 0.0);
            m[(j, j)] = Complex64::new(dj, 0.0);
            m[(j, i)] = hji;
            m[(i, j)] = hji.conj();
        }
        Storage::Sparse(s) => rotate_sparse(s, i, j, alpha, beta, drop),
    }
}

fn rotate_sparse(s: &mut SparseRows, i: usize, j: usize, alpha: f64, beta: Complex64, drop: f64) {
    let row_i = std::mem::take(&mut s.rows[i]);
    let row_j = std::mem::take(&mut s.rows[j]);
    let lookup = |row: &[(usize, Complex64)], c: usize| match row.binary_search_by_key(&c, |&(k, _)| k) {
        Ok(p) => row[p].1,
        Err(_) => ZERO,
    };
    let (a, b, hij) = (lookup(&row_i, i).re, lookup(&row_j, j).re, lookup(&row_i, j));

    // Merge the column patterns of both rows, skipping the block itself.
    let mut touched: Vec<(usize, Complex64, Complex64)> = Vec::with_capacity(row_i.len() + row_j.len());
    let (mut p, mut q) = (0, 0);
    while p < row_i.len() || q < row_j.len() {
        let ci = row_i.get(p).map_or(usize::MAX, |e| e.0);
        let cj = row_j.get(q).map_or(usize::MAX, |e| e.0);
        let k = ci.min(cj);
        let hik = if ci == k {
            p += 1;
            row_i[p - 1].1
        } else {
            ZERO
        };
        let hjk = if cj == k {
            q += 1;
            row_j[q - 1].1
        } else {
            ZERO
        };
        if k == i || k == j {
            continue;
        }
        let (nik, njk) = rotate_pair(alpha, beta, hik, hjk);
        touched.push((k, chop(nik, drop), chop(njk, drop)));
    }

    let (di, dj, hji) = rotate_block(alpha, beta, a, b, hij);
    let hji = chop(hji, drop);
    let block_i = [(i, Complex64::new(di, 0.0)), (j, hji.conj())];
    let block_j = [(i, hji), (j, Complex64::new(dj, 0.0))];

    let build = |pick: &dyn Fn(&(usize, Complex64, Complex64)) -> Complex64, block: &[(usize, Complex64)]| {
        let mut row: Vec<(usize, Complex64)> = touched
            .iter()
            .map(|t| (t.0, pick(t)))
            .chain(block.iter().copied())
            .filter(|&(_, v)| v != ZERO)
            .collect();
        row.sort_unstable_by_key(|e| e.0);
        row
    };
    s.rows[i] = build(&|t| t.1, &block_i);
    s.rows[j] = build(&|t| t.2, &block_j);

    for &(k, nik, njk) in &touched {
        s.set(k, i, nik.conj());
        s.set(k, j, njk.conj());
    }
}

/// Working state of an NPAD run. Mutated in place by a single owner.
#[derive(Debug, Clone)]
pub struct NpadState {
    current: HermitianOperator,
    applied: usize,
    accumulated: Option<CMatrix>,
    scale: f64,
}

impl NpadState {
    pub fn new(op: HermitianOperator) -> Self {
        let scale = op.max_abs();
        NpadState {
            current: op,
            applied: 0,
            accumulated: None,
            scale,
        }
    }

    /// Also tracks the product `W` of all applied rotations, so that
    /// `current = W H_0 W^H`.
    pub fn with_unitary_tracking(op: HermitianOperator) -> Self {
        let dim = op.dim();
        let mut s = Self::new(op);
        s.accumulated = Some(CMatrix::identity(dim, dim));
        s
    }

    pub fn current(&self) -> &HermitianOperator {
        &self.current
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.current
    }

    pub fn applied(&self) -> usize {
        self.applied
    }

    pub fn accumulated_unitary(&self) -> Option<&CMatrix> {
        self.accumulated.as_ref()
    }

    /// `||H_0||_max` of the starting operator; fill-in and convergence
    /// thresholds are relative to it.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn apply(&mut self, rot: &GivensRotation) -> Result<()> {
        rotate_in_place(&mut self.current, rot, FILL_IN_DROP * self.scale);
        if let Some(w) = self.accumulated.as_mut() {
            let alpha = rot.cos_half;
            let beta = Complex64::from_polar(rot.sin_half, -rot.phase);
            for c in 0..w.ncols() {
                let (wi, wj) = rotate_pair(alpha, beta, w[(rot.i, c)], w[(rot.j, c)]);
                w[(rot.i, c)] = wi;
                w[(rot.j, c)] = wj;
            }
        }
        self.applied += 1;
        if self.applied.is_multiple_of(DRIFT_CHECK_INTERVAL) {
            if let Some(w) = &self.accumulated {
                let defect = unitarity_defect(w);
                if defect > UNITARY_DRIFT_TOL {
                    return Err(Error::UnitaryDrift { defect });
                }
            }
        }
        Ok(())
    }

    /// Rotates away the coupling between `i` and `j`.
    pub fn eliminate_coupling(&mut self, i: usize, j: usize) -> Result<GivensRotation> {
        let rot = givens_rotation_matrix(&self.current, i, j)?;
        self.apply(&rot)?;
        Ok(rot)
    }

    /// Eliminates several index-disjoint couplings with one combined unitary.
    ///
    /// All rotations are built from the operator as it stands on entry;
    /// disjoint rotations commute and none of them touches another's 2x2
    /// block, so applying them in any order realizes the same product.
    /// Pairs whose coupling is already zero are skipped.
    pub fn eliminate_couplings(&mut self, pairs: &[(usize, usize)]) -> Result<Vec<GivensRotation>> {
        let mut seen = HashSet::with_capacity(2 * pairs.len());
        for &(i, j) in pairs {
            check_pair(self.current.dim(), i, j)?;
            for idx in [i, j] {
                if !seen.insert(idx) {
                    return Err(Error::OverlappingPairs { index: idx });
                }
            }
        }
        let mut rots = Vec::with_capacity(pairs.len());
        for &(i, j) in pairs {
            match givens_rotation_matrix(&self.current, i, j) {
                Ok(r) => rots.push(r),
                Err(Error::ZeroCoupling { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        for r in &rots {
            self.apply(r)?;
        }
        Ok(rots)
    }
}

/// Which couplings an NPAD run has to remove.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// Every off-diagonal element.
    FullDiagonal,
    /// Couplings between the listed indices and the rest of the space.
    Subspace(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct NpadOutcome {
    pub state: NpadState,
    pub converged: bool,
    pub iterations: usize,
    /// Magnitude of the largest remaining relevant coupling.
    pub residual: f64,
}

pub fn default_max_iter(dim: usize) -> usize {
    20 * dim * dim
}

/// Repeatedly eliminates the largest relevant coupling until every relevant
/// magnitude is below `tol * ||H||_max` or `max_iter` rotations were applied.
///
/// Hitting `max_iter` is reported through `converged = false`, not an error.
pub fn npad_run(op: HermitianOperator, target: Target, tol: f64, max_iter: Option<usize>) -> Result<NpadOutcome> {
    run_state(NpadState::new(op), target, tol, max_iter)
}

pub fn run_state(mut state: NpadState, target: Target, tol: f64, max_iter: Option<usize>) -> Result<NpadOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let dim = state.current.dim();
    let max_iter = max_iter.unwrap_or_else(|| default_max_iter(dim));
    let in_target: Option<Vec<bool>> = match &target {
        Target::FullDiagonal => None,
        Target::Subspace(idx) => {
            let mut mask = vec![false; dim];
            for &k in idx {
                if k >= dim {
                    return Err(Error::IndexOutOfRange { row: k, col: k, dim });
                }
                mask[k] = true;
            }
            Some(mask)
        }
    };
    let relevant = |r: usize, c: usize| match &in_target {
        None => true,
        Some(mask) => mask[r] != mask[c],
    };
    let threshold = tol * state.scale;
    let mut iterations = 0;
    loop {
        let next: Option<Coupling> = state.current.largest_coupling_where(relevant);
        let residual = next.map_or(0.0, |c| c.magnitude);
        if residual < threshold || next.is_none() {
            return Ok(NpadOutcome {
                state,
                converged: true,
                iterations,
                residual,
            });
        }
        if iterations >= max_iter {
            return Ok(NpadOutcome {
                state,
                converged: false,
                iterations,
                residual,
            });
        }
        let c = next.unwrap();
        state.eliminate_coupling(c.row, c.col)?;
        iterations += 1;
    }
}
