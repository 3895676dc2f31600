//! Complex Hermitian operators in dense or compressed-row sparse layout.
//!
//! Both layouts expose the same view used by the diagonalization and
//! evolution code: a real diagonal (energies) and a list of strictly
//! off-diagonal couplings.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dense::{CMatrix, CVector, ZERO};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance, scaled by the largest entry magnitude.
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Dense,
    Sparse,
}

/// Compressed-row storage: one column-sorted entry list per row, explicit
/// zeros never stored.
///
/// Keeping rows as separate lists means a two-row Givens update only
/// reallocates the rows it touches.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SparseRows {
    pub(crate) rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseRows {
    pub(crate) fn get(&self, r: usize, c: usize) -> Complex64 {
        let row = &self.rows[r];
        match row.binary_search_by_key(&c, |&(col, _)| col) {
            Ok(pos) => row[pos].1,
            Err(_) => ZERO,
        }
    }

    /// Stores `v` at (r, c), removing the entry when `v` is exactly zero.
    pub(crate) fn set(&mut self, r: usize, c: usize, v: Complex64) {
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |&(col, _)| col) {
            Ok(pos) => {
                if v == ZERO {
                    row.remove(pos);
                } else {
                    row[pos].1 = v;
                }
            }
            Err(pos) => {
                if v != ZERO {
                    row.insert(pos, (c, v));
                }
            }
        }
    }

    fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Storage {
    Dense(CMatrix),
    Sparse(SparseRows),
}

/// A complex Hermitian matrix (energies in units with hbar = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    pub(crate) dim: usize,
    pub(crate) storage: Storage,
}

/// An off-diagonal element connecting basis states `row < col`.
///
/// The lower-triangle entry is `H[col, row] = magnitude * exp(i * phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub row: usize,
    pub col: usize,
    pub magnitude: f64,
    pub phase: f64,
    lower: Complex64,
}

impl Coupling {
    /// Coupling whose lower-triangle entry `H[col, row]` is `lower`.
    pub fn new(row: usize, col: usize, lower: Complex64) -> Self {
        Self::from_lower(row, col, lower)
    }

    fn from_lower(row: usize, col: usize, lower: Complex64) -> Self {
        let mut phase = lower.arg();
        if phase <= -PI {
            phase += 2.0 * PI;
        }
        Coupling {
            row,
            col,
            magnitude: lower.norm(),
            phase,
            lower,
        }
    }

    /// The lower-triangle entry `H[col, row]`, exactly as stored.
    pub fn value(&self) -> Complex64 {
        self.lower
    }
}

/// Descending magnitude, ties broken by ascending (row, col).
pub(crate) fn coupling_order(a: &Coupling, b: &Coupling) -> Ordering {
    b.magnitude
        .partial_cmp(&a.magnitude)
        .unwrap_or(Ordering::Equal)
        .then_with(|| (a.row, a.col).cmp(&(b.row, b.col)))
}

impl HermitianOperator {
    /// Wraps a dense square matrix after checking Hermiticity.
    pub fn from_dense(m: CMatrix) -> Result<Self> {
        let op = Self::from_dense_unchecked(m)?;
        op.check_hermitian()?;
        Ok(op)
    }

    /// Like [`from_dense`](Self::from_dense) without the Hermiticity scan.
    /// Shape is still validated.
    pub fn from_dense_unchecked(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidOperator(format!(
                "matrix is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidOperator("dimension must be at least 1".into()));
        }
        Ok(HermitianOperator {
            dim: m.nrows(),
            storage: Storage::Dense(m),
        })
    }

    /// Builds a sparse operator from (row, col, value) triplets. Duplicates
    /// are summed and exact zeros dropped. Both triangles must be supplied.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let op = Self::from_triplets_unchecked(dim, triplets)?;
        op.check_hermitian()?;
        Ok(op)
    }

    pub fn from_triplets_unchecked<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        if dim == 0 {
            return Err(Error::InvalidOperator("dimension must be at least 1".into()));
        }
        let mut rows: Vec<Vec<(usize, Complex64)>> = Vec::new();
        rows.try_reserve_exact(dim)
            .map_err(|_| Error::OutOfMemory { size: dim })?;
        rows.resize_with(dim, Vec::new);
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::IndexOutOfRange { row: r, col: c, dim });
            }
            rows[r].push((c, v));
        }
        for row in rows.iter_mut() {
            canonicalize_row(row);
        }
        Ok(HermitianOperator {
            dim,
            storage: Storage::Sparse(SparseRows { rows }),
        })
    }

    /// Sparse real diagonal operator.
    pub fn from_real_diagonal(values: &[f64]) -> Result<Self> {
        Self::from_triplets_unchecked(
            values.len(),
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, i, Complex64::new(v, 0.0))),
        )
    }

    /// Reassembles an operator from its diagonal and coupling views.
    pub fn from_parts(diagonal: &[f64], couplings: &[Coupling], layout: Layout) -> Result<Self> {
        let n = diagonal.len();
        let mut trip: Vec<(usize, usize, Complex64)> = diagonal
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, i, Complex64::new(d, 0.0)))
            .collect();
        for c in couplings {
            let lower = c.value();
            trip.push((c.col, c.row, lower));
            trip.push((c.row, c.col, lower.conj()));
        }
        match layout {
            Layout::Sparse => Self::from_triplets(n, trip),
            Layout::Dense => {
                if n == 0 {
                    return Err(Error::InvalidOperator("dimension must be at least 1".into()));
                }
                let mut m = CMatrix::zeros(n, n);
                for (r, c, v) in trip {
                    if r >= n || c >= n {
                        return Err(Error::IndexOutOfRange { row: r, col: c, dim: n });
                    }
                    m[(r, c)] += v;
                }
                Self::from_dense(m)
            }
        }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layout(&self) -> Layout {
        match self.storage {
            Storage::Dense(_) => Layout::Dense,
            Storage::Sparse(_) => Layout::Sparse,
        }
    }

    /// Number of stored entries (all n^2 for dense).
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.len(),
            Storage::Sparse(s) => s.nnz(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        match &self.storage {
            Storage::Dense(m) => m[(r, c)],
            Storage::Sparse(s) => s.get(r, c),
        }
    }

    /// Visits every stored entry in row-major order.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, Complex64)) {
        match &self.storage {
            Storage::Dense(m) => {
                for r in 0..self.dim {
                    for c in 0..self.dim {
                        f(r, c, m[(r, c)]);
                    }
                }
            }
            Storage::Sparse(s) => {
                for (r, row) in s.rows.iter().enumerate() {
                    for &(c, v) in row {
                        f(r, c, v);
                    }
                }
            }
        }
    }

    /// Largest entry magnitude, `||H||_max`.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        self.for_each_entry(|_, _, v| m = m.max(v.norm()));
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(_) => {
                let mut m = CMatrix::zeros(self.dim, self.dim);
                self.for_each_entry(|r, c, v| m[(r, c)] = v);
                m
            }
        }
    }

    pub fn to_dense_operator(&self) -> HermitianOperator {
        HermitianOperator {
            dim: self.dim,
            storage: Storage::Dense(self.to_dense()),
        }
    }

    pub fn to_sparse_operator(&self) -> HermitianOperator {
        match &self.storage {
            Storage::Sparse(_) => self.clone(),
            Storage::Dense(_) => {
                let mut trip = Vec::new();
                self.for_each_entry(|r, c, v| trip.push((r, c, v)));
                Self::from_triplets_unchecked(self.dim, trip).expect("dimension already validated")
            }
        }
    }

    /// `acc += alpha * self`.
    pub fn add_scaled_to(&self, alpha: f64, acc: &mut CMatrix) {
        assert_eq!(acc.nrows(), self.dim);
        match &self.storage {
            Storage::Dense(m) => acc.zip_apply(m, |a, b| *a += b * alpha),
            Storage::Sparse(_) => self.for_each_entry(|r, c, v| acc[(r, c)] += v * alpha),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(v.len(), self.dim);
        match &self.storage {
            Storage::Dense(m) => m * v,
            Storage::Sparse(s) => CVector::from_iterator(
                self.dim,
                s.rows
                    .iter()
                    .map(|row| row.iter().map(|&(c, x)| x * v[c]).sum::<Complex64>()),
            ),
        }
    }

    /// Explicit scan of `H[i,j] = conj(H[j,i])` at tolerance
    /// [`HERMITICITY_TOL`] times the largest entry magnitude.
    pub fn check_hermitian(&self) -> Result<()> {
        let tol = HERMITICITY_TOL * self.max_abs();
        let mut violation = None;
        match &self.storage {
            Storage::Dense(m) => {
                'outer: for r in 0..self.dim {
                    for c in r..self.dim {
                        let dev = (m[(r, c)] - m[(c, r)].conj()).norm();
                        if dev > tol {
                            violation = Some((r, c, dev));
                            break 'outer;
                        }
                    }
                }
            }
            Storage::Sparse(s) => {
                'rows: for (r, row) in s.rows.iter().enumerate() {
                    for &(c, v) in row {
                        let dev = (v - s.get(c, r).conj()).norm();
                        if dev > tol {
                            violation = Some((r, c, dev));
                            break 'rows;
                        }
                    }
                }
            }
        }
        match violation {
            None => Ok(()),
            Some((row, col, deviation)) => Err(Error::HermiticityViolation {
                row,
                col,
                deviation,
                tolerance: tol,
            }),
        }
    }

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        let tol = HERMITICITY_TOL * self.max_abs();
        (0..self.dim)
            .map(|i| {
                let d = self.get(i, i);
                if d.im.abs() > tol {
                    Err(Error::HermiticityViolation {
                        row: i,
                        col: i,
                        deviation: d.im.abs(),
                        tolerance: tol,
                    })
                } else {
                    Ok(d.re)
                }
            })
            .collect()
    }

    /// One coupling per nonzero strictly-upper structural entry, in
    /// row-major order.
    pub fn couplings(&self) -> Vec<Coupling> {
        let mut out = Vec::new();
        self.for_each_upper(|r, c, lower| out.push(Coupling::from_lower(r, c, lower)));
        out
    }

    /// The `k` strongest couplings in descending magnitude.
    pub fn largest_couplings(&self, k: usize) -> Vec<Coupling> {
        let mut all = self.couplings();
        all.sort_by(coupling_order);
        all.truncate(k);
        all
    }

    /// Strongest coupling accepted by `keep`, using the same ordering as
    /// [`largest_couplings`](Self::largest_couplings).
    pub fn largest_coupling_where(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Option<Coupling> {
        let mut best: Option<Coupling> = None;
        self.for_each_upper(|r, c, lower| {
            if !keep(r, c) {
                return;
            }
            let cand = Coupling::from_lower(r, c, lower);
            if best.is_none_or(|b| coupling_order(&cand, &b) == Ordering::Less) {
                best = Some(cand);
            }
        });
        best
    }

    /// Calls `f(row, col, H[col,row])` for every nonzero entry with row < col.
    fn for_each_upper(&self, mut f: impl FnMut(usize, usize, Complex64)) {
        match &self.storage {
            Storage::Dense(m) => {
                for r in 0..self.dim {
                    for c in (r + 1)..self.dim {
                        let lower = m[(c, r)];
                        if lower != ZERO {
                            f(r, c, lower);
                        }
                    }
                }
            }
            Storage::Sparse(s) => {
                for (r, row) in s.rows.iter().enumerate() {
                    let start = row.partition_point(|&(c, _)| c <= r);
                    for &(c, upper) in &row[start..] {
                        // Prefer the stored lower entry; fall back to the
                        // conjugate when only one triangle is present.
                        let lower = match s.get(c, r) {
                            z if z != ZERO => z,
                            _ => upper.conj(),
                        };
                        f(r, c, lower);
                    }
                }
            }
        }
    }
}

fn canonicalize_row(row: &mut Vec<(usize, Complex64)>) {
    row.sort_by_key(|&(c, _)| c);
    let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
    for &(c, v) in row.iter() {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|&(_, v)| v != ZERO);
    *row = out;
}
