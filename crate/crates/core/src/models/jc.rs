//! Jaynes-Cummings site and Jaynes-Cummings-Hubbard lattice.
//!
//! Site basis: index `2n + q` for photon number `n < n_max` and qubit state
//! `q` (0 = ground, 1 = excited). Polariton block `n >= 1` couples
//! `|n-1, e>` (index `2n - 1`) and `|n, g>` (index `2n`), so every block is a
//! contiguous index pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::npad::NpadState;
use crate::operator::HermitianOperator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JCSiteParams {
    /// Cavity frequency.
    pub omega: f64,
    /// Qubit frequency.
    pub epsilon: f64,
    /// Qubit-photon coupling.
    pub g: f64,
    /// Chemical potential.
    pub mu: f64,
    /// Cavity levels kept (photon numbers `0..n_max`).
    pub n_max: usize,
}

impl JCSiteParams {
    /// Parameters at a given `Delta / g`, with `Delta = omega - epsilon`.
    pub fn from_detuning(omega: f64, g: f64, detuning_over_g: f64, mu: f64, n_max: usize) -> Self {
        JCSiteParams {
            omega,
            epsilon: omega - detuning_over_g * g,
            g,
            mu,
            n_max,
        }
    }

    /// Cavity-qubit detuning `Delta = omega - epsilon`.
    pub fn detuning(&self) -> f64 {
        self.omega - self.epsilon
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 2 {
            return Err(Error::InvalidParameter(format!("n_max must be >= 2, got {}", self.n_max)));
        }
        if !(self.g >= 0.0) {
            return Err(Error::InvalidParameter(format!("g must be >= 0, got {}", self.g)));
        }
        if ![self.omega, self.epsilon, self.g, self.mu].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("site parameters must be finite".into()));
        }
        Ok(())
    }

    fn site_energy(&self, n: usize, q: usize) -> f64 {
        n as f64 * self.omega + q as f64 * self.epsilon - self.mu * (n + q) as f64
    }
}

/// `omega a^dag a + epsilon s+ s- + g (a^dag s- + s+ a) - mu (a^dag a + s+ s-)`.
pub fn jc_onsite_hamiltonian(p: &JCSiteParams) -> Result<HermitianOperator> {
    p.validate()?;
    let mut trip = Vec::with_capacity(4 * p.n_max);
    for n in 0..p.n_max {
        for q in 0..2 {
            trip.push((2 * n + q, 2 * n + q, Complex64::new(p.site_energy(n, q), 0.0)));
        }
        if n >= 1 {
            let v = Complex64::new(p.g * (n as f64).sqrt(), 0.0);
            trip.push((2 * n, 2 * n - 1, v));
            trip.push((2 * n - 1, 2 * n, v));
        }
    }
    HermitianOperator::from_triplets(p.dim(), trip)
}

/// Exact doublet energies `(E_{n+}, E_{n-})` of the bare JC block `n`:
/// `n omega - Delta/2 +- sqrt((Delta/2)^2 + n g^2)`, `Delta = omega - epsilon`.
pub fn jc_doublet_energies(n: usize, omega: f64, epsilon: f64, g: f64) -> (f64, f64) {
    let half = 0.5 * (omega - epsilon);
    let mean = n as f64 * omega - half;
    let root = (half * half + n as f64 * g * g).sqrt();
    (mean + root, mean - root)
}

/// Chemical-potential boundary `(mu - omega) / g` between the lobes with `n`
/// and `n + 1` polaritons per site, in closed form.
pub fn mott_lobe_boundary_analytic(n: usize, detuning_over_g: f64) -> f64 {
    let x = 0.5 * detuning_over_g;
    let x2 = x * x;
    let (a, b) = ((n as f64 + x2).sqrt(), ((n + 1) as f64 + x2).sqrt());
    // a - b rewritten to avoid cancellation when x is large.
    -1.0 / (a + b)
}

/// Index of the lower (antisymmetric) state of the block `(i, j)` after the
/// order-preserving rotation: the slot that held the smaller diagonal entry,
/// or `j` when the entries were equal.
fn antisymmetric_slot(before: &HermitianOperator, i: usize, j: usize) -> usize {
    if before.get(i, i).re < before.get(j, j).re {
        i
    } else {
        j
    }
}

fn block_pair(n: usize) -> (usize, usize) {
    (2 * n - 1, 2 * n)
}

fn check_boundary_args(p: &JCSiteParams, n: usize) -> Result<()> {
    p.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("lobe index n must be >= 1".into()));
    }
    if n + 1 >= p.n_max {
        return Err(Error::TruncationTooSmall {
            n_max: p.n_max,
            needed: n + 1,
        });
    }
    if !(p.g > 0.0) {
        return Err(Error::InvalidParameter("boundary in units of g needs g > 0".into()));
    }
    Ok(())
}

/// Antisymmetric energies `E^mu_{k-}` for `k = 1..=blocks`, from one
/// combined unitary built out of the per-block Givens rotations.
fn antisymmetric_energies(p: &JCSiteParams, blocks: usize) -> Result<Vec<f64>> {
    let h = jc_onsite_hamiltonian(p)?;
    let pairs: Vec<_> = (1..=blocks).map(block_pair).collect();
    let slots: Vec<usize> = pairs.iter().map(|&(i, j)| antisymmetric_slot(&h, i, j)).collect();
    let mut state = NpadState::new(h);
    state.eliminate_couplings(&pairs)?;
    let diag = state.current().diagonal()?;
    Ok(slots.into_iter().map(|s| diag[s]).collect())
}

/// Boundary `(mu* - omega) / g` between lobes `n` and `n + 1`, where `mu*`
/// equates `E^mu_{n-}` and `E^mu_{(n+1)-}`. Both energies come from NPAD on
/// the on-site Hamiltonian; the result does not depend on `p.mu`.
pub fn mott_lobe_boundary_npad(p: &JCSiteParams, n: usize) -> Result<f64> {
    check_boundary_args(p, n)?;
    let e = antisymmetric_energies(p, n + 1)?;
    Ok(boundary_from(p, e[n - 1], e[n]))
}

/// Boundaries for `n = 1..=count` from a single batched elimination.
pub fn mott_lobe_boundaries_npad(p: &JCSiteParams, count: usize) -> Result<Vec<f64>> {
    check_boundary_args(p, count.max(1))?;
    let e = antisymmetric_energies(p, count + 1)?;
    Ok((1..=count).map(|n| boundary_from(p, e[n - 1], e[n])).collect())
}

fn boundary_from(p: &JCSiteParams, lower_n: f64, lower_next: f64) -> f64 {
    // E^mu_k = E_k - mu k, so the crossing sits at mu* = E_{n+1} - E_n.
    let mu_star = lower_next - lower_n + p.mu;
    (mu_star - p.omega) / p.g
}

/// The same boundary through full dense diagonalization: eigenvectors are
/// labelled by the polariton sector carrying most of their weight and the
/// lowest eigenvalue of each sector is taken as `E_{k-}`.
pub fn mott_lobe_boundary_dense(p: &JCSiteParams, n: usize) -> Result<f64> {
    check_boundary_args(p, n)?;
    let h = jc_onsite_hamiltonian(p)?.to_dense();
    let eig = h.symmetric_eigen();
    let mut lowest = vec![f64::INFINITY; p.n_max + 1];
    for (col, &e) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(col);
        let mut weight = vec![0.0; p.n_max + 1];
        for (idx, amp) in v.iter().enumerate() {
            // Polariton number of basis state 2n + q is n + q.
            weight[idx / 2 + idx % 2] += amp.norm_sqr();
        }
        let sector = weight
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(k, _)| k)
            .unwrap();
        lowest[sector] = lowest[sector].min(e);
    }
    Ok(boundary_from(p, lowest[n], lowest[n + 1]))
}

/// Open chain of `sites` JC sites with photon hopping
/// `-kappa sum_<i,j> (a_i^dag a_j + h.c.)` and chemical potential on the
/// total polariton number. Dimension `(2 n_max)^sites`.
pub fn jch_lattice_hamiltonian(p: &JCSiteParams, sites: usize, kappa: f64) -> Result<HermitianOperator> {
    p.validate()?;
    if sites == 0 {
        return Err(Error::InvalidParameter("need at least one site".into()));
    }
    let d = p.dim();
    let dim = d
        .checked_pow(sites as u32)
        .filter(|&n| n <= 1 << 22)
        .ok_or_else(|| Error::InvalidParameter(format!("{sites} sites of dimension {d} is too large")))?;
    let digits = |mut x: usize| -> Vec<usize> {
        (0..sites)
            .map(|_| {
                let r = x % d;
                x /= d;
                r
            })
            .collect()
    };
    let pow: Vec<usize> = (0..sites).map(|s| d.pow(s as u32)).collect();
    let mut trip = Vec::new();
    for x in 0..dim {
        let ds = digits(x);
        let energy: f64 = ds.iter().map(|&s| p.site_energy(s / 2, s % 2)).sum();
        trip.push((x, x, Complex64::new(energy, 0.0)));
        for (site, &s) in ds.iter().enumerate() {
            let (n, q) = (s / 2, s % 2);
            // g a^dag s-: |n, e> -> |n+1, g>, and its conjugate.
            if q == 1 && n + 1 < p.n_max {
                let y = x - s * pow[site] + (2 * (n + 1)) * pow[site];
                let v = Complex64::new(p.g * ((n + 1) as f64).sqrt(), 0.0);
                trip.push((y, x, v));
                trip.push((x, y, v));
            }
        }
        for site in 0..sites.saturating_sub(1) {
            for (from, to) in [(site, site + 1), (site + 1, site)] {
                // a_to^dag a_from moves one photon.
                let (sf, st) = (ds[from], ds[to]);
                let (nf, nt) = (sf / 2, st / 2);
                if nf == 0 || nt + 1 >= p.n_max {
                    continue;
                }
                let y = x - 2 * pow[from] + 2 * pow[to];
                let amp = -kappa * ((nf as f64) * (nt + 1) as f64).sqrt();
                trip.push((y, x, Complex64::new(amp, 0.0)));
            }
        }
    }
    HermitianOperator::from_triplets(dim, trip)
}
