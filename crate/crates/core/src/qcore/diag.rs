//! Dense exact diagonalization used as the ground-truth oracle.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::{PauliSum, StateVector};

/// Largest dense block handed to the Hermitian eigensolver.
pub const MAX_DENSE_BLOCK: usize = 4096;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> &StateVector {
        &self.eigenvectors[0]
    }

    /// `E_1 - E_0`, or 0 for a one-level spectrum.
    pub fn gap(&self) -> f64 {
        if self.eigenvalues.len() < 2 {
            0.0
        } else {
            self.eigenvalues[1] - self.eigenvalues[0]
        }
    }

    pub(crate) fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| self.eigenvalues[a].total_cmp(&self.eigenvalues[b]));
        self.eigenvalues = idx.iter().map(|&i| self.eigenvalues[i]).collect();
        let mut vecs: Vec<Option<StateVector>> =
            std::mem::take(&mut self.eigenvectors).into_iter().map(Some).collect();
        self.eigenvectors = idx.iter().map(|&i| vecs[i].take().unwrap()).collect();
    }
}

/// Full spectrum of `h` by dense diagonalization.
///
/// Magnetization-conserving operators are split into fixed-popcount blocks
/// first, which keeps 12-site kagome clusters tractable. Fails with a
/// capacity error if any block would exceed [`MAX_DENSE_BLOCK`].
pub fn exact_diagonalize(h: &PauliSum) -> Result<Spectrum> {
    let n = h.nsites();
    let dim = h.dim();
    let sectors: Vec<Vec<usize>> = if dim > 64 && h.conserves_magnetization() {
        let mut s = vec![Vec::new(); n + 1];
        for b in 0..dim {
            s[b.count_ones() as usize].push(b);
        }
        s
    } else {
        vec![(0..dim).collect()]
    };
    let largest = sectors.iter().map(Vec::len).max().unwrap_or(0);
    if largest > MAX_DENSE_BLOCK {
        return Err(Error::Capacity {
            what: format!("dense block of dimension {largest} for {n} sites"),
            limit: MAX_DENSE_BLOCK,
        });
    }
    let real = h.is_real();
    let mut spec = Spectrum {
        eigenvalues: Vec::with_capacity(dim),
        eigenvectors: Vec::with_capacity(dim),
    };
    for sector in &sectors {
        let local = block_matrix(h, sector);
        let (vals, vecs) = if real {
            hermitian_eigen_real(&local.map(|z| z.re))
        } else {
            hermitian_eigen(local)
        };
        for (k, &e) in vals.iter().enumerate() {
            let mut amps = vec![C64::new(0.0, 0.0); dim];
            for (li, &b) in sector.iter().enumerate() {
                amps[b] = vecs[(li, k)];
            }
            spec.eigenvalues.push(e);
            spec.eigenvectors.push(StateVector::from_raw(n, amps));
        }
    }
    spec.sort();
    Ok(spec)
}

fn block_matrix(h: &PauliSum, sector: &[usize]) -> DMatrix<C64> {
    let dim = h.dim();
    let m = sector.len();
    let mut pos = vec![usize::MAX; dim];
    for (i, &b) in sector.iter().enumerate() {
        pos[b] = i;
    }
    let mut out = DMatrix::<C64>::zeros(m, m);
    for t in h.terms() {
        let x = t.string.x_mask();
        for (col, &b) in sector.iter().enumerate() {
            let row = pos[b ^ x];
            if row != usize::MAX {
                out[(row, col)] += t.string.factor(b) * t.coefficient;
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix, ascending.
pub fn hermitian_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m);
    let n = eig.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

fn hermitian_eigen_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| C64::new(eig.eigenvectors[(r, idx[c])], 0.0));
    (vals, vecs)
}
