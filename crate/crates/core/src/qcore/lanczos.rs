//! Matrix-free restarted Lanczos for a few low-lying eigenpairs.
//!
//! Used where a dense diagonalization is too expensive (large clusters,
//! hundreds of sweep points) and only the bottom of the spectrum matters.
//! Degenerate levels are resolved by deflating previously converged
//! eigenvectors out of every Krylov vector.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::state::{dot, haar_random_state_with};
use crate::qcore::{exact_diagonalize, rng, PauliSum, Spectrum, StateVector};

/// Dimension at or below which [`low_spectrum`] diagonalizes densely.
const DENSE_CUTOFF: usize = 512;

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Krylov vectors kept per restart cycle.
    pub krylov_dim: usize,
    /// Residual norm `|H x - E x|` accepted as converged.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 60,
            tol: 1e-9,
            max_restarts: 400,
            seed: 0x1a2c,
        }
    }
}

/// The `k` lowest eigenpairs of `h`, ascending.
///
/// Small operators are diagonalized densely; larger ones use
/// [`lanczos_lowest`].
pub fn low_spectrum(h: &PauliSum, k: usize) -> Result<Spectrum> {
    if h.dim() <= DENSE_CUTOFF {
        let mut spec = exact_diagonalize(h)?;
        spec.eigenvalues.truncate(k);
        spec.eigenvectors.truncate(k);
        return Ok(spec);
    }
    lanczos_lowest(h, k, LanczosOptions::default())
}

/// Ground energy and a ground state of `h`.
pub fn ground_state(h: &PauliSum) -> Result<(f64, StateVector)> {
    let mut spec = low_spectrum(h, 1)?;
    Ok((spec.eigenvalues[0], spec.eigenvectors.swap_remove(0)))
}

pub fn lanczos_lowest(h: &PauliSum, k: usize, opts: LanczosOptions) -> Result<Spectrum> {
    let k = k.min(h.dim());
    let mut found: Vec<StateVector> = Vec::with_capacity(k);
    let mut energies = Vec::with_capacity(k);
    for level in 0..k {
        let mut r = rng::stream(opts.seed, &[rng::tag::LANCZOS, level as u64]);
        let start = haar_random_state_with(h.nsites(), &mut r);
        let (e, v) = lowest_deflated(h, &found, start, &opts)?;
        energies.push(e);
        found.push(v);
    }
    let mut spec = Spectrum {
        eigenvalues: energies,
        eigenvectors: found,
    };
    spec.sort();
    Ok(spec)
}

fn orthogonalize(w: &mut [C64], against: &[&[C64]]) {
    for _ in 0..2 {
        for v in against {
            let c = dot(v, w);
            for (a, b) in w.iter_mut().zip(v.iter()) {
                *a -= c * b;
            }
        }
    }
}

fn norm(w: &[C64]) -> f64 {
    w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn lowest_deflated(
    h: &PauliSum,
    deflate: &[StateVector],
    start: StateVector,
    opts: &LanczosOptions,
) -> Result<(f64, StateVector)> {
    let dim = h.dim();
    let defl: Vec<&[C64]> = deflate.iter().map(|s| s.amplitudes()).collect();
    let mut x = start.into_amplitudes();
    orthogonalize(&mut x, &defl);
    let nx = norm(&x);
    if nx < 1e-12 {
        return Err(Error::Numeric("Lanczos start vector lies in the deflated space".into()));
    }
    x.iter_mut().for_each(|a| *a /= nx);

    let m = opts.krylov_dim.min(dim - deflate.len()).max(1);
    let mut hw = vec![C64::new(0.0, 0.0); dim];
    let mut last = (f64::NAN, f64::INFINITY);
    for _ in 0..opts.max_restarts {
        let mut basis: Vec<Vec<C64>> = vec![x.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            h.apply_into(&basis[j], &mut hw);
            let a = dot(&basis[j], &hw).re;
            alpha.push(a);
            let mut w = hw.clone();
            let mut against: Vec<&[C64]> = defl.clone();
            against.extend(basis.iter().map(|v| v.as_slice()));
            orthogonalize(&mut w, &against);
            let b = norm(&w);
            if j + 1 == m || b < 1e-12 {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|z| *z /= b);
            basis.push(w);
        }
        let n = alpha.len();
        let t = DMatrix::<f64>::from_fn(n, n, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty tridiagonal");
        let mut ritz = vec![C64::new(0.0, 0.0); dim];
        for (i, v) in basis.iter().take(n).enumerate() {
            let y = eig.eigenvectors[(i, imin)];
            for (r, a) in ritz.iter_mut().zip(v) {
                *r += a * y;
            }
        }
        orthogonalize(&mut ritz, &defl);
        let nr = norm(&ritz);
        ritz.iter_mut().for_each(|a| *a /= nr);
        h.apply_into(&ritz, &mut hw);
        let e = dot(&ritz, &hw).re;
        let res = hw
            .iter()
            .zip(&ritz)
            .map(|(a, b)| (a - b * e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if res < opts.tol || n < m {
            return Ok((e, StateVector::from_raw(h.nsites(), ritz)));
        }
        last = (e, res);
        x = ritz;
    }
    Err(Error::Numeric(format!(
        "Lanczos did not converge: energy {:.12}, residual {:.3e}",
        last.0, last.1
    )))
}
