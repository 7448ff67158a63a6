use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{check_dim, Error, Result};
use crate::qcore::hermitian_eigen;

/// Smallest overlap eigenvalue for which the unthresholded Cholesky path is
/// attempted.
pub const CHOLESKY_MIN_EIGENVALUE: f64 = 1e-12;

/// Solution of `H v = E S v` in the retained subspace.
#[derive(Clone, Debug)]
pub struct GepSolution {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Coefficient vectors over the original basis, `v^dagger S v = 1`.
    pub coefficients: Vec<DVector<C64>>,
    /// Number of overlap eigenpairs kept.
    pub effective_dim: usize,
    /// Ratio of the largest to smallest retained overlap eigenvalue.
    pub condition_number: f64,
    /// Smallest eigenvalue of the full overlap matrix.
    pub min_overlap_eigenvalue: f64,
}

impl GepSolution {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Solves the generalized eigenproblem for Hermitian `h` and `s`.
///
/// Without a threshold, `s` must be positive definite and the problem is
/// reduced by congruence with its Cholesky factor. With a threshold `alpha`,
/// overlap eigenpairs below `alpha` are discarded and both matrices are
/// rotated into the remaining eigenvectors (scaled by `lambda^{-1/2}`) before
/// solving a standard Hermitian problem.
pub fn solve_gep(h: &DMatrix<C64>, s: &DMatrix<C64>, threshold: Option<f64>) -> Result<GepSolution> {
    let k = s.nrows();
    check_dim(k, s.ncols())?;
    check_dim(k, h.nrows())?;
    check_dim(k, h.ncols())?;
    if k == 0 {
        return Err(Error::InvalidInput("empty projected problem".into()));
    }
    let (lam, vecs) = hermitian_eigen(s.clone());
    let lam_min = lam[0];
    let lam_max = lam[k - 1];

    let (transform, effective_dim, condition_number) = match threshold {
        None => {
            if lam_min <= CHOLESKY_MIN_EIGENVALUE {
                return Err(Error::IllConditioned {
                    min_eigenvalue: lam_min,
                });
            }
            let chol = Cholesky::new(s.clone()).ok_or(Error::IllConditioned {
                min_eigenvalue: lam_min,
            })?;
            let l = chol.l();
            let linv = l
                .solve_lower_triangular(&DMatrix::<C64>::identity(k, k))
                .ok_or(Error::IllConditioned {
                    min_eigenvalue: lam_min,
                })?;
            (linv.adjoint(), k, lam_max / lam_min)
        }
        Some(alpha) => {
            if !(alpha >= 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidInput(format!("threshold must be non-negative, got {alpha}")));
            }
            let keep: Vec<usize> = (0..k).filter(|&i| lam[i] >= alpha && lam[i] > 0.0).collect();
            if keep.is_empty() {
                return Err(Error::EmptySubspace { threshold: alpha });
            }
            let m = keep.len();
            let x = DMatrix::<C64>::from_fn(k, m, |r, c| {
                let i = keep[c];
                vecs[(r, i)] / lam[i].sqrt()
            });
            let kept_min = lam[keep[0]];
            let kept_max = lam[keep[m - 1]];
            (x, m, kept_max / kept_min)
        }
    };

    // transform is k x m: columns span the retained space with X^dagger S X = I.
    let a = transform.adjoint() * h * &transform;
    let a = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let (w, u) = hermitian_eigen(a);
    let coeffs = transform * u;
    let coefficients = (0..effective_dim)
        .map(|c| coeffs.column(c).into_owned())
        .collect();
    Ok(GepSolution {
        eigenvalues: w,
        coefficients,
        effective_dim,
        condition_number,
        min_overlap_eigenvalue: lam_min,
    })
}

/// Noise-dependent threshold: the first band with `sigma < below` wins,
/// otherwise `otherwise`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSchedule {
    pub bands: Vec<ThresholdBand>,
    pub otherwise: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdBand {
    pub below: f64,
    pub alpha: f64,
}

impl ThresholdSchedule {
    pub fn alpha_for(&self, sigma: f64) -> f64 {
        self.bands
            .iter()
            .find(|b| sigma < b.below)
            .map(|b| b.alpha)
            .unwrap_or(self.otherwise)
    }
}
