use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::{solve_gep, GepSolution, SubspaceBasis, SubspaceProjection};
use crate::error::{check_dim, Error, Result};
use crate::models::{ParamHamiltonian, SweepGrid};
use crate::par::map_indexed;
use crate::qcore::StateVector;

/// EC result at one target point.
#[derive(Clone, Debug)]
pub struct EcPoint {
    pub theta: Vec<f64>,
    pub energy: f64,
    pub solution: GepSolution,
    /// `sum_i v_i phi_i` for the lowest solution, normalized.
    pub state: StateVector,
}

impl EcPoint {
    pub fn ground_coefficients(&self) -> &DVector<C64> {
        &self.solution.coefficients[0]
    }
}

/// Solves the projected problem of `family` at `theta`.
pub fn solve_at(
    proj: &SubspaceProjection,
    family: &ParamHamiltonian,
    theta: &[f64],
    threshold: Option<f64>,
) -> Result<GepSolution> {
    let h = proj.assemble(&family.weights(theta)?)?;
    solve_gep(&h, &proj.overlap, threshold)
}

fn reconstruct(basis: &SubspaceBasis, v: &DVector<C64>) -> Result<StateVector> {
    check_dim(basis.len(), v.len())?;
    let mut s = StateVector::from_amplitudes(
        basis.vectors[0].nsites(),
        vec![C64::new(0.0, 0.0); basis.dim()],
    )?;
    for (c, phi) in v.iter().zip(&basis.vectors) {
        s.axpy(*c, phi)?;
    }
    s.normalized()
}

/// EC over `targets` with a basis projected from `family` itself.
pub fn ec_sweep(
    basis: &SubspaceBasis,
    proj: &SubspaceProjection,
    family: &ParamHamiltonian,
    targets: &SweepGrid,
    threshold: Option<f64>,
) -> Result<Vec<EcPoint>> {
    cross_family_sweep(basis, proj, family, targets, threshold)
}

/// EC on `target_family` reusing a projection computed for another family
/// with the same operator groups (only the weights differ).
pub fn cross_family_sweep(
    basis: &SubspaceBasis,
    proj: &SubspaceProjection,
    target_family: &ParamHamiltonian,
    targets: &SweepGrid,
    threshold: Option<f64>,
) -> Result<Vec<EcPoint>> {
    let labels = target_family.group_labels();
    if labels.len() != proj.labels.len() || labels.iter().zip(&proj.labels).any(|(a, b)| a != b) {
        return Err(Error::GroupMismatch(format!(
            "projection has {:?}, target family {} has {:?}",
            proj.labels,
            target_family.name(),
            labels
        )));
    }
    check_dim(1 << target_family.nsites(), basis.dim())?;
    let pts = targets.points();
    map_indexed(pts.len(), |i| {
        let sol = solve_at(proj, target_family, &pts[i], threshold)?;
        let state = reconstruct(basis, &sol.coefficients[0])?;
        Ok(EcPoint {
            theta: pts[i].clone(),
            energy: sol.eigenvalues[0],
            solution: sol,
            state,
        })
    })
    .into_iter()
    .collect()
}

/// Indices where an EC energy falls below the exact ground energy by more
/// than `tol`, which a noiseless Rayleigh-Ritz solve can never do.
pub fn check_variational_bound(ec: &[f64], exact: &[f64], tol: f64) -> Vec<usize> {
    ec.iter()
        .zip(exact)
        .enumerate()
        .filter(|(_, (e, x))| **e < **x - tol)
        .map(|(i, _)| i)
        .collect()
}
