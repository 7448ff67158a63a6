//! Truncated ground-state preparation: imaginary-time evolution, adiabatic
//! state preparation and a variational eigensolver.
//!
//! ASP and ITE both default to the symmetric (forward then reverse) Trotter
//! product; the first-order forward product is available via [`Splitting`].
//! Terms are applied in the family's group order (X field, Z field, XX, YY,
//! ZZ where present), and within a group by ascending site index.

mod asp;
mod ite;
mod vqe;

pub use asp::{evolve_asp, run_asp, run_asp_from, AspConfig, AspOutcome};
pub use ite::{ite_step, run_ite, InitialState, IteConfig, IteOutcome, Splitting};
pub use vqe::{hva_apply, run_vqe, Hva, ProductState, VqeConfig, VqeOutcome};

use crate::error::{check_dim, Error, Result};
use crate::qcore::{Spectrum, StateVector};

/// Number of steps `total / step`, which must be an integer within `1e-9`.
pub fn step_count(total: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {step}")));
    }
    if !(total >= 0.0 && total.is_finite()) {
        return Err(Error::InvalidInput(format!("total time must be non-negative, got {total}")));
    }
    let q = total / step;
    let n = q.round();
    if (q - n).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "total time {total} is not an integer multiple of step {step}"
        )));
    }
    Ok(n as usize)
}

/// `|<e_k|psi_step>|^2` for every recorded state (rows) and eigenstate (columns).
pub fn track_eigenstate_overlaps(states: &[StateVector], spectrum: &Spectrum) -> Result<Vec<Vec<f64>>> {
    states
        .iter()
        .map(|s| {
            spectrum
                .eigenvectors
                .iter()
                .map(|e| {
                    check_dim(e.dim(), s.dim())?;
                    Ok(e.inner(s)?.norm_sqr())
                })
                .collect()
        })
        .collect()
}
