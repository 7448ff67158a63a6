//! Diagnostics: fidelities, RMS errors, gap curves and basis overlap
//! profiles.

use crate::error::{check_dim, Error, Result};
use crate::models::{ParamHamiltonian, SweepGrid};
use crate::par::map_indexed;
use crate::qcore::{low_spectrum, Spectrum, StateVector};
use crate::subspace::SubspaceBasis;

/// `|<a|b>|^2`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

fn check_lengths(cal: &[f64], exact: &[f64]) -> Result<()> {
    check_dim(exact.len(), cal.len())?;
    if exact.is_empty() {
        return Err(Error::InvalidInput("no target points".into()));
    }
    Ok(())
}

/// `sqrt(mean |E_cal - E_exact|^2)`.
pub fn rms_error(cal: &[f64], exact: &[f64]) -> Result<f64> {
    check_lengths(cal, exact)?;
    let s: f64 = cal.iter().zip(exact).map(|(c, e)| (c - e).powi(2)).sum();
    Ok((s / cal.len() as f64).sqrt())
}

/// Exact energies closer to zero than this have no defined relative error.
pub const ZERO_ENERGY_CUTOFF: f64 = 1e-12;

/// `|E_cal - E_exact| / |E_exact|` per point, `None` where `E_exact` is zero.
pub fn per_point_rel_error(cal: &[f64], exact: &[f64]) -> Result<Vec<Option<f64>>> {
    check_lengths(cal, exact)?;
    Ok(cal
        .iter()
        .zip(exact)
        .map(|(c, e)| {
            if e.abs() < ZERO_ENERGY_CUTOFF {
                None
            } else {
                Some((c - e).abs() / e.abs())
            }
        })
        .collect())
}

/// Relative RMS error with the number of points that entered it.
#[derive(Clone, Debug, PartialEq)]
pub struct RelRms {
    pub value: f64,
    /// Points in the aggregate.
    pub count: usize,
    /// Indices skipped because the exact energy vanished.
    pub excluded: Vec<usize>,
}

/// `sqrt(mean (|E_cal - E_exact| / |E_exact|)^2)` over points with nonzero
/// exact energy.
pub fn rel_rms_error(cal: &[f64], exact: &[f64]) -> Result<RelRms> {
    let per = per_point_rel_error(cal, exact)?;
    let mut excluded = Vec::new();
    let mut sum = 0.0;
    let mut count = 0;
    for (i, r) in per.iter().enumerate() {
        match r {
            Some(r) => {
                sum += r * r;
                count += 1;
            }
            None => excluded.push(i),
        }
    }
    if count == 0 {
        return Err(Error::Numeric("every exact energy is zero".into()));
    }
    Ok(RelRms {
        value: (sum / count as f64).sqrt(),
        count,
        excluded,
    })
}

/// `|E_1 - E_0|` at every sweep point.
pub fn energy_gap_curve(family: &ParamHamiltonian, sweep: &SweepGrid) -> Result<Vec<f64>> {
    let pts = sweep.points();
    map_indexed(pts.len(), |i| {
        let spec = low_spectrum(&family.instantiate(&pts[i])?, 2)?;
        Ok(spec.gap().abs())
    })
    .into_iter()
    .collect()
}

/// `F_i = sum_j |<e_i|phi_j>|^2` for every eigenstate `e_i` of `spectrum`.
pub fn basis_eigenstate_overlap(basis: &SubspaceBasis, spectrum: &Spectrum) -> Result<Vec<f64>> {
    spectrum
        .eigenvectors
        .iter()
        .map(|e| {
            check_dim(e.dim(), basis.dim())?;
            basis
                .vectors
                .iter()
                .map(|phi| Ok(e.inner(phi)?.norm_sqr()))
                .sum()
        })
        .collect()
}

/// Per-target comparison between computed and exact energies.
#[derive(Clone, Debug)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
    pub rms: f64,
    pub rel_rms: RelRms,
    pub min_fidelity: Option<f64>,
    pub max_fidelity: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ErrorRow {
    pub theta: Vec<f64>,
    pub computed: f64,
    pub exact: f64,
    pub abs_error: f64,
    pub rel_error: Option<f64>,
    pub fidelity: Option<f64>,
}

impl ErrorReport {
    /// Number of target points `p`.
    pub fn count(&self) -> usize {
        self.rows.len()
    }

    pub fn build(
        thetas: &[Vec<f64>],
        computed: &[f64],
        exact: &[f64],
        fidelities: Option<&[f64]>,
    ) -> Result<Self> {
        check_dim(thetas.len(), computed.len())?;
        if let Some(f) = fidelities {
            check_dim(thetas.len(), f.len())?;
        }
        let rel = per_point_rel_error(computed, exact)?;
        let rows = (0..thetas.len())
            .map(|i| ErrorRow {
                theta: thetas[i].clone(),
                computed: computed[i],
                exact: exact[i],
                abs_error: (computed[i] - exact[i]).abs(),
                rel_error: rel[i],
                fidelity: fidelities.map(|f| f[i]),
            })
            .collect();
        let fmin = fidelities.map(|f| f.iter().cloned().fold(f64::INFINITY, f64::min));
        let fmax = fidelities.map(|f| f.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        Ok(Self {
            rows,
            rms: rms_error(computed, exact)?,
            rel_rms: rel_rms_error(computed, exact)?,
            min_fidelity: fmin,
            max_fidelity: fmax,
        })
    }
}
