use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::models::ParamHamiltonian;
use crate::qcore::StateVector;
use crate::subspace::SubspaceProjection;

/// Readout errors of the ancilla measured in a Hadamard test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfusionModel {
    /// Probability of reading 1 when the ancilla is in 0.
    pub p01: f64,
    /// Probability of reading 0 when the ancilla is in 1.
    pub p10: f64,
    /// Upper bound of the extra biased `1 -> 0` decay probability; each
    /// estimate draws its own value uniformly from `[0, pt1_max]`.
    pub pt1_max: f64,
}

impl ConfusionModel {
    pub fn new(p01: f64, p10: f64, pt1_max: f64) -> Result<Self> {
        for (name, p) in [("p01", p01), ("p10", p10), ("pt1_max", pt1_max)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(Self { p01, p10, pt1_max })
    }

    pub fn is_ideal(&self) -> bool {
        self.p01 == 0.0 && self.p10 == 0.0 && self.pt1_max == 0.0
    }
}

/// Perturbs one Hadamard-test estimate `x = 2 P(0) - 1` in `[-1, 1]`.
///
/// `P(0)` goes through the confusion map
/// `P0' = (1 - p01) P0 + p10 (1 - P0)`, then the decay
/// `P0'' = P0' + p_T1 (1 - P0')`. Values or probabilities that leave their
/// range are clamped and counted in `clamped`.
pub fn perturb_expectation<R: Rng + ?Sized>(
    x: f64,
    model: &ConfusionModel,
    rng: &mut R,
    clamped: &mut usize,
) -> f64 {
    let mut x = x;
    if x.abs() > 1.0 {
        *clamped += 1;
        x = x.clamp(-1.0, 1.0);
    }
    let pt1 = if model.pt1_max > 0.0 {
        rng.random_range(0.0..=model.pt1_max)
    } else {
        0.0
    };
    let p0 = 0.5 * (1.0 + x);
    let p0 = (1.0 - model.p01) * p0 + model.p10 * (1.0 - p0);
    let mut p0 = p0 + pt1 * (1.0 - p0);
    if !(0.0..=1.0).contains(&p0) {
        *clamped += 1;
        p0 = p0.clamp(0.0, 1.0);
    }
    2.0 * p0 - 1.0
}

fn perturb_complex<R: Rng + ?Sized>(
    z: C64,
    scale: f64,
    model: &ConfusionModel,
    rng: &mut R,
    clamped: &mut usize,
) -> C64 {
    let re = perturb_expectation(z.re / scale, model, rng, clamped) * scale;
    let im = perturb_expectation(z.im / scale, model, rng, clamped) * scale;
    C64::new(re, im)
}

/// Applies readout error to every estimated matrix element.
///
/// Each element is treated as the outcome of Hadamard tests (one for the
/// real part, one for the imaginary part) whose expectation is the element
/// divided by `scale`; overlaps use scale 1 and group `g` uses
/// `group_scales[g]` (its term count bounds the element). The unit diagonal
/// of the overlap matrix is known exactly and left alone. Upper-triangle
/// elements are perturbed and mirrored so the matrices stay Hermitian.
/// Returns the perturbed projection and the number of clamping events.
pub fn apply_measurement_error<R: Rng + ?Sized>(
    proj: &SubspaceProjection,
    group_scales: &[f64],
    model: &ConfusionModel,
    rng: &mut R,
) -> Result<(SubspaceProjection, usize)> {
    check_dim(proj.group_mats.len(), group_scales.len())?;
    if model.is_ideal() {
        return Ok((proj.clone(), 0));
    }
    let mut clamped = 0;
    let k = proj.k();
    let mut perturb = |m: &DMatrix<C64>, scale: f64, diag: bool, rng: &mut R| {
        let mut out = m.clone();
        for i in 0..k {
            for j in i..k {
                if i == j {
                    if diag {
                        let re = perturb_expectation(m[(i, i)].re / scale, model, rng, &mut clamped);
                        out[(i, i)] = C64::new(re * scale, 0.0);
                    }
                } else {
                    let z = perturb_complex(m[(i, j)], scale, model, rng, &mut clamped);
                    out[(i, j)] = z;
                    out[(j, i)] = z.conj();
                }
            }
        }
        out
    };
    let overlap = perturb(&proj.overlap, 1.0, false, rng);
    let group_mats = proj
        .group_mats
        .iter()
        .zip(group_scales)
        .map(|(m, &s)| perturb(m, s.max(1.0), true, rng))
        .collect();
    Ok((
        SubspaceProjection {
            overlap,
            group_mats,
            labels: proj.labels.clone(),
        },
        clamped,
    ))
}

/// Energy of `state` under `family` at `theta` when each group expectation
/// is estimated through the confusion model (scale = group term count).
pub fn measured_energy<R: Rng + ?Sized>(
    state: &StateVector,
    family: &ParamHamiltonian,
    theta: &[f64],
    model: &ConfusionModel,
    rng: &mut R,
) -> Result<(f64, usize)> {
    let w = family.weights(theta)?;
    let mut clamped = 0;
    let mut e = 0.0;
    for ((op, g), wg) in family.group_operators().iter().zip(family.groups()).zip(w) {
        let scale = (g.terms.len() as f64).max(1.0);
        let x = op.expectation(state)? / scale;
        e += wg * scale * perturb_expectation(x, model, rng, &mut clamped);
    }
    Ok((e, clamped))
}
