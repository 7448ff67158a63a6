use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::models::ParamHamiltonian;
use crate::qcore::{exp_masks, PauliString, StateVector};
use crate::stateprep::{evolve_asp, AspConfig};

/// Noise probability `p = a^2` of a noise gate whose amplitude
/// `a = sqrt(p)` is drawn as `|N(0, sigma)|`; capped at 1.
pub fn sample_probability<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let n = Normal::new(0.0, sigma).expect("finite sigma");
    n.sample(rng).powi(2).min(1.0)
}

/// Single-site factors of a one- or two-site Pauli string.
fn factors(r: &PauliString) -> Result<Vec<PauliString>> {
    let support = r.support();
    if support.is_empty() || support.len() > 2 {
        return Err(Error::InvalidInput(format!(
            "noise model covers one- and two-site gates, got {r}"
        )));
    }
    Ok(support
        .iter()
        .map(|&s| PauliString::single(r.nsites(), s, r.axes()[s]))
        .collect())
}

/// Effective operator of gate `R` followed by its noise gate, as a list of
/// `(amplitude, Pauli string)`. The noisy trajectory uses it in place of the
/// generator `R` of each Trotter factor:
///
/// * one site: `sqrt(1-p) R + sqrt(p) I`
/// * two sites: `sqrt(1-p1-p2-p1 p2) R1 R2 + sqrt(p1) R1 + sqrt(p2) R2 + sqrt(p1 p2) I`
///
/// The leading amplitude is clamped at zero if the probabilities overshoot.
pub fn effective_noisy_gate(r: &PauliString, probs: &[f64]) -> Result<Vec<(f64, PauliString)>> {
    let f = factors(r)?;
    let id = PauliString::identity(r.nsites());
    match (f.len(), probs) {
        (1, [p]) => Ok(vec![((1.0 - p).max(0.0).sqrt(), r.clone()), (p.sqrt(), id)]),
        (2, [p1, p2]) => Ok(vec![
            ((1.0 - p1 - p2 - p1 * p2).max(0.0).sqrt(), r.clone()),
            (p1.sqrt(), f[0].clone()),
            (p2.sqrt(), f[1].clone()),
            ((p1 * p2).sqrt(), id),
        ]),
        _ => Err(Error::DimensionMismatch {
            expected: f.len(),
            found: probs.len(),
        }),
    }
}

/// Applies the noisy version of the Trotter factor `exp(-i a R)` in place.
///
/// The gate's generator `R` is replaced by its effective noisy operator
/// (see [`effective_noisy_gate`]); the identity part only contributes a
/// global phase and is dropped. All remaining pieces act on the sites of `R`
/// with the same Pauli type and commute, so the factor splits exactly into
/// `exp(-i a g R1 R2) exp(-i a sqrt(p1) R1) exp(-i a sqrt(p2) R2)` for two
/// sites and `exp(-i a sqrt(1-p) R)` for one. The result stays unit norm.
pub fn apply_noisy_factor(state: &mut StateVector, r: &PauliString, angle: f64, probs: &[f64]) -> Result<()> {
    let (x, z) = (r.x_mask(), r.z_mask());
    let sites = (x | z).count_ones();
    let amps = state.amplitudes_mut();
    let rot = |amps: &mut [C64], x: usize, z: usize, a: f64| {
        let ph = if (x & z) == 0 { C64::new(1.0, 0.0) } else {
            // One Y factor per shared bit: i^{nY}.
            C64::new(0.0, 1.0).powu((x & z).count_ones())
        };
        exp_masks(amps, x, z, ph, C64::new(0.0, -a));
    };
    match (sites, probs) {
        (1, [p]) => rot(amps, x, z, angle * (1.0 - p).max(0.0).sqrt()),
        (2, [p1, p2]) => {
            let lo = 1usize << (x | z).trailing_zeros();
            let hi = (x | z) & !lo;
            rot(amps, x, z, angle * (1.0 - p1 - p2 - p1 * p2).max(0.0).sqrt());
            if *p1 > 0.0 {
                rot(amps, x & lo, z & lo, angle * p1.sqrt());
            }
            if *p2 > 0.0 {
                rot(amps, x & hi, z & hi, angle * p2.sqrt());
            }
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "noise model covers one- and two-site gates, got {r} with {} probabilities",
                probs.len()
            )))
        }
    }
    Ok(())
}

/// One noisy ASP trajectory: every Trotter factor `exp(-i a R)` is replaced
/// by its noisy version with fresh probabilities (one per site of `R`, see
/// [`sample_probability`]). With `sigma = 0` the result is identical to the
/// noiseless ramp.
pub fn noisy_asp_trajectory<R: Rng + ?Sized>(
    family: &ParamHamiltonian,
    cfg: &AspConfig,
    initial: &StateVector,
    sigma: f64,
    rng: &mut R,
) -> Result<StateVector> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!("sigma must be non-negative, got {sigma}")));
    }
    let mut probs = [0.0; 2];
    let mut apply = |state: &mut StateVector, gate: &PauliString, angle: f64| -> Result<()> {
        let sites = (gate.x_mask() | gate.z_mask()).count_ones() as usize;
        for p in probs.iter_mut().take(sites) {
            *p = sample_probability(rng, sigma);
        }
        apply_noisy_factor(state, gate, angle, &probs[..sites])
    };
    Ok(evolve_asp(family, cfg, initial, &mut apply)?.state)
}
