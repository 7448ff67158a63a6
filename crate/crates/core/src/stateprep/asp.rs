use num_complex::Complex64 as C64;

use super::{step_count, Splitting};
use crate::error::{check_dim, Result};
use crate::models::ParamHamiltonian;
use crate::qcore::{ground_state, PauliString, StateVector};

/// Linear ramp from `start` to `end` over `t_max` in steps of `dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct AspConfig {
    pub dt: f64,
    pub t_max: f64,
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub splitting: Splitting,
    /// Keep `(theta_j, state_j)` after every step.
    pub snapshots: bool,
}

impl AspConfig {
    pub fn new(dt: f64, t_max: f64, start: Vec<f64>, end: Vec<f64>) -> Self {
        Self {
            dt,
            t_max,
            start,
            end,
            splitting: Splitting::default(),
            snapshots: false,
        }
    }

    pub fn steps(&self) -> Result<usize> {
        step_count(self.t_max, self.dt)
    }

    /// Parameter vector at step `j` of `n`: `start + j (end - start) / n`.
    pub fn point(&self, j: usize, n: usize) -> Vec<f64> {
        self.start
            .iter()
            .zip(&self.end)
            .map(|(&a, &b)| if j == n { b } else { a + j as f64 * (b - a) / n as f64 })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct AspOutcome {
    pub state: StateVector,
    pub snapshots: Vec<(Vec<f64>, StateVector)>,
}

/// Adiabatic ramp starting from the exact ground state at `cfg.start`.
pub fn run_asp(family: &ParamHamiltonian, cfg: &AspConfig) -> Result<AspOutcome> {
    family.check_point(&cfg.start)?;
    let (_, gs) = ground_state(&family.instantiate(&cfg.start)?)?;
    run_asp_from(family, cfg, &gs)
}

/// Adiabatic ramp from a caller-supplied initial state.
pub fn run_asp_from(family: &ParamHamiltonian, cfg: &AspConfig, initial: &StateVector) -> Result<AspOutcome> {
    evolve_asp(family, cfg, initial, &mut |state, p, angle| {
        p.apply_exp_in_place(state.amplitudes_mut(), C64::new(0.0, -angle));
        Ok(())
    })
}

/// Core ASP loop. Step `j = 1..=N` applies the Trotter product of
/// `exp(-i dt w_g(theta_j) c P)` over every term, with
/// `theta_j = start + j (end - start) / N`. Each factor `exp(-i a P)` is
/// handed to `apply_factor(state, P, a)`; the noise model hooks in here.
pub fn evolve_asp(
    family: &ParamHamiltonian,
    cfg: &AspConfig,
    initial: &StateVector,
    apply_factor: &mut dyn FnMut(&mut StateVector, &PauliString, f64) -> Result<()>,
) -> Result<AspOutcome> {
    let n = cfg.steps()?;
    family.check_point(&cfg.start)?;
    family.check_point(&cfg.end)?;
    check_dim(1 << family.nsites(), initial.dim())?;
    let mut state = initial.clone();
    let mut snapshots = Vec::new();
    for j in 1..=n {
        let theta = cfg.point(j, n);
        let w = family.weights(&theta)?;
        let factors = family
            .groups()
            .iter()
            .zip(&w)
            .filter(|(_, &wg)| wg != 0.0)
            .flat_map(|(g, &wg)| g.terms.iter().map(move |t| (wg * t.coefficient, &t.string)));
        match cfg.splitting {
            Splitting::Forward => {
                for (c, p) in factors {
                    apply_factor(&mut state, p, cfg.dt * c)?;
                }
            }
            Splitting::Symmetric => {
                let factors: Vec<_> = factors.collect();
                for &(c, p) in factors.iter().chain(factors.iter().rev()) {
                    apply_factor(&mut state, p, 0.5 * cfg.dt * c)?;
                }
            }
        }
        if cfg.snapshots {
            snapshots.push((theta, state.clone()));
        }
    }
    Ok(AspOutcome { state, snapshots })
}
