use num_complex::Complex64 as C64;

use super::step_count;
use crate::error::{check_dim, Error, Result};
use crate::qcore::{haar_random_state, PauliSum, StateVector};

/// Starting state of an imaginary-time evolution.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// Equal superposition of computational basis states.
    Uniform,
    Haar { seed: u64 },
    Given(StateVector),
}

impl InitialState {
    pub fn build(&self, nsites: usize) -> Result<StateVector> {
        match self {
            InitialState::Uniform => Ok(StateVector::uniform(nsites)),
            InitialState::Haar { seed } => haar_random_state(nsites, *seed),
            InitialState::Given(s) => {
                check_dim(1 << nsites, s.dim())?;
                s.clone().normalized()
            }
        }
    }
}

/// Term ordering inside one imaginary-time step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Splitting {
    /// `exp(-dtau c_1 P_1) ... exp(-dtau c_m P_m)` in term order.
    Forward,
    /// Half steps forward then half steps in reverse order (Strang).
    #[default]
    Symmetric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IteConfig {
    pub dtau: f64,
    pub tau_max: f64,
    pub initial: InitialState,
    pub splitting: Splitting,
    /// Keep the state after every step (step 0 included).
    pub record_states: bool,
}

impl IteConfig {
    pub fn new(dtau: f64, tau_max: f64, initial: InitialState) -> Self {
        Self {
            dtau,
            tau_max,
            initial,
            splitting: Splitting::default(),
            record_states: false,
        }
    }

    pub fn steps(&self) -> Result<usize> {
        step_count(self.tau_max, self.dtau)
    }
}

#[derive(Clone, Debug)]
pub struct IteOutcome {
    pub state: StateVector,
    /// Energy before the first step and after each step.
    pub energies: Vec<f64>,
    pub states: Vec<StateVector>,
}

/// Trotterized imaginary-time evolution, renormalizing after every step.
///
/// A forward step applies `exp(-dtau c P)` for every term `c P` of `h` in
/// order. A symmetric step applies `exp(-dtau c P / 2)` forward and then
/// again in reverse; its fixed point has an `O(dtau^2)` bias instead of
/// `O(dtau)`.
pub fn run_ite(h: &PauliSum, cfg: &IteConfig) -> Result<IteOutcome> {
    let steps = cfg.steps()?;
    let mut state = cfg.initial.build(h.nsites())?;
    let mut energies = Vec::with_capacity(steps + 1);
    let mut states = Vec::new();
    energies.push(h.expectation(&state)?);
    if cfg.record_states {
        states.push(state.clone());
    }
    for step in 0..steps {
        ite_step(&mut state, h, cfg.dtau, cfg.splitting);
        state.normalize().map_err(|e| {
            Error::Numeric(format!(
                "imaginary-time state vanished at step {}: {e}; the start state is orthogonal to the low-energy manifold",
                step + 1
            ))
        })?;
        energies.push(h.expectation(&state)?);
        if cfg.record_states {
            states.push(state.clone());
        }
    }
    Ok(IteOutcome {
        state,
        energies,
        states,
    })
}

/// One unnormalized imaginary-time step.
pub fn ite_step(state: &mut StateVector, h: &PauliSum, dtau: f64, splitting: Splitting) {
    let amps = state.amplitudes_mut();
    match splitting {
        Splitting::Forward => {
            for t in h.terms() {
                t.string.apply_exp_in_place(amps, C64::new(-dtau * t.coefficient, 0.0));
            }
        }
        Splitting::Symmetric => {
            let half = 0.5 * dtau;
            for t in h.terms().iter().chain(h.terms().iter().rev()) {
                t.string.apply_exp_in_place(amps, C64::new(-half * t.coefficient, 0.0));
            }
        }
    }
}
