//! Stochastic gate noise on adiabatic trajectories, ensemble estimates of the
//! projected matrices, and a readout confusion model.

mod ensemble;
mod measurement;
mod trajectory;

pub use ensemble::{
    bootstrap_stderr, ensemble_projected_matrices, noisy_basis, pairwise_mean, EnsembleProjection,
    NoiseConfig,
};
pub use measurement::{apply_measurement_error, measured_energy, perturb_expectation, ConfusionModel};
pub use trajectory::{apply_noisy_factor, effective_noisy_gate, noisy_asp_trajectory, sample_probability};
