//! Truncated ground-state preparation on a dense state-vector simulator,
//! refined by eigenvector continuation.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`]: state vectors, Pauli strings, Pauli exponentials, dense and
//!   Lanczos diagonalization.
//! * [`models`]: parameterized spin Hamiltonians (XY chain, XXZ chain,
//!   kagome XXZ) and sweep grids.
//! * [`stateprep`]: Trotterized imaginary-time evolution, adiabatic state
//!   preparation and a Hamiltonian-variational-ansatz VQE.
//! * [`subspace`]: basis construction, projected matrices and the
//!   generalized eigenvalue problem with optional thresholding.
//! * [`noise`]: stochastic gate-noise trajectories, ensemble averaging with
//!   bootstrap errors and a readout confusion model.
//! * [`metrics`]: fidelities, RMS errors, gaps and basis overlap profiles.

pub mod error;
pub mod metrics;
pub mod models;
pub mod noise;
pub mod qcore;
pub mod stateprep;
pub mod subspace;

mod par;

pub use error::{Error, Result};
pub use models::{ParamHamiltonian, SweepGrid};
pub use qcore::{Pauli, PauliString, PauliTerm, Spectrum, StateVector};

pub use num_complex::Complex64 as C64;
