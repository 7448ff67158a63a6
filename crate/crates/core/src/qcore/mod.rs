//! Core numerical kernel: state vectors, Pauli algebra, Pauli exponentials
//! and the diagonalization oracles.

mod diag;
mod lanczos;
mod pauli;
pub mod rng;
mod state;

pub use diag::{exact_diagonalize, hermitian_eigen, Spectrum, MAX_DENSE_BLOCK};
pub use lanczos::{ground_state, lanczos_lowest, low_spectrum, LanczosOptions};
pub use pauli::{apply_pauli_term_exp, expectation, Pauli, PauliString, PauliSum, PauliTerm};
pub(crate) use pauli::exp_masks;
pub use state::{haar_random_state, haar_random_state_with, inner_product, StateVector};

/// Largest supported system size.
pub const MAX_SITES: usize = 17;
