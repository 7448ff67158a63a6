//! Eigenvector continuation: reduced bases from prepared training states,
//! projected operators and the generalized eigenvalue problem
//! `H v = E S v`.

mod basis;
mod gep;
mod projection;
mod sweep;

pub use basis::{build_basis, krylov_basis, prepare_state, PrepMethod, SubspaceBasis};
pub use gep::{solve_gep, GepSolution, ThresholdBand, ThresholdSchedule, CHOLESKY_MIN_EIGENVALUE};
pub use projection::{project_operators, SubspaceProjection};
pub use sweep::{
    check_variational_bound, cross_family_sweep, ec_sweep, solve_at, EcPoint,
};
