//! Dense state and operator numerics.

mod haar;
mod linalg;
mod spin;
mod state;

pub use haar::{haar_orthogonal, haar_sample, haar_unitary, EnsembleKind, EnsembleSpec, RngStream, HAAR_DIM_CAP};
pub use linalg::{
    dagger, eigh, ensure_hermitian, hermiticity_deviation, identity, mat_exp_hermitian, max_abs_diff, HermitianEigen,
    HERMITIAN_TOL,
};
pub use spin::{dicke_state, embed_symmetric_operator, spin_operator, symmetric_isometry, Axis};
pub use state::{
    measure_subsystem, partial_trace, prepare_with_outcome, DensityMatrix, Measurement, StateRef, StateVector,
    DEFAULT_P_MIN,
};

/// `log2(dim)` when `dim` is a power of two.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}
