//! Operator-orbit quantum metrology.
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`]: symplectic Pauli strings, local phase-embedding generators
//!   and Pauli sums.
//! - [`orbit`]: Lie closures of Pauli generating sets, equivalence-class
//!   censuses and operator weight distributions over classes.
//! - [`quantum`]: dense states, Haar sampling, partial traces, projective
//!   measurement and the spin (symmetric-subspace) representation.
//! - [`qfi`]: pure/mixed/multi-parameter Fisher information and every
//!   closed-form average the simulations are checked against.
//! - [`protocols`]: end-to-end sensing protocols (Haar-Ramsey,
//!   twist-untwist, time averages, projected ensembles, noise and loss).
//! - [`sweep`]: scaling sweeps, exponent fits and CSV/JSON emission.
//!
//! Qubit convention used everywhere: site 0 is the leftmost tensor factor,
//! i.e. the most significant bit of a computational-basis index, and
//! `Z|0> = |0>`.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod orbit;
pub mod pauli;
pub mod protocols;
pub mod qfi;
pub mod quantum;
pub mod sweep;

pub use error::{Error, Result};

/// Complex scalar used by all dense numerics.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type Matrix = ndarray::Array2<C64>;

/// Default cap on the number of qubits expanded into dense matrices.
pub const DEFAULT_DENSE_QUBIT_CAP: usize = 12;
