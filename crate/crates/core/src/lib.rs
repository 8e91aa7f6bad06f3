//! Exact-diagonalization toolkit for the Z₂ quantum memory on a periodic spin chain.
//!
//! The crate covers the transverse-field Ising Hamiltonian and its stabilizer
//! algebra, low-lying eigenpairs, the variance-covariance matrix (VCM) witness of
//! macroscopic superposition for pure states, its thermal counterpart for Gibbs
//! states, and the nearest-neighbour resonating-valence-bond state.

// `!(x > 0.0)` is used throughout so that NaN is rejected along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigensolve;
pub mod error;
pub mod linalg;
pub mod macroscopicity;
pub mod model;
pub mod pauli;
pub mod rvb;
pub mod thermal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use pauli::{AdditiveOperator, PauliAxis, PauliString, StateVector};
