//! States, operators and the small-dimension linear algebra they need.
//!
//! Basis convention: `|0⟩` (index 0) is the ground state, `|1⟩` (index 1) the
//! excited state and `|a⟩` (index 2) the auxiliary level of the Λ-system.

mod eig;
mod linalg;
mod operator;
mod state;

pub use eig::{eig, eigenvalues, Eigen, MAX_EIGVEC_DIM, MAX_EIG_DIM};
pub use linalg::{
    eigh, expm, inverse_on_block, inverse_small, operator_norm, HermitianEigen, MAX_CONDITION,
};
pub use operator::{anticommutator, commutator, dagger, Operator};
pub use state::{expectation, ketbra, DensityMatrix, Ket};

pub(crate) use state::trace_product;
