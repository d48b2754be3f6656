//! Simulation toolkit for engineering gain on a qubit ground state.
//!
//! Homodyne-monitored stochastic master equations with instantaneous feedback
//! ([`feedback`]), adiabatic elimination of a fast-decaying manifold
//! ([`effective`]) and the resulting balanced gain/loss Hamiltonians
//! ([`pt`]) are all built on dense few-level operators ([`quantum`]) and
//! fixed-step integrators ([`lindblad`]).
//!
//! Everything is generic over the real scalar type; the `*64` aliases below
//! fix it to `f64`, which is what the experiments use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod effective;
pub mod error;
pub mod feedback;
pub mod lindblad;
pub mod pt;
pub mod quantum;
pub mod scalar;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;

pub type Operator64 = quantum::Operator<f64>;
pub type DensityMatrix64 = quantum::DensityMatrix<f64>;
pub type Ket64 = quantum::Ket<f64>;
pub type Operator32 = quantum::Operator<f32>;
pub type DensityMatrix32 = quantum::DensityMatrix<f32>;

pub type LindbladModel64 = lindblad::LindbladModel<f64>;
pub type NonHermitianModel64 = lindblad::NonHermitianModel<f64>;
pub type EvolutionResult64 = lindblad::EvolutionResult<f64>;

pub type FeedbackConfig64 = feedback::FeedbackConfig<f64>;
pub type EnsembleResult64 = feedback::EnsembleResult<f64>;

pub type PerturbativeModel64 = effective::PerturbativeModel<f64>;
pub type EffectiveModel64 = effective::EffectiveModel<f64>;

pub type LambdaParams64 = pt::LambdaParams<f64>;
pub type PtParams64 = pt::PtParams<f64>;
