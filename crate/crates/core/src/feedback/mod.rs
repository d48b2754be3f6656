//! Homodyne monitoring with instantaneous current feedback.
//!
//! Conditional states follow the stochastic master equation and are kicked by
//! `exp(−iGF dy)` after every step. Averaging trajectories recovers the
//! unconditional feedback master equation implemented in [`FeedbackMasterEquation`].

mod config;
mod ensemble;
mod noise;
mod sme;
mod unconditional;

pub use config::{CurrentSignal, FeedbackConfig, Scheme};
pub use ensemble::{ensemble_average, EnsembleResult};
pub use noise::{wiener_increment, NoiseStream};
pub use sme::{feedback_step, photocurrent_increment, run_trajectory, sme_step};
pub use unconditional::{
    collapse_form_rhs, effective_collapse, feedback_hamiltonian_correction, unconditional_feedback_rhs,
    FeedbackMasterEquation,
};
