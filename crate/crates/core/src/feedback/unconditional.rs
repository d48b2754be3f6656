//! Ensemble-averaged feedback dynamics and its single-collapse-operator form.

use super::config::FeedbackConfig;
use crate::error::{Error, Result};
use crate::lindblad::{add_dissipator, add_unitary, Generator};
use crate::quantum::{DensityMatrix, Operator};
use crate::scalar::{imag_unit, Real};

/// `c̃ = √γ₁ L − iG F`.
pub fn effective_collapse<T: Real>(cfg: &FeedbackConfig<T>) -> Operator<T> {
    let mut c = cfg.jump().scale_real(cfg.rate().sqrt());
    c.add_scaled(-imag_unit::<T>() * cfg.gain(), cfg.feedback());
    c
}

/// Hermitian correction `H_fb = (√γ₁ G / 2)(L†F + FL)` for which
/// `γ₁D[L] − iG√γ₁[F, L·+·L†] + G²D[F] = D[c̃] − i[H_fb, ·]`.
///
/// Vanishes exactly when `L†F = −FL`.
pub fn feedback_hamiltonian_correction<T: Real>(cfg: &FeedbackConfig<T>) -> Operator<T> {
    let l = cfg.jump();
    let f = cfg.feedback();
    let sym = &(&l.dagger() * f) + &(f * l);
    sym.scale_real(cfg.rate().sqrt() * cfg.gain() * T::lit(0.5))
}

/// Unconditional feedback master equation with a fixed system Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackMasterEquation<T> {
    cfg: FeedbackConfig<T>,
    hamiltonian: Operator<T>,
}

impl<T: Real> FeedbackMasterEquation<T> {
    pub fn new(cfg: FeedbackConfig<T>, hamiltonian: Operator<T>) -> Result<Self> {
        if hamiltonian.dim() != cfg.dim() {
            return Err(Error::DimensionMismatch {
                expected: cfg.dim(),
                found: hamiltonian.dim(),
            });
        }
        Ok(Self { cfg, hamiltonian })
    }

    pub fn config(&self) -> &FeedbackConfig<T> {
        &self.cfg
    }

    pub fn hamiltonian(&self) -> &Operator<T> {
        &self.hamiltonian
    }
}

impl<T: Real> Generator<T> for FeedbackMasterEquation<T> {
    fn dim(&self) -> usize {
        self.cfg.dim()
    }

    fn apply(&self, rho: &Operator<T>) -> Operator<T> {
        let cfg = &self.cfg;
        let mut out = Operator::zeros(rho.dim());
        add_unitary(&mut out, &self.hamiltonian, rho);
        add_dissipator(&mut out, cfg.rate(), cfg.jump(), rho);
        if cfg.gain() != T::zero() {
            let l_rho = cfg.jump() * rho;
            let x = &l_rho + &l_rho.dagger();
            let f = cfg.feedback();
            let comm = &(f * &x) - &(&x * f);
            out.add_scaled(-imag_unit::<T>() * (cfg.gain() * cfg.rate().sqrt()), &comm);
            add_dissipator(&mut out, cfg.gain() * cfg.gain(), f, rho);
        }
        out
    }
}

/// `−i[H,ρ] + γ₁D[L]ρ − iG√γ₁[F, Lρ + ρL†] + G²D[F]ρ`.
pub fn unconditional_feedback_rhs<T: Real>(
    rho: &DensityMatrix<T>,
    cfg: &FeedbackConfig<T>,
    hamiltonian: &Operator<T>,
) -> Result<Operator<T>> {
    if rho.dim() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim(),
            found: rho.dim(),
        });
    }
    let generator = FeedbackMasterEquation::new(cfg.clone(), hamiltonian.clone())?;
    Ok(generator.apply(rho.op()))
}

/// `D[c̃]ρ − i[H_fb, ρ]`, the single-channel rewrite of the feedback terms.
pub fn collapse_form_rhs<T: Real>(rho: &DensityMatrix<T>, cfg: &FeedbackConfig<T>) -> Result<Operator<T>> {
    if rho.dim() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim(),
            found: rho.dim(),
        });
    }
    let mut out = Operator::zeros(rho.dim());
    add_dissipator(&mut out, T::one(), &effective_collapse(cfg), rho.op());
    add_unitary(&mut out, &feedback_hamiltonian_correction(cfg), rho.op());
    Ok(out)
}
