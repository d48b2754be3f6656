//! Balanced gain/loss qubit Hamiltonians.
//!
//! Monitoring the natural decay `|1⟩ → |0⟩` and feeding the current back can
//! never put gain on `|0⟩` ([`no_ground_gain_witness`]). Driving `|0⟩ → |a⟩`
//! off a fast-decaying auxiliary level `|a⟩ → |1⟩` instead produces an
//! effective pump `L_eff = i√γ_eff |1⟩⟨0|`, and feedback on that channel
//! yields gain `+iG√γ_eff |0⟩⟨0|`, balanced against the natural loss by
//! [`feedback_gain_for_balance`].

use num_complex::Complex;

use crate::effective::{effective_hamiltonian, effective_jumps, split_hamiltonian, PerturbativeModel, SubspaceSplit};
use crate::error::{invalid, Error, Result};
use crate::feedback::FeedbackConfig;
use crate::lindblad::Channel;
use crate::quantum::Operator;
use crate::scalar::{c, Real};

const GROUND: [usize; 2] = [0, 1];
const AUX: usize = 2;

/// Parameters of the driven Λ-system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaParams<T> {
    /// Ω_a, drive on `|0⟩ ↔ |a⟩`.
    pub omega_a: T,
    /// Δ_a.
    pub delta_a: T,
    /// γ_a, decay `|a⟩ → |1⟩`.
    pub gamma_a: T,
    /// γ₁₀, natural decay `|1⟩ → |0⟩`.
    pub gamma_10: T,
}

impl<T: Real> LambdaParams<T> {
    pub fn new(omega_a: T, delta_a: T, gamma_a: T, gamma_10: T) -> Result<Self> {
        if !(omega_a >= T::zero()) || !omega_a.is_finite() {
            return Err(invalid("omega_a", format!("must be finite and non-negative, got {omega_a}")));
        }
        if !delta_a.is_finite() {
            return Err(invalid("delta_a", "must be finite"));
        }
        if !(gamma_a > T::zero()) || !gamma_a.is_finite() {
            return Err(invalid("gamma_a", format!("must be finite and positive, got {gamma_a}")));
        }
        if !(gamma_10 >= T::zero()) || !gamma_10.is_finite() {
            return Err(invalid("gamma_10", format!("must be finite and non-negative, got {gamma_10}")));
        }
        Ok(Self {
            omega_a,
            delta_a,
            gamma_a,
            gamma_10,
        })
    }
}

/// Coupling Ω and gain/loss rate γ of `Ωσ_x − iγ|1⟩⟨1| + iγ|0⟩⟨0|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtParams<T> {
    pub omega: T,
    pub gamma: T,
}

impl<T: Real> PtParams<T> {
    pub fn new(omega: T, gamma: T) -> Result<Self> {
        if !(omega >= T::zero()) || !omega.is_finite() {
            return Err(invalid("omega_sys", format!("must be finite and non-negative, got {omega}")));
        }
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(invalid("gamma", format!("must be finite and non-negative, got {gamma}")));
        }
        Ok(Self { omega, gamma })
    }
}

/// `Ω_a² / γ_a`.
pub fn gamma_eff<T: Real>(p: &LambdaParams<T>) -> T {
    p.omega_a * p.omega_a / p.gamma_a
}

/// Feedback strength that makes the ground-state gain equal the excited-state
/// loss: `G = (γ₁₀ + γ_eff) / (2√γ_eff)`.
pub fn feedback_gain_for_balance<T: Real>(gamma_eff: T, gamma_10: T) -> Result<T> {
    if !(gamma_eff > T::zero()) {
        return Err(invalid("gamma_eff", format!("balance needs a positive pump rate, got {gamma_eff}")));
    }
    Ok((gamma_10 + gamma_eff) / (T::lit(2.0) * gamma_eff.sqrt()))
}

fn check_qubit<T: Real>(op: &Operator<T>) -> Result<()> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: op.dim(),
        });
    }
    Ok(())
}

fn check_hermitian<T: Real>(op: &Operator<T>) -> Result<()> {
    let residual = op.hermitian_residual();
    if !(residual <= T::tol(1e-12) * T::one().max(op.max_abs())) {
        return Err(Error::NotHermitian {
            residual: residual.as_f64(),
        });
    }
    Ok(())
}

/// `−(G/2)(L†F − FL)`.
fn feedback_term<T: Real>(gain: T, l: &Operator<T>, f: &Operator<T>) -> Operator<T> {
    (&(&l.dagger() * f) - &(f * l)).scale_real(-gain / T::lit(2.0))
}

/// `H_sys − (iγ₁/2)L†L − (G√γ₁/2)(L†F − FL)`, the no-jump generator of
/// feedback on the monitored channel with the `F²` shift dropped.
pub fn natural_feedback_hamiltonian<T: Real>(cfg: &FeedbackConfig<T>, h_sys: &Operator<T>) -> Result<Operator<T>> {
    if h_sys.dim() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim(),
            found: h_sys.dim(),
        });
    }
    let l = cfg.jump();
    let mut h = h_sys.clone();
    h.add_scaled(c(T::zero(), -cfg.rate() / T::lit(2.0)), &(&l.dagger() * l));
    h += &feedback_term(cfg.gain() * cfg.rate().sqrt(), l, cfg.feedback());
    Ok(h)
}

/// Magnitude of the `|0⟩⟨0|` entry that feedback adds to the no-jump
/// Hamiltonian. Zero whenever the monitored channel is `|0⟩⟨1|`.
pub fn no_ground_gain_witness<T: Real>(cfg: &FeedbackConfig<T>) -> T {
    let zero = Operator::zeros(cfg.dim());
    natural_feedback_hamiltonian(cfg, &zero).expect("dimensions agree")[(0, 0)].norm()
}

/// The Λ-system split into the qubit ground manifold and `|a⟩`, with the
/// single channel `γ_a, |1⟩⟨a|`.
pub fn lambda_model<T: Real>(p: &LambdaParams<T>) -> PerturbativeModel<T> {
    let mut h = Operator::zeros(3);
    h[(AUX, 0)] = c(p.omega_a / T::lit(2.0), T::zero());
    h[(0, AUX)] = c(p.omega_a / T::lit(2.0), T::zero());
    h[(AUX, AUX)] = c(p.delta_a, T::zero());
    let split = SubspaceSplit::new(3, &GROUND, &[AUX]).expect("fixed split is valid");
    let channel = Channel {
        rate: p.gamma_a,
        jump: Operator::transition(3, 1, AUX),
    };
    split_hamiltonian(&h, &split, &[channel]).expect("Λ channel maps |a⟩ into the ground manifold")
}

/// Qubit operators `(H_eff, L_eff)` from eliminating `|a⟩`.
pub fn lambda_reduction<T: Real>(p: &LambdaParams<T>) -> Result<(Operator<T>, Operator<T>)> {
    let model = lambda_model(p);
    let h = effective_hamiltonian(&model)?.submatrix(&GROUND);
    let l = effective_jumps(&model)?.remove(0).submatrix(&GROUND);
    Ok((h, l))
}

/// `H_sys + H_eff − (i/2)L_eff†L_eff − (G/2)(L_eff†F − FL_eff) − (iγ₁₀/2)|1⟩⟨1|`
/// with `H_eff`, `L_eff` from [`lambda_reduction`]. For `Δ_a = 0` and
/// `F = σ_x` this is `H_sys − (iγ₁₀/2)|1⟩⟨1| + i(G√γ_eff − γ_eff/2)|0⟩⟨0|`.
pub fn effective_feedback_hamiltonian<T: Real>(
    p: &LambdaParams<T>,
    gain: T,
    f: &Operator<T>,
    h_sys: &Operator<T>,
) -> Result<Operator<T>> {
    check_qubit(f)?;
    check_qubit(h_sys)?;
    check_hermitian(f)?;
    let (h_eff, l_eff) = lambda_reduction(p)?;
    let mut h = h_sys + &h_eff;
    h.add_scaled(c(T::zero(), T::lit(-0.5)), &(&l_eff.dagger() * &l_eff));
    h += &feedback_term(gain, &l_eff, f);
    h[(1, 1)] += c(T::zero(), -p.gamma_10 / T::lit(2.0));
    Ok(h)
}

/// `H_sys − (iγ₁₀/2)|1⟩⟨1| + (iγ₁₀/2)|0⟩⟨0|`.
pub fn ideal_pt_hamiltonian<T: Real>(gamma_10: T, h_sys: &Operator<T>) -> Result<Operator<T>> {
    check_qubit(h_sys)?;
    let half = gamma_10 / T::lit(2.0);
    let mut h = h_sys.clone();
    h[(0, 0)] += c(T::zero(), half);
    h[(1, 1)] += c(T::zero(), -half);
    Ok(h)
}

/// The three-level no-jump Hamiltonian before elimination:
/// `Ω_a/2(|a⟩⟨0| + h.c.) + Δ_a|a⟩⟨a| + H_sys − (iγ_a/2)|a⟩⟨a| − (iγ₁₀/2)|1⟩⟨1|`
/// plus the same feedback term `−(G/2)(L_eff†F − FL_eff)` as the reduced model.
pub fn original_lambda_hamiltonian<T: Real>(
    p: &LambdaParams<T>,
    gain: T,
    f: &Operator<T>,
    h_sys: &Operator<T>,
) -> Result<Operator<T>> {
    check_qubit(f)?;
    check_qubit(h_sys)?;
    check_hermitian(f)?;
    let model = lambda_model(p);
    let (_, l_eff) = lambda_reduction(p)?;
    let mut h = model.hamiltonian();
    h += &h_sys.embed(3, &GROUND);
    h[(AUX, AUX)] += c(T::zero(), -p.gamma_a / T::lit(2.0));
    h[(1, 1)] += c(T::zero(), -p.gamma_10 / T::lit(2.0));
    h += &feedback_term(gain, &l_eff, f).embed(3, &GROUND);
    Ok(h)
}

/// `Ωσ_x + iγ|0⟩⟨0| − iγ|1⟩⟨1|`.
pub fn pt_hamiltonian<T: Real>(p: &PtParams<T>) -> Operator<T> {
    let mut h = Operator::sigma_x().scale_real(p.omega);
    h[(0, 0)] = c(T::zero(), p.gamma);
    h[(1, 1)] = c(T::zero(), -p.gamma);
    h
}

/// Symmetry phase of [`pt_hamiltonian`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtPhase {
    /// Ω > γ: real pair.
    Unbroken,
    /// |Ω − γ| ≤ 1e−12: coalesced eigenvalues and eigenvectors.
    ExceptionalPoint,
    /// Ω < γ: imaginary pair.
    Broken,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtSpectrum<T> {
    /// `[+√(Ω² − γ²), −√(Ω² − γ²)]`, principal square root.
    pub eigenvalues: [Complex<T>; 2],
    pub phase: PtPhase,
}

pub fn pt_spectrum<T: Real>(p: &PtParams<T>) -> PtSpectrum<T> {
    let gap = p.omega - p.gamma;
    if gap.abs() <= T::lit(1e-12) {
        return PtSpectrum {
            eigenvalues: [Complex::new(T::zero(), T::zero()); 2],
            phase: PtPhase::ExceptionalPoint,
        };
    }
    let disc = gap * (p.omega + p.gamma);
    let (root, phase) = if disc > T::zero() {
        (c(disc.sqrt(), T::zero()), PtPhase::Unbroken)
    } else {
        (c(T::zero(), (-disc).sqrt()), PtPhase::Broken)
    };
    PtSpectrum {
        eigenvalues: [root, -root],
        phase,
    }
}
