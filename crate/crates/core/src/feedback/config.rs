use crate::error::{invalid, Error, Result};
use crate::quantum::Operator;
use crate::scalar::Real;

/// Observable whose conditional mean drives the feedback current
/// `dy = √γ₁⟨X⟩_c dt + dW`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CurrentSignal {
    /// Homodyne quadrature of the monitored channel, `X = L + L†`. This is the
    /// record the backaction term `√γ₁ H[L]ρ dW` is conditioned on, and the
    /// only choice whose noise average is exactly the unconditional feedback
    /// master equation for every `F`.
    #[default]
    Homodyne,
    /// The feedback operator itself, `X = F`. Coincides with [`Homodyne`]
    /// when `F = L + L†`.
    ///
    /// [`Homodyne`]: CurrentSignal::Homodyne
    FeedbackObservable,
}

/// Stochastic integration scheme for the conditional state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    /// Euler–Maruyama plus the single-noise Milstein term
    /// `½ b′(ρ)[b(ρ)] (dW² − dt)`. Strong order 1, and conditional states stay
    /// close to positive near pure states.
    #[default]
    Milstein,
    /// Plain Euler–Maruyama, strong order ½.
    EulerMaruyama,
}

/// Monitored channel `(γ₁, L)`, Hermitian feedback operator `F` and strength `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackConfig<T> {
    rate: T,
    jump: Operator<T>,
    feedback: Operator<T>,
    gain: T,
    signal: CurrentSignal,
    scheme: Scheme,
}

impl<T: Real> FeedbackConfig<T> {
    pub fn new(rate: T, jump: Operator<T>, feedback: Operator<T>, gain: T) -> Result<Self> {
        if !(rate >= T::zero()) || !rate.is_finite() {
            return Err(invalid("gamma_1", format!("monitored rate must be non-negative, got {rate}")));
        }
        if !gain.is_finite() {
            return Err(invalid("gain", "feedback strength must be finite"));
        }
        if jump.dim() != feedback.dim() {
            return Err(Error::DimensionMismatch {
                expected: jump.dim(),
                found: feedback.dim(),
            });
        }
        let residual = feedback.hermitian_residual();
        if !(residual <= T::tol(1e-12) * T::one().max(feedback.max_abs())) {
            return Err(Error::NotHermitian {
                residual: residual.as_f64(),
            });
        }
        Ok(Self {
            rate,
            jump,
            feedback,
            gain,
            signal: CurrentSignal::default(),
            scheme: Scheme::default(),
        })
    }

    pub fn with_signal(mut self, signal: CurrentSignal) -> Self {
        self.signal = signal;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_gain(mut self, gain: T) -> Self {
        self.gain = gain;
        self
    }

    pub fn dim(&self) -> usize {
        self.jump.dim()
    }

    /// γ₁.
    pub fn rate(&self) -> T {
        self.rate
    }

    /// L.
    pub fn jump(&self) -> &Operator<T> {
        &self.jump
    }

    /// F.
    pub fn feedback(&self) -> &Operator<T> {
        &self.feedback
    }

    /// G.
    pub fn gain(&self) -> T {
        self.gain
    }

    pub fn signal(&self) -> CurrentSignal {
        self.signal
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// The observable `X` entering the current.
    pub fn measured_observable(&self) -> Operator<T> {
        match self.signal {
            CurrentSignal::Homodyne => &self.jump + &self.jump.dagger(),
            CurrentSignal::FeedbackObservable => self.feedback.clone(),
        }
    }
}
