//! Deterministic propagation of Lindblad and non-Hermitian (no-jump) dynamics.
//!
//! Both integrators use classical fixed-step RK4 on the density matrix and
//! replace the state by its Hermitian part after every step. Positivity is
//! monitored by callers, never projected.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::quantum::{DensityMatrix, Operator};
use crate::scalar::{imag_unit, Real};

/// Trace above which non-Hermitian evolution is aborted as a gain blow-up.
pub const GAIN_BLOWUP_TRACE: f64 = 1e6;

/// A decay channel `γ D[L]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T> {
    pub rate: T,
    pub jump: Operator<T>,
}

/// Hamiltonian plus decay channels.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladModel<T> {
    hamiltonian: Operator<T>,
    channels: Vec<Channel<T>>,
}

impl<T: Real> LindbladModel<T> {
    pub fn new(hamiltonian: Operator<T>) -> Self {
        Self {
            hamiltonian,
            channels: Vec::new(),
        }
    }

    pub fn with_channel(mut self, rate: T, jump: Operator<T>) -> Result<Self> {
        if !(rate >= T::zero()) {
            return Err(invalid("rate", format!("decay rate must be non-negative, got {rate}")));
        }
        if jump.dim() != self.hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.hamiltonian.dim(),
                found: jump.dim(),
            });
        }
        self.channels.push(Channel { rate, jump });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Operator<T> {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[Channel<T>] {
        &self.channels
    }
}

/// Right-hand side of a linear matrix ODE `dρ/dt = 𝓛ρ`.
///
/// Implementations may assume `rho` has dimension [`Generator::dim`].
pub trait Generator<T: Real> {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &Operator<T>) -> Operator<T>;
}

/// `AρA† − ½{A†A, ρ}`.
pub fn dissipator<T: Real>(a: &Operator<T>, rho: &DensityMatrix<T>) -> Result<Operator<T>> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: a.dim(),
        });
    }
    let mut out = Operator::zeros(a.dim());
    add_dissipator(&mut out, T::one(), a, rho.op());
    Ok(out)
}

/// `out += rate · D[a]ρ`.
pub(crate) fn add_dissipator<T: Real>(out: &mut Operator<T>, rate: T, a: &Operator<T>, rho: &Operator<T>) {
    let ad = a.dagger();
    let ada = &ad * a;
    let jump = &(a * rho) * &ad;
    let anti = &(&ada * rho) + &(rho * &ada);
    out.add_scaled(Complex::new(rate, T::zero()), &jump);
    out.add_scaled(Complex::new(-rate * T::lit(0.5), T::zero()), &anti);
}

/// `out += −i[H, ρ]`.
pub(crate) fn add_unitary<T: Real>(out: &mut Operator<T>, h: &Operator<T>, rho: &Operator<T>) {
    let comm = &(h * rho) - &(rho * h);
    out.add_scaled(-imag_unit::<T>(), &comm);
}

impl<T: Real> Generator<T> for LindbladModel<T> {
    fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    fn apply(&self, rho: &Operator<T>) -> Operator<T> {
        let mut out = Operator::zeros(rho.dim());
        add_unitary(&mut out, &self.hamiltonian, rho);
        for ch in &self.channels {
            add_dissipator(&mut out, ch.rate, &ch.jump, rho);
        }
        out
    }
}

/// `−i[H, ρ] + Σ_k γ_k D[L_k]ρ`.
pub fn liouvillian_apply<T: Real>(model: &LindbladModel<T>, rho: &DensityMatrix<T>) -> Result<Operator<T>> {
    if model.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: rho.dim(),
        });
    }
    Ok(model.apply(rho.op()))
}

/// Non-Hermitian Hamiltonian with an optional recycling (jump) term:
/// `dρ/dt = −i(Hρ − ρH†) [+ c̃ρc̃†]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonHermitianModel<T> {
    hamiltonian: Operator<T>,
    jump: Option<Operator<T>>,
}

impl<T: Real> NonHermitianModel<T> {
    /// Pure no-jump evolution under `hamiltonian`.
    pub fn new(hamiltonian: Operator<T>) -> Self {
        Self {
            hamiltonian,
            jump: None,
        }
    }

    /// Adds the jump term `c̃ρc̃†` when `include` is set.
    pub fn with_jump(mut self, jump: Operator<T>, include: bool) -> Result<Self> {
        if jump.dim() != self.hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.hamiltonian.dim(),
                found: jump.dim(),
            });
        }
        self.jump = include.then_some(jump);
        Ok(self)
    }

    pub fn hamiltonian(&self) -> &Operator<T> {
        &self.hamiltonian
    }

    pub fn includes_jump(&self) -> bool {
        self.jump.is_some()
    }
}

impl<T: Real> Generator<T> for NonHermitianModel<T> {
    fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    fn apply(&self, rho: &Operator<T>) -> Operator<T> {
        let h = &self.hamiltonian;
        let mut out = &(h * rho) - &(rho * &h.dagger());
        out = out.scale(-imag_unit::<T>());
        if let Some(c) = &self.jump {
            out += &c.sandwich(rho);
        }
        out
    }
}

/// States on a uniform time grid together with their raw traces.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionResult<T> {
    pub dt: T,
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
    pub traces: Vec<T>,
}

impl<T: Real> EvolutionResult<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix<T> {
        self.states.last().expect("evolution always holds the initial state")
    }

    /// Raw population of `level` at each grid point.
    pub fn population_series(&self, level: usize) -> Vec<T> {
        self.states.iter().map(|s| s.population(level)).collect()
    }

    /// Population of `level` after dividing each state by its trace.
    pub fn renormalized_population_series(&self, level: usize) -> Result<Vec<T>> {
        self.states
            .iter()
            .map(|s| Ok(s.renormalized()?.population(level)))
            .collect()
    }
}

pub(crate) fn grid_steps<T: Real>(dt: T, t_max: T) -> usize {
    if t_max < dt {
        return 0;
    }
    (t_max / dt + T::lit(1e-6)).floor().to_usize().unwrap_or(0)
}

pub(crate) fn check_step<T: Real>(dt: T) -> Result<()> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(invalid("dt", format!("time step must be positive and finite, got {dt}")));
    }
    Ok(())
}

fn rk4_step<T: Real, G: Generator<T>>(gen: &G, rho: &Operator<T>, dt: T) -> Operator<T> {
    let half = T::lit(0.5) * dt;
    let k1 = gen.apply(rho);
    let mut y = rho.clone();
    y.add_scaled(Complex::new(half, T::zero()), &k1);
    let k2 = gen.apply(&y);
    let mut y = rho.clone();
    y.add_scaled(Complex::new(half, T::zero()), &k2);
    let k3 = gen.apply(&y);
    let mut y = rho.clone();
    y.add_scaled(Complex::new(dt, T::zero()), &k3);
    let k4 = gen.apply(&y);
    let sixth = dt / T::lit(6.0);
    let mut next = rho.clone();
    next.add_scaled(Complex::new(sixth, T::zero()), &k1);
    next.add_scaled(Complex::new(sixth * T::lit(2.0), T::zero()), &k2);
    next.add_scaled(Complex::new(sixth * T::lit(2.0), T::zero()), &k3);
    next.add_scaled(Complex::new(sixth, T::zero()), &k4);
    next
}

fn propagate<T: Real, G: Generator<T>>(
    gen: &G,
    rho0: &DensityMatrix<T>,
    dt: T,
    t_max: T,
    mut guard: impl FnMut(usize, &Operator<T>) -> Result<()>,
) -> Result<EvolutionResult<T>> {
    check_step(dt)?;
    if gen.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho0.dim(),
        });
    }
    let steps = grid_steps(dt, t_max);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut traces = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    traces.push(rho0.trace());
    states.push(rho0.clone());
    let mut rho = rho0.op().clone();
    for step in 1..=steps {
        rho = rk4_step(gen, &rho, dt);
        rho.hermitize();
        guard(step, &rho)?;
        let state = DensityMatrix::from_hermitian(rho.clone());
        times.push(T::lit(step as f64) * dt);
        traces.push(state.trace());
        states.push(state);
    }
    Ok(EvolutionResult {
        dt,
        times,
        states,
        traces,
    })
}

/// Integrates a trace-preserving generator from a normalized initial state.
///
/// Returns only `ρ0` when `t_max < dt`.
pub fn integrate_master<T: Real, G: Generator<T>>(
    generator: &G,
    rho0: &DensityMatrix<T>,
    dt: T,
    t_max: T,
) -> Result<EvolutionResult<T>> {
    if !rho0.is_normalized() {
        return Err(Error::NotNormalized {
            trace: rho0.trace().as_f64(),
        });
    }
    propagate(generator, rho0, dt, t_max, |step, rho| {
        if rho.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { step })
        }
    })
}

/// Integrates no-jump (or jump-recycled) non-Hermitian dynamics. The trace is
/// not preserved; it is recorded raw at every grid point.
pub fn integrate_nonhermitian<T: Real>(
    model: &NonHermitianModel<T>,
    rho0: &DensityMatrix<T>,
    dt: T,
    t_max: T,
) -> Result<EvolutionResult<T>> {
    let limit = T::lit(GAIN_BLOWUP_TRACE);
    propagate(model, rho0, dt, t_max, |step, rho| {
        if !rho.is_finite() {
            return Err(Error::NonFinite { step });
        }
        let trace = rho.trace().re;
        if trace > limit {
            return Err(Error::GainBlowUp {
                step,
                trace: trace.as_f64(),
                limit: GAIN_BLOWUP_TRACE,
            });
        }
        Ok(())
    })
}

/// `ρ / Tr ρ`.
pub fn renormalize<T: Real>(rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    rho.renormalized()
}

/// Real diagonal of ρ.
pub fn populations<T: Real>(rho: &DensityMatrix<T>) -> Vec<T> {
    rho.populations()
}
