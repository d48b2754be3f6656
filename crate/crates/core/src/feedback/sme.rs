//! Conditional dynamics under homodyne monitoring with instantaneous feedback.
//!
//! One step is an Euler–Maruyama update of
//! `dρ = −i[H,ρ]dt + γ₁D[L]ρ dt + √γ₁ H[L]ρ dW`, with
//! `H[L]ρ = Lρ + ρL† − ⟨L + L†⟩ρ`, followed by the exact feedback kick
//! `ρ ← U ρ U†`, `U = exp(−iGF dy)`, and renormalization.

use num_complex::Complex;

use super::config::FeedbackConfig;
use super::noise::{wiener_increment, NoiseStream};
use crate::error::{Error, Result};
use crate::lindblad::{check_step, grid_steps, EvolutionResult};
use crate::quantum::{eigh, trace_product, DensityMatrix, Operator};
use crate::scalar::{imag_unit, Real};

/// `√γ₁⟨X⟩_c dt + dW` with `X` chosen by the config's [`CurrentSignal`].
///
/// [`CurrentSignal`]: super::CurrentSignal
pub fn photocurrent_increment<T: Real>(rho: &DensityMatrix<T>, cfg: &FeedbackConfig<T>, dw: T, dt: T) -> T {
    let x = cfg.measured_observable();
    cfg.rate().sqrt() * trace_product(&x, rho.op()).re * dt + dw
}

/// `out = a·b` for row-major `n × n` blocks.
#[inline]
fn matmul<T: Real>(a: &[Complex<T>], b: &[Complex<T>], out: &mut [Complex<T>], n: usize) {
    match n {
        2 => matmul_fixed::<T, 2>(a, b, out),
        3 => matmul_fixed::<T, 3>(a, b, out),
        _ => matmul_dyn(a, b, out, n),
    }
}

/// Same summation order as [`matmul_dyn`], unrolled by the compiler.
#[inline(always)]
fn matmul_fixed<T: Real, const N: usize>(a: &[Complex<T>], b: &[Complex<T>], out: &mut [Complex<T>]) {
    let (a, b, out) = (&a[..N * N], &b[..N * N], &mut out[..N * N]);
    for i in 0..N {
        for j in 0..N {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..N {
                acc += a[i * N + k] * b[k * N + j];
            }
            out[i * N + j] = acc;
        }
    }
}

fn matmul_dyn<T: Real>(a: &[Complex<T>], b: &[Complex<T>], out: &mut [Complex<T>], n: usize) {
    for (row, out_row) in a.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
        out_row.fill(Complex::new(T::zero(), T::zero()));
        for (&aik, b_row) in row.iter().zip(b.chunks_exact(n)) {
            for (o, &bkj) in out_row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    }
}

/// Precomputed operators for repeated conditional steps.
///
/// States are propagated in the eigenbasis of `F`, where the feedback kick
/// `exp(−iθF) ρ exp(iθF)` multiplies `ρ_ij` by `exp(−iθ(f_i − f_j))`.
#[derive(Clone, Debug)]
pub(crate) struct Stepper<T> {
    n: usize,
    /// Eigenvectors of `F` as columns; `None` when the lab basis is used.
    frame: Option<Operator<T>>,
    /// `−iH − (γ₁/2)L†L`.
    drift: Operator<T>,
    jump: Operator<T>,
    jump_dag: Operator<T>,
    rate: T,
    sqrt_rate: T,
    homodyne: bool,
    milstein: bool,
    gain: T,
    spectrum: Vec<T>,
}

/// Scratch buffers reused across steps.
pub(crate) struct Workspace<T> {
    lr: Operator<T>,
    a: Operator<T>,
    ar: Operator<T>,
    jump: Operator<T>,
    backaction: Operator<T>,
    lb: Operator<T>,
}

impl<T: Real> Workspace<T> {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            lr: Operator::zeros(n),
            a: Operator::zeros(n),
            ar: Operator::zeros(n),
            jump: Operator::zeros(n),
            backaction: Operator::zeros(n),
            lb: Operator::zeros(n),
        }
    }
}

impl<T: Real> Stepper<T> {
    pub(crate) fn new(cfg: &FeedbackConfig<T>, hamiltonian: &Operator<T>) -> Result<Self> {
        if hamiltonian.dim() != cfg.dim() {
            return Err(Error::DimensionMismatch {
                expected: cfg.dim(),
                found: hamiltonian.dim(),
            });
        }
        let n = cfg.dim();
        let jump = cfg.jump();
        let mut drift = hamiltonian.scale(-imag_unit::<T>());
        drift.add_scaled(Complex::new(-cfg.rate() * T::lit(0.5), T::zero()), &(&jump.dagger() * jump));

        let (frame, spectrum) = if cfg.gain() == T::zero() {
            (None, Vec::new())
        } else {
            let eigen = eigh(cfg.feedback());
            (Some(eigen.vectors), eigen.values)
        };
        let into = |op: &Operator<T>| match &frame {
            Some(v) => &(&v.dagger() * op) * v,
            None => op.clone(),
        };
        let jump = into(jump);
        Ok(Self {
            n,
            drift: into(&drift),
            jump_dag: jump.dagger(),
            jump,
            rate: cfg.rate(),
            sqrt_rate: cfg.rate().sqrt(),
            homodyne: cfg.signal() == super::CurrentSignal::Homodyne,
            milstein: cfg.scheme() == super::Scheme::Milstein,
            gain: cfg.gain(),
            spectrum,
            frame,
        })
    }

    pub(crate) fn dim(&self) -> usize {
        self.n
    }

    pub(crate) fn to_frame(&self, rho: &Operator<T>) -> Operator<T> {
        match &self.frame {
            Some(v) => {
                let mut out = &(&v.dagger() * rho) * v;
                out.hermitize();
                out
            }
            None => rho.clone(),
        }
    }

    pub(crate) fn to_lab(&self, rho: &Operator<T>) -> Operator<T> {
        match &self.frame {
            Some(v) => {
                let mut out = v.sandwich(rho);
                out.hermitize();
                out
            }
            None => rho.clone(),
        }
    }

    /// Lab-basis population of `level` for a state held in the frame.
    pub(crate) fn population(&self, rho: &Operator<T>, level: usize) -> T {
        let Some(v) = &self.frame else {
            return rho[(level, level)].re;
        };
        let n = self.n;
        let row = &v.entries()[level * n..(level + 1) * n];
        let mut acc = T::zero();
        for (&vk, rho_row) in row.iter().zip(rho.entries().chunks_exact(n)) {
            let mut inner = Complex::new(T::zero(), T::zero());
            for (&r, &vj) in rho_row.iter().zip(row) {
                inner += r * vj.conj();
            }
            acc += (vk * inner).re;
        }
        acc
    }

    /// One Euler–Maruyama step in place, followed by the feedback kick when
    /// `kick` is set, re-Hermitization and renormalization. Returns `false` if
    /// the state stopped being finite or lost its trace.
    pub(crate) fn step(&self, rho: &mut Operator<T>, ws: &mut Workspace<T>, dw: T, dt: T, kick: bool) -> bool {
        let n = self.n;
        matmul(self.jump.entries(), rho.entries(), ws.lr.entries_mut(), n);
        let quadrature = T::lit(2.0) * ws.lr.trace().re;
        let signal = if self.homodyne || self.spectrum.is_empty() {
            quadrature
        } else {
            let rho = rho.entries();
            (0..n).map(|i| self.spectrum[i] * rho[i * n + i].re).sum()
        };

        let s = self.sqrt_rate * dw;
        for ((a, &k), &l) in ws.a.entries_mut().iter_mut().zip(self.drift.entries()).zip(self.jump.entries()) {
            *a = k * dt + l * s;
        }
        matmul(ws.a.entries(), rho.entries(), ws.ar.entries_mut(), n);
        matmul(ws.lr.entries(), self.jump_dag.entries(), ws.jump.entries_mut(), n);

        // Milstein: (γ₁/2)(dW² − dt)(LB + BL† − ⟨X⟩_B ρ − ⟨X⟩ B), B = H[L]ρ.
        let mc = if self.milstein && self.rate != T::zero() {
            let rho = rho.entries();
            let lr = ws.lr.entries();
            for (idx, b) in ws.backaction.entries_mut().iter_mut().enumerate() {
                let (i, j) = (idx / n, idx % n);
                *b = lr[idx] + lr[j * n + i].conj() - rho[idx] * quadrature;
            }
            matmul(self.jump.entries(), ws.backaction.entries(), ws.lb.entries_mut(), n);
            self.rate * T::lit(0.5) * (dw * dw - dt)
        } else {
            T::zero()
        };
        let quadrature_b = T::lit(2.0) * ws.lb.trace().re;

        let keep = T::one() - s * quadrature;
        let rdt = self.rate * dt;
        let theta = self.gain * (self.sqrt_rate * signal * dt + dw);
        let kick = kick && !self.spectrum.is_empty();
        let ar = ws.ar.entries();
        let jump = ws.jump.entries();
        let b = ws.backaction.entries();
        let lb = ws.lb.entries();
        let out = rho.entries_mut();
        let correction = |rho_ij: Complex<T>, i: usize, j: usize| {
            (lb[i * n + j] + lb[j * n + i].conj() - rho_ij * quadrature_b - b[i * n + j] * quadrature) * mc
        };
        let mut trace = T::zero();
        for i in 0..n {
            let rho_ii = out[i * n + i];
            let mut d = rho_ii.re * keep + T::lit(2.0) * ar[i * n + i].re + rdt * jump[i * n + i].re;
            if mc != T::zero() {
                d += correction(rho_ii, i, i).re;
            }
            out[i * n + i] = Complex::new(d, T::zero());
            trace += d;
            for j in (i + 1)..n {
                let (rho_ij, rho_ji) = (out[i * n + j], out[j * n + i]);
                let mut upper = rho_ij * keep + ar[i * n + j] + ar[j * n + i].conj() + jump[i * n + j] * rdt;
                let mut lower = rho_ji * keep + ar[j * n + i] + ar[i * n + j].conj() + jump[j * n + i] * rdt;
                if mc != T::zero() {
                    upper += correction(rho_ij, i, j);
                    lower += correction(rho_ji, j, i);
                }
                let mut v = (upper + lower.conj()) * T::lit(0.5);
                if kick {
                    v *= Complex::new(T::zero(), -theta * (self.spectrum[i] - self.spectrum[j])).exp();
                }
                out[i * n + j] = v;
                out[j * n + i] = v.conj();
            }
        }
        if !(trace > T::zero()) || !trace.is_finite() {
            return false;
        }
        let inv = T::one() / trace;
        for z in out.iter_mut() {
            *z *= inv;
        }
        out.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn single(&self, rho: &DensityMatrix<T>, dw: T, dt: T, kick: bool) -> Result<DensityMatrix<T>> {
        check_initial(rho, self.n)?;
        let mut state = self.to_frame(rho.op());
        let mut ws = Workspace::new(self.n);
        if !self.step(&mut state, &mut ws, dw, dt, kick) {
            return Err(Error::NonFinite { step: 1 });
        }
        Ok(DensityMatrix::from_hermitian(self.to_lab(&state)))
    }
}

fn check_initial<T: Real>(rho: &DensityMatrix<T>, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    if !rho.is_normalized() {
        return Err(Error::NotNormalized {
            trace: rho.trace().as_f64(),
        });
    }
    Ok(())
}

/// Conditional SME step without feedback, re-Hermitized and renormalized.
pub fn sme_step<T: Real>(
    rho: &DensityMatrix<T>,
    cfg: &FeedbackConfig<T>,
    hamiltonian: &Operator<T>,
    dw: T,
    dt: T,
) -> Result<DensityMatrix<T>> {
    Stepper::new(cfg, hamiltonian)?.single(rho, dw, dt, false)
}

/// Conditional SME step followed by the feedback unitary `exp(−iGF dy)`.
pub fn feedback_step<T: Real>(
    rho: &DensityMatrix<T>,
    cfg: &FeedbackConfig<T>,
    hamiltonian: &Operator<T>,
    dw: T,
    dt: T,
) -> Result<DensityMatrix<T>> {
    Stepper::new(cfg, hamiltonian)?.single(rho, dw, dt, true)
}

/// Runs `steps` feedback steps from `rho0` (lab basis), handing each frame
/// state, the initial one included, to `record`. Errors carry the failing step.
pub(crate) fn simulate<T: Real>(
    stepper: &Stepper<T>,
    rho0: &Operator<T>,
    dt: T,
    steps: usize,
    stream: &mut NoiseStream,
    mut record: impl FnMut(&Operator<T>),
) -> Result<()> {
    let mut rho = stepper.to_frame(rho0);
    let mut ws = Workspace::new(stepper.dim());
    record(&rho);
    for step in 1..=steps {
        let dw = wiener_increment(stream, dt);
        if !stepper.step(&mut rho, &mut ws, dw, dt, true) {
            return Err(Error::NonFinite { step });
        }
        record(&rho);
    }
    Ok(())
}

/// A single conditional trajectory with feedback on the uniform grid `k·dt`.
pub fn run_trajectory<T: Real>(
    cfg: &FeedbackConfig<T>,
    hamiltonian: &Operator<T>,
    rho0: &DensityMatrix<T>,
    dt: T,
    t_max: T,
    stream: &mut NoiseStream,
) -> Result<EvolutionResult<T>> {
    check_step(dt)?;
    let stepper = Stepper::new(cfg, hamiltonian)?;
    check_initial(rho0, stepper.dim())?;
    let steps = grid_steps(dt, t_max);
    let mut states = Vec::with_capacity(steps + 1);
    simulate(&stepper, rho0.op(), dt, steps, stream, |rho| {
        states.push(DensityMatrix::from_hermitian(stepper.to_lab(rho)))
    })?;
    Ok(EvolutionResult {
        dt,
        times: (0..=steps).map(|k| T::lit(k as f64) * dt).collect(),
        traces: states.iter().map(|s| s.trace()).collect(),
        states,
    })
}
