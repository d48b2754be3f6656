use num_complex::Complex;
use smallvec::SmallVec;

use super::linalg::eigh;
use super::operator::Operator;
use crate::error::{Error, Result};
use crate::scalar::{re, Real};

/// State vector in a `dim`-level Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket<T> {
    amps: SmallVec<[Complex<T>; 4]>,
}

impl<T: Real> Ket<T> {
    pub fn new(amplitudes: impl IntoIterator<Item = Complex<T>>) -> Self {
        let amps: SmallVec<[Complex<T>; 4]> = amplitudes.into_iter().collect();
        assert!(!amps.is_empty(), "ket dimension must be positive");
        Self { amps }
    }

    /// Basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        Self::new((0..dim).map(|i| if i == index { re(T::one()) } else { re(T::zero()) }))
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self::new(self.amps.iter().map(|&a| a / n))
    }
}

/// Outer product `|v⟩⟨w|`.
pub fn ketbra<T: Real>(v: &Ket<T>, w: &Ket<T>) -> Operator<T> {
    let n = v.dim();
    assert_eq!(n, w.dim(), "dimension mismatch");
    Operator::from_row_major(
        n,
        (0..n).flat_map(|i| (0..n).map(move |j| v.amps[i] * w.amps[j].conj())),
    )
    .expect("square by construction")
}

/// Density matrix, possibly unnormalized when produced by non-trace-preserving flow.
///
/// Construction always stores the exact Hermitian part, so `‖ρ − ρ†‖_F = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    op: Operator<T>,
    normalized: bool,
}

impl<T: Real> DensityMatrix<T> {
    /// Wraps a Hermitian operator. The normalized flag is set when `|Tr ρ − 1| ≤ 1e−9`.
    pub fn new(op: Operator<T>) -> Result<Self> {
        let scale = T::one().max(op.max_abs());
        let residual = op.hermitian_residual();
        if !(residual <= T::tol(1e-12) * scale) {
            return Err(Error::NotHermitian {
                residual: residual.as_f64(),
            });
        }
        Ok(Self::from_hermitian(op))
    }

    /// Like [`DensityMatrix::new`] but additionally requires unit trace.
    pub fn normalized(op: Operator<T>) -> Result<Self> {
        let rho = Self::new(op)?;
        if !rho.normalized {
            return Err(Error::NotNormalized {
                trace: rho.trace().as_f64(),
            });
        }
        Ok(rho)
    }

    /// Hermitizes `op` and wraps it; used by integrators after each step.
    pub(crate) fn from_hermitian(mut op: Operator<T>) -> Self {
        op.hermitize();
        let normalized = (op.trace().re - T::one()).abs() <= T::tol(1e-9);
        Self { op, normalized }
    }

    pub fn pure(ket: &Ket<T>) -> Self {
        Self::from_hermitian(ketbra(ket, ket))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        Self::from_hermitian(Operator::transition(dim, index, index))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_hermitian(Operator::identity(dim).scale_real(T::one() / T::lit(dim as f64)))
    }

    /// Diagonal (classical) state with the given populations.
    pub fn diagonal(populations: &[T]) -> Self {
        Self::from_hermitian(Operator::real_diagonal(populations))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &Operator<T> {
        &self.op
    }

    pub fn into_operator(self) -> Operator<T> {
        self.op
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> T {
        self.op.trace().re
    }

    /// Real diagonal of ρ, without renormalization.
    pub fn populations(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.op[(i, i)].re).collect()
    }

    pub fn population(&self, level: usize) -> T {
        self.op[(level, level)].re
    }

    /// ρ / Tr ρ.
    pub fn renormalized(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > T::lit(1e-12)) {
            return Err(Error::VanishingTrace { trace: tr.as_f64() });
        }
        let mut out = self.op.scale_real(T::one() / tr);
        out.hermitize();
        Ok(Self {
            op: out,
            normalized: true,
        })
    }

    pub fn min_eigenvalue(&self) -> T {
        eigh(&self.op)
            .values
            .into_iter()
            .fold(T::infinity(), T::min)
    }
}

/// `Tr(Aρ)`.
pub fn expectation<T: Real>(a: &Operator<T>, rho: &DensityMatrix<T>) -> Result<Complex<T>> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: a.dim(),
        });
    }
    Ok(trace_product(a, rho.op()))
}

/// `Tr(AB)` without forming the product.
pub(crate) fn trace_product<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Complex<T> {
    let n = a.dim();
    let (x, y) = (a.entries(), b.entries());
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for k in 0..n {
            acc += x[i * n + k] * y[k * n + i];
        }
    }
    acc
}
