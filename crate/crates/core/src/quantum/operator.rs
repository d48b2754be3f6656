use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{imag_unit, re, Real};

pub(crate) type Entries<T> = SmallVec<[Complex<T>; 16]>;

/// Dense square complex matrix, stored row-major.
///
/// Dimensions up to 4 live inline without heap allocation, which keeps the
/// per-step cost of trajectory integration low.
#[derive(Clone, PartialEq)]
pub struct Operator<T> {
    dim: usize,
    data: Entries<T>,
}

impl<T: Real> Operator<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self {
            dim,
            data: SmallVec::from_elem(Complex::new(T::zero(), T::zero()), dim * dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op[(i, i)] = re(T::one());
        }
        op
    }

    /// Builds an operator from `dim * dim` row-major entries.
    pub fn from_row_major(dim: usize, entries: impl IntoIterator<Item = Complex<T>>) -> Result<Self> {
        let data: Entries<T> = entries.into_iter().collect();
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds an operator from real row-major entries.
    pub fn from_real(dim: usize, entries: &[T]) -> Result<Self> {
        Self::from_row_major(dim, entries.iter().map(|&x| re(x)))
    }

    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            op[(i, i)] = d;
        }
        op
    }

    pub fn real_diagonal(diag: &[T]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            op[(i, i)] = re(d);
        }
        op
    }

    /// The matrix unit `|row⟩⟨col|`.
    pub fn transition(dim: usize, row: usize, col: usize) -> Self {
        let mut op = Self::zeros(dim);
        op[(row, col)] = re(T::one());
        op
    }

    /// Projector onto the basis states in `indices`.
    pub fn projector(dim: usize, indices: &[usize]) -> Self {
        let mut op = Self::zeros(dim);
        for &i in indices {
            op[(i, i)] = re(T::one());
        }
        op
    }

    /// σ_x = |0⟩⟨1| + |1⟩⟨0|.
    pub fn sigma_x() -> Self {
        Self::transition(2, 0, 1) + Self::transition(2, 1, 0)
    }

    /// σ_y = −i|0⟩⟨1| + i|1⟩⟨0|.
    pub fn sigma_y() -> Self {
        let mut op = Self::zeros(2);
        op[(0, 1)] = -imag_unit::<T>();
        op[(1, 0)] = imag_unit();
        op
    }

    /// σ_z = |0⟩⟨0| − |1⟩⟨1|, so the ground state |0⟩ is the +1 eigenstate.
    pub fn sigma_z() -> Self {
        Self::real_diagonal(&[T::one(), -T::one()])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn entries_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    /// `self += factor * other`, without allocating.
    pub fn add_scaled(&mut self, factor: Complex<T>, other: &Self) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += b * factor;
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// ‖A − A†‖_F.
    pub fn hermitian_residual(&self) -> T {
        let n = self.dim;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc += (self.data[i * n + j] - self.data[j * n + i].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Replaces the operator by its Hermitian part (A + A†)/2.
    pub fn hermitize(&mut self) {
        let n = self.dim;
        let half = T::lit(0.5);
        for i in 0..n {
            let d = self.data[i * n + i];
            self.data[i * n + i] = Complex::new(d.re, T::zero());
            for j in (i + 1)..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()) * half;
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `A ρ A†`.
    pub fn sandwich(&self, rho: &Self) -> Self {
        &(self * rho) * &self.dagger()
    }

    /// Dense subblock on the given basis indices (rows and columns).
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let m = indices.len();
        let mut out = Self::zeros(m);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// Places a `indices.len()`-dimensional block into a zero `dim × dim` operator.
    pub fn embed(&self, dim: usize, indices: &[usize]) -> Self {
        assert_eq!(self.dim, indices.len(), "block size does not match index list");
        let mut out = Self::zeros(dim);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out[(i, j)] = self[(a, b)];
            }
        }
        out
    }

    pub fn to_f64(&self) -> Operator<f64> {
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
                .collect(),
        }
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// Conjugate transpose.
pub fn dagger<T: Real>(a: &Operator<T>) -> Operator<T> {
    a.dagger()
}

/// `AB − BA`.
pub fn commutator<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Result<Operator<T>> {
    a.check_dims(b)?;
    Ok(&(a * b) - &(b * a))
}

/// `AB + BA`.
pub fn anticommutator<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Result<Operator<T>> {
    a.check_dims(b)?;
    Ok(&(a * b) + &(b * a))
}

impl<T: Real> Index<(usize, usize)> for Operator<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Operator<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &Operator<T> {
    type Output = Operator<T>;

    fn mul(self, rhs: &Operator<T>) -> Operator<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<T: Real> Mul for Operator<T> {
    type Output = Operator<T>;

    fn mul(self, rhs: Operator<T>) -> Operator<T> {
        &self * &rhs
    }
}

impl<T: Real> AddAssign<&Operator<T>> for Operator<T> {
    fn add_assign(&mut self, rhs: &Operator<T>) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
    }
}

impl<T: Real> SubAssign<&Operator<T>> for Operator<T> {
    fn sub_assign(&mut self, rhs: &Operator<T>) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
    }
}

impl<T: Real> Add for &Operator<T> {
    type Output = Operator<T>;

    fn add(self, rhs: &Operator<T>) -> Operator<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: Real> Add for Operator<T> {
    type Output = Operator<T>;

    fn add(mut self, rhs: Operator<T>) -> Operator<T> {
        self += &rhs;
        self
    }
}

impl<T: Real> Sub for &Operator<T> {
    type Output = Operator<T>;

    fn sub(self, rhs: &Operator<T>) -> Operator<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<T: Real> Sub for Operator<T> {
    type Output = Operator<T>;

    fn sub(mut self, rhs: Operator<T>) -> Operator<T> {
        self -= &rhs;
        self
    }
}

impl<T: Real> Neg for Operator<T> {
    type Output = Operator<T>;

    fn neg(mut self) -> Operator<T> {
        for z in self.data.iter_mut() {
            *z = -*z;
        }
        self
    }
}

impl<T: fmt::Debug> fmt::Debug for Operator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{}) [", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}
