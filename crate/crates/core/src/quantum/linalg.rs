//! Small dense complex linear algebra: inversion, Hermitian diagonalization,
//! matrix exponentials.

use num_complex::Complex;

use super::operator::Operator;
use crate::error::{Error, Result};
use crate::scalar::{re, Real};

/// Condition-number ceiling beyond which a block is treated as singular.
pub const MAX_CONDITION: f64 = 1e8;

fn norm1<T: Real>(a: &Operator<T>) -> T {
    let n = a.dim();
    (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<T>())
        .fold(T::zero(), T::max)
}

/// Inverse of a small dense matrix by Gauss–Jordan elimination with partial pivoting.
///
/// Fails when a pivot vanishes or the 1-norm condition estimate exceeds
/// [`MAX_CONDITION`].
pub fn inverse_small<T: Real>(a: &Operator<T>) -> Result<Operator<T>> {
    let n = a.dim();
    let scale = norm1(a);
    if scale == T::zero() {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let mut m = a.clone();
    let mut inv = Operator::identity(n);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| m[(x, col)].norm().partial_cmp(&m[(y, col)].norm()).unwrap())
            .unwrap();
        let pivot = m[(pivot_row, col)];
        if !(pivot.norm() > T::epsilon() * scale) {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                let (p, q) = (m[(pivot_row, j)], m[(col, j)]);
                m[(pivot_row, j)] = q;
                m[(col, j)] = p;
                let (p, q) = (inv[(pivot_row, j)], inv[(col, j)]);
                inv[(pivot_row, j)] = q;
                inv[(col, j)] = p;
            }
        }
        let recip = pivot.inv();
        for j in 0..n {
            m[(col, j)] *= recip;
            inv[(col, j)] *= recip;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[(row, col)];
            if factor.norm() == T::zero() {
                continue;
            }
            for j in 0..n {
                let mv = m[(col, j)];
                let iv = inv[(col, j)];
                m[(row, j)] -= factor * mv;
                inv[(row, j)] -= factor * iv;
            }
        }
    }
    let condition = scale * norm1(&inv);
    if !(condition <= T::lit(MAX_CONDITION)) {
        return Err(Error::Singular {
            condition: condition.as_f64(),
        });
    }
    Ok(inv)
}

/// Inverts the subblock of `a` on `indices` and embeds the result back into the
/// full space (zero outside the block).
pub fn inverse_on_block<T: Real>(a: &Operator<T>, indices: &[usize]) -> Result<Operator<T>> {
    if indices.is_empty() {
        return Ok(Operator::zeros(a.dim()));
    }
    Ok(inverse_small(&a.submatrix(indices))?.embed(a.dim(), indices))
}

/// Solves `m x = b`, nudging vanishing pivots instead of failing. Used for
/// inverse iteration where `m` is singular by design.
pub(crate) fn solve_regularized<T: Real>(m: &Operator<T>, b: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = m.dim();
    let mut a = m.clone();
    let mut x: Vec<Complex<T>> = b.to_vec();
    let floor = T::epsilon() * T::one().max(norm1(m));
    for col in 0..n {
        let p = (col..n)
            .max_by(|&u, &v| a[(u, col)].norm().partial_cmp(&a[(v, col)].norm()).unwrap())
            .unwrap();
        if p != col {
            for j in 0..n {
                let (s, t) = (a[(p, j)], a[(col, j)]);
                a[(p, j)] = t;
                a[(col, j)] = s;
            }
            x.swap(p, col);
        }
        if a[(col, col)].norm() < floor {
            a[(col, col)] = re(floor);
        }
        let piv = a[(col, col)];
        for row in (col + 1)..n {
            let f = a[(row, col)] / piv;
            for j in col..n {
                let v = a[(col, j)];
                a[(row, j)] -= f * v;
            }
            let xc = x[col];
            x[row] -= f * xc;
        }
    }
    for row in (0..n).rev() {
        let mut acc = x[row];
        for j in (row + 1)..n {
            acc -= a[(row, j)] * x[j];
        }
        x[row] = acc / a[(row, row)];
    }
    x
}

/// Spectral decomposition of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    /// Ascending real eigenvalues.
    pub values: Vec<T>,
    /// Unitary whose columns are the matching orthonormal eigenvectors.
    pub vectors: Operator<T>,
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// Only the Hermitian part of `a` is used.
pub fn eigh<T: Real>(a: &Operator<T>) -> HermitianEigen<T> {
    let n = a.dim();
    let mut m = a.clone();
    m.hermitize();
    let mut v = Operator::identity(n);
    let total = m.frobenius_norm();
    let threshold = T::epsilon() * T::epsilon() * total * total;
    for _sweep in 0..64 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let phase = apq / mag;
                let theta = (m[(q, q)].re - m[(p, p)].re) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                // J = diag(e^{iφ}, 1) · [[c, s], [−s, c]] on the (p, q) plane.
                let jpp = phase * cs;
                let jpq = phase * sn;
                let jqp = re(-sn);
                let jqq = re(cs);
                // Columns: M ← M J, V ← V J.
                for i in 0..n {
                    let (mp, mq) = (m[(i, p)], m[(i, q)]);
                    m[(i, p)] = mp * jpp + mq * jqp;
                    m[(i, q)] = mp * jpq + mq * jqq;
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = vp * jpp + vq * jqp;
                    v[(i, q)] = vp * jpq + vq * jqq;
                }
                // Rows: M ← J† M.
                for j in 0..n {
                    let (mp, mq) = (m[(p, j)], m[(q, j)]);
                    m[(p, j)] = jpp.conj() * mp + jqp.conj() * mq;
                    m[(q, j)] = jpq.conj() * mp + jqq.conj() * mq;
                }
                m[(p, q)] = re(T::zero());
                m[(q, p)] = re(T::zero());
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.partial_cmp(&m[(y, y)].re).unwrap());
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = Operator::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    HermitianEigen { values, vectors }
}

impl<T: Real> HermitianEigen<T> {
    /// `V f(Λ) V†` for a scalar function applied to the eigenvalues.
    pub fn map(&self, f: impl Fn(T) -> Complex<T>) -> Operator<T> {
        let n = self.values.len();
        let fv: Vec<Complex<T>> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = re(T::zero());
                for k in 0..n {
                    acc += self.vectors[(i, k)] * fv[k] * self.vectors[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// The unitary `exp(−iθA)` of the decomposed operator `A`.
    pub fn unitary(&self, theta: T) -> Operator<T> {
        self.map(|x| Complex::new(T::zero(), -theta * x).exp())
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> T {
        self.values.iter().map(|x| x.abs()).fold(T::zero(), T::max)
    }
}

/// Matrix exponential by scaling and squaring of the Taylor series.
pub fn expm<T: Real>(a: &Operator<T>) -> Operator<T> {
    let n = a.dim();
    let mut squarings = 0u32;
    let mut norm = norm1(a);
    while norm > T::lit(0.5) {
        norm /= T::lit(2.0);
        squarings += 1;
    }
    let scaled = a.scale_real(T::lit(0.5).powi(squarings as i32));
    let mut term = Operator::identity(n);
    let mut sum = Operator::identity(n);
    for k in 1..=30 {
        term = (&term * &scaled).scale_real(T::one() / T::lit(k as f64));
        sum += &term;
        if term.max_abs() <= T::epsilon() * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Operator norm (largest singular value).
pub fn operator_norm<T: Real>(a: &Operator<T>) -> T {
    let gram = &a.dagger() * a;
    eigh(&gram).spectral_radius().sqrt()
}
