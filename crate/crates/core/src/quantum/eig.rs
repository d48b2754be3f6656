//! Eigenvalues of small, generally non-Hermitian matrices.

use std::cmp::Ordering;

use num_complex::Complex;

use super::linalg::solve_regularized;
use super::operator::Operator;
use super::state::Ket;
use crate::error::{Error, Result};
use crate::scalar::{c, re, Real};

/// Largest dimension accepted by [`eig`].
pub const MAX_EIG_DIM: usize = 8;

/// Largest dimension for which eigenvectors are returned.
pub const MAX_EIGVEC_DIM: usize = 4;

#[derive(Clone, Debug)]
pub struct Eigen<T> {
    /// Eigenvalues ordered by real part, then imaginary part.
    pub values: Vec<Complex<T>>,
    /// Unit eigenvectors matching `values`, for dimensions up to [`MAX_EIGVEC_DIM`].
    /// At an exceptional point the coalescing vectors are (numerically) parallel.
    pub vectors: Option<Vec<Ket<T>>>,
}

/// Eigen-decomposition of a small complex matrix.
///
/// 2×2 matrices use the closed form; larger ones are reduced to Hessenberg form
/// and iterated with shifted QR until subdiagonals fall below 1e−12 relative
/// to their neighbours.
pub fn eig<T: Real>(a: &Operator<T>) -> Result<Eigen<T>> {
    let values = eigenvalues(a)?;
    let vectors = (a.dim() <= MAX_EIGVEC_DIM)
        .then(|| values.iter().map(|&lambda| eigenvector(a, lambda)).collect());
    Ok(Eigen { values, vectors })
}

pub fn eigenvalues<T: Real>(a: &Operator<T>) -> Result<Vec<Complex<T>>> {
    let n = a.dim();
    if n > MAX_EIG_DIM {
        return Err(Error::UnsupportedDimension {
            dim: n,
            max: MAX_EIG_DIM,
        });
    }
    let mut values = match n {
        1 => vec![a[(0, 0)]],
        2 => {
            let (x, y) = closed_form_2x2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
            vec![x, y]
        }
        _ => hessenberg_qr(a)?,
    };
    let scale = T::one().max(a.max_abs());
    sort_spectrum(&mut values, T::lit(1e-12) * scale);
    Ok(values)
}

/// Roots of λ² − (a+d)λ + (ad − bc), with the discriminant written as
/// ((a−d)/2)² + bc to avoid cancellation near coalescence.
fn closed_form_2x2<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    cc: Complex<T>,
    d: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let h = (a - d) * half;
    let root = (h * h + b * cc).sqrt();
    (mean + root, mean - root)
}

fn sort_spectrum<T: Real>(values: &mut [Complex<T>], tol: T) {
    values.sort_by(|x, y| {
        if (x.re - y.re).abs() > tol {
            x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal)
        } else {
            x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal)
        }
    });
}

fn hessenberg_qr<T: Real>(a: &Operator<T>) -> Result<Vec<Complex<T>>> {
    let n = a.dim();
    let mut h = a.clone();
    reduce_to_hessenberg(&mut h);

    let eps = T::lit(1e-12).max(T::epsilon());
    let mut values = vec![re(T::zero()); n];
    let mut hi = n - 1;
    let mut iterations = 0usize;
    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let floor = if diag == T::zero() { T::epsilon() } else { eps * diag };
            if sub <= floor {
                h[(lo, lo - 1)] = re(T::zero());
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            iterations = 0;
            continue;
        }
        if lo + 1 == hi {
            let (x, y) = closed_form_2x2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            values[lo] = x;
            values[hi] = y;
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iterations = 0;
            continue;
        }
        iterations += 1;
        if iterations > 60 * n {
            return Err(Error::NoConvergence);
        }
        let shift = if iterations % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + re(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            let (x, y) = closed_form_2x2(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            if (x - h[(hi, hi)]).norm() <= (y - h[(hi, hi)]).norm() {
                x
            } else {
                y
            }
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(values)
}

fn reduce_to_hessenberg<T: Real>(h: &mut Operator<T>) {
    let n = h.dim();
    for k in 0..n.saturating_sub(2) {
        let norm: T = ((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == T::zero() { re(T::one()) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex<T>> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm: T = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vv†) H (I − 2vv†), acting on indices k+1..n.
        for j in 0..n {
            let mut dot = re(T::zero());
            for (a, i) in ((k + 1)..n).enumerate() {
                dot += v[a].conj() * h[(i, j)];
            }
            for (a, i) in ((k + 1)..n).enumerate() {
                h[(i, j)] -= v[a] * dot * T::lit(2.0);
            }
        }
        for i in 0..n {
            let mut dot = re(T::zero());
            for (a, j) in ((k + 1)..n).enumerate() {
                dot += h[(i, j)] * v[a];
            }
            for (a, j) in ((k + 1)..n).enumerate() {
                h[(i, j)] -= dot * v[a].conj() * T::lit(2.0);
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = re(T::zero());
        }
    }
}

/// One explicitly shifted QR step `H − μI = QR, H ← RQ + μI` on rows/cols `lo..=hi`.
fn qr_sweep<T: Real>(h: &mut Operator<T>, lo: usize, hi: usize, shift: Complex<T>) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (cs, sn) = if r == T::zero() {
            (re(T::one()), re(T::zero()))
        } else {
            (x / r, y / r)
        };
        for j in k..=hi {
            let (u, w) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = cs.conj() * u + sn.conj() * w;
            h[(k + 1, j)] = -sn * u + cs * w;
        }
        rotations.push((cs, sn));
    }
    for (offset, &(cs, sn)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let (u, w) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = u * cs + w * sn;
            h[(i, k + 1)] = -u * sn.conj() + w * cs.conj();
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Unit null vector of `A − λI` by inverse iteration, phase-fixed so that the
/// largest component is real and positive.
fn eigenvector<T: Real>(a: &Operator<T>, lambda: Complex<T>) -> Ket<T> {
    let n = a.dim();
    let mut m = a.clone();
    let nudge = T::lit(1e-10) * T::one().max(a.max_abs());
    for i in 0..n {
        m[(i, i)] -= lambda + re(nudge);
    }
    let mut x: Vec<Complex<T>> = (0..n)
        .map(|i| c(T::one(), T::lit(0.1) * T::lit(i as f64)))
        .collect();
    for _ in 0..4 {
        x = solve_regularized(&m, &x);
        let norm: T = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for z in x.iter_mut() {
            *z /= norm;
        }
    }
    let lead = x
        .iter()
        .copied()
        .max_by(|p, q| p.norm().partial_cmp(&q.norm()).unwrap_or(Ordering::Equal))
        .unwrap();
    let phase = lead.conj() / lead.norm();
    Ket::new(x.into_iter().map(|z| z * phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    type Op = Operator<f64>;

    fn pt(omega: f64, gamma: f64) -> Op {
        Op::sigma_x().scale_real(omega) + Op::sigma_z().scale(Complex::new(0.0, gamma))
    }

    #[test]
    fn pauli_x_spectrum() {
        let v = eigenvalues(&Op::sigma_x()).unwrap();
        assert_eq!(v, vec![Complex::new(-1.0, 0.0), Complex::new(1.0, 0.0)]);
    }

    #[test]
    fn unbroken_pt_pair() {
        let v = eigenvalues(&pt(1.0, 0.5)).unwrap();
        let e = 0.75f64.sqrt();
        assert!((v[0] - Complex::new(-e, 0.0)).norm() < 1e-15);
        assert!((v[1] - Complex::new(e, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exceptional_point_coalesces() {
        let e = eig(&pt(0.5, 0.5)).unwrap();
        assert!(e.values.iter().all(|z| z.norm() == 0.0));
        let vecs = e.vectors.unwrap();
        let overlap: Complex<f64> = vecs[0]
            .amplitudes()
            .iter()
            .zip(vecs[1].amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn three_level_matches_known_spectrum() {
        // Upper triangular: eigenvalues are the diagonal.
        let mut a = Op::diagonal(&[
            Complex::new(1.0, -0.5),
            Complex::new(-2.0, 0.0),
            Complex::new(0.3, 0.7),
        ]);
        a[(0, 1)] = Complex::new(4.0, 1.0);
        a[(0, 2)] = Complex::new(-1.0, 2.0);
        a[(1, 2)] = Complex::new(0.5, 0.0);
        // Similarity transform keeps the spectrum but fills the matrix.
        let s = Op::from_real(3, &[1.0, 0.2, 0.0, -0.3, 1.0, 0.4, 0.1, 0.0, 1.0]).unwrap();
        let s_inv = crate::quantum::inverse_small(&s).unwrap();
        let full = &(&s * &a) * &s_inv;
        let v = eigenvalues(&full).unwrap();
        let expected = [
            Complex::new(-2.0, 0.0),
            Complex::new(0.3, 0.7),
            Complex::new(1.0, -0.5),
        ];
        for (x, y) in v.iter().zip(expected.iter()) {
            assert!((x - y).norm() < 1e-10, "{v:?}");
        }
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let mut a = Op::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                a[(i, j)] = Complex::new((i * 3 + j) as f64 * 0.1 - 0.4, ((i + 2 * j) % 3) as f64 * 0.2);
            }
        }
        let e = eig(&a).unwrap();
        for (lambda, v) in e.values.iter().zip(e.vectors.unwrap()) {
            let amps = v.amplitudes();
            for i in 0..4 {
                let av: Complex<f64> = (0..4).map(|j| a[(i, j)] * amps[j]).sum();
                assert!((av - lambda * amps[i]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_oversized_input() {
        assert!(matches!(
            eigenvalues(&Op::identity(9)),
            Err(Error::UnsupportedDimension { .. })
        ));
    }
}
