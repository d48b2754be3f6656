//! Random instances shared by unit tests.

use num_complex::Complex;
use rand::Rng;

use crate::quantum::{DensityMatrix, Operator};

pub(crate) fn random_operator(dim: usize, rng: &mut impl Rng) -> Operator<f64> {
    Operator::from_row_major(
        dim,
        (0..dim * dim).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
    )
    .unwrap()
}

pub(crate) fn random_hermitian(dim: usize, rng: &mut impl Rng) -> Operator<f64> {
    let a = random_operator(dim, rng);
    (&a + &a.dagger()).scale_real(0.5)
}

pub(crate) fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix<f64> {
    let a = random_operator(dim, rng);
    let p = &a * &a.dagger();
    let tr = p.trace().re;
    DensityMatrix::normalized(p.scale_real(1.0 / tr)).unwrap()
}
