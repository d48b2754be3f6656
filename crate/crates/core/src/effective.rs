//! Adiabatic elimination of a fast-decaying excited manifold.
//!
//! With `H = H_g + H_e + V₊ + V₋`, `V₊ = P_e H P_g`, and decay operators that
//! carry excitations from `P_e` back to `P_g`, the ground-manifold dynamics is
//! generated to second order in `V` by
//!
//! ```text
//! H_NH  = H_e − (i/2) Σ L_k† L_k
//! H_eff = H_g − ½ V₋ (H_NH⁻¹ + H_NH⁻†) V₊
//! L_eff = L_k H_NH⁻¹ V₊
//! ```
//!
//! Rates are folded into the jump operators (`L_k = √γ_k L̂_k`) when a
//! [`PerturbativeModel`] is built.

use crate::error::{Error, Result};
use crate::lindblad::{Channel, LindbladModel};
use crate::quantum::{eigh, inverse_on_block, operator_norm, Operator};
use crate::scalar::{c, Real};

/// Partition of the basis into ground and excited indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceSplit {
    dim: usize,
    ground: Vec<usize>,
    excited: Vec<usize>,
}

impl SubspaceSplit {
    pub fn new(dim: usize, ground: &[usize], excited: &[usize]) -> Result<Self> {
        let mut seen = vec![false; dim];
        for &i in ground.iter().chain(excited) {
            if i >= dim {
                return Err(Error::InvalidSplit(format!("index {i} outside dimension {dim}")));
            }
            if seen[i] {
                return Err(Error::InvalidSplit(format!("index {i} listed twice")));
            }
            seen[i] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidSplit(format!("index {missing} is in neither manifold")));
        }
        if ground.is_empty() {
            return Err(Error::InvalidSplit("ground manifold is empty".into()));
        }
        let mut ground = ground.to_vec();
        let mut excited = excited.to_vec();
        ground.sort_unstable();
        excited.sort_unstable();
        Ok(Self { dim, ground, excited })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn excited(&self) -> &[usize] {
        &self.excited
    }

    pub fn ground_projector<T: Real>(&self) -> Operator<T> {
        Operator::projector(self.dim, &self.ground)
    }

    pub fn excited_projector<T: Real>(&self) -> Operator<T> {
        Operator::projector(self.dim, &self.excited)
    }
}

/// Block decomposition of a Hamiltonian plus excited-to-ground decay operators.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbativeModel<T> {
    split: SubspaceSplit,
    h_g: Operator<T>,
    h_e: Operator<T>,
    v_plus: Operator<T>,
    v_minus: Operator<T>,
    jumps: Vec<Operator<T>>,
}

fn block<T: Real>(left: &Operator<T>, a: &Operator<T>, right: &Operator<T>) -> Operator<T> {
    &(left * a) * right
}

/// Splits `h` into `H_g`, `H_e`, `V₊ = P_e H P_g` and `V₋ = P_g H P_e`, folding
/// each channel rate into its jump operator.
///
/// Every jump operator must satisfy `L = P_g L P_e`.
pub fn split_hamiltonian<T: Real>(
    h: &Operator<T>,
    split: &SubspaceSplit,
    channels: &[Channel<T>],
) -> Result<PerturbativeModel<T>> {
    if h.dim() != split.dim() {
        return Err(Error::DimensionMismatch {
            expected: split.dim(),
            found: h.dim(),
        });
    }
    let pg = split.ground_projector();
    let pe = split.excited_projector();
    let mut jumps = Vec::with_capacity(channels.len());
    for (index, ch) in channels.iter().enumerate() {
        if ch.jump.dim() != split.dim() {
            return Err(Error::DimensionMismatch {
                expected: split.dim(),
                found: ch.jump.dim(),
            });
        }
        if !(ch.rate >= T::zero()) {
            return Err(crate::error::invalid("rate", format!("decay rate must be non-negative, got {}", ch.rate)));
        }
        let off_structure = ch.jump.clone() - block(&pg, &ch.jump, &pe);
        if off_structure.max_abs() > T::tol(1e-12) * T::one().max(ch.jump.max_abs()) {
            return Err(Error::ChannelStructure { index });
        }
        jumps.push(ch.jump.scale_real(ch.rate.sqrt()));
    }
    Ok(PerturbativeModel {
        h_g: block(&pg, h, &pg),
        h_e: block(&pe, h, &pe),
        v_plus: block(&pe, h, &pg),
        v_minus: block(&pg, h, &pe),
        split: split.clone(),
        jumps,
    })
}

impl<T: Real> PerturbativeModel<T> {
    pub fn split(&self) -> &SubspaceSplit {
        &self.split
    }

    pub fn ground_hamiltonian(&self) -> &Operator<T> {
        &self.h_g
    }

    pub fn excited_hamiltonian(&self) -> &Operator<T> {
        &self.h_e
    }

    pub fn v_plus(&self) -> &Operator<T> {
        &self.v_plus
    }

    pub fn v_minus(&self) -> &Operator<T> {
        &self.v_minus
    }

    /// Jump operators with their rates folded in.
    pub fn jumps(&self) -> &[Operator<T>] {
        &self.jumps
    }

    /// `H_g + H_e + V₊ + V₋`.
    pub fn hamiltonian(&self) -> Operator<T> {
        &(&(&self.h_g + &self.h_e) + &self.v_plus) + &self.v_minus
    }

    fn decay_operator(&self) -> Operator<T> {
        let mut sum = Operator::zeros(self.split.dim());
        for l in &self.jumps {
            sum += &(&l.dagger() * l);
        }
        sum
    }

    fn nh_inverse(&self) -> Result<Operator<T>> {
        inverse_on_block(&nonhermitian_excited(self), self.split.excited())
    }
}

/// `H_NH = H_e − (i/2) Σ L_k† L_k` restricted to the excited block.
pub fn nonhermitian_excited<T: Real>(model: &PerturbativeModel<T>) -> Operator<T> {
    let pe = model.split.excited_projector();
    let mut h = model.h_e.clone();
    h.add_scaled(c(T::zero(), T::lit(-0.5)), &block(&pe, &model.decay_operator(), &pe));
    h
}

/// `H_eff = H_g − ½ V₋ (H_NH⁻¹ + H_NH⁻†) V₊`.
pub fn effective_hamiltonian<T: Real>(model: &PerturbativeModel<T>) -> Result<Operator<T>> {
    let inv = model.nh_inverse()?;
    let sym = &inv + &inv.dagger();
    let mut h = model.h_g.clone();
    h.add_scaled(c(T::lit(-0.5), T::zero()), &(&(&model.v_minus * &sym) * &model.v_plus));
    Ok(h)
}

/// `L_eff^(k) = L_k H_NH⁻¹ V₊`, one per channel, rates included.
pub fn effective_jumps<T: Real>(model: &PerturbativeModel<T>) -> Result<Vec<Operator<T>>> {
    let right = &model.nh_inverse()? * &model.v_plus;
    Ok(model.jumps.iter().map(|l| l * &right).collect())
}

/// `‖V₊‖ / κ_min`, where `κ_min` is the smallest eigenvalue of `Σ L_k†L_k` on
/// the excited block. Small values indicate that elimination is justified;
/// `0.1` is a reasonable warning threshold. Infinite if some excited state
/// does not decay while coupled.
pub fn validity_metric<T: Real>(model: &PerturbativeModel<T>) -> T {
    let coupling = operator_norm(&model.v_plus);
    if coupling == T::zero() {
        return T::zero();
    }
    let excited = model.split.excited();
    if excited.is_empty() {
        return T::zero();
    }
    let kappa = eigh(&model.decay_operator().submatrix(excited)).values[0];
    if kappa <= T::zero() {
        return T::infinity();
    }
    coupling / kappa
}

/// Ground-manifold generator produced by [`reduce`].
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveModel<T> {
    split: SubspaceSplit,
    hamiltonian: Operator<T>,
    jumps: Vec<Operator<T>>,
}

impl<T: Real> EffectiveModel<T> {
    /// `H_eff` in the full space (zero outside the ground block).
    pub fn hamiltonian(&self) -> &Operator<T> {
        &self.hamiltonian
    }

    /// `L_eff^(k)` in the full space, rates included.
    pub fn jumps(&self) -> &[Operator<T>] {
        &self.jumps
    }

    pub fn split(&self) -> &SubspaceSplit {
        &self.split
    }

    /// The reduced master equation on the ground manifold alone, with basis
    /// order given by [`SubspaceSplit::ground`].
    pub fn ground_model(&self) -> LindbladModel<T> {
        let g = self.split.ground();
        self.jumps
            .iter()
            .fold(LindbladModel::new(self.hamiltonian.submatrix(g)), |m, l| {
                m.with_channel(T::one(), l.submatrix(g)).expect("sub-blocks share a dimension")
            })
    }
}

/// Full second-order reduction of `model`.
pub fn reduce<T: Real>(model: &PerturbativeModel<T>) -> Result<EffectiveModel<T>> {
    Ok(EffectiveModel {
        split: model.split.clone(),
        hamiltonian: effective_hamiltonian(model)?,
        jumps: effective_jumps(model)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::integrate_master;
    use crate::quantum::DensityMatrix;
    use crate::testing::{random_hermitian, random_operator};
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Op = Operator<f64>;

    const A: usize = 2;

    fn lambda(omega: f64, delta: f64, gamma_a: f64) -> PerturbativeModel<f64> {
        let mut h = Op::zeros(3);
        h[(A, 0)] = Complex::new(omega / 2.0, 0.0);
        h[(0, A)] = Complex::new(omega / 2.0, 0.0);
        h[(A, A)] = Complex::new(delta, 0.0);
        let split = SubspaceSplit::new(3, &[0, 1], &[A]).unwrap();
        let ch = Channel {
            rate: gamma_a,
            jump: Op::transition(3, 1, A),
        };
        split_hamiltonian(&h, &split, &[ch]).unwrap()
    }

    fn close(a: Complex<f64>, re: f64, im: f64) -> bool {
        (a.re - re).abs() < 1e-14 && (a.im - im).abs() < 1e-14
    }

    #[test]
    fn split_validation() {
        assert!(SubspaceSplit::new(3, &[0, 1], &[2]).is_ok());
        assert!(SubspaceSplit::new(3, &[0, 1], &[1]).is_err());
        assert!(SubspaceSplit::new(3, &[0], &[2]).is_err());
        assert!(SubspaceSplit::new(3, &[0, 1], &[3]).is_err());
        assert!(SubspaceSplit::new(2, &[], &[0, 1]).is_err());
        let s = SubspaceSplit::new(3, &[1, 0], &[2]).unwrap();
        let sum = s.ground_projector::<f64>() + s.excited_projector();
        assert_eq!(sum, Op::identity(3));
        assert_eq!(&s.ground_projector::<f64>() * &s.excited_projector(), Op::zeros(3));
    }

    #[test]
    fn lambda_blocks() {
        let m = lambda(0.5, 0.3, 2.5);
        assert_eq!(m.v_plus(), &Op::transition(3, A, 0).scale_real(0.25));
        assert_eq!(m.excited_hamiltonian(), &Op::transition(3, A, A).scale_real(0.3));
        assert_eq!(m.ground_hamiltonian(), &Op::zeros(3));
        assert_eq!(m.v_minus(), &m.v_plus().dagger());
        assert_eq!(m.hamiltonian()[(0, A)], Complex::new(0.25, 0.0));
    }

    #[test]
    fn block_diagonal_input_has_no_coupling() {
        let h = Op::real_diagonal(&[0.1, -0.4, 2.0]);
        let split = SubspaceSplit::new(3, &[0, 1], &[2]).unwrap();
        let m = split_hamiltonian(&h, &split, &[]).unwrap();
        assert_eq!(m.v_plus(), &Op::zeros(3));
        assert_eq!(m.v_minus(), &Op::zeros(3));
        assert_eq!(validity_metric(&m), 0.0);
    }

    #[test]
    fn rejects_channels_outside_excited_to_ground() {
        let split = SubspaceSplit::new(3, &[0, 1], &[2]).unwrap();
        for jump in [Op::transition(3, 0, 1), Op::transition(3, 2, 0), Op::transition(3, 2, 2)] {
            let ch = Channel { rate: 1.0, jump };
            assert_eq!(
                split_hamiltonian(&Op::zeros(3), &split, &[ch]).unwrap_err(),
                Error::ChannelStructure { index: 0 }
            );
        }
    }

    #[test]
    fn nonhermitian_examples() {
        assert!(close(nonhermitian_excited(&lambda(0.5, 0.0, 2.5))[(A, A)], 0.0, -1.25));
        assert!(close(nonhermitian_excited(&lambda(0.5, 1.0, 2.0))[(A, A)], 1.0, -1.0));
        let split = SubspaceSplit::new(3, &[0, 1], &[2]).unwrap();
        let h = Op::real_diagonal(&[0.0, 0.0, 0.7]);
        let m = split_hamiltonian(&h, &split, &[]).unwrap();
        assert_eq!(nonhermitian_excited(&m), *m.excited_hamiltonian());
    }

    #[test]
    fn effective_hamiltonian_examples() {
        let h = effective_hamiltonian(&lambda(0.5, 0.0, 2.5)).unwrap();
        assert!(h.max_abs() < 1e-15);
        let h = effective_hamiltonian(&lambda(0.2, 1.0, 2.0)).unwrap();
        assert!(close(h[(0, 0)], -0.005, 0.0));
        let mut rest = h.clone();
        rest[(0, 0)] = Complex::new(0.0, 0.0);
        assert!(rest.max_abs() < 1e-15);

        let h = effective_hamiltonian(&lambda(0.0, 1.0, 2.0)).unwrap();
        assert_eq!(h, Op::zeros(3));
    }

    #[test]
    fn singular_excited_block_is_reported() {
        let m = lambda(0.5, 0.0, 0.0);
        assert!(matches!(effective_hamiltonian(&m), Err(Error::Singular { .. })));
        assert!(matches!(effective_jumps(&m), Err(Error::Singular { .. })));
        assert!(validity_metric(&m).is_infinite());
    }

    #[test]
    fn effective_jump_examples() {
        for (omega, gamma_a) in [(0.5, 2.5), (1.0, 10.0), (1.5, 22.5), (2.0, 40.0)] {
            let jumps = effective_jumps(&lambda(omega, 0.0, gamma_a)).unwrap();
            assert_eq!(jumps.len(), 1);
            let amp = jumps[0][(1, 0)];
            let g_eff = omega * omega / gamma_a;
            assert!(close(amp, 0.0, g_eff.sqrt()));
            assert!((amp.norm_sqr() - 0.1).abs() <= 1e-12);
            let mut rest = jumps[0].clone();
            rest[(1, 0)] = Complex::new(0.0, 0.0);
            assert!(rest.max_abs() < 1e-15);
        }
        assert_eq!(effective_jumps(&lambda(0.0, 0.0, 2.5)).unwrap()[0], Op::zeros(3));
    }

    #[test]
    fn validity_examples() {
        assert!((validity_metric(&lambda(0.5, 0.0, 2.5)) - 0.1).abs() < 1e-12);
        assert!((validity_metric(&lambda(2.0, 0.0, 40.0)) - 0.025).abs() < 1e-12);
        assert_eq!(validity_metric(&lambda(0.0, 0.0, 2.5)), 0.0);
    }

    fn random_model(rng: &mut ChaCha8Rng) -> PerturbativeModel<f64> {
        let dim = rng.gen_range(3..=5);
        let n_excited = rng.gen_range(1..dim);
        let excited: Vec<usize> = (dim - n_excited..dim).collect();
        let ground: Vec<usize> = (0..dim - n_excited).collect();
        let split = SubspaceSplit::new(dim, &ground, &excited).unwrap();
        let pg = split.ground_projector();
        let pe = split.excited_projector();
        let channels = (0..rng.gen_range(1..=3))
            .map(|_| Channel {
                rate: rng.gen_range(0.5..3.0),
                jump: block(&pg, &random_operator(dim, rng), &pe),
            })
            .collect::<Vec<_>>();
        split_hamiltonian(&random_hermitian(dim, rng), &split, &channels).unwrap()
    }

    #[test]
    fn reduced_operators_respect_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let m = random_model(&mut rng);
            let pe = m.split().excited_projector();
            let pg = m.split().ground_projector();
            let reduced = reduce(&m).unwrap();
            let h = reduced.hamiltonian();
            assert!(h.hermitian_residual() <= 1e-10);
            let comm = &(h * &pg) - &(&pg * h);
            assert!(comm.max_abs() <= 1e-12);
            for l in reduced.jumps() {
                assert!((&pe * l).max_abs() <= 1e-12);
                assert!((l * &pe).max_abs() <= 1e-12);
            }
        }
    }

    /// Ground populations of the full Λ model against its reduction.
    fn reduction_error(omega: f64, gamma_a: f64) -> f64 {
        let m = lambda(omega, 0.0, gamma_a);
        let full = LindbladModel::new(m.hamiltonian())
            .with_channel(gamma_a, Op::transition(3, 1, A))
            .unwrap();
        let reduced = reduce(&m).unwrap().ground_model();
        let (dt, t) = (1e-3, 20.0);
        let a = integrate_master(&full, &DensityMatrix::basis(3, 0), dt, t).unwrap();
        let b = integrate_master(&reduced, &DensityMatrix::basis(2, 0), dt, t).unwrap();
        a.population_series(0)
            .iter()
            .zip(b.population_series(0))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn reduction_improves_as_coupling_weakens() {
        let errors: Vec<f64> = [(0.5, 2.5), (1.0, 10.0), (1.5, 22.5), (2.0, 40.0)]
            .iter()
            .map(|&(o, g)| reduction_error(o, g))
            .collect();
        assert!(errors[0] < 0.1, "{errors:?}");
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    }
}
