//! Trajectory ensembles with a reduction that does not depend on scheduling.
//!
//! Trajectories are grouped into fixed-size chunks. Each chunk is summed
//! sequentially in index order, and chunk sums are folded in chunk order, so
//! the floating-point result is identical for any number of worker threads.

use rayon::prelude::*;

use super::config::FeedbackConfig;
use super::noise::NoiseStream;
use super::sme::{simulate, Stepper};
use crate::error::{invalid, Error, Result};
use crate::lindblad::{check_step, grid_steps};
use crate::quantum::{DensityMatrix, Operator};
use crate::scalar::Real;

const CHUNK: usize = 8;
const CHUNKS_PER_WAVE: usize = 16;

/// Per-time mean populations and their standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleResult<T> {
    pub times: Vec<T>,
    /// `mean[k][level]`.
    pub mean: Vec<Vec<T>>,
    /// Sample standard deviation over `√n_traj`; zero for a single trajectory.
    pub stderr: Vec<Vec<T>>,
    pub n_traj: usize,
}

impl<T: Real> EnsembleResult<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn mean_population(&self, level: usize) -> Vec<T> {
        self.mean.iter().map(|p| p[level]).collect()
    }

    pub fn stderr_population(&self, level: usize) -> Vec<T> {
        self.stderr.iter().map(|p| p[level]).collect()
    }
}

/// Running sums of populations and their squares, flattened `[k·dim + level]`.
struct Moments<T> {
    sum: Vec<T>,
    sum_sq: Vec<T>,
}

impl<T: Real> Moments<T> {
    fn new(len: usize) -> Self {
        Self {
            sum: vec![T::zero(); len],
            sum_sq: vec![T::zero(); len],
        }
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += *b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += *b;
        }
    }
}

fn run_chunk<T: Real>(
    stepper: &Stepper<T>,
    rho0: &Operator<T>,
    dt: T,
    steps: usize,
    indices: std::ops::Range<usize>,
    master_seed: u64,
) -> Result<Moments<T>> {
    let dim = stepper.dim();
    let mut moments = Moments::new((steps + 1) * dim);
    for index in indices {
        let mut stream = NoiseStream::new(master_seed, index as u64);
        let mut offset = 0;
        let Moments { sum, sum_sq } = &mut moments;
        simulate(stepper, rho0, dt, steps, &mut stream, |rho| {
            for level in 0..dim {
                let p = stepper.population(rho, level);
                sum[offset] += p;
                sum_sq[offset] += p * p;
                offset += 1;
            }
        })
        .map_err(|source| Error::Trajectory {
            trajectory: index,
            source: Box::new(source),
        })?;
    }
    Ok(moments)
}

/// Mean and standard error of the populations over trajectories `0..n_traj`,
/// trajectory `i` driven by `NoiseStream::new(master_seed, i)`.
///
/// Runs on the current rayon pool.
pub fn ensemble_average<T: Real>(
    cfg: &FeedbackConfig<T>,
    hamiltonian: &Operator<T>,
    rho0: &DensityMatrix<T>,
    dt: T,
    t_max: T,
    n_traj: usize,
    master_seed: u64,
) -> Result<EnsembleResult<T>> {
    if n_traj == 0 {
        return Err(invalid("n_traj", "at least one trajectory is required"));
    }
    check_step(dt)?;
    let stepper = Stepper::new(cfg, hamiltonian)?;
    if rho0.dim() != stepper.dim() {
        return Err(Error::DimensionMismatch {
            expected: stepper.dim(),
            found: rho0.dim(),
        });
    }
    if !rho0.is_normalized() {
        return Err(Error::NotNormalized {
            trace: rho0.trace().as_f64(),
        });
    }
    let dim = stepper.dim();
    let steps = grid_steps(dt, t_max);
    let rho0 = rho0.op();

    let chunks: Vec<_> = (0..n_traj)
        .step_by(CHUNK)
        .map(|start| start..(start + CHUNK).min(n_traj))
        .collect();
    let mut total = Moments::new((steps + 1) * dim);
    for wave in chunks.chunks(CHUNKS_PER_WAVE) {
        let partial: Vec<Result<Moments<T>>> = wave
            .par_iter()
            .map(|range| run_chunk(&stepper, rho0, dt, steps, range.clone(), master_seed))
            .collect();
        for moments in partial {
            total.merge(&moments?);
        }
    }

    let n = T::lit(n_traj as f64);
    let mean: Vec<Vec<T>> = total.sum.chunks(dim).map(|s| s.iter().map(|&x| x / n).collect()).collect();
    let stderr = total
        .sum
        .chunks(dim)
        .zip(total.sum_sq.chunks(dim))
        .map(|(s, sq)| {
            s.iter()
                .zip(sq)
                .map(|(&s, &sq)| {
                    if n_traj == 1 {
                        return T::zero();
                    }
                    let var = ((sq - s * s / n) / (n - T::one())).max(T::zero());
                    (var / n).sqrt()
                })
                .collect()
        })
        .collect();
    Ok(EnsembleResult {
        times: (0..=steps).map(|k| T::lit(k as f64) * dt).collect(),
        mean,
        stderr,
        n_traj,
    })
}
