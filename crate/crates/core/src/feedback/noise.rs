//! Reproducible Wiener increments.
//!
//! Each trajectory owns a ChaCha8 stream keyed by the master seed and selected
//! by the trajectory index (`set_stream`). Standard normals come in Box–Muller
//! pairs, each pair consuming exactly two 64-bit words, so draw `k` is a pure
//! function of `(seed, index, k)` and can be reached with [`NoiseStream::seek`].

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct NoiseStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
    step: u64,
    spare: Option<f64>,
}

impl NoiseStream {
    pub fn new(master_seed: u64, trajectory_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(trajectory_index);
        Self {
            seed: master_seed,
            index: trajectory_index,
            rng,
            step: 0,
            spare: None,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.seed
    }

    pub fn trajectory_index(&self) -> u64 {
        self.index
    }

    /// Number of draws taken so far.
    pub fn step(&self) -> u64 {
        self.step
    }

    /// Repositions the stream so that the next draw is draw number `step`.
    pub fn seek(&mut self, step: u64) {
        // Two u64 words per pair, 32-bit ChaCha words.
        self.rng.set_word_pos(u128::from(step / 2) * 4);
        self.spare = None;
        self.step = step - step % 2;
        if step % 2 == 1 {
            self.standard_normal();
        }
    }

    /// Next standard normal deviate.
    pub fn standard_normal(&mut self) -> f64 {
        self.step += 1;
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = unit_open_closed(self.rng.next_u64());
        let u2 = unit_open_closed(self.rng.next_u64());
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// Maps 53 random bits onto (0, 1].
fn unit_open_closed(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Gaussian increment with mean 0 and variance `dt`.
pub fn wiener_increment<T: Real>(stream: &mut NoiseStream, dt: T) -> T {
    dt.sqrt() * T::lit(stream.standard_normal())
}
