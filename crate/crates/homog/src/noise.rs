//! Truncated cylindrical Wiener noise: seeded Brownian increment streams.
//!
//! Increments are pre-generated per (path, mode, step) from a counter-style
//! seeding of ChaCha8, so the oscillatory and homogenized runs of one path
//! can consume bit-for-bit identical noise. Identical seeds reproduce
//! identical streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Truncated noise description: mode count plus the master seed.
#[derive(Debug, Clone, Copy)]
pub struct NoiseModel {
    pub modes: usize,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(modes: usize, seed: u64) -> Self {
        NoiseModel { modes, seed }
    }

    /// Pre-generates the Brownian increments of one path.
    pub fn stream(&self, path: u64, steps: usize, dt: f64) -> IncrementStream {
        IncrementStream::generate(self.seed, path, steps, self.modes, dt)
    }

    /// Auxiliary-space weight `k^-2` (1-based mode index) used by the
    /// noise-norm diagnostics.
    pub fn aux_weight(k: usize) -> f64 {
        let kk = (k + 1) as f64;
        1.0 / (kk * kk)
    }
}

/// Brownian increments for one path: `steps x modes` values of `dW`.
#[derive(Debug, Clone)]
pub struct IncrementStream {
    pub dt: f64,
    pub steps: usize,
    pub modes: usize,
    data: Vec<f64>,
}

impl IncrementStream {
    pub fn generate(seed: u64, path: u64, steps: usize, modes: usize, dt: f64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&path.to_le_bytes());
        key[16..24].copy_from_slice(&(modes as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        let sqrt_dt = dt.sqrt();
        let data = (0..steps * modes)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * sqrt_dt
            })
            .collect();
        IncrementStream { dt, steps, modes, data }
    }

    #[inline]
    pub fn increment(&self, step: usize, mode: usize) -> f64 {
        self.data[step * self.modes + mode]
    }

    pub fn step_slice(&self, step: usize) -> &[f64] {
        &self.data[step * self.modes..(step + 1) * self.modes]
    }

    /// `U_0`-style weighted square sum of one step's increments.
    pub fn aux_norm_sq(&self, step: usize) -> f64 {
        self.step_slice(step)
            .iter()
            .enumerate()
            .map(|(k, dw)| NoiseModel::aux_weight(k) * dw * dw)
            .sum()
    }
}
