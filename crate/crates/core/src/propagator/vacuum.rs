use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::GridSpec;
use crate::propagator::state::FieldState;

/// Per-trajectory random stream: ChaCha8 keyed by the master seed, stream = trajectory index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrajectorySeed {
    pub master_seed: u64,
    pub trajectory_index: u64,
}

impl TrajectorySeed {
    pub fn new(master_seed: u64, trajectory_index: u64) -> Self {
        TrajectorySeed { master_seed, trajectory_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.master_seed);
        r.set_stream(self.trajectory_index);
        r
    }

    /// Independent stream for randomness applied after the crystal (loss, filters).
    pub fn aux_rng(&self, k: u64) -> ChaCha8Rng {
        let key = self.master_seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k + 1);
        let mut r = ChaCha8Rng::seed_from_u64(key);
        r.set_stream(self.trajectory_index);
        r
    }
}

/// Standard circular complex normal, ⟨|z|²⟩ = 1, by Box–Muller.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    Complex64::from_polar((-u1.ln()).sqrt(), 2.0 * PI * u2)
}

/// Wigner vacuum: independent cells with ⟨|a|²⟩ = 1/(2ΔV).
pub fn sample_vacuum(grid: &GridSpec, n_env: usize, seed: TrajectorySeed) -> FieldState {
    let mut state = FieldState::zeros(grid, n_env);
    let amp = (0.5 / state.shape().cell_volume()).sqrt();
    let mut rng = seed.rng();
    for e in &mut state.envelopes {
        for a in e.iter_mut() {
            *a = amp * complex_normal(&mut rng);
        }
    }
    state
}
