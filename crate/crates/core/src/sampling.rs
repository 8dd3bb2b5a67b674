//! Seeded random sampling shared by the property checks and the solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lie_algebra::AlgebraElement;

pub const DEFAULT_SEED: u64 = 42;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn normal_element<R: Rng>(rng: &mut R, n: usize) -> AlgebraElement {
    AlgebraElement::new(normal_vec(rng, n))
}

/// Uniform in `(0, hi]`.
pub fn positive_scale<R: Rng>(rng: &mut R, hi: f64) -> f64 {
    hi * (1.0 - rng.random::<f64>())
}
