//! Fixed inputs shared by the benchmarks.

use pronylab::error_geometry::RegularityParams;
use pronylab::{moments, MomentVector, SpikeSignal};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded regular model signal with `d` spikes.
pub fn regular_signal(d: usize, seed: u64) -> SpikeSignal {
    let eta = if d > 1 { (1.0 / (d - 1) as f64).min(0.2) } else { 0.2 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RegularityParams::new(eta, 0.5, 2.0).sample(d, &mut rng).expect("valid parameters")
}

pub fn regular_moments(d: usize, seed: u64) -> MomentVector {
    let s = regular_signal(d, seed);
    MomentVector::new(moments(&s, 2 * d)).expect("finite moments")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_reproducible() {
        for d in 1..=6 {
            assert_eq!(regular_signal(d, 1), regular_signal(d, 1));
            assert_eq!(regular_moments(d, 2).d(), d);
        }
    }
}
