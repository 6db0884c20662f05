//! Deterministic inputs shared by the benchmarks.

use cvtx_core::{Base, BigUint, DigitVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn operands(count: usize, bits: u32, beta: u32, seed: u64) -> Vec<DigitVector> {
    let base = Base::new(beta).expect("valid base");
    naturals(count, bits, seed)
        .iter()
        .map(|v| cvtx_core::to_digits(v, base, None))
        .collect()
}

pub fn naturals(count: usize, bits: u32, seed: u64) -> Vec<BigUint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
    (0..count).map(|_| BigUint::from(rng.gen::<u64>() & mask)).collect()
}
