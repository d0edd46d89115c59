//! Deterministic random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`), whose
//! output is specified bit-for-bit and independent of platform and word size.
//! A run seed is expanded with `SeedableRng::seed_from_u64` (PCG32-based key
//! expansion, fixed by `rand_core`), and independent consumers get their own
//! ChaCha stream number:
//!
//! | stream            | consumer                         |
//! |-------------------|----------------------------------|
//! | `0`               | per-camera appearance bias       |
//! | `1 + k`           | identity `k` (prototype, walk, noise, timing) |
//! | `u64::MAX`        | train/test identity split        |
//!
//! Because identity streams never overlap, identities can be generated in any
//! order or in parallel without changing a single output byte.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CAMERA_BIAS_STREAM: u64 = 0;
pub const SPLIT_STREAM: u64 = u64::MAX;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn identity_stream(seed: u64, identity: usize) -> ChaCha8Rng {
    stream(seed, 1 + identity as u64)
}
