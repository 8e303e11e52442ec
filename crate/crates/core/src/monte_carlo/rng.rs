//! Per-path random streams.
//!
//! Every path owns a ChaCha8 stream selected by `(seed, purpose, path_index)`,
//! so any single path can be regenerated in isolation and an ensemble gives
//! the same counts whatever order its paths are evaluated in.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// What a stream is used for; distinct purposes never share key material.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamPurpose {
    Gaussian = 0,
    Uniform = 1,
}

pub fn path_rng(seed: u64, purpose: StreamPurpose, path_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8] = purpose as u8;
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path_index);
    rng
}

pub fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniform on `[0, 1)` with 53 random bits.
pub fn unit_uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
