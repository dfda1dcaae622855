//! Seed derivation for reproducible parallel randomness.
//!
//! Every random stream in the crate is keyed by a root seed plus a short list
//! of integer coordinates (fold, row, simulation, tree, ...). The key is folded
//! through the SplitMix64 finalizer one coordinate at a time:
//!
//! ```text
//! h0     = mix(root ^ 0x9E3779B97F4A7C15)
//! h(i+1) = mix(h(i) ^ mix(coord(i) + (i+1) * 0x9E3779B97F4A7C15))
//! mix(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!          z ^= z >> 27; z *= 0x94D049BB133111EB; z ^ (z >> 31)
//! ```
//!
//! The derived key seeds a `Pcg64Mcg` generator. Since a stream depends only
//! on its coordinates, evaluation order and worker count cannot change any
//! result.

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The generator type behind every derived stream.
pub type StreamRng = Pcg64Mcg;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a 64-bit key from a root seed and a coordinate path.
pub fn derive_seed(root: u64, coords: &[u64]) -> u64 {
    let mut h = mix64(root ^ GOLDEN);
    for (i, &c) in coords.iter().enumerate() {
        let salt = GOLDEN.wrapping_mul(i as u64 + 1);
        h = mix64(h ^ mix64(c.wrapping_add(salt)));
    }
    h
}

/// Generator for the stream at `coords` under `root`.
pub fn stream(root: u64, coords: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(root, coords))
}

/// Stable numeric tags for named sub-streams.
pub mod tag {
    pub const FOREST: u64 = 0x666f_7265;
    pub const BOOTSTRAP: u64 = 0x626f_6f74;
    pub const FOLDS: u64 = 0x666f_6c64;
    pub const FAIRTTTS: u64 = 0x6674_7473;
}
