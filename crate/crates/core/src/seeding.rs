//! Random streams derived from a single 64-bit seed.
//!
//! Every stream is `ChaCha8Rng` (rand_chacha 0.9) built with
//! `seed_from_u64(seed ^ purpose_constant)`. Blocked generators additionally
//! select `set_stream(block_index)` on that generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Degrees,
    Pairing,
    Weights,
    Edges,
    Targets,
    Trials,
}

impl Purpose {
    pub const fn constant(self) -> u64 {
        match self {
            Purpose::Degrees => 0x9e37_79b9_7f4a_7c15,
            Purpose::Pairing => 0xbf58_476d_1ce4_e5b9,
            Purpose::Weights => 0x94d0_49bb_1331_11eb,
            Purpose::Edges => 0x2545_f491_4f6c_dd1d,
            Purpose::Targets => 0xd6e8_feb8_6659_fd93,
            Purpose::Trials => 0xa076_1d64_78bd_642f,
        }
    }
}

pub fn stream(seed: u64, purpose: Purpose) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed ^ purpose.constant())
}

/// Substream `block` of `stream(seed, purpose)`.
pub fn substream(seed: u64, purpose: Purpose, block: u64) -> StreamRng {
    let mut rng = stream(seed, purpose);
    rng.set_stream(block);
    rng
}
