//! Per-chain random streams.
//!
//! Every chain draws from ChaCha8 seeded with the master seed; chains are
//! separated by the 64-bit stream id (`2·chain` for proposals, `2·chain + 1`
//! for measurements). The full generator position is serializable.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const GENERATOR_NAME: &str = "ChaCha8 (rand_chacha), stream = 2*chain + purpose";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamPurpose {
    Proposals = 0,
    Measurements = 1,
}

pub fn chain_rng(master_seed: u64, chain: usize, purpose: StreamPurpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(2 * chain as u64 + purpose as u64);
    rng
}

/// Exact generator position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: [u8; 32],
    pub stream: u64,
    /// Word position, as a decimal string (u128 does not fit JSON numbers).
    pub word_pos: String,
}

impl RngState {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        Self { seed: rng.get_seed(), stream: rng.get_stream(), word_pos: rng.get_word_pos().to_string() }
    }

    pub fn restore(&self) -> Result<ChaCha8Rng, std::num::ParseIntError> {
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos.parse::<u128>()?);
        Ok(rng)
    }
}
