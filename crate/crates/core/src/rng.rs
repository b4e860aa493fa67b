//! Counter-based random draws.
//!
//! Every draw is addressed by `(seed, stream, record index)`: record `i` of a
//! stream owns ChaCha8 block `i`, i.e. eight 64-bit words. Draws never depend
//! on how many other records were generated before them, so datasets and
//! Monte-Carlo evaluations can be produced in any order or in parallel.

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

/// 64-bit words available to each record.
pub const WORDS_PER_RECORD: usize = 8;

/// Stream carrying the `(X, Y, Y_tilde)` triples of a sample.
pub const STREAM_SAMPLE: u64 = 1;
/// Stream carrying fresh feature draws for Monte-Carlo risk estimates.
pub const STREAM_RISK: u64 = 2;
/// Stream carrying random construction choices (e.g. hypercube signs).
pub const STREAM_CONSTRUCTION: u64 = 3;

const BLOCK_U32_WORDS: u128 = 16;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of sample size `n`. Not sequential in either
/// argument, so adding trials or sizes never shifts existing seeds.
pub fn derive_seed(base_seed: u64, n: u64, trial: u64) -> u64 {
    mix64(mix64(mix64(base_seed) ^ n) ^ trial.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

/// Random access to the draws of one `(seed, stream)` pair.
pub struct CounterRng {
    core: ChaCha8Rng,
    next_record: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            state = mix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut core = ChaCha8Rng::from_seed(key);
        core.set_stream(stream);
        CounterRng { core, next_record: 0 }
    }

    /// The words of record `index`.
    pub fn record(&mut self, index: u64) -> RecordDraws {
        if index != self.next_record {
            self.core.set_word_pos(u128::from(index) * BLOCK_U32_WORDS);
        }
        let mut words = [0u64; WORDS_PER_RECORD];
        for w in &mut words {
            *w = self.core.next_u64();
        }
        self.next_record = index.wrapping_add(1);
        RecordDraws(words)
    }
}

/// The eight words owned by one record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecordDraws(pub [u64; WORDS_PER_RECORD]);

impl RecordDraws {
    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&self, slot: usize) -> f64 {
        (self.0[slot] >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1)`: the midpoint of one of `2^53` equal cells.
    pub fn open_uniform(&self, slot: usize) -> f64 {
        ((self.0[slot] >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `p`.
    pub fn bernoulli(&self, slot: usize, p: f64) -> bool {
        self.uniform(slot) < p
    }

    pub fn word(&self, slot: usize) -> u64 {
        self.0[slot]
    }
}
