//! Keyed, counter-based random streams.
//!
//! Every random decision in the engine is drawn from a stream identified by an
//! [`RngKey`]. The key is used verbatim as a ChaCha8 key, so the stream for a
//! key never depends on which other streams were consumed or in what order.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Part of the key, so roles never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Role {
    Extinction = 1,
    Germination = 2,
    ParentOffset = 3,
    ParentChoice = 4,
    InitCondition = 5,
    PercRow = 6,
    /// Derivation of per-replicate run seeds from a base seed.
    Replicate = 7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngKey {
    pub run_seed: u64,
    pub generation: u64,
    pub patch: i64,
    pub role: Role,
    /// Must stay below 2^56.
    pub index: u64,
}

const INDEX_MASK: u64 = (1 << 56) - 1;

impl RngKey {
    pub fn new(run_seed: u64, generation: u64, patch: i64, role: Role, index: u64) -> Self {
        debug_assert!(index <= INDEX_MASK, "stream index {index} exceeds 56 bits");
        Self {
            run_seed,
            generation,
            patch,
            role,
            index,
        }
    }

    fn chacha_key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.run_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.generation.to_le_bytes());
        key[16..24].copy_from_slice(&(self.patch as u64).to_le_bytes());
        let tail = ((self.role as u64) << 56) | (self.index & INDEX_MASK);
        key[24..32].copy_from_slice(&tail.to_le_bytes());
        key
    }
}

/// The stream for `key`. Identical keys give bit-identical streams.
pub fn derive_stream(key: RngKey) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(key.chacha_key())
}

/// Seed for replicate `replicate` of a run with base seed `base`.
pub fn replicate_seed(base: u64, replicate: u64) -> u64 {
    derive_stream(RngKey::new(base, 0, 0, Role::Replicate, replicate)).next_u64()
}

/// Uniform in [0, 1) from the top 53 bits of a word.
#[inline]
pub fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Integer threshold `t` such that `unit_f64(w) >= p` iff `w >> 11 >= t`.
#[inline]
pub fn open_threshold(p: f64) -> u64 {
    (p * (1u64 << 53) as f64).ceil() as u64
}

/// Uniform index in `0..n` from one word (multiply-shift; bias below n/2^64).
#[inline]
pub fn index_from_word(word: u64, n: usize) -> usize {
    ((word as u128 * n as u128) >> 64) as usize
}

/// A stream that yields one 64-bit word per position and can seek to any position.
///
/// Consumers that skip positions still see the same word at each position, which keeps
/// coupled runs (shared keys, different parameters) draw-aligned.
pub struct PositionedStream {
    key: RngKey,
    rng: Option<ChaCha8Rng>,
    next_pos: u64,
}

impl PositionedStream {
    pub fn new(key: RngKey) -> Self {
        Self {
            key,
            rng: None,
            next_pos: 0,
        }
    }

    /// The word at position `pos`.
    pub fn word_at(&mut self, pos: u64) -> u64 {
        let rng = self.rng.get_or_insert_with(|| derive_stream(self.key));
        if pos != self.next_pos {
            rng.set_word_pos(2 * pos as u128);
        }
        self.next_pos = pos + 1;
        rng.next_u64()
    }
}
