//! Counter-based random streams.
//!
//! A [`RngState`] is identified by a `(seed, stream)` pair which is folded
//! into the ChaCha8 key, so that distinct pairs never share keystream. Each
//! state can be split into `2^64` substreams (the ChaCha stream id), which is
//! how per-path generators are derived for parallel ensembles: path `p` of a
//! run always draws from substream `p`, whatever thread executes it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    substream: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self::with_substream(seed, stream, 0)
    }

    fn with_substream(seed: u64, stream: u64, substream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&stream.to_le_bytes());
        // Tag bytes keep (seed, stream) keys disjoint from an all-zero key.
        key[16..24].copy_from_slice(b"cylou-ou");
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(substream);
        Self {
            seed,
            stream,
            substream,
            inner,
        }
    }

    /// Fresh generator for substream `index` of this `(seed, stream)` pair.
    pub fn substream(&self, index: u64) -> Self {
        Self::with_substream(self.seed, self.stream, index)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn substream_id(&self) -> u64 {
        self.substream
    }

    /// Uniform draw from the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        loop {
            let u = (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 {
                return u;
            }
        }
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
