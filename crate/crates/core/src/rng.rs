//! The one pseudorandom generator used for every seeded choice.
//!
//! Algorithm (version `goe-stream-v1`): the 32-byte ChaCha8 key is
//! `SHA-256(domain || 0x00 || seed as 8 little-endian bytes || each extra
//! word as 8 little-endian bytes)`, the stream is ChaCha8 from that key, and a
//! value uniform in `[0, n)` is drawn by rejection from `next_u64` (values at or
//! above the largest multiple of `n` are discarded). Nothing depends on the
//! platform's default generator, so streams are identical across machines.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

pub const STREAM_VERSION: &str = "goe-stream-v1";

pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(domain: &str, seed: u64, extra: &[u64]) -> Self {
        let mut h = Sha256::new();
        h.update(domain.as_bytes());
        h.update([0u8]);
        h.update(seed.to_le_bytes());
        for e in extra {
            h.update(e.to_le_bytes());
        }
        let key: [u8; 32] = h.finalize().into();
        Self { rng: ChaCha8Rng::from_seed(key) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let x = self.rng.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}
