//! Seeded id generation. Ids look like RFC 4122 v4 UUIDs but are drawn from
//! a ChaCha stream so a seeded run mints the same ids every time.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone)]
pub struct IdGen {
    rng: ChaCha20Rng,
}

impl IdGen {
    pub fn seeded(seed: u64) -> Self {
        IdGen { rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// Hyphenated UUID-v4-shaped id.
    pub fn uuid(&mut self) -> String {
        let mut b = [0u8; 16];
        self.rng.fill_bytes(&mut b);
        b[6] = (b[6] & 0x0f) | 0x40;
        b[8] = (b[8] & 0x3f) | 0x80;
        format!(
            "{}-{}-{}-{}-{}",
            hex::encode(&b[0..4]),
            hex::encode(&b[4..6]),
            hex::encode(&b[6..8]),
            hex::encode(&b[8..10]),
            hex::encode(&b[10..16]),
        )
    }

    /// Lowercase hex string of `n` random bytes.
    pub fn hex(&mut self, n: usize) -> String {
        let mut b = vec![0u8; n];
        self.rng.fill_bytes(&mut b);
        hex::encode(b)
    }
}
