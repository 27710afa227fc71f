//! Seeded, splittable randomness for replayable games and golden tests.

use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Counter-based generator (ChaCha20) with explicit seeding.
///
/// `fork(i)` derives an independent child stream so per-trial randomness
/// does not depend on the order trials run in.
#[derive(Clone, Debug)]
pub struct DeterministicRng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl DeterministicRng {
    pub fn new(seed: u64) -> Self {
        DeterministicRng {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Seed from the operating system, for production key and IV draws.
    pub fn from_entropy() -> Self {
        let mut seed = [0u8; 8];
        rand::rngs::OsRng.fill_bytes(&mut seed);
        let mut rng = Self::new(u64::from_le_bytes(seed));
        rng.inner = ChaCha20Rng::from_entropy();
        rng
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream number `stream` of this seed.
    pub fn fork(&self, stream: u64) -> DeterministicRng {
        let mut inner = ChaCha20Rng::seed_from_u64(self.seed);
        inner.set_stream(stream.wrapping_add(1));
        DeterministicRng {
            seed: self.seed,
            inner,
        }
    }

    /// Uniform integer in `0..bound` (`bound > 0`).
    pub fn below(&mut self, bound: u64) -> u64 {
        use rand::Rng;
        self.inner.gen_range(0..bound)
    }
}

impl RngCore for DeterministicRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

impl CryptoRng for DeterministicRng {}
