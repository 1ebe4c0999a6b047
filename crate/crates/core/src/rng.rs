//! Counter-keyed random streams.
//!
//! Every draw in a run comes from a ChaCha8 stream whose key is derived from
//! `(seed, iteration, purpose)` and whose stream id is the particle id, or a
//! reserved id for the sequential host phases. A particle's draws therefore
//! never depend on which worker runs it or in what order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream id reserved for sequential host-side phases.
pub const HOST_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DrawPurpose {
    /// Random permutations and initial velocities.
    Init,
    /// `r2`, `r3` of the velocity update, in that order.
    Velocity,
    /// Tie-breaks and column orders in the aggregation procedures.
    Aggregation,
    /// Source particle picks during migration.
    Migration,
}

impl DrawPurpose {
    fn tag(self) -> u64 {
        match self {
            DrawPurpose::Init => 1,
            DrawPurpose::Velocity => 2,
            DrawPurpose::Aggregation => 3,
            DrawPurpose::Migration => 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, iteration: u64, purpose: DrawPurpose, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&iteration.to_le_bytes());
        key[16..24].copy_from_slice(&purpose.tag().to_le_bytes());
        key[24..].copy_from_slice(b"qapswarm");
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Stream of particle `particle` for one phase of one iteration.
    pub fn particle(seed: u64, particle: usize, iteration: u64, purpose: DrawPurpose) -> Self {
        Self::new(seed, iteration, purpose, particle as u64)
    }

    /// Stream of a sequential host phase.
    pub fn host(seed: u64, iteration: u64, purpose: DrawPurpose) -> Self {
        Self::new(seed, iteration, purpose, HOST_STREAM)
    }

    /// Uniform draw from `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

impl RngCore for RandomStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
