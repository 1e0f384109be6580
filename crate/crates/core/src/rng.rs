//! Counter-derived random streams.
//!
//! Every random quantity in a realization is drawn from a stream identified by
//! `(master_seed, realization, purpose)`. Streams are derived by hashing that
//! triple, never by advancing a shared generator, so the samples a realization
//! sees do not depend on which thread runs it or in what order.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Generator handed to each consumer.
pub type StreamRng = Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output mixer.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `words` into a single well-mixed 64-bit key.
pub fn derive_key(seed: u64, words: &[u64]) -> u64 {
    words.iter().fold(mix64(seed ^ GOLDEN_GAMMA), |acc, &w| {
        mix64(acc.wrapping_add(GOLDEN_GAMMA) ^ mix64(w.wrapping_add(GOLDEN_GAMMA)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Cells,
    HtcUsers,
    MtcDevices,
    MtcActivation,
    RbAssignment,
    DownlinkFading,
    UplinkFading,
    SweepPoint,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Cells => 1,
            Purpose::HtcUsers => 2,
            Purpose::MtcDevices => 3,
            Purpose::MtcActivation => 4,
            Purpose::RbAssignment => 5,
            Purpose::DownlinkFading => 6,
            Purpose::UplinkFading => 7,
            Purpose::SweepPoint => 8,
        }
    }
}

/// Identifies the family of streams owned by one spatial realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl StreamId {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// 64-bit key for `(purpose, counter)`. Used directly by counter-based
    /// channel draws and to seed sequential generators.
    pub fn key(&self, purpose: Purpose, counter: u64) -> u64 {
        derive_key(self.master_seed, &[self.stream_id, purpose.tag(), counter])
    }

    pub fn rng(&self, purpose: Purpose) -> StreamRng {
        self.rng_at(purpose, 0)
    }

    pub fn rng_at(&self, purpose: Purpose, counter: u64) -> StreamRng {
        StreamRng::seed_from_u64(self.key(purpose, counter))
    }
}
