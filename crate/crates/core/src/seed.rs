//! Reproducible random streams.
//!
//! A replication `r` of an experiment with base seed `b` owns one stream per
//! [`Role`]. Streams are ChaCha8 keystreams: the 256-bit key is expanded from
//! `b` with SplitMix64 and the 64-bit ChaCha stream id encodes `(r, role)`, so
//! two different `(r, role)` pairs under the same base seed read disjoint
//! keystreams by construction. Sub-streams (fresh randomness for a restarted
//! learner, for example) are derived with [`StreamSeed::child`]: all children
//! of one parent share a key derived from the parent and differ only in the
//! stream id, so siblings are again disjoint.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator behind every stream.
pub type StreamRng = ChaCha8Rng;

/// Which participant a stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Algorithm,
    Adversary,
    Verification,
}

impl Role {
    fn tag(self) -> u64 {
        match self {
            Role::Algorithm => 1,
            Role::Adversary => 2,
            Role::Verification => 3,
        }
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 output step applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamSeed {
    key: u64,
    stream: u64,
}

impl StreamSeed {
    pub fn new(key: u64, stream: u64) -> Self {
        StreamSeed { key, stream }
    }

    /// Stream of `role` in replication `replication` under `base_seed`.
    pub fn derive(base_seed: u64, replication: u64, role: Role) -> Self {
        StreamSeed {
            key: splitmix64(base_seed),
            stream: (replication << 2) | role.tag(),
        }
    }

    /// The `index`-th sub-stream of this stream.
    pub fn child(&self, index: u64) -> Self {
        StreamSeed {
            key: splitmix64(self.key ^ splitmix64(self.stream ^ GOLDEN_GAMMA.rotate_left(17))),
            stream: index,
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// 64-bit digest used when a stream has to be reported as one number.
    pub fn digest(&self) -> u64 {
        splitmix64(self.key ^ splitmix64(self.stream))
    }

    pub fn rng(&self) -> StreamRng {
        let mut bytes = [0u8; 32];
        let mut state = self.key;
        for chunk in bytes.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(bytes);
        rng.set_stream(self.stream);
        rng
    }
}

/// The experiment-level seeding contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub base_seed: u64,
}

impl SeedSpec {
    pub fn new(base_seed: u64) -> Self {
        SeedSpec { base_seed }
    }

    pub fn stream(&self, replication: u64, role: Role) -> StreamSeed {
        StreamSeed::derive(self.base_seed, replication, role)
    }

    /// Per-replication seed reported in result tables.
    pub fn replication_seed(&self, replication: u64) -> u64 {
        splitmix64(splitmix64(self.base_seed) ^ replication)
    }
}
