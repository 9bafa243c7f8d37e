use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// 64-bit mixer (splitmix64 finalizer).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of two words: `mix64(mix64(a) ^ b)`.
///
/// Replica `r` of cell `c` runs on stream `hash64(c, r)`.
#[inline]
pub fn hash64(a: u64, b: u64) -> u64 {
    mix64(mix64(a) ^ b)
}

/// A (master seed, stream id) pair naming one reproducible random sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededRng {
    pub master: u64,
    pub stream: u64,
}

impl SeededRng {
    pub fn new(master: u64, stream: u64) -> Self {
        SeededRng { master, stream }
    }

    /// Derived stream, deterministic in `(self, tag)`.
    pub fn child(&self, tag: u64) -> Self {
        SeededRng {
            master: self.master,
            stream: hash64(self.stream, tag),
        }
    }

    /// Child keyed by signed lattice coordinates.
    pub fn child_coords(&self, coords: &[i64]) -> Self {
        coords
            .iter()
            .fold(self.child(coords.len() as u64), |r, &c| r.child(c as u64))
    }

    /// The generator for this stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut g = ChaCha8Rng::seed_from_u64(self.master);
        g.set_stream(self.stream);
        g
    }
}
