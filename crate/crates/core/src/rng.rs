//! Seeded, splittable random streams.
//!
//! A stream is a `(seed, stream-id)` pair mapped onto a ChaCha8 key and
//! stream counter. Children derive a fresh key from the parent pair, so
//! trial `i` of an experiment always sees the same bits no matter which
//! worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type handed out by [`RngStream::rng`].
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub const fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Independent sub-stream number `id`.
    pub fn child(&self, id: u64) -> RngStream {
        RngStream {
            seed: splitmix64(self.seed ^ splitmix64(self.stream.wrapping_add(0x5eed))),
            stream: id,
        }
    }

    /// Sub-stream keyed by a label (FNV-1a of the bytes).
    pub fn named(&self, label: &str) -> RngStream {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        self.child(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn same_pair_same_bits() {
        let a = RngStream::new(7, 3);
        let (mut r1, mut r2) = (a.rng(), a.rng());
        for _ in 0..16 {
            assert_eq!(r1.next_u64(), r2.next_u64());
        }
    }

    #[test]
    fn children_differ() {
        let root = RngStream::new(7, 0);
        let x = root.child(0).rng().next_u64();
        let y = root.child(1).rng().next_u64();
        let z = RngStream::new(8, 0).child(0).rng().next_u64();
        assert_ne!(x, y);
        assert_ne!(x, z);
        assert_eq!(root.named("a"), root.named("a"));
        assert_ne!(root.named("a"), root.named("b"));
    }
}
