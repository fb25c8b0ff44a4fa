//! Splittable deterministic randomness (SplitMix64).

/// A splittable pseudorandom number generator. The same seed always yields
/// the same stream, and split-off children are independent of how many
/// draws the parent or siblings make afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw in `[0, bound)`. `bound` must be nonzero.
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below requires a nonzero bound");
        (((self.next_u64() as u128) * (bound as u128)) >> 64) as u64
    }

    #[inline]
    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Splits off an independent child generator; `self` continues its own
    /// stream unaffected by draws made from the child, and vice versa.
    pub fn split(&mut self) -> SplitMix64 {
        SplitMix64 {
            state: mix64(self.next_u64()),
        }
    }

    /// Consuming split into two independent streams.
    pub fn split_pair(mut self) -> (SplitMix64, SplitMix64) {
        let left = self.split();
        (left, self)
    }
}
