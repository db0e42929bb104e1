//! Exactly uniform random generation of preorders, incidence matrices and
//! symmetric incidence matrices.

mod discrete;
mod matrix;
mod preorder;
mod rejection;
mod symmetric;

pub use discrete::{
    sample_discrete, DiscreteSampler, NormalizationCertificate, TailBoundedWeights,
};
pub use matrix::{diagonal_weights, sample_incidence_matrix, MatrixSampler};
pub use preorder::{block_count_weights, dyadic, sample_preorder, Preorder, PreorderSampler};
pub use rejection::{
    block_intersection_matrix, sample_by_rejection, w_statistic, RejectionSampler,
};
pub use symmetric::{sample_symmetric, symmetric_size_weights, SymmetricSampler};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Seeded bit stream. The same `(seed, stream)` pair always yields the same
/// bits; distinct streams of one seed are independent.
#[derive(Debug, Clone)]
pub struct RandomBitSource {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
    word: u64,
    bits_left: u32,
}

impl RandomBitSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomBitSource {
            seed,
            stream,
            rng,
            word: 0,
            bits_left: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn next_bit(&mut self) -> bool {
        if self.bits_left == 0 {
            self.word = self.rng.next_u64();
            self.bits_left = 64;
        }
        let bit = self.word & 1 == 1;
        self.word >>= 1;
        self.bits_left -= 1;
        bit
    }

    /// Uniform integer in `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.rng.random_range(0..bound)
    }
}

impl RngCore for RandomBitSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let mut a = RandomBitSource::new(42);
        let mut b = RandomBitSource::new(42);
        let xs: Vec<bool> = (0..200).map(|_| a.next_bit()).collect();
        let ys: Vec<bool> = (0..200).map(|_| b.next_bit()).collect();
        assert_eq!(xs, ys);
        let mut c = RandomBitSource::with_stream(42, 1);
        let zs: Vec<bool> = (0..200).map(|_| c.next_bit()).collect();
        assert_ne!(xs, zs);
        assert_eq!((c.seed(), c.stream()), (42, 1));
    }

    #[test]
    fn below_in_range() {
        let mut r = RandomBitSource::new(1);
        assert!((0..1000).all(|_| r.below(7) < 7));
        assert_eq!(r.below(1), 0);
    }
}
