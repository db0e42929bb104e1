use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::matrix::uniform_subset;
use super::{DiscreteSampler, NormalizationCertificate, RandomBitSource, TailBoundedWeights};
use crate::combinatorics::{binomial, factorial};
use crate::counting::{s11_exact, symmetric_s_k};
use crate::error::{Error, Result};
use crate::matrix::ZeroOneMatrix;

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Weights `s_k / 2^{k+1}` (total `S_11(n)`), with the tail bound from
/// `s_k <= k^{2n} / n!`.
pub fn symmetric_size_weights(n: u64) -> Result<TailBoundedWeights> {
    let weight =
        move |k: u64| BigRational::new(BigInt::from(symmetric_s_k(k, n)), BigInt::one() << (k + 1));
    let nf = BigRational::from_integer(BigInt::from(factorial(n)));
    let tail = move |k_max: u64| {
        if k_max == 0 {
            return None;
        }
        let first = k_max + 1;
        let r: BigRational = num_traits::pow(ratio(first + 1, first), 2 * n as usize) / ratio(2, 1);
        if r >= BigRational::one() {
            return None;
        }
        let b: BigRational = num_traits::pow(ratio(first, 1), 2 * n as usize)
            / &nf
            / BigRational::from_integer(BigInt::one() << (first + 1));
        Some(b / (BigRational::one() - r))
    };
    Ok(TailBoundedWeights::new(weight, tail)
        .with_total(BigRational::from_integer(BigInt::from(s11_exact(n)?))))
}

/// The `p`-th pair `(a, b)` with `a < b < k` in lexicographic order.
fn unrank_pair(mut p: u64, k: u64) -> (u64, u64) {
    for a in 0..k {
        let row = k - 1 - a;
        if p < row {
            return (a, a + 1 + p);
        }
        p -= row;
    }
    unreachable!("pair index out of range")
}

/// Uniform symmetric incidence matrices with `n` ones: draw `K` with
/// probability `s_K / (2^{K+1} S_11(n))`, fill a uniform symmetric `K x K`
/// zero-one matrix with `n` ones, and delete empty lines.
///
/// The fill draws the number `j` of off-diagonal pairs with weight
/// `C(C(K,2), j) C(K, n-2j)`, then uniform pair and diagonal subsets.
#[derive(Debug)]
pub struct SymmetricSampler {
    n: u64,
    size: DiscreteSampler,
    pairs: HashMap<u64, DiscreteSampler>,
}

impl SymmetricSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("n must be at least 1".into()));
        }
        Ok(SymmetricSampler {
            n: n as u64,
            size: DiscreteSampler::new(symmetric_size_weights(n as u64)?),
            pairs: HashMap::new(),
        })
    }

    pub fn sample(&mut self, rng: &mut RandomBitSource) -> ZeroOneMatrix {
        let k = self.size.sample(rng);
        let n = self.n;
        let off = k * k.saturating_sub(1) / 2;
        let j = self
            .pairs
            .entry(k)
            .or_insert_with(|| {
                let weights = (0..=n / 2)
                    .map(|j| {
                        BigRational::from_integer(BigInt::from(
                            binomial(off, j) * binomial(k, n - 2 * j),
                        ))
                    })
                    .collect();
                DiscreteSampler::new(TailBoundedWeights::finite(weights))
            })
            .sample(rng);
        let mut cells = Vec::with_capacity(n as usize);
        for p in uniform_subset(off, j as usize, rng) {
            let (a, b) = unrank_pair(p, k);
            cells.push((a as usize, b as usize));
            cells.push((b as usize, a as usize));
        }
        for d in uniform_subset(k, (n - 2 * j) as usize, rng) {
            cells.push((d as usize, d as usize));
        }
        ZeroOneMatrix::from_cells_stripped(&cells).expect("n >= 1 ones")
    }

    /// Certifies that the size weights sum to `S_11(n)`.
    pub fn normalization(&self, rel_eps: &BigRational) -> Result<NormalizationCertificate> {
        self.size.weights().certify(rel_eps)
    }
}

pub fn sample_symmetric(n: usize, rng: &mut RandomBitSource) -> Result<ZeroOneMatrix> {
    Ok(SymmetricSampler::new(n)?.sample(rng))
}
