use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use super::{DiscreteSampler, NormalizationCertificate, RandomBitSource, TailBoundedWeights};
use crate::combinatorics::{binomial, factorial};
use crate::counting::f1111_mobius;
use crate::error::{Error, Result};
use crate::matrix::ZeroOneMatrix;

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Mass of the anti-diagonal `k + l = s`:
/// `sigma_s = sum_{k=1}^{s-1} C(k(s-k), n) / 2^{s+2}`. These sum to
/// `F_1111(n)`. The tail uses `C(kl, n) <= (s^2/4)^n / n!`.
pub fn diagonal_weights(n: u64) -> TailBoundedWeights {
    let weight = move |s: u64| {
        let num: BigUint = (1..s).map(|k| binomial(k * (s - k), n)).sum();
        BigRational::new(BigInt::from(num), BigInt::one() << (s + 2))
    };
    let nf = BigRational::from_integer(BigInt::from(factorial(n)));
    // b_s = (s-1) (s^2/4)^n / (n! 2^{s+2}) bounds sigma_s.
    let bound = move |s: u64| {
        let base: BigRational = num_traits::pow(ratio(s * s, 4), n as usize);
        base * ratio(s - 1, 1) / &nf / BigRational::from_integer(BigInt::one() << (s + 2))
    };
    let tail = move |s_max: u64| {
        if s_max < 2 {
            return None;
        }
        let first = s_max + 1;
        // b_{s+1}/b_s = (s/(s-1)) ((s+1)/s)^{2n} / 2 decreases in s.
        let r: BigRational = ratio(first, first - 1)
            * num_traits::pow(ratio(first + 1, first), 2 * n as usize)
            / ratio(2, 1);
        if r >= BigRational::one() {
            return None;
        }
        Some(bound(first) / (BigRational::one() - r))
    };
    TailBoundedWeights::new(weight, tail)
        .with_total(BigRational::from_integer(BigInt::from(f1111_mobius(n))))
}

/// Uniform `n`-subset of `0..universe` by a partial Fisher-Yates shuffle
/// over a sparse permutation.
pub(crate) fn uniform_subset(universe: u64, n: usize, rng: &mut RandomBitSource) -> Vec<u64> {
    assert!(n as u64 <= universe);
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let j = i + rng.below(universe - i);
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        out.push(at_j);
    }
    out
}

/// Uniform incidence matrices with `n` ones: draw `(K, L)` with probability
/// `C(KL, n) 2^{-K-L-2} / F_1111(n)`, place `n` ones uniformly in a `K x L`
/// grid and delete the empty rows and columns.
///
/// `(K, L)` is drawn as the diagonal `K + L` first, then `K` within it.
#[derive(Debug)]
pub struct MatrixSampler {
    n: u64,
    diagonal: DiscreteSampler,
    within: HashMap<u64, DiscreteSampler>,
}

impl MatrixSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("n must be at least 1".into()));
        }
        Ok(MatrixSampler {
            n: n as u64,
            diagonal: DiscreteSampler::new(diagonal_weights(n as u64)),
            within: HashMap::new(),
        })
    }

    /// Draws the grid dimensions `(K, L)`.
    pub fn sample_dimensions(&mut self, rng: &mut RandomBitSource) -> (u64, u64) {
        let s = self.diagonal.sample(rng);
        let n = self.n;
        let sampler = self.within.entry(s).or_insert_with(|| {
            let weights = (0..=s)
                .map(|k| BigRational::from_integer(BigInt::from(binomial(k * (s - k), n))))
                .collect();
            DiscreteSampler::new(TailBoundedWeights::finite(weights))
        });
        let k = sampler.sample(rng);
        (k, s - k)
    }

    pub fn sample(&mut self, rng: &mut RandomBitSource) -> ZeroOneMatrix {
        let (k, l) = self.sample_dimensions(rng);
        let cells: Vec<(usize, usize)> = uniform_subset(k * l, self.n as usize, rng)
            .into_iter()
            .map(|c| ((c / l) as usize, (c % l) as usize))
            .collect();
        ZeroOneMatrix::from_cells_stripped(&cells).expect("n >= 1 ones")
    }

    /// Certifies that the joint weights sum to `F_1111(n)`.
    pub fn normalization(&self, rel_eps: &BigRational) -> Result<NormalizationCertificate> {
        self.diagonal.weights().certify(rel_eps)
    }
}

pub fn sample_incidence_matrix(n: usize, rng: &mut RandomBitSource) -> Result<ZeroOneMatrix> {
    Ok(MatrixSampler::new(n)?.sample(rng))
}
