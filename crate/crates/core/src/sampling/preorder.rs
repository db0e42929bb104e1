use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{DiscreteSampler, NormalizationCertificate, RandomBitSource, TailBoundedWeights};
use crate::combinatorics::preorder_count;
use crate::error::{Error, Result};

/// An ordered set partition of `{1..n}`: blocks in increasing order, each
/// block sorted. Serializes as `{"blocks": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPreorder")]
pub struct Preorder {
    #[serde(skip)]
    n: usize,
    blocks: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawPreorder {
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<RawPreorder> for Preorder {
    type Error = Error;

    fn try_from(raw: RawPreorder) -> Result<Self> {
        Preorder::new(raw.blocks)
    }
}

impl Preorder {
    /// Validates that the blocks are nonempty and partition `{1..n}`.
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::OutOfRange("empty block".into()));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x == 0 || x > n || seen[x - 1] {
                    return Err(Error::OutOfRange(format!("blocks do not partition 1..{n}")));
                }
                seen[x - 1] = true;
            }
        }
        if n == 0 {
            return Err(Error::OutOfRange("a preorder needs n >= 1".into()));
        }
        Ok(Preorder { n, blocks })
    }

    /// Builds the preorder whose blocks are the nonempty score classes,
    /// in increasing score order. `scores[i]` belongs to element `i + 1`.
    pub fn from_scores(scores: &[u64]) -> Result<Self> {
        let mut levels: Vec<u64> = scores.to_vec();
        levels.sort_unstable();
        levels.dedup();
        let mut blocks = vec![Vec::new(); levels.len()];
        for (i, s) in scores.iter().enumerate() {
            let b = levels.binary_search(s).expect("score present");
            blocks[b].push(i + 1);
        }
        Preorder::new(blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// `labels()[i]` is the 0-based block index of element `i + 1`.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                out[x - 1] = b;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("preorder serializes")
    }

    /// Every preorder of `{1..n}` for `1 <= n <= 7`, in a fixed order.
    pub fn enumerate_all(n: usize) -> Result<Vec<Preorder>> {
        if n == 0 || n > 7 {
            return Err(Error::OutOfRange(format!(
                "preorder enumeration supports 1 <= n <= 7, got {n}"
            )));
        }
        // Each preorder with k blocks is exactly one surjection onto 0..k.
        let mut out = Vec::new();
        let mut labels = vec![0u64; n];
        fn rec(i: usize, k: u64, labels: &mut [u64], out: &mut Vec<Preorder>) {
            if i == labels.len() {
                if k > 0 && (0..k).all(|b| labels.contains(&b)) {
                    out.push(Preorder::from_scores(labels).expect("surjective labels"));
                }
                return;
            }
            for b in 0..k {
                labels[i] = b;
                rec(i + 1, k, labels, out);
            }
        }
        for k in 1..=n as u64 {
            rec(0, k, &mut labels, &mut out);
        }
        Ok(out)
    }
}

impl fmt::Display for Preorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let xs: Vec<String> = b.iter().map(usize::to_string).collect();
                format!("{{{}}}", xs.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" < "))
    }
}

fn pow_rational(base: BigRational, exp: u64) -> BigRational {
    num_traits::pow(base, exp as usize)
}

/// Weights `k^n / 2^{k+1}` (total `P(n)`) with the geometric tail bound
/// valid once the term ratio `((k+1)/k)^n / 2` drops below one.
pub fn block_count_weights(n: u64) -> TailBoundedWeights {
    let weight = move |k: u64| {
        BigRational::new(
            BigInt::from(BigUint::from(k).pow(n as u32)),
            BigInt::one() << (k + 1),
        )
    };
    let tail = move |k: u64| {
        if k == 0 {
            return None;
        }
        let next = k + 1;
        let ratio = pow_rational(
            BigRational::new(BigInt::from(next + 1), BigInt::from(next)),
            n,
        ) / BigRational::from_integer(BigInt::from(2));
        if ratio >= BigRational::one() {
            return None;
        }
        Some(weight(next) / (BigRational::one() - ratio))
    };
    let w = TailBoundedWeights::new(weight, tail);
    let total = BigRational::from_integer(BigInt::from(preorder_count(n)));
    w.with_total(total)
}

/// Uniform preorders of `{1..n}`: draw `K` with probability
/// `k^n / (P(n) 2^{k+1})`, give every element an independent uniform score
/// in `1..=K`, and read off the nonempty score classes.
#[derive(Debug)]
pub struct PreorderSampler {
    n: usize,
    blocks: DiscreteSampler,
}

impl PreorderSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("n must be at least 1".into()));
        }
        Ok(PreorderSampler {
            n,
            blocks: DiscreteSampler::new(block_count_weights(n as u64)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample(&mut self, rng: &mut RandomBitSource) -> Preorder {
        let k = self.blocks.sample(rng);
        let scores: Vec<u64> = (0..self.n).map(|_| rng.below(k)).collect();
        Preorder::from_scores(&scores).expect("scores cover 1..n")
    }

    /// Certifies that the block-count weights sum to `P(n)`.
    pub fn normalization(&self, rel_eps: &BigRational) -> Result<NormalizationCertificate> {
        self.blocks.weights().certify(rel_eps)
    }
}

pub fn sample_preorder(n: usize, rng: &mut RandomBitSource) -> Result<Preorder> {
    Ok(PreorderSampler::new(n)?.sample(rng))
}

/// Exact `2^-bits` as a rational.
pub fn dyadic(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        for n in 1..=6 {
            let all = Preorder::enumerate_all(n).unwrap();
            assert_eq!(BigUint::from(all.len()), preorder_count(n as u64));
            let mut dedup = all.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
        }
        assert!(Preorder::enumerate_all(8).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = Preorder::new(vec![vec![3, 1], vec![2]]).unwrap();
        assert_eq!(p.to_json(), r#"{"blocks":[[1,3],[2]]}"#);
        let back: Preorder = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Preorder>(r#"{"blocks":[[1],[1]]}"#).is_err());
        assert_eq!(p.to_string(), "{1,3} < {2}");
    }

    #[test]
    fn labels_and_scores() {
        let p = Preorder::from_scores(&[5, 2, 5, 9]).unwrap();
        assert_eq!(p.blocks(), &[vec![2], vec![1, 3], vec![4]]);
        assert_eq!(p.labels(), vec![1, 0, 1, 2]);
    }

    #[test]
    fn normalization_certified() {
        for n in [1usize, 2, 5, 12] {
            let s = PreorderSampler::new(n).unwrap();
            let c = s.normalization(&dyadic(64)).unwrap();
            assert!(c.relative_bound() <= dyadic(64));
        }
    }

    #[test]
    fn singleton() {
        let mut s = PreorderSampler::new(1).unwrap();
        let mut rng = RandomBitSource::new(0);
        for _ in 0..50 {
            assert_eq!(s.sample(&mut rng).blocks(), &[vec![1]]);
        }
    }
}
