use std::collections::HashMap;

use super::{Preorder, PreorderSampler, RandomBitSource};
use crate::error::{Error, Result};
use crate::matrix::ZeroOneMatrix;

/// Number of pairs `i < j` that share a block in both preorders.
pub fn w_statistic(a: &Preorder, b: &Preorder) -> u64 {
    let mut cells: HashMap<(usize, usize), u64> = HashMap::new();
    for pair in a.labels().into_iter().zip(b.labels()) {
        *cells.entry(pair).or_default() += 1;
    }
    cells.values().map(|&c| c * (c - 1) / 2).sum()
}

/// The matrix with a one at `(k, l)` exactly when block `k` of `a` meets
/// block `l` of `b`. Has `n` ones precisely when `W = 0`.
pub fn block_intersection_matrix(a: &Preorder, b: &Preorder) -> ZeroOneMatrix {
    let mut cells: Vec<(usize, usize)> = a.labels().into_iter().zip(b.labels()).collect();
    cells.sort_unstable();
    cells.dedup();
    let ones = cells.into_iter().map(|(k, l)| (k + 1, l + 1)).collect();
    ZeroOneMatrix::new(a.block_count(), b.block_count(), ones)
        .expect("every block meets some block of the other preorder")
}

/// Uniform incidence matrices by rejection: draw two independent uniform
/// preorders until `W = 0`, then take the block-intersection matrix.
#[derive(Debug)]
pub struct RejectionSampler {
    preorders: PreorderSampler,
}

impl RejectionSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("n must be at least 1".into()));
        }
        Ok(RejectionSampler {
            preorders: PreorderSampler::new(n)?,
        })
    }

    /// One trial: whether the pair drawn had `W = 0`, plus its matrix if so.
    pub fn trial(&mut self, rng: &mut RandomBitSource) -> Option<ZeroOneMatrix> {
        let a = self.preorders.sample(rng);
        let b = self.preorders.sample(rng);
        (w_statistic(&a, &b) == 0).then(|| block_intersection_matrix(&a, &b))
    }

    /// Repeats trials until success; returns the matrix and attempt count.
    pub fn sample(&mut self, rng: &mut RandomBitSource) -> (ZeroOneMatrix, u64) {
        let mut attempts = 0;
        loop {
            attempts += 1;
            if let Some(m) = self.trial(rng) {
                return (m, attempts);
            }
        }
    }
}

pub fn sample_by_rejection(n: usize, rng: &mut RandomBitSource) -> Result<(ZeroOneMatrix, u64)> {
    Ok(RejectionSampler::new(n)?.sample(rng))
}
