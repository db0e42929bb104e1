use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::RandomBitSource;
use crate::error::{Error, Result};

type WeightFn = Box<dyn Fn(u64) -> BigRational + Send + Sync>;
type TailFn = Box<dyn Fn(u64) -> Option<BigRational> + Send + Sync>;

/// Most terms explored before giving up on a certificate.
const MAX_TERMS: u64 = 1 << 20;
/// Bits drawn up front before the interval is refined one bit at a time.
const INITIAL_BITS: u32 = 32;

/// A distribution on `0, 1, 2, ...` given by exact nonnegative weights and a
/// certified bound on the mass beyond any index.
///
/// `tail_bound(K)` must return an upper bound on `sum_{k > K} weight(k)`, or
/// `None` if no bound is available at `K` yet. Once it returns `Some` it
/// must keep doing so for larger `K`, and the bounds must tend to zero.
pub struct TailBoundedWeights {
    weight: WeightFn,
    tail_bound: TailFn,
    total: Option<BigRational>,
}

impl fmt::Debug for TailBoundedWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TailBoundedWeights")
            .field("total", &self.total)
            .finish_non_exhaustive()
    }
}

impl TailBoundedWeights {
    pub fn new(
        weight: impl Fn(u64) -> BigRational + Send + Sync + 'static,
        tail_bound: impl Fn(u64) -> Option<BigRational> + Send + Sync + 'static,
    ) -> Self {
        TailBoundedWeights {
            weight: Box::new(weight),
            tail_bound: Box::new(tail_bound),
            total: None,
        }
    }

    /// Supplies the exact total mass, which lets sampling skip the tail
    /// bound entirely and enables [`TailBoundedWeights::certify`].
    pub fn with_total(mut self, total: BigRational) -> Self {
        self.total = Some(total);
        self
    }

    /// Finitely supported weights on `0..weights.len()`.
    pub fn finite(weights: Vec<BigRational>) -> Self {
        let total: BigRational = weights.iter().cloned().sum();
        let mut suffix = vec![BigRational::zero(); weights.len() + 1];
        for k in (0..weights.len()).rev() {
            suffix[k] = &suffix[k + 1] + &weights[k];
        }
        let len = weights.len();
        let suffix = std::sync::Arc::new(suffix);
        TailBoundedWeights::new(
            move |k| {
                weights
                    .get(k as usize)
                    .cloned()
                    .unwrap_or_else(BigRational::zero)
            },
            move |k| {
                let next = (k as usize + 1).min(len);
                Some(suffix[next].clone())
            },
        )
        .with_total(total)
    }

    pub fn weight(&self, k: u64) -> BigRational {
        (self.weight)(k)
    }

    pub fn tail_bound(&self, k: u64) -> Option<BigRational> {
        (self.tail_bound)(k)
    }

    pub fn total(&self) -> Option<&BigRational> {
        self.total.as_ref()
    }

    /// Checks that the weights sum to the declared total to within
    /// `rel_eps * total`: finds the first `K` whose tail bound is at most
    /// `rel_eps * total` and verifies `0 <= total - sum_{k<=K} weight(k) <=
    /// tail_bound(K)`.
    pub fn certify(&self, rel_eps: &BigRational) -> Result<NormalizationCertificate> {
        let total = self
            .total
            .clone()
            .ok_or_else(|| Error::OutOfRange("certification needs an exact total".into()))?;
        let target = &total * rel_eps;
        let mut partial = BigRational::zero();
        for k in 0..MAX_TERMS {
            partial += self.weight(k);
            let Some(tail) = self.tail_bound(k) else {
                continue;
            };
            if tail > target {
                continue;
            }
            let gap = &total - &partial;
            if gap.is_negative() || gap > tail {
                return Err(Error::UnexpectedOutcome(format!(
                    "partial sum through {k} is inconsistent with the declared total"
                )));
            }
            return Ok(NormalizationCertificate {
                terms: k + 1,
                partial_sum: partial,
                tail_bound: tail,
                total,
            });
        }
        Err(Error::Precision {
            rel_tol: 0.0,
            terms: MAX_TERMS as usize,
        })
    }
}

/// Evidence that a weight sequence sums to its declared total.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationCertificate {
    pub terms: u64,
    pub partial_sum: BigRational,
    pub tail_bound: BigRational,
    pub total: BigRational,
}

impl NormalizationCertificate {
    /// `tail_bound / total`, the certified relative gap.
    pub fn relative_bound(&self) -> BigRational {
        &self.tail_bound / &self.total
    }
}

/// Inverse-CDF sampler over exact rationals with a cache of partial sums.
///
/// A uniform binary fraction `U` is revealed bit by bit. Its current
/// dyadic interval, scaled by the total mass (or by certified bounds on
/// it), is compared with the partial sums; the draw stops as soon as the
/// interval falls inside one step of the CDF. The result has exactly the
/// target distribution.
#[derive(Debug)]
pub struct DiscreteSampler {
    weights: TailBoundedWeights,
    /// `cdf[k] = sum_{j<=k} weight(j)`.
    cdf: Vec<BigRational>,
}

impl DiscreteSampler {
    pub fn new(weights: TailBoundedWeights) -> Self {
        DiscreteSampler {
            weights,
            cdf: Vec::new(),
        }
    }

    pub fn weights(&self) -> &TailBoundedWeights {
        &self.weights
    }

    fn extend(&mut self) {
        let k = self.cdf.len() as u64;
        let w = self.weights.weight(k);
        let next = match self.cdf.last() {
            Some(prev) => prev + w,
            None => w,
        };
        self.cdf.push(next);
    }

    /// Bounds `[lo, hi]` on the total mass from the cached terms.
    fn total_bounds(&mut self) -> (BigRational, BigRational) {
        if let Some(t) = self.weights.total() {
            return (t.clone(), t.clone());
        }
        loop {
            if let Some(last) = self.cdf.last() {
                let k = self.cdf.len() as u64 - 1;
                if last.is_positive() {
                    if let Some(tail) = self.weights.tail_bound(k) {
                        return (last.clone(), last + tail);
                    }
                }
            }
            assert!(
                (self.cdf.len() as u64) < MAX_TERMS,
                "weights have no positive mass with a tail bound"
            );
            self.extend();
        }
    }

    pub fn sample(&mut self, rng: &mut RandomBitSource) -> u64 {
        let mut numer = BigInt::zero();
        for _ in 0..INITIAL_BITS {
            numer = (numer << 1u32) + BigInt::from(rng.next_bit() as u8);
        }
        let mut denom = BigInt::one() << INITIAL_BITS;
        loop {
            let (z_lo, z_hi) = self.total_bounds();
            // U lies in [numer/denom, (numer+1)/denom).
            let x_lo = BigRational::new(numer.clone(), denom.clone()) * &z_lo;
            let x_hi = BigRational::new(&numer + 1, denom.clone()) * &z_hi;
            let k = loop {
                let idx = self.cdf.partition_point(|c| *c <= x_lo);
                if idx < self.cdf.len() {
                    break idx;
                }
                self.extend();
            };
            if x_hi <= self.cdf[k] {
                return k as u64;
            }
            let interval_width = (&z_lo / BigRational::from_integer(denom.clone())).abs();
            if self.weights.total().is_none() && z_hi.clone() - &z_lo > interval_width {
                self.extend();
            } else {
                numer = (numer << 1u32) + BigInt::from(rng.next_bit() as u8);
                denom <<= 1u32;
            }
        }
    }
}

/// One draw from `w`. Prefer [`DiscreteSampler`] for repeated draws.
pub fn sample_discrete(w: TailBoundedWeights, rng: &mut RandomBitSource) -> u64 {
    DiscreteSampler::new(w).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// `k / 2^{k+1}` with the tail bound `(K+2)/2^{K+1}`.
    fn geometric_like(with_total: bool) -> TailBoundedWeights {
        let w = TailBoundedWeights::new(
            |k| BigRational::new(BigInt::from(k), BigInt::one() << (k + 1)),
            |k| {
                Some(BigRational::new(
                    BigInt::from(k + 2),
                    BigInt::one() << (k + 1),
                ))
            },
        );
        if with_total {
            w.with_total(BigRational::one())
        } else {
            w
        }
    }

    #[test]
    fn point_mass() {
        let mut s = DiscreteSampler::new(TailBoundedWeights::finite(vec![
            r(0, 1),
            r(0, 1),
            r(0, 1),
            r(0, 1),
            r(0, 1),
            r(3, 7),
        ]));
        let mut rng = RandomBitSource::new(5);
        assert!((0..200).all(|_| s.sample(&mut rng) == 5));
    }

    #[test]
    fn known_and_unknown_total_agree_in_law() {
        // Both realize the inverse CDF of the same U, so a first draw from
        // the same bits must agree.
        let mut a = DiscreteSampler::new(geometric_like(true));
        let mut b = DiscreteSampler::new(geometric_like(false));
        for seed in 0..300 {
            let x = a.sample(&mut RandomBitSource::new(seed));
            let y = b.sample(&mut RandomBitSource::new(seed));
            assert_eq!(x, y);
        }
    }

    #[test]
    fn empirical_mean() {
        // Mean of k/2^{k+1} is sum k^2/2^{k+1} = 3.
        let mut s = DiscreteSampler::new(geometric_like(false));
        let mut rng = RandomBitSource::new(3);
        let draws = 20_000;
        let mean = (0..draws).map(|_| s.sample(&mut rng) as f64).sum::<f64>() / draws as f64;
        // Variance is 4, so 4 sigma is 4 * 2 / sqrt(20000) ~ 0.057.
        assert!((mean - 3.0).abs() < 0.06, "mean {mean}");
    }

    #[test]
    fn certificate() {
        let c = geometric_like(true).certify(&r(1, 1 << 40)).unwrap();
        assert!(c.relative_bound() <= r(1, 1 << 40));
        assert!(c.partial_sum <= c.total);
        let bad = TailBoundedWeights::finite(vec![r(1, 2)]).with_total(r(1, 1));
        assert!(bad.certify(&r(1, 1000)).is_err());
        assert!(geometric_like(false).certify(&r(1, 2)).is_err());
    }
}
