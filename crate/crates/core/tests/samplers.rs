use std::collections::HashMap;

use incmat::combinatorics::factorial;
use incmat::counting::{exact_success_probability, f1111_mobius};
use incmat::oracle::enumerate_matrices;
use incmat::sampling::{
    block_count_weights, block_intersection_matrix, dyadic, sample_by_rejection, sample_discrete,
    sample_incidence_matrix, sample_preorder, sample_symmetric, w_statistic, DiscreteSampler,
    MatrixSampler, Preorder, PreorderSampler, RandomBitSource, RejectionSampler, SymmetricSampler,
    TailBoundedWeights,
};
use incmat::stats::{chi_square, chi_square_quantile_999, uniformity_test, SamplerKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Asserts that each of `k` equally likely outcomes appears within three
/// binomial standard deviations of `draws / k`.
fn within_three_sigma(counts: &[u64], draws: u64) {
    let k = counts.len() as f64;
    let p = 1.0 / k;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for &c in counts {
        assert!(
            (c as f64 - draws as f64 * p).abs() <= 3.0 * sigma,
            "{counts:?} over {draws} draws"
        );
    }
}

fn tally<T: std::hash::Hash + Eq>(items: impl Iterator<Item = T>) -> Vec<u64> {
    let mut map: HashMap<T, u64> = HashMap::new();
    for x in items {
        *map.entry(x).or_default() += 1;
    }
    map.into_values().collect()
}

#[test]
fn discrete_uniform_on_four_values() {
    let one = BigRational::from_integer(BigInt::from(1));
    let zero = BigRational::from_integer(BigInt::from(0));
    let weights = || {
        TailBoundedWeights::finite(vec![
            zero.clone(),
            one.clone(),
            one.clone(),
            one.clone(),
            one.clone(),
        ])
    };
    let mut counts = [0u64; 4];
    for seed in 0..4000 {
        let k = sample_discrete(weights(), &mut RandomBitSource::new(seed));
        counts[(k - 1) as usize] += 1;
    }
    assert!(chi_square(&counts) < chi_square_quantile_999(3).unwrap());
}

#[test]
fn block_count_mean_for_one_element() {
    // pi_k = k / 2^{k+1} for n = 1 has mean 3.
    let mut rng = RandomBitSource::new(77);
    let draws = 100_000;
    let mut d = DiscreteSampler::new(block_count_weights(1));
    let mean = (0..draws).map(|_| d.sample(&mut rng) as f64).sum::<f64>() / draws as f64;
    // Variance 4: four standard errors is about 0.025.
    assert!((mean - 3.0).abs() < 0.03, "mean {mean}");
}

#[test]
fn preorders_two_elements_equally_likely() {
    let mut s = PreorderSampler::new(2).unwrap();
    let mut rng = RandomBitSource::new(2);
    let counts = tally((0..9000).map(|_| s.sample(&mut rng)));
    assert_eq!(counts.len(), 3);
    within_three_sigma(&counts, 9000);
}

#[test]
fn matrices_two_ones_equally_likely() {
    let mut s = MatrixSampler::new(2).unwrap();
    let mut rng = RandomBitSource::new(3);
    let counts = tally((0..16_000).map(|_| s.sample(&mut rng)));
    assert_eq!(counts.len(), 4);
    within_three_sigma(&counts, 16_000);
}

#[test]
fn symmetric_two_ones_equally_likely() {
    let mut s = SymmetricSampler::new(2).unwrap();
    let mut rng = RandomBitSource::new(4);
    let counts = tally((0..8000).map(|_| s.sample(&mut rng)));
    assert_eq!(counts.len(), 2);
    within_three_sigma(&counts, 8000);
}

#[test]
fn rejection_mean_attempts_two_ones() {
    let mut s = RejectionSampler::new(2).unwrap();
    let mut rng = RandomBitSource::new(5);
    let runs = 10_000u64;
    let attempts: u64 = (0..runs).map(|_| s.sample(&mut rng).1).sum();
    let mean = attempts as f64 / runs as f64;
    // Geometric with p = 8/9: mean 9/8, variance (1-p)/p^2 = 9/64.
    let se = (9.0f64 / 64.0 / runs as f64).sqrt();
    assert!((mean - 9.0 / 8.0).abs() < 4.0 * se, "mean attempts {mean}");
}

#[test]
fn further_uniformity_cases() {
    for (kind, n, draws, seed) in [
        (SamplerKind::Preorder, 2, 9000, 11),
        (SamplerKind::Matrix, 2, 16_000, 12),
        (SamplerKind::Symmetric, 2, 8000, 13),
        (SamplerKind::Symmetric, 3, 6000, 14),
        (SamplerKind::Preorder, 4, 15_000, 15),
    ] {
        let r = uniformity_test(kind, n, draws, seed).unwrap();
        assert!(r.pass, "{r}");
    }
    assert!(uniformity_test(SamplerKind::Matrix, 8, 10, 0).is_err());
}

#[test]
fn samplers_are_deterministic() {
    for seed in [0u64, 42, 9_999] {
        let a = sample_incidence_matrix(6, &mut RandomBitSource::new(seed)).unwrap();
        let b = sample_incidence_matrix(6, &mut RandomBitSource::new(seed)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let a = sample_symmetric(6, &mut RandomBitSource::new(seed)).unwrap();
        let b = sample_symmetric(6, &mut RandomBitSource::new(seed)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let a = sample_preorder(6, &mut RandomBitSource::new(seed)).unwrap();
        let b = sample_preorder(6, &mut RandomBitSource::new(seed)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let a = sample_by_rejection(6, &mut RandomBitSource::new(seed)).unwrap();
        let b = sample_by_rejection(6, &mut RandomBitSource::new(seed)).unwrap();
        assert_eq!((a.0.to_json(), a.1), (b.0.to_json(), b.1));
    }
}

#[test]
fn outputs_are_valid_incidence_matrices() {
    let mut rng = RandomBitSource::new(8);
    for n in 1..=12usize {
        let mut m = MatrixSampler::new(n).unwrap();
        let mut s = SymmetricSampler::new(n).unwrap();
        let mut r = RejectionSampler::new(n).unwrap();
        for _ in 0..20 {
            let x = m.sample(&mut rng);
            assert_eq!(x.weight(), n);
            let y = s.sample(&mut rng);
            assert_eq!(y.weight(), n);
            assert_eq!(y.transpose(), y);
            let (z, attempts) = r.sample(&mut rng);
            assert_eq!(z.weight(), n);
            assert!(attempts >= 1);
        }
    }
}

#[test]
fn normalizations_certified_to_2_pow_64() {
    let eps = dyadic(64);
    for n in 1..=20usize {
        for cert in [
            PreorderSampler::new(n)
                .unwrap()
                .normalization(&eps)
                .unwrap(),
            MatrixSampler::new(n).unwrap().normalization(&eps).unwrap(),
            SymmetricSampler::new(n)
                .unwrap()
                .normalization(&eps)
                .unwrap(),
        ] {
            assert!(cert.relative_bound() <= eps);
            assert!(cert.partial_sum <= cert.total);
        }
    }
}

/// Over all pairs of preorders with `W = 0`, the block-intersection matrix
/// takes every incidence matrix exactly `n!` times.
#[test]
fn block_intersection_construction_is_n_factorial_to_one() {
    for n in 1..=4usize {
        let all = Preorder::enumerate_all(n).unwrap();
        let mut hits: HashMap<_, u64> = HashMap::new();
        for a in &all {
            for b in &all {
                if w_statistic(a, b) == 0 {
                    *hits.entry(block_intersection_matrix(a, b)).or_default() += 1;
                }
            }
        }
        let matrices: Vec<_> = enumerate_matrices(n as u32).unwrap().collect();
        assert_eq!(hits.len(), matrices.len());
        let nf = factorial(n as u64).to_u64().unwrap();
        for m in matrices {
            assert_eq!(hits.get(&m), Some(&nf), "n={n}");
        }
        let successes: u64 = hits.values().sum();
        let p = BigRational::new(
            BigInt::from(successes),
            BigInt::from(all.len() as u64 * all.len() as u64),
        );
        assert_eq!(p, exact_success_probability(n as u64));
        assert_eq!(
            BigInt::from(successes / nf),
            BigInt::from(f1111_mobius(n as u64))
        );
    }
}
