//! Closed-form counts of incidence matrices.
//!
//! `F_1111` is available by three independent routes (binomial inversion of
//! the shape counts, the Stirling/preorder alternating sum, and a certified
//! truncation of the dyadic double series). The symmetric count `S_11` is
//! obtained by inverting `s_k = sum_i C(k,i) mu_i`, and the labelled
//! hypergraph counts `F_0011`/`F_0111` come from sums over integer
//! partitions.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::class::{ClassId, CountTable, Flags, Provenance};
use crate::combinatorics::{
    binomial, binomial_big, factorial, iterate_partitions, preorder_count, stirling1_signed,
    stirling2,
};
use crate::error::{Error, Result};

/// Largest diagonal `k + l` the series routes will visit before giving up.
const MAX_SERIES_DIAGONAL: u64 = 20_000;

fn signed(v: BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, v)
}

fn to_count(v: BigInt, context: &'static str) -> Result<BigUint> {
    if v.is_negative() {
        return Err(Error::NegativeCount {
            context,
            value: v.to_string(),
        });
    }
    Ok(v.magnitude().clone())
}

fn exact_div(num: BigInt, den: &BigInt, context: &'static str) -> Result<BigInt> {
    let (q, r) = num.div_rem(den);
    if !r.is_zero() {
        return Err(Error::NonIntegral {
            context,
            remainder: r.to_string(),
        });
    }
    Ok(q)
}

fn alternating(sign_exp: u64) -> i32 {
    if sign_exp.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Number of `k x l` zero-one matrices with `n` ones and no zero rows or
/// columns, by binomial inversion of `C(kl, n)`.
pub fn m_count(k: u64, l: u64, n: u64) -> BigUint {
    if k > n || l > n || k * l < n {
        // With n = 0 only the empty 0x0 matrix qualifies.
        return if n == 0 && k == 0 && l == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    let mut acc = BigInt::zero();
    for i in 0..=k {
        let ci = signed(binomial(k, i));
        for j in 0..=l {
            let term = &ci * signed(binomial(l, j)) * signed(binomial(i * j, n));
            if alternating(k + l - i - j) > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    acc.magnitude().clone()
}

/// All shape counts `m_kl(n)` for `0 <= k, l <= n`, using the separable
/// form of the inversion (first over columns, then over rows).
pub fn m_table(n: u64) -> Vec<Vec<BigUint>> {
    let size = n as usize + 1;
    let choose_n: Vec<BigInt> = (0..=n * n).map(|t| signed(binomial(t, n))).collect();
    // g[i][l] = sum_j (-1)^{l-j} C(l,j) C(ij,n)
    let mut g = vec![vec![BigInt::zero(); size]; size];
    for (i, row) in g.iter_mut().enumerate() {
        for (l, slot) in row.iter_mut().enumerate() {
            let mut acc = BigInt::zero();
            for j in 0..=l {
                let term = signed(binomial(l as u64, j as u64)) * &choose_n[i * j];
                if (l - j) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            *slot = acc;
        }
    }
    let mut m = vec![vec![BigUint::zero(); size]; size];
    for (k, row) in m.iter_mut().enumerate() {
        for (l, slot) in row.iter_mut().enumerate() {
            let mut acc = BigInt::zero();
            for (i, grow) in g.iter().enumerate().take(k + 1) {
                let term = signed(binomial(k as u64, i as u64)) * &grow[l];
                if (k - i) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            debug_assert!(!acc.is_negative());
            *slot = acc.magnitude().clone();
        }
    }
    m
}

/// `F_1111(n)` as the sum of all shape counts.
pub fn f1111_mobius(n: u64) -> BigUint {
    m_table(n).into_iter().flatten().sum()
}

/// `F_1111(n) = (1/n!) sum_k s(n,k) P(k)^2`, checked for exact divisibility.
pub fn f1111_stirling(n: u64) -> Result<BigUint> {
    let sum: BigInt = (0..=n)
        .map(|k| {
            let p = signed(preorder_count(k));
            stirling1_signed(n, k) * &p * &p
        })
        .sum();
    let q = exact_div(sum, &signed(factorial(n)), "Stirling route for F_1111")?;
    to_count(q, "Stirling route for F_1111")
}

/// A truncated series with a certified bound on the truncation error.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEstimate {
    /// Exact partial sum (a dyadic rational); never exceeds the true value.
    pub value: BigRational,
    /// Upper bound on `|value - exact| / exact`.
    pub certified_relative_error: f64,
    /// Number of summands visited.
    pub terms: usize,
}

impl SeriesEstimate {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative distance of the partial sum from an exact integer.
    pub fn relative_error_against(&self, exact: &BigUint) -> f64 {
        let exact = BigRational::from_integer(signed(exact.clone()));
        ((&exact - &self.value).abs() / exact)
            .to_f64()
            .unwrap_or(f64::INFINITY)
    }
}

fn check_rel_tol(rel_tol: f64) -> Result<BigRational> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::OutOfRange(format!(
            "rel_tol must lie in (0, 1), got {rel_tol}"
        )));
    }
    BigRational::from_float(rel_tol)
        .ok_or_else(|| Error::OutOfRange(format!("rel_tol {rel_tol} is not finite")))
}

fn rational(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(signed(num), signed(den))
}

fn pow_ratio(num: u64, den: u64, exp: u32) -> BigRational {
    rational(BigUint::from(num).pow(exp), BigUint::from(den).pow(exp))
}

/// Upper bound on `sum_{s > t} a_s` for a sequence whose ratio
/// `a_{s+1}/a_s` is nonincreasing in `s`: `a_{t+1} / (1 - r)` with
/// `r = a_{t+2}/a_{t+1}`, or `None` while `r >= 1`.
fn geometric_tail(next_term: BigRational, ratio: BigRational) -> Option<BigRational> {
    if ratio >= BigRational::one() {
        return None;
    }
    Some(next_term / (BigRational::one() - ratio))
}

fn ratio_to_f64_up(r: &BigRational) -> f64 {
    let v = r.to_f64().unwrap_or(f64::INFINITY);
    if v == 0.0 {
        0.0
    } else {
        // Round up by one ulp so the reported bound stays a bound.
        f64::from_bits(v.to_bits() + 1)
    }
}

/// `F_1111(n) = sum_{k,l >= 0} C(kl, n) / 2^{k+l+2}`, summed over the
/// triangle `k + l <= T` until the certified tail drops below
/// `rel_tol` times the partial sum.
///
/// The tail over diagonals `s = k + l > T` is bounded with
/// `C(kl, n) <= (s^2/4)^n / n!`, giving diagonal mass at most
/// `a_s = (s+1) (s^2/4)^n / (n! 2^{s+2})`, whose ratio decreases in `s`.
pub fn f1111_series(n: u64, rel_tol: f64) -> Result<SeriesEstimate> {
    if n == 0 {
        return Err(Error::OutOfRange("series route requires n >= 1".into()));
    }
    let tol = check_rel_tol(rel_tol)?;
    let exp = n as u32;
    let scale = BigUint::from(4u32).pow(exp) * factorial(n);
    // Partial sum = numer / 2^(t + 2) after diagonal t.
    let mut numer = BigUint::zero();
    let mut terms = 0usize;
    let mut t = 0u64;
    loop {
        let diagonal: BigUint = (0..=t).map(|k| binomial(k * (t - k), n)).sum();
        terms += t as usize + 1;
        numer = (numer << 1u32) + diagonal;

        if t >= 1 && !numer.is_zero() {
            let s = t + 1;
            let a_next = rational(
                BigUint::from(s + 1) * BigUint::from(s).pow(2 * exp),
                &scale * (BigUint::one() << (s + 2)),
            );
            let ratio = rational(BigUint::from(s + 2), BigUint::from(2 * (s + 1)))
                * pow_ratio(s + 1, s, 2 * exp);
            if let Some(tail) = geometric_tail(a_next, ratio) {
                let partial = rational(numer.clone(), BigUint::one() << (t + 2));
                if tail <= &tol * &partial {
                    let rel = tail / &partial;
                    return Ok(SeriesEstimate {
                        value: partial,
                        certified_relative_error: ratio_to_f64_up(&rel),
                        terms,
                    });
                }
            }
        }
        t += 1;
        if t > MAX_SERIES_DIAGONAL {
            return Err(Error::Precision { rel_tol, terms });
        }
    }
}

/// Number of `k x k` symmetric zero-one matrices with `n` ones (zero rows
/// allowed): choose `j` off-diagonal pairs and `n - 2j` diagonal cells.
pub fn symmetric_s_k(k: u64, n: u64) -> BigUint {
    let pairs = k * k.saturating_sub(1) / 2;
    (0..=n / 2)
        .map(|j| binomial(pairs, j) * binomial(k, n - 2 * j))
        .sum()
}

/// `S_11(n) = sum_k s_k / 2^{k+1}`, truncated with the certified tail bound
/// `s_k <= k^{2n} / n!`. Numeric cross-check for [`s11_exact`].
pub fn s11_series(n: u64, rel_tol: f64) -> Result<SeriesEstimate> {
    if n == 0 {
        return Err(Error::OutOfRange("series route requires n >= 1".into()));
    }
    let tol = check_rel_tol(rel_tol)?;
    let exp = n as u32;
    let nf = factorial(n);
    let mut numer = BigUint::zero(); // partial = numer / 2^(k+1)
    let mut k = 0u64;
    loop {
        numer = (numer << 1u32) + symmetric_s_k(k, n);
        if k >= 1 && !numer.is_zero() {
            let next = k + 1;
            let b_next = rational(
                BigUint::from(next).pow(2 * exp),
                &nf * (BigUint::one() << (next + 1)),
            );
            let ratio = pow_ratio(next + 1, next, 2 * exp) / BigRational::from_integer(2.into());
            if let Some(tail) = geometric_tail(b_next, ratio) {
                let partial = rational(numer.clone(), BigUint::one() << (k + 1));
                if tail <= &tol * &partial {
                    let rel = tail / &partial;
                    return Ok(SeriesEstimate {
                        value: partial,
                        certified_relative_error: ratio_to_f64_up(&rel),
                        terms: k as usize + 1,
                    });
                }
            }
        }
        k += 1;
        if k > MAX_SERIES_DIAGONAL {
            return Err(Error::Precision {
                rel_tol,
                terms: k as usize,
            });
        }
    }
}

/// `mu_1, ..., mu_n`: the number of `i x i` symmetric incidence matrices with
/// `n` ones, by binomial inversion of `s_k = sum_i C(k,i) mu_i`.
/// Index 0 of the returned vector holds `mu_0`.
pub fn symmetric_incidence_by_size(n: u64) -> Result<Vec<BigUint>> {
    let s: Vec<BigInt> = (0..=n).map(|k| signed(symmetric_s_k(k, n))).collect();
    (0..=n)
        .map(|i| {
            let mut acc = BigInt::zero();
            for (j, sj) in s.iter().enumerate().take(i as usize + 1) {
                let term = signed(binomial(i, j as u64)) * sj;
                if (i - j as u64).is_multiple_of(2) {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            to_count(acc, "symmetric incidence inversion")
        })
        .collect()
}

/// `S_11(n)`: symmetric incidence matrices with `n` ones.
pub fn s11_exact(n: u64) -> Result<BigUint> {
    Ok(symmetric_incidence_by_size(n)?.into_iter().skip(1).sum())
}

/// `Phi_11(n) = (F_1111(n) + S_11(n)) / 2`.
pub fn phi11_exact(n: u64) -> Result<BigUint> {
    let total = f1111_mobius(n) + s11_exact(n)?;
    let (q, r) = total.div_rem(&BigUint::from(2u32));
    if !r.is_zero() {
        return Err(Error::NonIntegral {
            context: "Phi_11 halving",
            remainder: r.to_string(),
        });
    }
    Ok(q)
}

fn klazar(n: u64, multiset: bool, context: &'static str) -> Result<BigUint> {
    if n == 0 {
        return Ok(BigUint::one());
    }
    // inner[j] = sum_{m=j}^n (-1)^{m-j} C(m, j)
    let inner: Vec<BigInt> = (0..=n)
        .map(|j| {
            (j..=n)
                .map(|m| signed(binomial(m, j)) * alternating(m - j))
                .sum()
        })
        .collect();
    let mut total = BigInt::zero();
    for lambda in iterate_partitions(n) {
        let l = lambda.largest_part();
        for j in l..=n {
            let mut prod = BigUint::one();
            for (i, &a) in lambda.multiplicities().iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let c = binomial(j, i as u64 + 1);
                let factor = if multiset {
                    // multichoose: C(c + a - 1, a)
                    binomial_big(&(c + BigUint::from(a - 1)), a)
                } else {
                    binomial_big(&c, a)
                };
                prod *= factor;
                if prod.is_zero() {
                    break;
                }
            }
            total += signed(prod) * &inner[j as usize];
        }
    }
    to_count(total, context)
}

/// `F_0011(n)`: simple vertex-labelled hypergraphs of weight `n`.
pub fn klazar_f0011(n: u64) -> Result<BigUint> {
    klazar(n, false, "F_0011 partition sum")
}

/// `F_0111(n)`: vertex-labelled hypergraphs of weight `n`.
pub fn klazar_f0111(n: u64) -> Result<BigUint> {
    klazar(n, true, "F_0111 partition sum")
}

/// Checks `P(n)^2 = sum_k S(n,k) k! F_1111(k)` exactly.
pub fn p_squared_decomposition_check(n: u64) -> bool {
    let p = preorder_count(n);
    let rhs: BigUint = (1..=n)
        .map(|k| stirling2(n, k) * factorial(k) * f1111_mobius(k))
        .sum();
    n >= 1 && &p * &p == rhs
}

/// Acceptance probability of the two-preorder construction,
/// `n! F_1111(n) / P(n)^2`, as an exact rational.
pub fn exact_success_probability(n: u64) -> BigRational {
    let p = preorder_count(n);
    rational(factorial(n) * f1111_mobius(n), &p * &p)
}

/// Exact value of `class` at `n` from a closed form, when one exists.
pub fn formula_value(class: ClassId, n: u64) -> Result<BigUint> {
    let f0011 = Flags::new(false, false, true, true);
    let f0111 = Flags::new(false, true, true, true);
    match class {
        ClassId::F(fl) if fl == Flags::new(true, true, true, true) => Ok(f1111_mobius(n)),
        ClassId::F(fl) if fl == f0011 || fl == f0011.transposed() => klazar_f0011(n),
        ClassId::F(fl) if fl == f0111 || fl == f0111.transposed() => klazar_f0111(n),
        c if c == ClassId::PHI11 => phi11_exact(n),
        c if c == ClassId::S11 => s11_exact(n),
        c => Err(Error::NoFormula(c)),
    }
}

/// Classes with a closed form.
pub fn formula_classes() -> Vec<ClassId> {
    vec![
        ClassId::F1111,
        ClassId::F0011,
        ClassId::f(1, 1, 0, 0),
        ClassId::F0111,
        ClassId::f(1, 1, 0, 1),
        ClassId::PHI11,
        ClassId::S11,
    ]
}

/// Formula values for every class in [`formula_classes`] and `1 <= n <= max_n`.
pub fn formula_table(max_n: u32) -> Result<CountTable> {
    let mut table = CountTable::new();
    for class in formula_classes() {
        for n in 1..=max_n {
            table.insert(
                class,
                n,
                formula_value(class, n as u64)?,
                Provenance::Formula,
            )?;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Brute force over all k x l matrices for tiny shapes.
    fn m_brute(k: usize, l: usize, n: usize) -> u64 {
        let cells = k * l;
        let mut count = 0;
        for bits in 0u32..(1u32 << cells) {
            if bits.count_ones() as usize != n {
                continue;
            }
            let rows_ok = (0..k).all(|r| (0..l).any(|c| bits & (1 << (r * l + c)) != 0));
            let cols_ok = (0..l).all(|c| (0..k).any(|r| bits & (1 << (r * l + c)) != 0));
            if rows_ok && cols_ok {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn m_count_examples() {
        assert_eq!(m_count(2, 2, 2), u(2));
        assert_eq!(m_count(1, 2, 2), u(1));
        assert_eq!(m_count(1, 1, 2), u(0));
        assert_eq!(m_count(0, 0, 0), u(1));
        assert_eq!(m_count(3, 1, 2), u(0));
    }

    #[test]
    fn m_count_matches_brute_force() {
        for k in 1..=4 {
            for l in 1..=4 {
                for n in 1..=(k * l).min(8) {
                    assert_eq!(
                        m_count(k as u64, l as u64, n as u64),
                        u(m_brute(k, l, n)),
                        "m_{k}{l}({n})"
                    );
                }
            }
        }
    }

    #[test]
    fn m_table_agrees_with_direct_inversion() {
        for n in 0..=7u64 {
            let t = m_table(n);
            for k in 0..=n {
                for l in 0..=n {
                    assert_eq!(t[k as usize][l as usize], m_count(k, l, n));
                }
            }
        }
    }

    #[test]
    fn f1111_routes() {
        assert_eq!(f1111_mobius(2), u(4));
        assert_eq!(f1111_mobius(6), u(24976));
        assert_eq!(f1111_mobius(10), u(2_324_081_728));
        assert_eq!(f1111_stirling(2).unwrap(), u(4));
        assert_eq!(f1111_stirling(3).unwrap(), u(24));
        assert_eq!(f1111_stirling(9).unwrap(), u(111_969_552));
        for n in 0..=25 {
            assert_eq!(f1111_mobius(n), f1111_stirling(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn stirling_route_hand_expansion() {
        // (s(3,1)P(1)^2 + s(3,2)P(2)^2 + s(3,3)P(3)^2) / 3! = (2 - 27 + 169) / 6
        assert_eq!((2 - 3 * 9 + 169) / 6, 24);
        assert_eq!(stirling1_signed(3, 2) * 9, BigInt::from(-27));
    }

    #[test]
    fn series_route_small() {
        for (n, expected) in [(1u64, 1u64), (2, 4), (8, 5_997_872)] {
            let est = f1111_series(n, 1e-9).unwrap();
            assert!(est.certified_relative_error <= 1e-9);
            let err = est.relative_error_against(&u(expected));
            assert!(err <= est.certified_relative_error, "n={n} err={err}");
            assert!(est.value <= BigRational::from_integer(expected.into()));
        }
    }

    #[test]
    fn series_rejects_bad_tolerance() {
        assert!(matches!(f1111_series(3, 0.0), Err(Error::OutOfRange(_))));
        assert!(matches!(f1111_series(3, 1.5), Err(Error::OutOfRange(_))));
        assert!(matches!(f1111_series(0, 1e-3), Err(Error::OutOfRange(_))));
    }

    /// Direct enumeration of symmetric k x k matrices with n ones.
    fn s_k_brute(k: usize, n: usize) -> u64 {
        let mut count = 0;
        for bits in 0u32..(1u32 << (k * k)) {
            if bits.count_ones() as usize != n {
                continue;
            }
            let sym = (0..k)
                .all(|r| (0..k).all(|c| (bits >> (r * k + c)) & 1 == (bits >> (c * k + r)) & 1));
            if sym {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn symmetric_counts() {
        assert_eq!(symmetric_s_k(2, 2), u(2));
        assert_eq!(symmetric_s_k(1, 2), u(0));
        assert_eq!(symmetric_s_k(3, 2), u(6));
        for k in 0..=4 {
            for n in 0..=6 {
                assert_eq!(symmetric_s_k(k as u64, n as u64), u(s_k_brute(k, n)));
            }
        }
    }

    #[test]
    fn s11_values() {
        let expected = [1u64, 2, 6, 20, 74, 302, 1314, 6122, 29982, 154718];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(s11_exact(i as u64 + 1).unwrap(), u(e));
        }
    }

    #[test]
    fn s_k_reconstruction() {
        for n in 1..=10u64 {
            let mu = symmetric_incidence_by_size(n).unwrap();
            for k in 0..=n {
                let rebuilt: BigUint = (1..=k).map(|i| binomial(k, i) * &mu[i as usize]).sum();
                assert_eq!(rebuilt, symmetric_s_k(k, n), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn s11_series_cross_check() {
        for n in 1..=10 {
            let est = s11_series(n, 1e-9).unwrap();
            let exact = s11_exact(n).unwrap();
            assert!(est.relative_error_against(&exact) <= est.certified_relative_error);
        }
    }

    #[test]
    fn phi11_values() {
        assert_eq!(phi11_exact(1).unwrap(), u(1));
        assert_eq!(phi11_exact(4).unwrap(), u(108));
        assert_eq!(phi11_exact(9).unwrap(), u(55_999_767));
    }

    #[test]
    fn klazar_values() {
        assert_eq!(klazar_f0011(2).unwrap(), u(2));
        assert_eq!(klazar_f0111(2).unwrap(), u(3));
        assert_eq!(klazar_f0011(7).unwrap(), u(4408));
        assert_eq!(klazar_f0111(5).unwrap(), u(192));
        assert_eq!(klazar_f0011(9).unwrap(), u(210_710));
        assert_eq!(klazar_f0111(9).unwrap(), u(282_241));
    }

    #[test]
    fn klazar_bound() {
        for n in 1..=14 {
            let a = klazar_f0011(n).unwrap();
            let b = klazar_f0111(n).unwrap();
            assert!(a <= b && b <= &a * 2u32, "n={n}");
        }
    }

    #[test]
    fn sandwich_bounds() {
        for n in 1..=12u64 {
            let f = f1111_mobius(n);
            assert!(factorial(n) <= f);
            assert!(f <= binomial(n * n, n));
        }
    }

    #[test]
    fn decomposition_of_preorder_pairs() {
        for n in 1..=12 {
            assert!(p_squared_decomposition_check(n), "n={n}");
        }
        assert!(!p_squared_decomposition_check(0));
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(exact_success_probability(1), BigRational::one());
        assert_eq!(
            exact_success_probability(2),
            BigRational::new(8.into(), 9.into())
        );
        let p40 = exact_success_probability(40).to_f64().unwrap();
        assert!(p40 > 0.75 && p40 < 0.82, "{p40}");
        for n in 1..=40 {
            let p = exact_success_probability(n);
            assert!(p > BigRational::zero() && p <= BigRational::one());
        }
    }

    #[test]
    fn formula_dispatch() {
        assert_eq!(formula_value(ClassId::f(1, 1, 0, 0), 7).unwrap(), u(4408));
        assert_eq!(formula_value(ClassId::f(1, 1, 0, 1), 5).unwrap(), u(192));
        assert!(matches!(
            formula_value(ClassId::F0101, 3),
            Err(Error::NoFormula(_))
        ));
        let t = formula_table(6).unwrap();
        assert!(t.transpose_symmetry_violation().is_none());
        assert!(t.monotonicity_violation().is_none());
    }
}
