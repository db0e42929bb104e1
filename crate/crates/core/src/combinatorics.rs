//! Exact combinatorial primitives: binomials, Stirling numbers of both kinds,
//! Fubini (preorder) numbers, involutions, Bell numbers and integer partitions.
//!
//! Every function returns an exact arbitrary-precision value. Triangular
//! tables are memoized process-wide behind `RwLock`s and grown on demand, so
//! they can be shared by concurrent readers.

use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// Exact nonnegative count.
pub type BigCount = BigUint;

/// Pascal rows below this bound are memoized; larger arguments use the
/// multiplicative formula.
const PASCAL_LIMIT: u64 = 256;

/// A lower-triangular table grown one row at a time.
struct Triangle<T> {
    rows: RwLock<Vec<Vec<T>>>,
    next_row: fn(&[Vec<T>]) -> Vec<T>,
}

impl<T: Clone> Triangle<T> {
    const fn new(next_row: fn(&[Vec<T>]) -> Vec<T>) -> Self {
        Triangle {
            rows: RwLock::new(Vec::new()),
            next_row,
        }
    }

    fn get(&self, n: usize, k: usize) -> Option<T> {
        {
            let rows = self.rows.read().expect("memo table poisoned");
            if let Some(row) = rows.get(n) {
                return row.get(k).cloned();
            }
        }
        let mut rows = self.rows.write().expect("memo table poisoned");
        while rows.len() <= n {
            let row = (self.next_row)(&rows);
            rows.push(row);
        }
        rows[n].get(k).cloned()
    }
}

fn pascal_row(rows: &[Vec<BigUint>]) -> Vec<BigUint> {
    match rows.last() {
        None => vec![BigUint::one()],
        Some(prev) => {
            let n = prev.len();
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigUint::one());
            for k in 1..n {
                row.push(&prev[k - 1] + &prev[k]);
            }
            row.push(BigUint::one());
            row
        }
    }
}

fn stirling2_row(rows: &[Vec<BigUint>]) -> Vec<BigUint> {
    // S(n,k) = k S(n-1,k) + S(n-1,k-1)
    match rows.last() {
        None => vec![BigUint::one()],
        Some(prev) => {
            let n = prev.len();
            let mut row = vec![BigUint::zero(); n + 1];
            for (k, slot) in row.iter_mut().enumerate().skip(1) {
                let mut v = prev[k - 1].clone();
                if k < n {
                    v += &prev[k] * BigUint::from(k);
                }
                *slot = v;
            }
            row
        }
    }
}

fn stirling1_row(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    // s(n,k) = s(n-1,k-1) - (n-1) s(n-1,k)
    match rows.last() {
        None => vec![BigInt::one()],
        Some(prev) => {
            let n = prev.len();
            let mut row = vec![BigInt::zero(); n + 1];
            let m = BigInt::from(n - 1);
            for (k, slot) in row.iter_mut().enumerate().skip(1) {
                let mut v = prev[k - 1].clone();
                if k < n {
                    v -= &prev[k] * &m;
                }
                *slot = v;
            }
            row
        }
    }
}

static PASCAL: Triangle<BigUint> = Triangle::new(pascal_row);
static STIRLING2: Triangle<BigUint> = Triangle::new(stirling2_row);
static STIRLING1: Triangle<BigInt> = Triangle::new(stirling1_row);

/// A memoized sequence `a(0), a(1), ...` grown on demand.
struct Sequence {
    values: RwLock<Vec<BigUint>>,
    next: fn(&[BigUint]) -> BigUint,
}

impl Sequence {
    const fn new(next: fn(&[BigUint]) -> BigUint) -> Self {
        Sequence {
            values: RwLock::new(Vec::new()),
            next,
        }
    }

    fn get(&self, n: usize) -> BigUint {
        {
            let values = self.values.read().expect("memo table poisoned");
            if let Some(v) = values.get(n) {
                return v.clone();
            }
        }
        let mut values = self.values.write().expect("memo table poisoned");
        while values.len() <= n {
            let v = (self.next)(&values);
            values.push(v);
        }
        values[n].clone()
    }
}

fn next_factorial(prev: &[BigUint]) -> BigUint {
    match prev.last() {
        None => BigUint::one(),
        Some(last) => last * BigUint::from(prev.len()),
    }
}

fn next_involution(prev: &[BigUint]) -> BigUint {
    // I(n) = I(n-1) + (n-1) I(n-2)
    let n = prev.len();
    if n < 2 {
        return BigUint::one();
    }
    &prev[n - 1] + &prev[n - 2] * BigUint::from(n - 1)
}

fn next_fubini(prev: &[BigUint]) -> BigUint {
    // P(n) = sum_{k=1}^n C(n,k) P(n-k)
    let n = prev.len() as u64;
    if n == 0 {
        return BigUint::one();
    }
    (1..=n)
        .map(|k| binomial(n, k) * &prev[(n - k) as usize])
        .sum()
}

static FACTORIAL: Sequence = Sequence::new(next_factorial);
static INVOLUTIONS: Sequence = Sequence::new(next_involution);
static FUBINI: Sequence = Sequence::new(next_fubini);

/// Bell numbers via the Bell triangle; only the last row is retained.
fn bell_cache() -> &'static RwLock<(Vec<BigUint>, Vec<BigUint>)> {
    static CACHE: OnceLock<RwLock<(Vec<BigUint>, Vec<BigUint>)>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new((vec![BigUint::one()], vec![BigUint::one()])))
}

/// Binomial coefficient `C(a, b)`, zero when `b > a`.
pub fn binomial(a: u64, b: u64) -> BigCount {
    if b > a {
        return BigUint::zero();
    }
    if a < PASCAL_LIMIT {
        return PASCAL
            .get(a as usize, b as usize)
            .expect("index within Pascal row");
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient with a big upper argument, `C(a, b)`.
pub fn binomial_big(a: &BigUint, b: u64) -> BigCount {
    let bb = BigUint::from(b);
    if &bb > a {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - BigUint::from(i);
        acc /= i + 1;
    }
    acc
}

/// `n!`.
pub fn factorial(n: u64) -> BigCount {
    FACTORIAL.get(n as usize)
}

/// Stirling number of the second kind `S(n, k)`.
pub fn stirling2(n: u64, k: u64) -> BigCount {
    if k > n {
        return BigUint::zero();
    }
    STIRLING2
        .get(n as usize, k as usize)
        .expect("index within Stirling row")
}

/// Signed Stirling number of the first kind `s(n, k)`, the coefficient of
/// `x^k` in the falling factorial `x(x-1)...(x-n+1)`.
pub fn stirling1_signed(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    STIRLING1
        .get(n as usize, k as usize)
        .expect("index within Stirling row")
}

/// Number of preorders (ordered set partitions) of an `n`-set, `P(n)`.
pub fn preorder_count(n: u64) -> BigCount {
    FUBINI.get(n as usize)
}

/// Number of preorders of an `n`-set with exactly `k` blocks: `k! S(n,k)`.
pub fn preorder_count_by_blocks(n: u64, k: u64) -> BigCount {
    factorial(k) * stirling2(n, k)
}

/// Number of involutions of an `n`-set, `I(n)`.
pub fn involution_count(n: u64) -> BigCount {
    INVOLUTIONS.get(n as usize)
}

/// Bell number `b(n)`.
pub fn bell(n: u64) -> BigCount {
    let n = n as usize;
    {
        let cache = bell_cache().read().expect("memo table poisoned");
        if let Some(v) = cache.0.get(n) {
            return v.clone();
        }
    }
    let mut cache = bell_cache().write().expect("memo table poisoned");
    let (values, row) = &mut *cache;
    while values.len() <= n {
        // Next Bell-triangle row starts with the last entry of the previous one.
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("nonempty row").clone());
        for x in row.iter() {
            let v = next.last().expect("nonempty row") + x;
            next.push(v);
        }
        values.push(next[0].clone());
        *row = next;
    }
    values[n].clone()
}

/// An integer partition `1^{a_1} 2^{a_2} ... l^{a_l}` of `n`, stored by
/// multiplicities. `multiplicities()[i - 1]` is `a_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerPartition {
    n: u64,
    multiplicities: Vec<u64>,
}

impl IntegerPartition {
    /// Build from descending (or any order) parts.
    pub fn from_parts(parts: &[u64]) -> Option<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return None;
        }
        let largest = *parts.iter().max()? as usize;
        let mut multiplicities = vec![0; largest];
        for &p in parts {
            multiplicities[p as usize - 1] += 1;
        }
        Some(IntegerPartition {
            n: parts.iter().sum(),
            multiplicities,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Largest part `l`.
    pub fn largest_part(&self) -> u64 {
        self.multiplicities.len() as u64
    }

    /// `a_1, ..., a_l`, with `a_l > 0`.
    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    /// Parts in nonincreasing order.
    pub fn parts(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for (i, &a) in self.multiplicities.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n(i as u64 + 1, a as usize));
        }
        out
    }
}

/// Iterator over all partitions of `n` in reverse lexicographic order of
/// their nonincreasing part sequences, starting from `(n)`.
#[derive(Debug, Clone)]
pub struct Partitions {
    parts: Vec<u64>,
    done: bool,
}

impl Iterator for Partitions {
    type Item = IntegerPartition;

    fn next(&mut self) -> Option<IntegerPartition> {
        if self.done {
            return None;
        }
        let current = IntegerPartition::from_parts(&self.parts)?;
        // Advance: strip trailing ones, decrement the last part > 1 and
        // redistribute the remainder greedily.
        let mut ones = 0;
        while self.parts.last() == Some(&1) {
            self.parts.pop();
            ones += 1;
        }
        match self.parts.pop() {
            None => self.done = true,
            Some(p) => {
                let q = p - 1;
                let mut rem = ones + 1;
                self.parts.push(q);
                while rem > 0 {
                    let take = rem.min(q);
                    self.parts.push(take);
                    rem -= take;
                }
            }
        }
        Some(current)
    }
}

/// Every partition of `n >= 1` exactly once. Yields nothing for `n == 0`.
pub fn iterate_partitions(n: u64) -> Partitions {
    Partitions {
        parts: if n == 0 { Vec::new() } else { vec![n] },
        done: n == 0,
    }
}
