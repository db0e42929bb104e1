//! Brute-force ground truth: enumerate every labelled incidence matrix with
//! `n` ones and classify it under each symmetry group.
//!
//! Canonical forms are computed by exhaustive search over permutations of
//! the shorter side, which is exact and fast enough for `n <= 7`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::class::{ClassId, CountTable, Flags, Provenance};
use crate::error::{Error, Result};
use crate::matrix::ZeroOneMatrix;

/// Default largest `n` the census accepts.
pub const CENSUS_DEFAULT_LIMIT: u32 = 6;
/// Hard ceiling for enumeration.
pub const ORACLE_HARD_LIMIT: u32 = 7;
/// Largest side length whose permutations we search exhaustively.
const MAX_PERMUTED_SIDE: usize = 9;

/// Canonical byte encoding of an equivalence class of matrices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey(Vec<u8>);

impl ClassKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

fn permutations(size: usize) -> &'static [Vec<u8>] {
    static CACHE: OnceLock<Vec<Vec<Vec<u8>>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        (0..=MAX_PERMUTED_SIDE)
            .map(|k| {
                // Lexicographic order via next-permutation.
                let mut p: Vec<u8> = (0..k as u8).collect();
                let mut out = vec![p.clone()];
                while let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) {
                    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
                    p.swap(i - 1, j);
                    p[i..].reverse();
                    out.push(p.clone());
                }
                out
            })
            .collect()
    });
    &all[size]
}

/// Row masks of a small matrix, bit `c` of `rows[r]` being entry `(r, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Masks {
    rows: usize,
    cols: usize,
    bits: Vec<u64>,
}

impl Masks {
    fn of(m: &ZeroOneMatrix) -> Self {
        Masks {
            rows: m.rows(),
            cols: m.cols(),
            bits: m.row_masks(),
        }
    }

    fn transpose(&self) -> Masks {
        let mut bits = vec![0u64; self.cols];
        for (r, &m) in self.bits.iter().enumerate() {
            for (c, slot) in bits.iter_mut().enumerate() {
                *slot |= (m >> c & 1) << r;
            }
        }
        Masks {
            rows: self.cols,
            cols: self.rows,
            bits,
        }
    }

    fn has_repeats(&self) -> bool {
        let mut v = self.bits.clone();
        v.sort_unstable();
        v.windows(2).any(|w| w[0] == w[1])
    }

    fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }
}

fn encode(tag: u8, rows: usize, cols: usize, width: usize, masks: &[u64]) -> ClassKey {
    let bytes = width.div_ceil(8).max(1);
    let mut out = Vec::with_capacity(3 + masks.len() * bytes);
    out.extend_from_slice(&[tag, rows as u8, cols as u8]);
    for &m in masks {
        out.extend_from_slice(&m.to_be_bytes()[8 - bytes..]);
    }
    ClassKey(out)
}

fn labeled_key(m: &Masks) -> ClassKey {
    encode(0, m.rows, m.cols, m.cols, &m.bits)
}

fn rows_key(m: &Masks) -> ClassKey {
    let mut v = m.bits.clone();
    v.sort_unstable();
    encode(1, m.rows, m.cols, m.cols, &v)
}

fn cols_key(m: &Masks) -> ClassKey {
    let mut v = m.transpose().bits;
    v.sort_unstable();
    encode(2, m.rows, m.cols, m.rows, &v)
}

/// Minimum over row permutations of the sorted column masks.
fn min_over_row_perms(m: &Masks) -> Vec<u64> {
    let cols = m.transpose().bits;
    let mut best: Option<Vec<u64>> = None;
    let mut buf = vec![0u64; m.cols];
    for perm in permutations(m.rows) {
        for (slot, &col) in buf.iter_mut().zip(&cols) {
            let mut v = 0u64;
            for (p, &src) in perm.iter().enumerate() {
                v |= (col >> src & 1) << p;
            }
            *slot = v;
        }
        buf.sort_unstable();
        if best.as_ref().is_none_or(|b| buf < *b) {
            best = Some(buf.clone());
        }
    }
    best.unwrap_or_default()
}

/// Canonical key under row and column permutations. The search permutes
/// the shorter side; the shape is part of the key so the choice is
/// consistent within a class.
fn both_key(m: &Masks) -> ClassKey {
    if m.rows <= m.cols {
        encode(3, m.rows, m.cols, m.rows, &min_over_row_perms(m))
    } else {
        let t = m.transpose();
        encode(3, m.rows, m.cols, t.rows, &min_over_row_perms(&t))
    }
}

/// Alternately sorts rows and columns until stable (or for a bounded number
/// of rounds). The result lies in the orbit of `m` under row and column
/// permutations and depends only on `m`, so it can key a memo of canonical
/// forms; many matrices of one orbit share it.
fn sorted_representative(m: &Masks) -> Masks {
    let mut cur = m.clone();
    for _ in 0..2 * (m.rows + m.cols) {
        let mut next = cur.clone();
        next.bits.sort_unstable();
        let mut t = next.transpose();
        t.bits.sort_unstable();
        next = t.transpose();
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Canonical key of `m` under the group generated by the chosen symmetries.
///
/// When `identify_transpose` is set, `identify_rows` and `identify_cols`
/// must agree (the transposition only makes sense for `F_ijij` classes).
pub fn canonical_key(
    m: &ZeroOneMatrix,
    identify_rows: bool,
    identify_cols: bool,
    identify_transpose: bool,
) -> Result<ClassKey> {
    if identify_transpose && identify_rows != identify_cols {
        return Err(Error::OutOfRange(
            "transposition requires identical row and column identification".into(),
        ));
    }
    if m.rows() > 64 || m.cols() > 64 || m.rows() > u8::MAX as usize {
        return Err(Error::OutOfRange("matrix too large for a class key".into()));
    }
    if identify_rows && identify_cols && m.rows().min(m.cols()) > MAX_PERMUTED_SIDE {
        return Err(Error::OutOfRange(format!(
            "canonical search limited to {MAX_PERMUTED_SIDE} rows or columns"
        )));
    }
    let masks = Masks::of(m);
    let key = |x: &Masks| match (identify_rows, identify_cols) {
        (false, false) => labeled_key(x),
        (true, false) => rows_key(x),
        (false, true) => cols_key(x),
        (true, true) => both_key(x),
    };
    let k = key(&masks);
    Ok(if identify_transpose {
        k.min(key(&masks.transpose()))
    } else {
        k
    })
}

/// Shapes `(r, c)` that can hold an incidence matrix with `n` ones.
pub fn shapes(n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for r in 1..=n {
        for c in 1..=n {
            if r * c >= n {
                out.push((r, c));
            }
        }
    }
    out
}

/// Depth-first enumeration of `rows x cols` incidence matrices with `n`
/// ones, one row mask at a time. Prefixes that cannot still cover every row
/// and column are abandoned.
fn for_each_in_shape(rows: usize, cols: usize, n: usize, f: &mut impl FnMut(&Masks)) {
    fn rec(
        row: usize,
        remaining: usize,
        covered: u64,
        state: &mut Masks,
        full: u64,
        f: &mut impl FnMut(&Masks),
    ) {
        let rows_left = state.rows - row;
        if rows_left == 0 {
            if remaining == 0 && covered == full {
                f(state);
            }
            return;
        }
        for mask in 1..=full {
            let p = mask.count_ones() as usize;
            if p > remaining || remaining - p < rows_left - 1 {
                continue;
            }
            let now = covered | mask;
            if ((full & !now).count_ones() as usize) > remaining - p {
                continue;
            }
            state.bits[row] = mask;
            rec(row + 1, remaining - p, now, state, full, f);
        }
    }
    let full = if cols == 64 {
        u64::MAX
    } else {
        (1u64 << cols) - 1
    };
    let mut state = Masks {
        rows,
        cols,
        bits: vec![0; rows],
    };
    rec(0, n, 0, &mut state, full, f);
}

fn check_guard(n: u32, limit: u32) -> Result<()> {
    if n == 0 || n > limit.min(ORACLE_HARD_LIMIT) {
        return Err(Error::OutOfRange(format!(
            "enumeration supports 1 <= n <= {}, got {n}",
            limit.min(ORACLE_HARD_LIMIT)
        )));
    }
    Ok(())
}

/// Every labelled incidence matrix with `n` ones, exactly once, shape by
/// shape in lexicographic order. Refuses `n` outside `1..=7`.
pub fn enumerate_matrices(n: u32) -> Result<impl Iterator<Item = ZeroOneMatrix>> {
    check_guard(n, ORACLE_HARD_LIMIT)?;
    Ok(shapes(n).into_iter().flat_map(move |(r, c)| {
        let mut out = Vec::new();
        for_each_in_shape(r as usize, c as usize, n as usize, &mut |m| {
            out.push(
                ZeroOneMatrix::from_row_masks(m.cols, &m.bits).expect("enumerated matrix is valid"),
            );
        });
        out
    }))
}

/// Symmetric labelled incidence matrices with `n` ones.
pub fn enumerate_symmetric(n: u32) -> Result<Vec<ZeroOneMatrix>> {
    Ok(enumerate_matrices(n)?
        .filter(|m| m.is_symmetric())
        .collect())
}

/// Per-shape tallies, merged across shapes after enumeration.
#[derive(Default)]
struct Tally {
    total: u64,
    /// Labelled counts for `F_1j1l` and set sizes for the other `F`s. The
    /// per-shape key sets are disjoint across shapes so sizes can be summed.
    f_counts: [u64; 16],
    /// `Phi_ij` orbit keys, indexed by `2i + j`. These mix shapes `(r,c)`
    /// and `(c,r)`, so they are merged as sets.
    phi_keys: [HashSet<ClassKey>; 4],
    s_counts: [u64; 4],
}

fn tally_shape(rows: usize, cols: usize, n: usize) -> Tally {
    let mut tally = Tally::default();
    let mut sets: [HashSet<ClassKey>; 16] = Default::default();
    let mut self_dual: [HashSet<ClassKey>; 2] = Default::default();
    // Canonical keys memoized on a cheap orbit representative.
    let mut memo: HashMap<Vec<u64>, ClassKey> = HashMap::new();
    let mut memo_t: HashMap<Vec<u64>, ClassKey> = HashMap::new();
    let cached_both_key = |x: &Masks, memo: &mut HashMap<Vec<u64>, ClassKey>| {
        let rep = sorted_representative(x);
        memo.entry(rep.bits.clone())
            .or_insert_with(|| both_key(&rep))
            .clone()
    };

    for_each_in_shape(rows, cols, n, &mut |m| {
        tally.total += 1;
        let rep_r = m.has_repeats();
        let t = m.transpose();
        let rep_c = t.has_repeats();
        let rk = rows_key(m);
        let ck = cols_key(m);
        let bk = cached_both_key(m, &mut memo);
        let bk_t = cached_both_key(&t, &mut memo_t);
        let lk = labeled_key(m);
        let lk_t = labeled_key(&t);
        let symmetric = m.is_symmetric();

        #[allow(clippy::needless_range_loop)]
        for j in 0..2usize {
            for l in 0..2usize {
                let ok = (j == 1 || !rep_r) && (l == 1 || !rep_c);
                if !ok {
                    continue;
                }
                let idx = |i: usize, k: usize| i << 3 | j << 2 | k << 1 | l;
                tally.f_counts[idx(1, 1)] += 1;
                sets[idx(0, 1)].insert(rk.clone());
                sets[idx(1, 0)].insert(ck.clone());
                sets[idx(0, 0)].insert(bk.clone());
                if j == l {
                    tally.phi_keys[2 + j].insert(lk.clone().min(lk_t.clone()));
                    tally.phi_keys[j].insert(bk.clone().min(bk_t.clone()));
                    if symmetric {
                        tally.s_counts[2 + j] += 1;
                    }
                    if bk == bk_t {
                        self_dual[j].insert(bk.clone());
                    }
                }
            }
        }
    });
    for (i, set) in sets.iter().enumerate() {
        if !set.is_empty() {
            tally.f_counts[i] += set.len() as u64;
        }
    }
    for (count, keys) in tally.s_counts.iter_mut().zip(&self_dual) {
        *count = keys.len() as u64;
    }
    tally
}

/// Result of a brute-force census.
#[derive(Debug, Clone)]
pub struct Census {
    pub n_max: u32,
    /// All sixteen `F_ijkl`, four `Phi_ij` and four `S_ij` for `1..=n_max`,
    /// with provenance `brute-force`.
    pub table: CountTable,
    /// Number of labelled incidence matrices per `(n, rows, cols)`.
    pub shape_totals: BTreeMap<(u32, u32, u32), u64>,
}

#[derive(Debug, Clone, Copy)]
pub struct CensusOptions {
    /// Largest admissible `n_max` (capped at [`ORACLE_HARD_LIMIT`]).
    pub limit: u32,
    /// Worker threads for shape-level parallelism; `None` uses the global
    /// pool, `Some(1)` runs sequentially.
    pub threads: Option<usize>,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            limit: CENSUS_DEFAULT_LIMIT,
            threads: None,
        }
    }
}

/// Census of every class for `1 <= n <= n_max <= 6`.
pub fn census(n_max: u32) -> Result<Census> {
    census_with(n_max, CensusOptions::default())
}

pub fn census_with(n_max: u32, opts: CensusOptions) -> Result<Census> {
    check_guard(n_max, opts.limit)?;
    let run = || -> Result<Census> {
        let mut table = CountTable::new();
        let mut shape_totals = BTreeMap::new();
        for n in 1..=n_max {
            let per_shape: Vec<((u32, u32), Tally)> = shapes(n)
                .into_par_iter()
                .map(|(r, c)| ((r, c), tally_shape(r as usize, c as usize, n as usize)))
                .collect();
            let mut f_counts = [0u64; 16];
            let mut s_counts = [0u64; 4];
            let mut phi: [HashSet<ClassKey>; 4] = Default::default();
            for ((r, c), t) in per_shape {
                shape_totals.insert((n, r, c), t.total);
                for (acc, v) in f_counts.iter_mut().zip(t.f_counts) {
                    *acc += v;
                }
                for (acc, v) in s_counts.iter_mut().zip(t.s_counts) {
                    *acc += v;
                }
                for (acc, keys) in phi.iter_mut().zip(t.phi_keys) {
                    acc.extend(keys);
                }
            }
            for fl in Flags::all() {
                table.insert(
                    ClassId::F(fl),
                    n,
                    BigUint::from(f_counts[fl.index()]),
                    Provenance::BruteForce,
                )?;
            }
            for i in 0..2u8 {
                for j in 0..2u8 {
                    let idx = (2 * i + j) as usize;
                    table.insert(
                        ClassId::phi(i, j),
                        n,
                        BigUint::from(phi[idx].len()),
                        Provenance::BruteForce,
                    )?;
                    table.insert(
                        ClassId::s(i, j),
                        n,
                        BigUint::from(s_counts[idx]),
                        Provenance::BruteForce,
                    )?;
                }
            }
        }
        Ok(Census {
            n_max,
            table,
            shape_totals,
        })
    };
    match opts.threads {
        None => run(),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?
            .install(run),
    }
}
