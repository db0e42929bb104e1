//! Counting-class identifiers and the `CountTable` that stores exact values
//! together with where they came from.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};

/// The four flags of an `F_ijkl` class.
///
/// * `i`/`k`: `false` when row/column permutations are identified.
/// * `j`/`l`: `false` when repeated rows/columns are forbidden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flags {
    pub rows_labeled: bool,
    pub rows_may_repeat: bool,
    pub cols_labeled: bool,
    pub cols_may_repeat: bool,
}

impl Flags {
    pub const fn new(i: bool, j: bool, k: bool, l: bool) -> Self {
        Flags {
            rows_labeled: i,
            rows_may_repeat: j,
            cols_labeled: k,
            cols_may_repeat: l,
        }
    }

    /// All sixteen combinations, ordered by the binary number `ijkl`.
    pub fn all() -> impl Iterator<Item = Flags> {
        (0..16u8).map(Flags::from_index)
    }

    pub fn from_index(idx: u8) -> Flags {
        Flags::new(idx & 8 != 0, idx & 4 != 0, idx & 2 != 0, idx & 1 != 0)
    }

    pub fn index(self) -> usize {
        (self.rows_labeled as usize) << 3
            | (self.rows_may_repeat as usize) << 2
            | (self.cols_labeled as usize) << 1
            | self.cols_may_repeat as usize
    }

    /// The class of transposed matrices: `F_klij`.
    pub fn transposed(self) -> Flags {
        Flags::new(
            self.cols_labeled,
            self.cols_may_repeat,
            self.rows_labeled,
            self.rows_may_repeat,
        )
    }
}

/// Identifier of a counting class: the sixteen `F_ijkl`, the four
/// transposition-identified `Phi_ij`, and the four symmetric counts `S_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassId {
    F(Flags),
    Phi { labeled: bool, may_repeat: bool },
    S { labeled: bool, may_repeat: bool },
}

impl ClassId {
    pub const F1111: ClassId = ClassId::F(Flags::new(true, true, true, true));
    pub const F0011: ClassId = ClassId::F(Flags::new(false, false, true, true));
    pub const F0111: ClassId = ClassId::F(Flags::new(false, true, true, true));
    pub const F0101: ClassId = ClassId::F(Flags::new(false, true, false, true));
    pub const PHI11: ClassId = ClassId::Phi {
        labeled: true,
        may_repeat: true,
    };
    pub const S11: ClassId = ClassId::S {
        labeled: true,
        may_repeat: true,
    };

    pub fn f(i: u8, j: u8, k: u8, l: u8) -> ClassId {
        ClassId::F(Flags::new(i != 0, j != 0, k != 0, l != 0))
    }

    pub fn phi(i: u8, j: u8) -> ClassId {
        ClassId::Phi {
            labeled: i != 0,
            may_repeat: j != 0,
        }
    }

    pub fn s(i: u8, j: u8) -> ClassId {
        ClassId::S {
            labeled: i != 0,
            may_repeat: j != 0,
        }
    }

    /// The fourteen functions of the standard table: the ten distinct
    /// `F_ijkl` (up to transposition) followed by the four `Phi_ij`.
    pub fn fourteen() -> Vec<ClassId> {
        let mut out: Vec<ClassId> = [
            "F0000", "F0010", "F1010", "F0001", "F0011", "F1001", "F1011", "F0101", "F0111",
            "F1111", "Phi00", "Phi10", "Phi01", "Phi11",
        ]
        .iter()
        .map(|s| s.parse().expect("static class name"))
        .collect();
        out.dedup();
        out
    }

    pub fn symmetric_four() -> Vec<ClassId> {
        vec![
            ClassId::s(0, 0),
            ClassId::s(0, 1),
            ClassId::s(1, 0),
            ClassId::s(1, 1),
        ]
    }

    /// Every identifier: sixteen `F`, four `Phi`, four `S`.
    pub fn all() -> Vec<ClassId> {
        let mut out: Vec<ClassId> = Flags::all().map(ClassId::F).collect();
        for i in 0..2 {
            for j in 0..2 {
                out.push(ClassId::phi(i, j));
            }
        }
        out.extend(ClassId::symmetric_four());
        out
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = |x: bool| if x { '1' } else { '0' };
        match *self {
            ClassId::F(fl) => write!(
                f,
                "F{}{}{}{}",
                b(fl.rows_labeled),
                b(fl.rows_may_repeat),
                b(fl.cols_labeled),
                b(fl.cols_may_repeat)
            ),
            ClassId::Phi {
                labeled,
                may_repeat,
            } => write!(f, "Phi{}{}", b(labeled), b(may_repeat)),
            ClassId::S {
                labeled,
                may_repeat,
            } => write!(f, "S{}{}", b(labeled), b(may_repeat)),
        }
    }
}

impl Serialize for ClassId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseClassError(pub String);

impl fmt::Display for ParseClassError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = ClassId::all().iter().map(ClassId::to_string).collect();
        write!(
            f,
            "unknown class `{}`; expected one of: {}",
            self.0,
            names.join(", ")
        )
    }
}

impl std::error::Error for ParseClassError {}

impl FromStr for ClassId {
    type Err = ParseClassError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let err = || ParseClassError(s.to_string());
        let cleaned: String = s.chars().filter(|c| *c != '_').collect();
        let lower = cleaned.to_lowercase();
        let (prefix, digits) = if let Some(d) = lower.strip_prefix("phi") {
            ("phi", d)
        } else if let Some(d) = lower.strip_prefix('φ') {
            ("phi", d)
        } else if let Some(d) = lower.strip_prefix('f') {
            ("f", d)
        } else if let Some(d) = lower.strip_prefix('s') {
            ("s", d)
        } else {
            return Err(err());
        };
        let bits: Vec<bool> = digits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(err()),
            })
            .collect::<std::result::Result<_, _>>()?;
        match (prefix, bits.as_slice()) {
            ("f", &[i, j, k, l]) => Ok(ClassId::F(Flags::new(i, j, k, l))),
            ("phi", &[i, j]) => Ok(ClassId::Phi {
                labeled: i,
                may_repeat: j,
            }),
            ("s", &[i, j]) => Ok(ClassId::S {
                labeled: i,
                may_repeat: j,
            }),
            _ => Err(err()),
        }
    }
}

/// Where a table value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Formula,
    BruteForce,
    /// Computed by both routes, which agreed.
    Both,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Formula => "formula",
            Provenance::BruteForce => "brute-force",
            Provenance::Both => "formula+brute-force",
        }
    }

    fn merge(self, other: Provenance) -> Provenance {
        if self == other {
            self
        } else {
            Provenance::Both
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Provenance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub value: BigUint,
    pub provenance: Provenance,
}

/// Exact values keyed by `(class, n)`.
///
/// Inserting a value that already exists merges provenance if the values
/// agree and fails with [`Error::Conflict`] otherwise, so every table built
/// from two routes is cross-checked on construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountTable {
    entries: BTreeMap<(ClassId, u32), Entry>,
}

/// One serialized table row.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TableRow {
    pub class: ClassId,
    pub n: u32,
    pub value: String,
    pub provenance: Provenance,
}

impl CountTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        class: ClassId,
        n: u32,
        value: BigUint,
        provenance: Provenance,
    ) -> Result<()> {
        use std::collections::btree_map::Entry as E;
        match self.entries.entry((class, n)) {
            E::Vacant(v) => {
                v.insert(Entry { value, provenance });
                Ok(())
            }
            E::Occupied(mut o) => {
                if o.get().value != value {
                    return Err(Error::Conflict {
                        class,
                        n,
                        existing: o.get().value.to_string(),
                        new: value.to_string(),
                    });
                }
                let merged = o.get().provenance.merge(provenance);
                o.get_mut().provenance = merged;
                Ok(())
            }
        }
    }

    pub fn get(&self, class: ClassId, n: u32) -> Option<&BigUint> {
        self.entries.get(&(class, n)).map(|e| &e.value)
    }

    pub fn entry(&self, class: ClassId, n: u32) -> Option<&Entry> {
        self.entries.get(&(class, n))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassId, u32, &Entry)> {
        self.entries.iter().map(|(&(c, n), e)| (c, n, e))
    }

    /// Values of one class as `(n, value)` pairs in increasing `n`.
    pub fn series(&self, class: ClassId) -> Vec<(u32, BigUint)> {
        self.entries
            .range((class, 0)..=(class, u32::MAX))
            .map(|(&(_, n), e)| (n, e.value.clone()))
            .collect()
    }

    /// Largest `n` present for `class`.
    pub fn max_n(&self, class: ClassId) -> Option<u32> {
        self.entries
            .range((class, 0)..=(class, u32::MAX))
            .next_back()
            .map(|(&(_, n), _)| n)
    }

    pub fn merge(&mut self, other: &CountTable) -> Result<()> {
        for (c, n, e) in other.iter() {
            self.insert(c, n, e.value.clone(), e.provenance)?;
        }
        Ok(())
    }

    /// Rows for the given classes, class order as given, `n` increasing.
    pub fn rows(&self, classes: &[ClassId]) -> Vec<TableRow> {
        classes
            .iter()
            .flat_map(|&c| {
                self.entries
                    .range((c, 0)..=(c, u32::MAX))
                    .map(move |(&(_, n), e)| TableRow {
                        class: c,
                        n,
                        value: e.value.to_string(),
                        provenance: e.provenance,
                    })
            })
            .collect()
    }

    /// First violation of `F_klij(n) = F_ijkl(n)` among entries present.
    pub fn transpose_symmetry_violation(&self) -> Option<(ClassId, u32)> {
        self.iter().find_map(|(c, n, e)| match c {
            ClassId::F(fl) => match self.get(ClassId::F(fl.transposed()), n) {
                Some(v) if *v != e.value => Some((c, n)),
                _ => None,
            },
            _ => None,
        })
    }

    /// First violation of flag monotonicity: raising any single flag of an
    /// `F_ijkl` (or `Phi_ij`/`S_ij`) must not decrease the count.
    pub fn monotonicity_violation(&self) -> Option<(ClassId, ClassId, u32)> {
        for (c, n, e) in self.iter() {
            if let ClassId::F(fl) = c {
                for bit in 0..4 {
                    let idx = fl.index() as u8;
                    if idx & (1 << bit) != 0 {
                        continue;
                    }
                    let up = ClassId::F(Flags::from_index(idx | (1 << bit)));
                    if let Some(v) = self.get(up, n) {
                        if *v < e.value {
                            return Some((c, up, n));
                        }
                    }
                }
            }
        }
        None
    }
}
