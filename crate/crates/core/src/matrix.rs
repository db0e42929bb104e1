use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A zero-one matrix with no zero rows or columns, stored as its sorted
/// 1-based one-positions.
///
/// Serializes as `{"rows": r, "cols": c, "ones": [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct ZeroOneMatrix {
    rows: usize,
    cols: usize,
    ones: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    ones: Vec<(usize, usize)>,
}

impl TryFrom<RawMatrix> for ZeroOneMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        ZeroOneMatrix::new(raw.rows, raw.cols, raw.ones)
    }
}

impl ZeroOneMatrix {
    /// Validates bounds, distinctness and the no-zero-line condition. The
    /// positions may be given in any order.
    pub fn new(rows: usize, cols: usize, mut ones: Vec<(usize, usize)>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix("empty dimension".into()));
        }
        ones.sort_unstable();
        if ones.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMatrix("repeated position".into()));
        }
        let mut row_hit = vec![false; rows];
        let mut col_hit = vec![false; cols];
        for &(r, c) in &ones {
            if r == 0 || c == 0 || r > rows || c > cols {
                return Err(Error::InvalidMatrix(format!(
                    "position ({r},{c}) outside {rows}x{cols}"
                )));
            }
            row_hit[r - 1] = true;
            col_hit[c - 1] = true;
        }
        if let Some(r) = row_hit.iter().position(|h| !h) {
            return Err(Error::InvalidMatrix(format!("row {} is zero", r + 1)));
        }
        if let Some(c) = col_hit.iter().position(|h| !h) {
            return Err(Error::InvalidMatrix(format!("column {} is zero", c + 1)));
        }
        Ok(ZeroOneMatrix { rows, cols, ones })
    }

    /// Builds a matrix from arbitrary (possibly sparse) 0-based cells by
    /// deleting every empty row and column, keeping relative order.
    pub fn from_cells_stripped(cells: &[(usize, usize)]) -> Result<Self> {
        let mut row_ids: Vec<usize> = cells.iter().map(|c| c.0).collect();
        let mut col_ids: Vec<usize> = cells.iter().map(|c| c.1).collect();
        row_ids.sort_unstable();
        row_ids.dedup();
        col_ids.sort_unstable();
        col_ids.dedup();
        let ones = cells
            .iter()
            .map(|&(r, c)| {
                (
                    row_ids.binary_search(&r).expect("row present") + 1,
                    col_ids.binary_search(&c).expect("col present") + 1,
                )
            })
            .collect();
        ZeroOneMatrix::new(row_ids.len(), col_ids.len(), ones)
    }

    /// From row bitmasks; bit `c` of `masks[r]` is entry `(r+1, c+1)`.
    pub fn from_row_masks(cols: usize, masks: &[u64]) -> Result<Self> {
        let ones = masks
            .iter()
            .enumerate()
            .flat_map(|(r, &m)| {
                (0..cols)
                    .filter(move |&c| m >> c & 1 == 1)
                    .map(move |c| (r + 1, c + 1))
            })
            .collect();
        ZeroOneMatrix::new(masks.len(), cols, ones)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ones(&self) -> &[(usize, usize)] {
        &self.ones
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.ones.len()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.ones.binary_search(&(r, c)).is_ok()
    }

    pub fn transpose(&self) -> ZeroOneMatrix {
        let mut ones: Vec<_> = self.ones.iter().map(|&(r, c)| (c, r)).collect();
        ones.sort_unstable();
        ZeroOneMatrix {
            rows: self.cols,
            cols: self.rows,
            ones,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.ones.iter().all(|&(r, c)| self.get(c, r))
    }

    /// Row bitmasks (requires `cols <= 64`).
    pub fn row_masks(&self) -> Vec<u64> {
        assert!(self.cols <= 64, "row masks need at most 64 columns");
        let mut masks = vec![0u64; self.rows];
        for &(r, c) in &self.ones {
            masks[r - 1] |= 1 << (c - 1);
        }
        masks
    }

    /// Column bitmasks (requires `rows <= 64`).
    pub fn col_masks(&self) -> Vec<u64> {
        assert!(self.rows <= 64, "column masks need at most 64 rows");
        let mut masks = vec![0u64; self.cols];
        for &(r, c) in &self.ones {
            masks[c - 1] |= 1 << (r - 1);
        }
        masks
    }

    pub fn has_repeated_rows(&self) -> bool {
        let mut sets: Vec<Vec<usize>> = vec![Vec::new(); self.rows];
        for &(r, c) in &self.ones {
            sets[r - 1].push(c);
        }
        has_duplicate(sets)
    }

    pub fn has_repeated_cols(&self) -> bool {
        let mut sets: Vec<Vec<usize>> = vec![Vec::new(); self.cols];
        for &(r, c) in &self.ones {
            sets[c - 1].push(r);
        }
        has_duplicate(sets)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }
}

fn has_duplicate(mut sets: Vec<Vec<usize>>) -> bool {
    sets.sort_unstable();
    sets.windows(2).any(|w| w[0] == w[1])
}

impl fmt::Display for ZeroOneMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 1..=self.rows {
            let line: Vec<&str> = (1..=self.cols)
                .map(|c| if self.get(r, c) { "1" } else { "0" })
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
