//! Sparse binary parity-check matrices.

use crate::error::{Error, Result};
use crate::qc::{BaseMatrix, MaskMatrix};

/// QC description a matrix was lifted from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcProvenance {
    pub base: BaseMatrix,
    pub mask: MaskMatrix,
    pub p: usize,
}

/// Sparse binary matrix stored as both row and column adjacency lists.
///
/// Positions inside every list are sorted and unique, and the two views
/// always describe the same set of nonzeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
    provenance: Option<QcProvenance>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from `(row, col)` nonzero positions. Duplicates collapse.
    pub fn from_entries(
        num_rows: usize,
        num_cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut rows = vec![Vec::new(); num_rows];
        let mut cols = vec![Vec::new(); num_cols];
        for (r, c) in entries {
            if r >= num_rows || c >= num_cols {
                return Err(Error::Dimension(format!(
                    "entry ({r}, {c}) outside {num_rows}x{num_cols}"
                )));
            }
            rows[r].push(c);
            cols[c].push(r);
        }
        for list in rows.iter_mut().chain(cols.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(ParityCheckMatrix {
            rows,
            cols,
            provenance: None,
        })
    }

    /// Builds a matrix from row adjacency lists.
    pub fn from_rows(num_cols: usize, rows: &[Vec<usize>]) -> Result<Self> {
        Self::from_entries(
            rows.len(),
            num_cols,
            rows.iter()
                .enumerate()
                .flat_map(|(r, cs)| cs.iter().map(move |&c| (r, c))),
        )
    }

    /// Builds a matrix from a dense 0/1 grid.
    pub fn from_dense(grid: &[Vec<u8>]) -> Result<Self> {
        let num_cols = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|r| r.len() != num_cols) {
            return Err(Error::Dimension("ragged dense matrix".into()));
        }
        Self::from_entries(
            grid.len(),
            num_cols,
            grid.iter().enumerate().flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(move |(c, _)| (r, c))
            }),
        )
    }

    pub(crate) fn with_provenance(mut self, provenance: QcProvenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    /// Code length (number of columns).
    pub fn n(&self) -> usize {
        self.cols.len()
    }

    /// Number of checks (rows).
    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.cols[c]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn provenance(&self) -> Option<&QcProvenance> {
        self.provenance.as_ref()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].binary_search(&c).is_ok()
    }

    /// Iterates nonzeros in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, cs)| cs.iter().map(move |&c| (r, c)))
    }

    /// Column weight if every column has the same weight.
    pub fn uniform_column_weight(&self) -> Option<usize> {
        uniform(self.cols.iter().map(Vec::len))
    }

    /// Row weight if every row has the same weight.
    pub fn uniform_row_weight(&self) -> Option<usize> {
        uniform(self.rows.iter().map(Vec::len))
    }

    /// `true` if `word` (one bit per column) satisfies every check.
    pub fn is_codeword(&self, word: &[u8]) -> bool {
        self.syndrome_weight(word) == 0
    }

    /// Number of unsatisfied checks for `word`.
    pub fn syndrome_weight(&self, word: &[u8]) -> usize {
        self.rows
            .iter()
            .filter(|cs| cs.iter().fold(0u8, |acc, &c| acc ^ (word[c] & 1)) != 0)
            .count()
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let words = self.n().div_ceil(64);
        let mut dense: Vec<Vec<u64>> = self
            .rows
            .iter()
            .map(|cs| {
                let mut v = vec![0u64; words];
                for &c in cs {
                    v[c / 64] |= 1 << (c % 64);
                }
                v
            })
            .collect();
        gf2_row_reduce(&mut dense, self.n()).len()
    }
}

fn uniform(mut it: impl Iterator<Item = usize>) -> Option<usize> {
    let first = it.next()?;
    it.all(|w| w == first).then_some(first)
}

/// Reduces `rows` to reduced row echelon form in place and returns pivot columns.
pub(crate) fn gf2_row_reduce(rows: &mut Vec<Vec<u64>>, num_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..num_cols {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(found) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, found);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    pivots
}
