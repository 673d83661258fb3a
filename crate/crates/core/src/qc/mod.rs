//! Quasi-cyclic construction: base and mask matrices, circulant lifting,
//! built-in mask families and labeling search.
//!
//! Block `(j, l)` of a lifted matrix is the `p x p` identity cyclically
//! right-shifted by `shift(j, l)` when `mask(j, l) = 1` and the zero block
//! otherwise, so nonzero `(R, C)` exists iff the mask bit of block
//! `(R / p, C / p)` is set and `C mod p = (R mod p + shift) mod p`.
//! Indices are 0-based throughout.

mod formats;
mod search;

pub use formats::{read_alist, read_base, write_alist, write_base};
pub use search::{label_search, Objective, SearchConfig, SearchOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ParityCheckMatrix, QcProvenance};

/// `J x L` grid of circulant shifts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseMatrix {
    shifts: Vec<Vec<usize>>,
}

impl BaseMatrix {
    pub fn new(shifts: Vec<Vec<usize>>) -> Result<Self> {
        let (j, l) = grid_dims(&shifts)?;
        if j > l {
            return Err(Error::Dimension(format!(
                "base matrix has more block rows ({j}) than block columns ({l})"
            )));
        }
        Ok(BaseMatrix { shifts })
    }

    /// All-zero shifts.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(vec![vec![0; cols]; rows])
    }

    pub fn rows(&self) -> usize {
        self.shifts.len()
    }

    pub fn cols(&self) -> usize {
        self.shifts[0].len()
    }

    pub fn shift(&self, row: usize, col: usize) -> usize {
        self.shifts[row][col]
    }

    pub(crate) fn set_shift(&mut self, row: usize, col: usize, shift: usize) {
        self.shifts[row][col] = shift;
    }

    pub fn shifts(&self) -> &[Vec<usize>] {
        &self.shifts
    }

    /// Checks every shift is below `p`.
    pub fn validate_for(&self, p: usize) -> Result<()> {
        if p == 0 {
            return Err(Error::param("lifting size p must be positive"));
        }
        for (row, line) in self.shifts.iter().enumerate() {
            for (col, &s) in line.iter().enumerate() {
                if s >= p {
                    return Err(Error::ShiftOutOfRange {
                        row,
                        col,
                        shift: s as i64,
                        p,
                    });
                }
            }
        }
        Ok(())
    }
}

/// `J x L` binary grid selecting which blocks are nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskMatrix {
    bits: Vec<Vec<bool>>,
}

impl MaskMatrix {
    /// Rejects ragged grids. All-zero columns are representable (file formats
    /// can express them) but [`lift`] and [`label_search`] refuse them.
    pub fn new(bits: Vec<Vec<bool>>) -> Result<Self> {
        grid_dims(&bits)?;
        Ok(MaskMatrix { bits })
    }

    /// First block column with no nonzero block, if any.
    pub fn empty_column(&self) -> Option<usize> {
        (0..self.cols()).find(|&c| self.bits.iter().all(|row| !row[c]))
    }

    pub(crate) fn check_columns(&self) -> Result<()> {
        match self.empty_column() {
            Some(c) => Err(Error::EmptyMaskColumn(c)),
            None => Ok(()),
        }
    }

    pub fn from_u8(grid: &[Vec<u8>]) -> Result<Self> {
        Self::new(
            grid.iter()
                .map(|r| r.iter().map(|&b| b != 0).collect())
                .collect(),
        )
    }

    pub fn ones(rows: usize, cols: usize) -> Result<Self> {
        Self::new(vec![vec![true; cols]; rows])
    }

    pub fn rows(&self) -> usize {
        self.bits.len()
    }

    pub fn cols(&self) -> usize {
        self.bits[0].len()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row][col]
    }

    pub fn bits(&self) -> &[Vec<bool>] {
        &self.bits
    }

    /// Weight of each block column.
    pub fn column_weights(&self) -> Vec<usize> {
        (0..self.cols())
            .map(|c| self.bits.iter().filter(|r| r[c]).count())
            .collect()
    }

    /// Weight of each block row.
    pub fn row_weights(&self) -> Vec<usize> {
        self.bits
            .iter()
            .map(|r| r.iter().filter(|&&b| b).count())
            .collect()
    }

    /// Number of set bits.
    pub fn weight(&self) -> usize {
        self.row_weights().iter().sum()
    }

    /// Set positions in row-major order.
    pub fn ones_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, row) in self.bits.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                if b {
                    out.push((r, c));
                }
            }
        }
        out
    }
}

fn grid_dims<T>(grid: &[Vec<T>]) -> Result<(usize, usize)> {
    let rows = grid.len();
    let cols = grid.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension("grid must be at least 1x1".into()));
    }
    if grid.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged grid".into()));
    }
    Ok((rows, cols))
}

/// Lifts `base` under `mask` with circulant size `p`.
pub fn lift(base: &BaseMatrix, mask: &MaskMatrix, p: usize) -> Result<ParityCheckMatrix> {
    if base.rows() != mask.rows() || base.cols() != mask.cols() {
        return Err(Error::Dimension(format!(
            "base is {}x{} but mask is {}x{}",
            base.rows(),
            base.cols(),
            mask.rows(),
            mask.cols()
        )));
    }
    mask.check_columns()?;
    base.validate_for(p)?;
    let mut entries = Vec::with_capacity(mask.weight() * p);
    for (j, l) in mask.ones_positions() {
        let s = base.shift(j, l);
        for i in 0..p {
            entries.push((j * p + i, l * p + (i + s) % p));
        }
    }
    let h = ParityCheckMatrix::from_entries(base.rows() * p, base.cols() * p, entries)?;
    Ok(h.with_provenance(QcProvenance {
        base: base.clone(),
        mask: mask.clone(),
        p,
    }))
}

/// Built-in mask families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaskKind {
    /// All ones: `(J, L)`-regular.
    M1,
    /// First block row zero, remaining rows all ones.
    M2,
    /// Single zero block at `(0, 0)`.
    M3,
    /// The 5x10 repeat-accumulate pattern of rate 1/2.
    Ra,
}

impl std::str::FromStr for MaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "M1" => Ok(MaskKind::M1),
            "M2" => Ok(MaskKind::M2),
            "M3" => Ok(MaskKind::M3),
            "M_RA" | "MRA" | "RA" => Ok(MaskKind::Ra),
            other => Err(Error::param(format!("unknown mask kind {other:?}"))),
        }
    }
}

const RA_MASK: [[u8; 10]; 5] = [
    [1, 1, 1, 1, 1, 1, 0, 0, 0, 0],
    [1, 1, 1, 1, 1, 1, 1, 0, 0, 0],
    [1, 1, 1, 1, 1, 0, 1, 1, 0, 0],
    [1, 1, 1, 1, 1, 0, 0, 1, 1, 0],
    [1, 1, 1, 1, 0, 0, 0, 0, 1, 1],
];

/// Generates one of the built-in masks.
///
/// The repeat-accumulate mask only exists as a 5x10 instance. M2 needs at
/// least two block rows, since its first row is empty.
pub fn builtin_mask(kind: MaskKind, rows: usize, cols: usize) -> Result<MaskMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::param("mask dimensions must be positive"));
    }
    let mut bits = vec![vec![true; cols]; rows];
    match kind {
        MaskKind::M1 => {}
        MaskKind::M2 => {
            if rows < 2 {
                return Err(Error::param("M2 needs at least two block rows"));
            }
            bits[0].iter_mut().for_each(|b| *b = false);
        }
        MaskKind::M3 => {
            if rows < 2 {
                return Err(Error::param("M3 needs at least two block rows"));
            }
            bits[0][0] = false;
        }
        MaskKind::Ra => {
            if (rows, cols) != (5, 10) {
                return Err(Error::param(format!(
                    "the RA mask is only defined for 5x10, got {rows}x{cols}"
                )));
            }
            bits = RA_MASK
                .iter()
                .map(|r| r.iter().map(|&b| b == 1).collect())
                .collect();
        }
    }
    MaskMatrix::new(bits)
}
