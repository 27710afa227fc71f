//! Dense matrices over F2, rows stored as packed bit words.

use std::fmt;

use crate::block::Block;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from 0/1 rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::contract(format!("entry ({i},{j}) = {v} is not a bit")));
                }
                m.set(i, j, v == 1);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        let w = &mut self.data[i * self.words + j / 64];
        let bit = 1u64 << (j % 64);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j) as u8).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Matrix product over F2.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let (src, dst) = (k * other.words, i * out.words);
                    for w in 0..out.words {
                        out.data[dst + w] ^= other.data[src + w];
                    }
                }
            }
        }
        Ok(out)
    }

    /// The listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<BitMatrix> {
        let mut out = Self::zeros(self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            if j >= self.cols {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} out of range for {} columns",
                    self.cols
                )));
            }
            for i in 0..self.rows {
                if self.get(i, j) {
                    out.set(i, jj, true);
                }
            }
        }
        Ok(out)
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{} rows beside {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    /// Rank over F2 by Gaussian elimination on the rows.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = self
            .data
            .chunks(self.words)
            .take(self.rows)
            .map(|r| r.to_vec())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & bit != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x ^= *y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in self.to_rows() {
            let s: String = row.iter().map(|&b| if b == 1 { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

/// Whether `m1 · U = m2` for some invertible `U`, i.e. equal column spaces.
pub fn column_equivalent(m1: &BitMatrix, m2: &BitMatrix) -> Result<bool> {
    if m1.rows != m2.rows || m1.cols != m2.cols {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            m1.rows, m1.cols, m2.rows, m2.cols
        )));
    }
    let r1 = m1.rank();
    Ok(r1 == m2.rank() && r1 == m1.hconcat(m2)?.rank())
}

/// Row vector of blocks times a matrix: `out_j = ⊕_{i : M[i][j] = 1} C_i`.
pub fn apply_matrix(blocks: &[Block], m: &BitMatrix) -> Result<Vec<Block>> {
    if blocks.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks against a matrix with {} rows",
            blocks.len(),
            m.rows
        )));
    }
    let mut out = vec![Block::ZERO; m.cols];
    for (i, &c) in blocks.iter().enumerate() {
        for (j, o) in out.iter_mut().enumerate() {
            if m.get(i, j) {
                *o ^= c;
            }
        }
    }
    Ok(out)
}
