//! Dense matrices over F2 with packed rows.

use alloc::vec::Vec;

use crate::bits::BitString;
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitString>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows: (0..rows).map(|_| BitString::zeros(cols)).collect(),
            cols,
        }
    }

    pub fn from_rows(rows: Vec<BitString>, cols: usize) -> Result<Self, Error> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::Length {
                    expected: cols,
                    actual: r.len(),
                });
            }
        }
        Ok(BitMatrix { rows, cols })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitString {
        &self.rows[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut BitString {
        &mut self.rows[i]
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.support() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// `M x` for a column vector `x` of length `ncols`.
    pub fn mul_vec(&self, x: &BitString) -> BitString {
        assert_eq!(x.len(), self.cols, "length mismatch");
        let mut out = BitString::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(x) {
                out.set(i, true);
            }
        }
        out
    }

    /// XOR of the rows listed in `indices`, i.e. `s^T M` for the indicator `s`.
    pub fn sum_rows(&self, indices: &[usize]) -> BitString {
        let mut acc = BitString::zeros(self.cols);
        for &i in indices {
            acc.xor_assign(&self.rows[i]);
        }
        acc
    }

    /// Row rank over F2 by Gaussian elimination on packed words.
    pub fn rank(&self) -> usize {
        rank_of_rows(
            self.rows.iter().map(|r| r.words().to_vec()).collect(),
            self.cols,
        )
    }

    /// Rank of the submatrix formed by the given rows.
    pub fn rank_of(&self, row_indices: &[usize]) -> usize {
        rank_of_rows(
            row_indices
                .iter()
                .map(|&i| self.rows[i].words().to_vec())
                .collect(),
            self.cols,
        )
    }
}

fn rank_of_rows(mut rows: Vec<Vec<u64>>, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let (w, b) = (col / 64, col % 64);
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for r in tail.iter_mut() {
            if r[w] >> b & 1 == 1 {
                for (x, y) in r[w..].iter_mut().zip(&pivot_row[w..]) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}
