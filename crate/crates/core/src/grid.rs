//! Dense row-major bit grid used internally by the canonicalizer and solver.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Grid {
    rows: usize,
    cols: usize,
    wpr: usize,
    data: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        Grid {
            rows,
            cols,
            wpr,
            data: vec![0; rows * wpr],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Grid::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    g.set(i, j);
                }
            }
        }
        g
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i * self.wpr + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        self.data[i * self.wpr + j / 64] |= 1 << (j % 64);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.wpr..(i + 1) * self.wpr]
    }

    pub fn transpose(&self) -> Grid {
        let mut t = Grid::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i);
                }
            }
        }
        t
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Grid {
        let mut g = Grid::zeros(rows.len(), cols.len());
        for (ni, &i) in rows.iter().enumerate() {
            for (nj, &j) in cols.iter().enumerate() {
                if self.get(i, j) {
                    g.set(ni, nj);
                }
            }
        }
        g
    }

    /// `Some(bit)` when every entry equals `bit`. Empty grids count as constant 0.
    pub fn constant_value(&self) -> Option<bool> {
        if self.rows == 0 || self.cols == 0 {
            return Some(false);
        }
        let first = self.get(0, 0);
        let full_last = if self.cols.is_multiple_of(64) {
            u64::MAX
        } else {
            (1u64 << (self.cols % 64)) - 1
        };
        for i in 0..self.rows {
            let row = self.row(i);
            for (w, &word) in row.iter().enumerate() {
                let mask = if w + 1 == self.wpr {
                    full_last
                } else {
                    u64::MAX
                };
                let expect = if first { mask } else { 0 };
                if word & mask != expect {
                    return None;
                }
            }
        }
        Some(first)
    }

    /// Indices of the first occurrence of each distinct row, and for every row
    /// the position of its representative in that list.
    pub fn distinct_rows(&self) -> (Vec<usize>, Vec<usize>) {
        let mut seen: HashMap<&[u64], usize> = HashMap::with_capacity(self.rows);
        let mut reps = Vec::new();
        let mut class_of = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let next = seen.len();
            let class = *seen.entry(self.row(i)).or_insert_with(|| {
                reps.push(i);
                next
            });
            class_of.push(class);
        }
        (reps, class_of)
    }

    /// Removes duplicate rows and columns. Returns the reduced grid together
    /// with the class index of every original row and column.
    pub fn dedup(&self) -> (Grid, Vec<usize>, Vec<usize>) {
        let (row_reps, row_class) = self.distinct_rows();
        let t = self.transpose();
        let (col_reps, col_class) = t.distinct_rows();
        (self.submatrix(&row_reps, &col_reps), row_class, col_class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_collapses_equal_rows_and_cols() {
        let g = Grid::from_fn(3, 4, |i, j| (i == 1) ^ (j % 2 == 0));
        let (d, rc, cc) = g.dedup();
        assert_eq!((d.rows(), d.cols()), (2, 2));
        assert_eq!(rc, vec![0, 1, 0]);
        assert_eq!(cc, vec![0, 1, 0, 1]);
    }

    #[test]
    fn constant_detection_handles_word_tails() {
        let g = Grid::from_fn(2, 70, |_, _| true);
        assert_eq!(g.constant_value(), Some(true));
        let mut h = Grid::zeros(2, 70);
        assert_eq!(h.constant_value(), Some(false));
        h.set(1, 69);
        assert_eq!(h.constant_value(), None);
    }
}
