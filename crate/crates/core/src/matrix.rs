//! Labeled Boolean matrices.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::Grid;
use crate::{Error, Label, Result};

/// A total map `rows × cols → {0,1}` with distinct, ordered labels on both axes.
#[derive(Clone, PartialEq, Eq)]
pub struct BooleanMatrix {
    rows: Vec<Label>,
    cols: Vec<Label>,
    grid: Grid,
}

fn check_labels(labels: &[Label]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut sorted: Vec<&Label> = labels.iter().collect();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateLabel(w[0].clone()));
        }
    }
    Ok(())
}

fn index_map(labels: &[Label]) -> BTreeMap<&Label, usize> {
    labels.iter().enumerate().map(|(i, l)| (l, i)).collect()
}

impl BooleanMatrix {
    pub fn from_fn(
        rows: Vec<Label>,
        cols: Vec<Label>,
        f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        check_labels(&rows)?;
        check_labels(&cols)?;
        let grid = Grid::from_fn(rows.len(), cols.len(), f);
        Ok(BooleanMatrix { rows, cols, grid })
    }

    /// Builds a matrix from explicit bit rows; every row must have `cols.len()` entries.
    pub fn from_rows(rows: Vec<Label>, cols: Vec<Label>, bits: &[Vec<bool>]) -> Result<Self> {
        if bits.len() != rows.len() || bits.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::Shape(format!(
                "expected {}x{} bits",
                rows.len(),
                cols.len()
            )));
        }
        Self::from_fn(rows, cols, |i, j| bits[i][j])
    }

    /// A matrix with atoms `1..=m` and `1..=n` as labels.
    pub fn from_bits(bits: &[Vec<bool>]) -> Result<Self> {
        let m = bits.len();
        let n = bits.first().map_or(0, |r| r.len());
        let rows = (1..=m as i64).map(Label::atom).collect();
        let cols = (1..=n as i64).map(Label::atom).collect();
        Self::from_rows(rows, cols, bits)
    }

    /// Parses rows of `0`/`1` characters, e.g. `["10", "01"]`. Test helper.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let bits: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.chars().map(|c| c == '1').collect())
            .collect();
        Self::from_bits(&bits)
    }

    /// The seed matrix `φ = [1 0]` with row label `(1 1)` and columns `1`, `2`.
    pub fn phi() -> Self {
        let row = Label::pair(Label::atom(1), Label::atom(1));
        Self::from_fn(
            vec_of(row),
            alloc::vec![Label::atom(1), Label::atom(2)],
            |_, j| j == 0,
        )
        .expect("seed matrix is well formed")
    }

    pub(crate) fn from_grid(rows: Vec<Label>, cols: Vec<Label>, grid: Grid) -> Self {
        debug_assert_eq!(rows.len(), grid.rows());
        debug_assert_eq!(cols.len(), grid.cols());
        BooleanMatrix { rows, cols, grid }
    }

    pub(crate) fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rows(&self) -> &[Label] {
        &self.rows
    }

    pub fn cols(&self) -> &[Label] {
        &self.cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.grid.get(row, col)
    }

    pub fn row_index(&self, label: &Label) -> Option<usize> {
        self.rows.iter().position(|l| l == label)
    }

    pub fn col_index(&self, label: &Label) -> Option<usize> {
        self.cols.iter().position(|l| l == label)
    }

    /// Entry by labels.
    pub fn entry(&self, row: &Label, col: &Label) -> Result<bool> {
        let i = self
            .row_index(row)
            .ok_or_else(|| Error::UnknownLabel(row.clone()))?;
        let j = self
            .col_index(col)
            .ok_or_else(|| Error::UnknownLabel(col.clone()))?;
        Ok(self.get(i, j))
    }

    pub fn row_bits(&self, row: usize) -> Vec<bool> {
        (0..self.n_cols()).map(|j| self.get(row, j)).collect()
    }

    pub fn constant_value(&self) -> Option<bool> {
        self.grid.constant_value()
    }

    /// Restriction to the given labels, kept in this matrix's order.
    pub fn extract(&self, rows: &[Label], cols: &[Label]) -> Result<BooleanMatrix> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::EmptySelection);
        }
        let ri = Self::resolve(&self.rows, rows)?;
        let ci = Self::resolve(&self.cols, cols)?;
        Ok(self.extract_indices(&ri, &ci))
    }

    fn resolve(all: &[Label], wanted: &[Label]) -> Result<Vec<usize>> {
        let map = index_map(all);
        let mut idx = wanted
            .iter()
            .map(|l| {
                map.get(l)
                    .copied()
                    .ok_or_else(|| Error::UnknownLabel(l.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    /// Restriction by indices, in the order given. Indices must be distinct.
    pub fn extract_indices(&self, rows: &[usize], cols: &[usize]) -> BooleanMatrix {
        BooleanMatrix {
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: cols.iter().map(|&j| self.cols[j].clone()).collect(),
            grid: self.grid.submatrix(rows, cols),
        }
    }

    pub fn transpose(&self) -> BooleanMatrix {
        BooleanMatrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            grid: self.grid.transpose(),
        }
    }

    /// Same entries under new labels.
    pub fn relabel(&self, rows: Vec<Label>, cols: Vec<Label>) -> Result<BooleanMatrix> {
        if rows.len() != self.n_rows() || cols.len() != self.n_cols() {
            return Err(Error::Shape(format!(
                "relabel expects {}x{} labels",
                self.n_rows(),
                self.n_cols()
            )));
        }
        check_labels(&rows)?;
        check_labels(&cols)?;
        Ok(BooleanMatrix {
            rows,
            cols,
            grid: self.grid.clone(),
        })
    }

    /// Keeps the first row and column of every distinct pattern.
    pub fn dedup(&self) -> BooleanMatrix {
        let (row_reps, _) = self.grid.distinct_rows();
        let (col_reps, _) = self.grid.transpose().distinct_rows();
        self.extract_indices(&row_reps, &col_reps)
    }
}

fn vec_of(label: Label) -> Vec<Label> {
    alloc::vec![label]
}

impl fmt::Debug for BooleanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BooleanMatrix {}x{}", self.n_rows(), self.n_cols())?;
        for i in 0..self.n_rows().min(16) {
            let line: alloc::string::String = (0..self.n_cols().min(64))
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {} {}", line, self.rows[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn identity_extraction() {
        let m = BooleanMatrix::from_strs(&["101", "011"]).unwrap();
        assert_eq!(m.extract(m.rows(), m.cols()).unwrap(), m);
    }

    #[test]
    fn phi_extracts_its_one() {
        let phi = BooleanMatrix::phi();
        let row = Label::pair(1.into(), 1.into());
        let one = phi.extract(&[row], &[Label::atom(1)]).unwrap();
        assert_eq!((one.n_rows(), one.n_cols()), (1, 1));
        assert!(one.get(0, 0));
    }

    #[test]
    fn extraction_errors() {
        let m = BooleanMatrix::from_strs(&["10"]).unwrap();
        assert!(matches!(
            m.extract(&[], m.cols()),
            Err(Error::EmptySelection)
        ));
        assert!(matches!(
            m.extract(m.rows(), &[Label::atom(7)]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let r = BooleanMatrix::from_fn(vec![1.into(), 1.into()], vec![1.into()], |_, _| false);
        assert!(matches!(r, Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn transpose_of_phi_is_a_column() {
        let t = BooleanMatrix::phi().transpose();
        assert_eq!((t.n_rows(), t.n_cols()), (2, 1));
        assert!(t.get(0, 0) && !t.get(1, 0));
    }

    #[test]
    fn extraction_order_follows_the_matrix() {
        let m = BooleanMatrix::from_strs(&["10", "01"]).unwrap();
        let e = m
            .extract(&[2.into(), 1.into()], &[1.into(), 2.into()])
            .unwrap();
        assert_eq!(e, m);
    }
}
