//! Interlacing constructions: binary, k-fold and relaxed.

use alloc::vec::Vec;

use crate::reservoir::BalancedColumnSet;
use crate::{BooleanMatrix, Error, Label, Result};

pub const DEFAULT_CELL_BUDGET: u128 = 1 << 26;

/// Row label `(block inner)` of an interlaced matrix.
pub fn row_label(block: usize, inner: &Label) -> Label {
    Label::pair(Label::atom(block as i64), inner.clone())
}

/// Splits an interlaced row label into its block and inner label.
pub fn split_row_label(label: &Label) -> Option<(usize, &Label)> {
    let block = label.get(0)?.as_atom()?;
    let inner = label.get(1)?;
    (label.items()?.len() == 2 && block >= 1).then_some((block as usize, inner))
}

fn check_cells(rows: u128, cols: u128, budget: u128) -> Result<()> {
    let cells = rows.saturating_mul(cols);
    if cells > budget {
        return Err(Error::SizeOverflow { cells, budget });
    }
    Ok(())
}

/// `(f ∘ g)((1,x),(y1,y2)) = f(x,y1)` and `(f ∘ g)((2,x),(y1,y2)) = g(x,y2)`.
pub fn binary_interlace(f: &BooleanMatrix, g: &BooleanMatrix) -> Result<BooleanMatrix> {
    let (nf, ng) = (f.n_rows(), g.n_rows());
    check_cells(
        (nf + ng) as u128,
        (f.n_cols() * g.n_cols()) as u128,
        DEFAULT_CELL_BUDGET,
    )?;
    let rows: Vec<Label> = f
        .rows()
        .iter()
        .map(|r| row_label(1, r))
        .chain(g.rows().iter().map(|r| row_label(2, r)))
        .collect();
    let mut cols = Vec::with_capacity(f.n_cols() * g.n_cols());
    for y1 in f.cols() {
        for y2 in g.cols() {
            cols.push(Label::pair(y1.clone(), y2.clone()));
        }
    }
    let gc = g.n_cols();
    BooleanMatrix::from_fn(rows, cols, |i, j| {
        let (j1, j2) = (j / gc, j % gc);
        if i < nf {
            f.get(i, j1)
        } else {
            g.get(i - nf, j2)
        }
    })
}

/// `⟨f⟩^k` with the default cell budget.
pub fn k_fold_interlace(f: &BooleanMatrix, k: usize) -> Result<BooleanMatrix> {
    k_fold_interlace_with_budget(f, k, DEFAULT_CELL_BUDGET)
}

/// `⟨f⟩^k((i,j),(y1..yk)) = f(j, y_i)`. Columns are the tuples of `cols(f)^k`
/// in lexicographic order of positions.
pub fn k_fold_interlace_with_budget(
    f: &BooleanMatrix,
    k: usize,
    budget: u128,
) -> Result<BooleanMatrix> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "interlace order must be positive".into(),
        ));
    }
    let n = f.n_cols();
    let cols_count = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    check_cells((k * f.n_rows()) as u128, cols_count, budget)?;
    let cols_count = cols_count as usize;
    let mut rows = Vec::with_capacity(k * f.n_rows());
    for i in 1..=k {
        rows.extend(f.rows().iter().map(|r| row_label(i, r)));
    }
    let mut cols = Vec::with_capacity(cols_count);
    let mut digits = alloc::vec![0usize; k];
    for _ in 0..cols_count {
        cols.push(Label::tuple(digits.iter().map(|&d| f.cols()[d].clone())));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < n {
                break;
            }
            *d = 0;
        }
    }
    let per = f.n_rows();
    BooleanMatrix::from_fn(rows, cols, |row, col| {
        let (block, j) = (row / per, row % per);
        // digit of position `block` in base n, most significant first
        let digit = (col / n.pow((k - 1 - block) as u32)) % n;
        f.get(j, digit)
    })
}

/// A relaxed interlace together with the multiplicity of each column tuple
/// in the reservoir it was built from.
#[derive(Clone, Debug)]
pub struct RelaxedInterlace {
    pub matrix: BooleanMatrix,
    /// `multiplicity[j]` copies of column `j` occur in the reservoir.
    pub multiplicity: Vec<u64>,
}

/// `⟨M⟩^{q,S}((i,r), c) = M(r, c_i)` over the distinct tuples `c` of `S`.
pub fn relaxed_interlace(
    m: &BooleanMatrix,
    q: usize,
    s: &BalancedColumnSet,
) -> Result<RelaxedInterlace> {
    relaxed_interlace_with_budget(m, q, s, DEFAULT_CELL_BUDGET)
}

pub fn relaxed_interlace_with_budget(
    m: &BooleanMatrix,
    q: usize,
    s: &BalancedColumnSet,
    budget: u128,
) -> Result<RelaxedInterlace> {
    if s.q() != q || s.alphabet() != m.cols() {
        return Err(Error::AlphabetMismatch);
    }
    let entries = s.entries();
    check_cells((q * m.n_rows()) as u128, entries.len() as u128, budget)?;
    let mut rows = Vec::with_capacity(q * m.n_rows());
    for i in 1..=q {
        rows.extend(m.rows().iter().map(|r| row_label(i, r)));
    }
    let cols = entries
        .iter()
        .map(|(t, _)| Label::tuple(t.iter().map(|&c| m.cols()[c as usize].clone())))
        .collect();
    let per = m.n_rows();
    let matrix = BooleanMatrix::from_fn(rows, cols, |row, col| {
        m.get(row % per, entries[col].0[row / per] as usize)
    })?;
    Ok(RelaxedInterlace {
        matrix,
        multiplicity: entries.iter().map(|e| e.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize;

    fn phi() -> BooleanMatrix {
        BooleanMatrix::phi()
    }

    #[test]
    fn binary_of_phi_is_two_fold() {
        let b = binary_interlace(&phi(), &phi()).unwrap();
        assert_eq!((b.n_rows(), b.n_cols()), (2, 4));
        assert_eq!(
            canonicalize(&b),
            canonicalize(&k_fold_interlace(&phi(), 2).unwrap())
        );
    }

    #[test]
    fn one_fold_is_identity_up_to_labels() {
        let one = k_fold_interlace(&phi(), 1).unwrap();
        assert_eq!(one.row_bits(0), [true, false]);
        assert_eq!(one.rows()[0].to_string(), "(1 (1 1))");
        assert_eq!(one.cols()[1].to_string(), "(2)");
    }

    #[test]
    fn three_fold_is_index_pattern() {
        let m = k_fold_interlace(&phi(), 3).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (3, 8));
        for (j, c) in m.cols().iter().enumerate() {
            for i in 0..3 {
                let yi = c.get(i).unwrap().as_atom().unwrap();
                assert_eq!(m.get(i, j), yi == 1);
            }
        }
    }

    #[test]
    fn cell_budget() {
        let r = k_fold_interlace_with_budget(&phi(), 10, 100);
        assert!(matches!(r, Err(Error::SizeOverflow { .. })));
    }

    #[test]
    fn row_labels_split() {
        let l = row_label(3, &Label::pair(1.into(), 1.into()));
        let (b, inner) = split_row_label(&l).unwrap();
        assert_eq!(b, 3);
        assert_eq!(inner.to_string(), "(1 1)");
    }
}
