//! Subgame testing: is `A` obtained from `B` by selecting and rearranging
//! rows and columns?
//!
//! Selection is injective; a row or column of `B` is never used twice.

use alloc::vec;
use alloc::vec::Vec;

use crate::{BooleanMatrix, Error, Label, Result};

pub const DEFAULT_NODE_CAP: u64 = 1_000_000;

/// `rows[i]` is the row of `B` playing row `i` of `A`; likewise for columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgameWitness {
    pub rows: Vec<Label>,
    pub cols: Vec<Label>,
}

pub fn is_subgame(a: &BooleanMatrix, b: &BooleanMatrix) -> Result<Option<SubgameWitness>> {
    is_subgame_with_cap(a, b, DEFAULT_NODE_CAP)
}

pub fn is_subgame_with_cap(
    a: &BooleanMatrix,
    b: &BooleanMatrix,
    node_cap: u64,
) -> Result<Option<SubgameWitness>> {
    if a.n_rows() > b.n_rows() || a.n_cols() > b.n_cols() {
        return Ok(None);
    }
    let mut s = Search {
        a,
        b,
        row_of: vec![usize::MAX; a.n_rows()],
        used: vec![false; b.n_rows()],
        nodes: 0,
        cap: node_cap,
    };
    let compat = vec![vec![true; b.n_cols()]; a.n_cols()];
    let Some(col_of) = s.assign(0, &compat)? else {
        return Ok(None);
    };
    Ok(Some(SubgameWitness {
        rows: s.row_of.iter().map(|&r| b.rows()[r].clone()).collect(),
        cols: col_of.iter().map(|&k| b.cols()[k].clone()).collect(),
    }))
}

struct Search<'m> {
    a: &'m BooleanMatrix,
    b: &'m BooleanMatrix,
    row_of: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    cap: u64,
}

impl Search<'_> {
    fn assign(&mut self, i: usize, compat: &[Vec<bool>]) -> Result<Option<Vec<usize>>> {
        let Some(matching) = column_matching(compat) else {
            return Ok(None);
        };
        if i == self.a.n_rows() {
            return Ok(Some(matching));
        }
        for r in 0..self.b.n_rows() {
            if self.used[r] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(Error::BudgetExceeded {
                    what: "subgame search nodes",
                    limit: self.cap,
                });
            }
            let next: Vec<Vec<bool>> = compat
                .iter()
                .enumerate()
                .map(|(j, row)| {
                    let want = self.a.get(i, j);
                    row.iter()
                        .enumerate()
                        .map(|(k, &ok)| ok && self.b.get(r, k) == want)
                        .collect()
                })
                .collect();
            self.used[r] = true;
            self.row_of[i] = r;
            let found = self.assign(i + 1, &next)?;
            self.used[r] = false;
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

/// Perfect matching of the left side (columns of `A`) by augmenting paths.
fn column_matching(compat: &[Vec<bool>]) -> Option<Vec<usize>> {
    let right = compat.first().map_or(0, |r| r.len());
    let mut owner = vec![usize::MAX; right];
    for j in 0..compat.len() {
        let mut seen = vec![false; right];
        if !augment(j, compat, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut col_of = vec![0; compat.len()];
    for (k, &j) in owner.iter().enumerate() {
        if j != usize::MAX {
            col_of[j] = k;
        }
    }
    Some(col_of)
}

fn augment(j: usize, compat: &[Vec<bool>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for k in 0..owner.len() {
        if compat[j][k] && !seen[k] {
            seen[k] = true;
            if owner[k] == usize::MAX || augment(owner[k], compat, owner, seen) {
                owner[k] = j;
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interlace::k_fold_interlace;

    fn check_witness(a: &BooleanMatrix, b: &BooleanMatrix, w: &SubgameWitness) {
        for (i, r) in w.rows.iter().enumerate() {
            for (j, c) in w.cols.iter().enumerate() {
                assert_eq!(a.get(i, j), b.entry(r, c).unwrap());
            }
        }
    }

    #[test]
    fn reflexive() {
        let m = BooleanMatrix::from_strs(&["1010", "0110", "1111"]).unwrap();
        let w = is_subgame(&m, &m).unwrap().unwrap();
        check_witness(&m, &m, &w);
    }

    #[test]
    fn one_in_phi() {
        let one = BooleanMatrix::from_strs(&["1"]).unwrap();
        let w = is_subgame(&one, &BooleanMatrix::phi()).unwrap().unwrap();
        assert_eq!(w.cols, [Label::atom(1)]);
    }

    #[test]
    fn bigger_interlace_is_not_inside_smaller() {
        let phi = BooleanMatrix::phi();
        let three = k_fold_interlace(&phi, 3).unwrap();
        let two = k_fold_interlace(&phi, 2).unwrap();
        assert_eq!(is_subgame(&three, &two).unwrap(), None);
        let w = is_subgame(&two, &three).unwrap().unwrap();
        check_witness(&two, &three, &w);
    }

    #[test]
    fn duplicates_are_not_reused() {
        let a = BooleanMatrix::from_strs(&["1", "1"]).unwrap();
        let b = BooleanMatrix::from_strs(&["1", "0"]).unwrap();
        assert_eq!(is_subgame(&a, &b).unwrap(), None);
    }

    #[test]
    fn node_cap_is_reported() {
        let m = BooleanMatrix::from_strs(&["1010", "0110", "1111"]).unwrap();
        let r = is_subgame_with_cap(&m, &m, 1);
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }
}
