//! A deliberately plain reference for `D(M)` on very small matrices: no
//! memo, no bounds, just the recursive definition over bitmask rectangles.
//! It shares no code with the solver beyond reading matrix entries.

use alloc::vec::Vec;

use crate::{BooleanMatrix, Error, Result};

pub const MAX_DISTINCT_ROWS: usize = 4;
pub const MAX_DISTINCT_COLS: usize = 16;

pub fn naive_reference(m: &BooleanMatrix) -> Result<u32> {
    let mut rows: Vec<Vec<bool>> = Vec::new();
    for i in 0..m.n_rows() {
        let r = m.row_bits(i);
        if !rows.contains(&r) {
            rows.push(r);
        }
    }
    let mut cols: Vec<Vec<bool>> = Vec::new();
    for j in 0..m.n_cols() {
        let c: Vec<bool> = rows.iter().map(|r| r[j]).collect();
        if !cols.contains(&c) {
            cols.push(c);
        }
    }
    if rows.len() > MAX_DISTINCT_ROWS || cols.len() > MAX_DISTINCT_COLS {
        return Err(Error::GuardExceeded {
            rows: rows.len(),
            cols: cols.len(),
        });
    }
    // table[i][j] for distinct row i, distinct column j
    let table: Vec<Vec<bool>> = (0..rows.len())
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    let all_rows = (1u32 << rows.len()) - 1;
    let all_cols = (1u32 << cols.len()) - 1;
    let mut b = 0;
    while !naive_decide(&table, all_rows, all_cols, b) {
        b += 1;
    }
    Ok(b)
}

fn monochromatic(t: &[Vec<bool>], rs: u32, cs: u32) -> bool {
    let mut seen = [false; 2];
    for (i, row) in t.iter().enumerate() {
        if rs >> i & 1 == 0 {
            continue;
        }
        for (j, &v) in row.iter().enumerate() {
            if cs >> j & 1 == 1 {
                seen[v as usize] = true;
            }
        }
    }
    !(seen[0] && seen[1])
}

fn naive_decide(t: &[Vec<bool>], rs: u32, cs: u32, b: u32) -> bool {
    if monochromatic(t, rs, cs) {
        return true;
    }
    if b == 0 {
        return false;
    }
    // every bipartition {s, rest}; requiring the lowest element in s lists
    // each unordered split once
    for (set, row_side) in [(rs, true), (cs, false)] {
        let low = set & set.wrapping_neg();
        let mut s = set;
        while s != 0 {
            let rest = set & !s;
            if s & low != 0 && rest != 0 {
                let ok = if row_side {
                    naive_decide(t, s, cs, b - 1) && naive_decide(t, rest, cs, b - 1)
                } else {
                    naive_decide(t, rs, s, b - 1) && naive_decide(t, rs, rest, b - 1)
                };
                if ok {
                    return true;
                }
            }
            s = (s - 1) & set;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interlace::k_fold_interlace;

    #[test]
    fn phi_and_its_square() {
        let phi = BooleanMatrix::phi();
        assert_eq!(naive_reference(&phi).unwrap(), 1);
        assert_eq!(
            naive_reference(&k_fold_interlace(&phi, 2).unwrap()).unwrap(),
            2
        );
    }

    #[test]
    fn guard() {
        let bits: Vec<Vec<bool>> = (0..5).map(|i| (0..5).map(|j| i == j).collect()).collect();
        let m = BooleanMatrix::from_bits(&bits).unwrap();
        assert!(matches!(
            naive_reference(&m),
            Err(Error::GuardExceeded { rows: 5, .. })
        ));
    }

    #[test]
    fn identity_four() {
        let bits: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| i == j).collect()).collect();
        assert_eq!(
            naive_reference(&BooleanMatrix::from_bits(&bits).unwrap()).unwrap(),
            3
        );
    }
}
