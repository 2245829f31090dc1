//! Canonical forms of Boolean matrices up to row/column permutation and
//! duplication.
//!
//! Rows and columns are first deduplicated. The smaller side is then put into
//! a canonical order by colour refinement plus individualization; the form is
//! the sorted list of the other side's bit patterns under that order, the
//! lexicographically smallest over all branches of the search.

use alloc::vec;
use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use crate::grid::{words_for, Grid};
use crate::BooleanMatrix;

/// Permutation- and duplication-invariant description of a matrix.
///
/// Equality and hashing ignore the multiplicity counts.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    distinct_rows: usize,
    distinct_cols: usize,
    transposed: bool,
    key: Vec<u64>,
    row_multiplicity: Vec<usize>,
    col_multiplicity: Vec<usize>,
}

impl CanonicalForm {
    pub fn distinct_rows(&self) -> usize {
        self.distinct_rows
    }

    pub fn distinct_cols(&self) -> usize {
        self.distinct_cols
    }

    /// Sizes of the duplicate classes of rows, sorted descending.
    pub fn row_multiplicity(&self) -> &[usize] {
        &self.row_multiplicity
    }

    pub fn col_multiplicity(&self) -> &[usize] {
        &self.col_multiplicity
    }

    /// Distinct row patterns in canonical order, as bits.
    pub fn row_patterns(&self) -> Vec<Vec<bool>> {
        let g = self.reduced();
        (0..g.rows())
            .map(|i| (0..g.cols()).map(|j| g.get(i, j)).collect())
            .collect()
    }

    /// The deduplicated matrix in canonical order.
    fn reduced(&self) -> Grid {
        // key holds one pattern per column of the canonicalized orientation
        let (r, c) = if self.transposed {
            (self.distinct_cols, self.distinct_rows)
        } else {
            (self.distinct_rows, self.distinct_cols)
        };
        let w = words_for(r);
        let g = Grid::from_fn(r, c, |i, j| (self.key[j * w + i / 64] >> (i % 64)) & 1 == 1);
        if self.transposed {
            g.transpose()
        } else {
            g
        }
    }

    /// A representative matrix with atom labels.
    pub fn to_matrix(&self) -> BooleanMatrix {
        let g = self.reduced();
        let rows = (1..=g.rows() as i64).map(crate::Label::atom).collect();
        let cols = (1..=g.cols() as i64).map(crate::Label::atom).collect();
        BooleanMatrix::from_grid(rows, cols, g)
    }
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.distinct_rows == other.distinct_rows
            && self.distinct_cols == other.distinct_cols
            && self.transposed == other.transposed
            && self.key == other.key
    }
}

impl Eq for CanonicalForm {}

impl Hash for CanonicalForm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.distinct_rows.hash(state);
        self.distinct_cols.hash(state);
        self.transposed.hash(state);
        self.key.hash(state);
    }
}

pub fn canonicalize(m: &BooleanMatrix) -> CanonicalForm {
    let (d, row_class, col_class) = m.grid().dedup();
    let transposed = d.rows() > d.cols();
    let key = if transposed {
        canonical_key(&d.transpose())
    } else {
        canonical_key(&d)
    };
    CanonicalForm {
        distinct_rows: d.rows(),
        distinct_cols: d.cols(),
        transposed,
        key,
        row_multiplicity: class_sizes(&row_class, d.rows()),
        col_multiplicity: class_sizes(&col_class, d.cols()),
    }
}

fn class_sizes(class_of: &[usize], classes: usize) -> Vec<usize> {
    let mut sizes = vec![0; classes];
    for &c in class_of {
        sizes[c] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Key for an already deduplicated grid that is also invariant under
/// transposition. Used by the solver, where `D(M) = D(Mᵀ)`.
pub(crate) fn solver_key(d: &Grid) -> Vec<u64> {
    use core::cmp::Ordering::*;
    match d.rows().cmp(&d.cols()) {
        Less => canonical_key(d),
        Greater => canonical_key(&d.transpose()),
        Equal => {
            let a = canonical_key(d);
            let b = canonical_key(&d.transpose());
            a.min(b)
        }
    }
}

/// Canonical key of a grid with distinct rows and distinct columns, ordering
/// rows canonically. Layout: column patterns (each `words_for(rows)` words)
/// sorted ascending, followed by the dimensions.
pub(crate) fn canonical_key(g: &Grid) -> Vec<u64> {
    let gt = g.transpose();
    let mut best: Option<Vec<u64>> = None;
    let rc = vec![0u32; g.rows()];
    let cc = vec![0u32; g.cols()];
    search(g, &gt, rc, cc, &mut best);
    let mut key = best.unwrap_or_default();
    key.push(g.rows() as u64);
    key.push(g.cols() as u64);
    key
}

fn search(g: &Grid, gt: &Grid, mut rc: Vec<u32>, mut cc: Vec<u32>, best: &mut Option<Vec<u64>>) {
    refine(g, gt, &mut rc, &mut cc);
    let Some(cell) = target_cell(&rc) else {
        let key = leaf_key(gt, &rc);
        if best.as_ref().is_none_or(|b| key < *b) {
            *best = Some(key);
        }
        return;
    };
    for (v, &color) in rc.iter().enumerate() {
        if color != cell {
            continue;
        }
        let split: Vec<u32> = rc
            .iter()
            .enumerate()
            .map(|(i, &x)| if i == v { 2 * x } else { 2 * x + 1 })
            .collect();
        search(g, gt, densify(&split), cc.clone(), best);
    }
}

/// The smallest non-singleton colour class, lowest colour on ties.
fn target_cell(colors: &[u32]) -> Option<u32> {
    let n = colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut sizes = vec![0usize; n];
    for &c in colors {
        sizes[c as usize] += 1;
    }
    sizes
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 1)
        .min_by_key(|(c, &s)| (s, *c))
        .map(|(c, _)| c as u32)
}

fn leaf_key(gt: &Grid, rc: &[u32]) -> Vec<u64> {
    // rc is a permutation of 0..rows here
    let r = rc.len();
    let w = words_for(r);
    let mut patterns: Vec<Vec<u64>> = (0..gt.rows())
        .map(|j| {
            let mut p = vec![0u64; w];
            for_each_one(gt.row(j), |i| {
                let pos = rc[i] as usize;
                p[pos / 64] |= 1 << (pos % 64);
            });
            p
        })
        .collect();
    patterns.sort_unstable();
    patterns.concat()
}

fn for_each_one(words: &[u64], mut f: impl FnMut(usize)) {
    for (w, &word) in words.iter().enumerate() {
        let mut x = word;
        while x != 0 {
            let b = x.trailing_zeros() as usize;
            f(w * 64 + b);
            x &= x - 1;
        }
    }
}

fn count_classes(colors: &[u32]) -> usize {
    colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

/// Alternating colour refinement until both sides are stable.
fn refine(g: &Grid, gt: &Grid, rc: &mut Vec<u32>, cc: &mut Vec<u32>) {
    loop {
        let before = (count_classes(rc), count_classes(cc));
        *cc = refine_side(gt, cc, rc);
        *rc = refine_side(g, rc, cc);
        if (count_classes(rc), count_classes(cc)) == before {
            break;
        }
    }
}

/// New colours for the rows of `g`: old colour, then the sorted colours of
/// the columns where the row has a one.
fn refine_side(g: &Grid, own: &[u32], other: &[u32]) -> Vec<u32> {
    let sigs: Vec<Vec<u32>> = (0..g.rows())
        .map(|i| {
            let mut s = vec![own[i]];
            let start = s.len();
            for_each_one(g.row(i), |j| s.push(other[j]));
            s[start..].sort_unstable();
            s
        })
        .collect();
    densify(&sigs)
}

fn densify<T: Ord>(sigs: &[T]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..sigs.len()).collect();
    order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]));
    let mut out = vec![0u32; sigs.len()];
    let mut next = 0u32;
    for (k, &i) in order.iter().enumerate() {
        if k > 0 && sigs[order[k - 1]] != sigs[i] {
            next += 1;
        }
        out[i] = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interlace::k_fold_interlace;

    fn perm_cols(m: &BooleanMatrix, perm: &[usize]) -> BooleanMatrix {
        let rows: Vec<usize> = (0..m.n_rows()).collect();
        m.extract_indices(&rows, perm)
    }

    #[test]
    fn stacked_duplicate_row_is_invisible() {
        let a = BooleanMatrix::from_strs(&["1010"]).unwrap();
        let b = BooleanMatrix::from_strs(&["1010", "1010"]).unwrap();
        let ca = canonicalize(&a);
        let cb = canonicalize(&b);
        assert_eq!(ca, cb);
        assert_eq!(cb.row_multiplicity(), &[2]);
        assert_eq!(ca.distinct_cols(), 2);
    }

    #[test]
    fn row_shuffle_invariance() {
        let a = BooleanMatrix::from_strs(&["1100", "0110", "0011", "1001", "1110"]).unwrap();
        let b = BooleanMatrix::from_strs(&["0011", "1110", "1100", "1001", "0110"]).unwrap();
        assert_eq!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn all_column_permutations_of_interlace_agree() {
        let m = k_fold_interlace(&BooleanMatrix::phi(), 2).unwrap();
        let base = canonicalize(&m);
        let mut perm = [0usize, 1, 2, 3];
        // Heap's algorithm over all 24 orders
        let mut c = [0usize; 4];
        assert_eq!(canonicalize(&perm_cols(&m, &perm)), base);
        let mut i = 0;
        let mut seen = 1;
        while i < 4 {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                assert_eq!(canonicalize(&perm_cols(&m, &perm)), base);
                seen += 1;
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        assert_eq!(seen, 24);
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        let a = BooleanMatrix::from_strs(&["10", "01"]).unwrap();
        let b = BooleanMatrix::from_strs(&["11", "01"]).unwrap();
        assert_ne!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn representative_round_trips() {
        let a = BooleanMatrix::from_strs(&["110", "011", "110", "000"]).unwrap();
        let c = canonicalize(&a);
        assert_eq!(canonicalize(&c.to_matrix()), c);
        assert_eq!(c.row_patterns().len(), 3);
    }

    #[test]
    fn solver_key_ignores_transpose() {
        let a = BooleanMatrix::from_strs(&["110", "011", "001"]).unwrap();
        let d = a.grid().dedup().0;
        let dt = a.transpose().grid().dedup().0;
        assert_eq!(solver_key(&d), solver_key(&dt));
    }
}
