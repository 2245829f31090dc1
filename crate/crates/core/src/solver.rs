//! Exact deterministic communication complexity.
//!
//! `decide(M, b)` asks for a protocol tree of depth at most `b` whose leaves
//! are monochromatic rectangles. The search splits either the rows or the
//! columns of the current rectangle into two non-empty parts and recurses
//! on both at `b − 1`. Answers are memoized on a canonical form that is
//! invariant under permutation, duplication and transposition.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use hashbrown::{HashMap, HashSet};

use crate::canonical::solver_key;
use crate::grid::Grid;
use crate::rank::{ceil_log2, leaf_lower_bound};
use crate::{BooleanMatrix, Error, Label, Result};

pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Speaker {
    Row,
    Col,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProtocolTree {
    Leaf {
        value: bool,
    },
    Node {
        speaker: Speaker,
        left_part: Vec<Label>,
        right_part: Vec<Label>,
        left: Box<ProtocolTree>,
        right: Box<ProtocolTree>,
    },
}

impl ProtocolTree {
    /// Internal nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> u32 {
        match self {
            ProtocolTree::Leaf { .. } => 0,
            ProtocolTree::Node { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            ProtocolTree::Leaf { .. } => 1,
            ProtocolTree::Node { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    /// Largest number of speaker changes along a root-to-leaf path.
    pub fn alternations(&self) -> u32 {
        fn go(t: &ProtocolTree, last: Option<Speaker>) -> u32 {
            match t {
                ProtocolTree::Leaf { .. } => 0,
                ProtocolTree::Node {
                    speaker,
                    left,
                    right,
                    ..
                } => {
                    let here = u32::from(last.is_some_and(|s| s != *speaker));
                    here + go(left, Some(*speaker)).max(go(right, Some(*speaker)))
                }
            }
        }
        go(self, None)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub memo_hits: u64,
    pub nodes: u64,
    pub rank_prunes: u64,
    pub wall_time: Option<Duration>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub depth: u32,
    pub certificate: ProtocolTree,
    pub stats: SolveStats,
}

#[derive(Clone, Copy)]
struct Entry {
    // smallest budget known to succeed / largest known to fail
    true_at: u32,
    false_at: Option<u32>,
}

/// A solver with a memo that persists across calls.
pub struct Solver {
    memo: HashMap<Vec<u64>, Entry>,
    node_cap: u64,
    stats: SolveStats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

/// `⌈log₂ r⌉ + 1` for the smaller side: one party names its input, the
/// other answers with the bit.
fn trivial_upper(d: &Grid) -> u32 {
    ceil_log2(d.rows() as u64).min(ceil_log2(d.cols() as u64)) + 1
}

impl Solver {
    pub fn new() -> Self {
        Self::with_node_cap(DEFAULT_NODE_CAP)
    }

    pub fn with_node_cap(node_cap: u64) -> Self {
        Solver {
            memo: HashMap::new(),
            node_cap,
            stats: SolveStats::default(),
        }
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    pub fn decide(&mut self, m: &BooleanMatrix, b: u32) -> Result<bool> {
        self.decide_grid(m.grid(), b)
    }

    /// `D(M)` by iterative deepening, without a certificate.
    pub fn value(&mut self, m: &BooleanMatrix) -> Result<u32> {
        let mut b = 0;
        while !self.decide(m, b)? {
            b += 1;
        }
        Ok(b)
    }

    pub fn solve(&mut self, m: &BooleanMatrix) -> Result<Solution> {
        #[cfg(feature = "std")]
        let start = std::time::Instant::now();
        let before = self.stats.clone();
        let depth = self.value(m)?;
        let rows: Vec<usize> = (0..m.n_rows()).collect();
        let cols: Vec<usize> = (0..m.n_cols()).collect();
        let certificate = self.build(m, &rows, &cols, depth)?;
        #[cfg(feature = "std")]
        let wall_time = Some(start.elapsed());
        #[cfg(not(feature = "std"))]
        let wall_time = None;
        let stats = SolveStats {
            memo_hits: self.stats.memo_hits - before.memo_hits,
            nodes: self.stats.nodes - before.nodes,
            rank_prunes: self.stats.rank_prunes - before.rank_prunes,
            wall_time,
        };
        Ok(Solution {
            depth,
            certificate,
            stats,
        })
    }

    fn decide_grid(&mut self, g: &Grid, b: u32) -> Result<bool> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.node_cap {
            return Err(Error::BudgetExceeded {
                what: "solver nodes",
                limit: self.node_cap,
            });
        }
        let d = g.dedup().0;
        if d.constant_value().is_some() {
            return Ok(true);
        }
        if b == 0 {
            return Ok(false);
        }
        if b >= trivial_upper(&d) {
            return Ok(true);
        }
        let key = solver_key(&d);
        if let Some(e) = self.memo.get(&key) {
            if e.true_at <= b {
                self.stats.memo_hits += 1;
                return Ok(true);
            }
            if e.false_at.is_some_and(|f| f >= b) {
                self.stats.memo_hits += 1;
                return Ok(false);
            }
        }
        let answer = if b < leaf_lower_bound(&d) {
            self.stats.rank_prunes += 1;
            false
        } else {
            self.find_split(&d, b)?.is_some()
        };
        let e = self.memo.entry(key).or_insert(Entry {
            true_at: u32::MAX,
            false_at: None,
        });
        if answer {
            e.true_at = e.true_at.min(b);
        } else {
            e.false_at = Some(e.false_at.map_or(b, |f| f.max(b)));
        }
        Ok(answer)
    }

    /// A split of the distinct rows or columns of `d` whose two halves are
    /// both decidable at `b − 1`. `true` in the mask marks the right part.
    fn find_split(&mut self, d: &Grid, b: u32) -> Result<Option<(Speaker, Vec<bool>)>> {
        if let Some(mask) = self.split_rows(d, b)? {
            return Ok(Some((Speaker::Row, mask)));
        }
        let t = d.transpose();
        Ok(self.split_rows(&t, b)?.map(|mask| (Speaker::Col, mask)))
    }

    fn split_rows(&mut self, d: &Grid, b: u32) -> Result<Option<Vec<bool>>> {
        let r = d.rows();
        if r < 2 {
            return Ok(None);
        }
        let all_cols: Vec<usize> = (0..d.cols()).collect();
        if !self.decide_grid(&d.submatrix(&[0], &all_cols), b - 1)? {
            return Ok(None);
        }
        let mut left = vec![0];
        let mut right = Vec::new();
        let found = self.extend(d, b - 1, &all_cols, 1, &mut left, &mut right)?;
        Ok(found.then(|| {
            let mut mask = vec![false; r];
            for &i in &right {
                mask[i] = true;
            }
            mask
        }))
    }

    // Both parts are feasible so far; feasibility is monotone under
    // taking subsets, so an infeasible partial part is never extended.
    fn extend(
        &mut self,
        d: &Grid,
        b: u32,
        cols: &[usize],
        i: usize,
        left: &mut Vec<usize>,
        right: &mut Vec<usize>,
    ) -> Result<bool> {
        if i == d.rows() {
            return Ok(!right.is_empty());
        }
        for to_right in [false, true] {
            let part: &mut Vec<usize> = if to_right { right } else { left };
            part.push(i);
            let ok = self.decide_grid(&d.submatrix(part, cols), b)?;
            if ok && self.extend(d, b, cols, i + 1, left, right)? {
                return Ok(true);
            }
            let part: &mut Vec<usize> = if to_right { right } else { left };
            part.pop();
        }
        Ok(false)
    }

    /// Certificate of depth at most `b` for the rectangle `rows × cols` of
    /// `m`, which must be decidable at `b`.
    fn build(
        &mut self,
        m: &BooleanMatrix,
        rows: &[usize],
        cols: &[usize],
        b: u32,
    ) -> Result<ProtocolTree> {
        let g = m.grid().submatrix(rows, cols);
        if let Some(value) = g.constant_value() {
            return Ok(ProtocolTree::Leaf { value });
        }
        let (d, row_class, col_class) = g.dedup();
        let (speaker, mask) = if b >= trivial_upper(&d) {
            // halve whichever side is cheaper to announce
            let rows_cheaper = ceil_log2(d.rows() as u64) <= ceil_log2(d.cols() as u64);
            if d.cols() == 1 || (rows_cheaper && d.rows() > 1) {
                (Speaker::Row, halves(d.rows()))
            } else {
                (Speaker::Col, halves(d.cols()))
            }
        } else {
            self.find_split(&d, b)?
                .ok_or_else(|| Error::MalformedTree {
                    path: String::new(),
                    reason: format!("no split at budget {b}; matrix not decidable"),
                })?
        };
        let (items, class) = match speaker {
            Speaker::Row => (rows, &row_class),
            Speaker::Col => (cols, &col_class),
        };
        let (l, r): (Vec<(usize, usize)>, Vec<(usize, usize)>) = items
            .iter()
            .copied()
            .enumerate()
            .partition(|&(pos, _)| !mask[class[pos]]);
        let l: Vec<usize> = l.into_iter().map(|x| x.1).collect();
        let r: Vec<usize> = r.into_iter().map(|x| x.1).collect();
        let labels = |idx: &[usize]| -> Vec<Label> {
            idx.iter()
                .map(|&i| match speaker {
                    Speaker::Row => m.rows()[i].clone(),
                    Speaker::Col => m.cols()[i].clone(),
                })
                .collect()
        };
        let (left, right) = match speaker {
            Speaker::Row => (
                self.build(m, &l, cols, b - 1)?,
                self.build(m, &r, cols, b - 1)?,
            ),
            Speaker::Col => (
                self.build(m, rows, &l, b - 1)?,
                self.build(m, rows, &r, b - 1)?,
            ),
        };
        Ok(ProtocolTree::Node {
            speaker,
            left_part: labels(&l),
            right_part: labels(&r),
            left: Box::new(left),
            right: Box::new(right),
        })
    }
}

fn halves(n: usize) -> Vec<bool> {
    (0..n).map(|i| i >= n.div_ceil(2)).collect()
}

pub fn decide(m: &BooleanMatrix, b: u32) -> Result<bool> {
    Solver::new().decide(m, b)
}

pub fn solve_exact(m: &BooleanMatrix) -> Result<Solution> {
    Solver::new().solve(m)
}

/// Checks a certificate against `m` without consulting the solver.
///
/// Malformed partitions are errors; a leaf whose rectangle is not constant
/// with the stated value gives `Ok(false)`.
pub fn verify_protocol(m: &BooleanMatrix, tree: &ProtocolTree) -> Result<bool> {
    let row_index: HashMap<&Label, usize> =
        m.rows().iter().enumerate().map(|(i, l)| (l, i)).collect();
    let col_index: HashMap<&Label, usize> =
        m.cols().iter().enumerate().map(|(i, l)| (l, i)).collect();
    let rows: Vec<usize> = (0..m.n_rows()).collect();
    let cols: Vec<usize> = (0..m.n_cols()).collect();
    let mut path = String::from("root");
    walk(m, tree, &rows, &cols, &row_index, &col_index, &mut path)
}

fn walk(
    m: &BooleanMatrix,
    tree: &ProtocolTree,
    rows: &[usize],
    cols: &[usize],
    row_index: &HashMap<&Label, usize>,
    col_index: &HashMap<&Label, usize>,
    path: &mut String,
) -> Result<bool> {
    match tree {
        ProtocolTree::Leaf { value } => Ok(rows
            .iter()
            .all(|&i| cols.iter().all(|&j| m.get(i, j) == *value))),
        ProtocolTree::Node {
            speaker,
            left_part,
            right_part,
            left,
            right,
        } => {
            let (current, index) = match speaker {
                Speaker::Row => (rows, row_index),
                Speaker::Col => (cols, col_index),
            };
            let fail = |reason: String| Error::MalformedTree {
                path: path.clone(),
                reason,
            };
            if left_part.is_empty() || right_part.is_empty() {
                return Err(fail("empty part".into()));
            }
            let here: HashSet<usize> = current.iter().copied().collect();
            let mut seen = HashSet::new();
            let mut resolve = |part: &[Label]| -> Result<Vec<usize>> {
                let mut out = Vec::with_capacity(part.len());
                for l in part {
                    let i = *index
                        .get(l)
                        .ok_or_else(|| fail(format!("unknown label {l}")))?;
                    if !here.contains(&i) {
                        return Err(fail(format!("label {l} outside the current rectangle")));
                    }
                    if !seen.insert(i) {
                        return Err(fail(format!("label {l} listed twice")));
                    }
                    out.push(i);
                }
                Ok(out)
            };
            let l = resolve(left_part)?;
            let r = resolve(right_part)?;
            if l.len() + r.len() != current.len() {
                return Err(fail("parts do not cover the rectangle".into()));
            }
            let len = path.len();
            path.push_str(".L");
            let ok_left = match speaker {
                Speaker::Row => walk(m, left, &l, cols, row_index, col_index, path)?,
                Speaker::Col => walk(m, left, rows, &l, row_index, col_index, path)?,
            };
            path.truncate(len);
            if !ok_left {
                return Ok(false);
            }
            path.push_str(".R");
            let ok_right = match speaker {
                Speaker::Row => walk(m, right, &r, cols, row_index, col_index, path)?,
                Speaker::Col => walk(m, right, rows, &r, row_index, col_index, path)?,
            };
            path.truncate(len);
            Ok(ok_right)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interlace::k_fold_interlace;

    fn phi() -> BooleanMatrix {
        BooleanMatrix::phi()
    }

    fn phi_tree(swap: bool) -> ProtocolTree {
        ProtocolTree::Node {
            speaker: Speaker::Col,
            left_part: vec![Label::atom(1)],
            right_part: vec![Label::atom(2)],
            left: Box::new(ProtocolTree::Leaf { value: !swap }),
            right: Box::new(ProtocolTree::Leaf { value: swap }),
        }
    }

    #[test]
    fn constant_needs_nothing() {
        let m = BooleanMatrix::from_strs(&["111", "111", "111"]).unwrap();
        assert!(decide(&m, 0).unwrap());
        assert_eq!(solve_exact(&m).unwrap().depth, 0);
    }

    #[test]
    fn phi_needs_one_bit() {
        assert!(!decide(&phi(), 0).unwrap());
        assert!(decide(&phi(), 1).unwrap());
        let s = solve_exact(&phi()).unwrap();
        assert_eq!(s.depth, 1);
        assert!(verify_protocol(&phi(), &s.certificate).unwrap());
    }

    #[test]
    fn hand_written_certificate() {
        assert!(verify_protocol(&phi(), &phi_tree(false)).unwrap());
        assert!(!verify_protocol(&phi(), &phi_tree(true)).unwrap());
    }

    #[test]
    fn malformed_partition_reports_path() {
        let bad = ProtocolTree::Node {
            speaker: Speaker::Row,
            left_part: vec![Label::atom(1)],
            right_part: vec![Label::atom(2)],
            left: Box::new(ProtocolTree::Leaf { value: true }),
            right: Box::new(ProtocolTree::Leaf { value: true }),
        };
        let m = BooleanMatrix::from_strs(&["1", "1", "1"]).unwrap();
        match verify_protocol(&m, &bad) {
            Err(Error::MalformedTree { path, .. }) => assert_eq!(path, "root"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interlace_three_needs_three() {
        let m = k_fold_interlace(&phi(), 3).unwrap();
        assert!(!decide(&m, 2).unwrap());
        assert!(decide(&m, 3).unwrap());
    }

    #[test]
    fn identity_four() {
        let bits: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| i == j).collect()).collect();
        let m = BooleanMatrix::from_bits(&bits).unwrap();
        let s = solve_exact(&m).unwrap();
        assert_eq!(s.depth, 3);
        assert!(verify_protocol(&m, &s.certificate).unwrap());
        assert_eq!(s.certificate.depth(), 3);
    }

    #[test]
    fn node_cap() {
        let mut s = Solver::with_node_cap(1);
        assert!(matches!(s.value(&phi()), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn alternation_statistic() {
        assert_eq!(phi_tree(false).alternations(), 0);
        let t = ProtocolTree::Node {
            speaker: Speaker::Row,
            left_part: vec![],
            right_part: vec![],
            left: Box::new(phi_tree(false)),
            right: Box::new(ProtocolTree::Leaf { value: false }),
        };
        assert_eq!(t.alternations(), 1);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.leaves(), 3);
    }
}
