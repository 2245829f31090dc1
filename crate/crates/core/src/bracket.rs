//! Bracket families `⟦M⟧^p_{x,y}`: all extractions of `⟨M⟩^p` to an exact
//! `T`-equipartition of rows (`T = ⌈m x⌉`) and `⌈n^p y⌉` columns.
//!
//! The complexity of a family is the minimum complexity of its members.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::density::Density;
use crate::interlace::{k_fold_interlace, row_label, split_row_label, RelaxedInterlace};
use crate::reservoir::{combinations, BalancedColumnSet};
use crate::solver::Solver;
use crate::{BooleanMatrix, Error, Fraction, Label, Result};

pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct BracketSpec {
    matrix: BooleanMatrix,
    p: usize,
    x: Density,
    y: Density,
}

impl BracketSpec {
    pub fn new(matrix: BooleanMatrix, p: usize, x: Density, y: Density) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter(
                "interlace order must be positive".into(),
            ));
        }
        Ok(BracketSpec { matrix, p, x, y })
    }

    pub fn matrix(&self) -> &BooleanMatrix {
        &self.matrix
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn x(&self) -> Density {
        self.x
    }

    pub fn y(&self) -> Density {
        self.y
    }

    /// `T = ⌈m x⌉`.
    pub fn row_quota(&self) -> usize {
        self.x.quota_u64(self.matrix.n_rows() as u64) as usize
    }

    /// Number of columns of `⟨M⟩^p`.
    pub fn interlaced_cols(&self) -> BigUint {
        Pow::pow(BigUint::from(self.matrix.n_cols()), self.p)
    }

    /// `⌈n^p y⌉`.
    pub fn col_quota(&self) -> BigUint {
        self.y.quota(&self.interlaced_cols())
    }

    /// `C(m,T)^p · C(n^p, ⌈n^p y⌉)`.
    pub fn member_count(&self) -> BigUint {
        let m = BigUint::from(self.matrix.n_rows());
        let rows = Pow::pow(binomial(m, BigUint::from(self.row_quota())), self.p);
        rows * binomial(self.interlaced_cols(), self.col_quota())
    }
}

/// A row subset of `[k] × R` holding at least `quota` rows in each block of
/// `blocks`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equipartition {
    k: usize,
    blocks: Vec<usize>,
    quota: usize,
    selection: Vec<Label>,
}

impl Equipartition {
    /// Labels must be interlaced row labels `(i r)` with `i ∈ [k]`.
    pub fn new(k: usize, blocks: Vec<usize>, quota: usize, selection: Vec<Label>) -> Result<Self> {
        if quota == 0 {
            return Err(Error::InvalidParameter("quota must be positive".into()));
        }
        for &b in &blocks {
            if b == 0 || b > k {
                return Err(Error::InvalidParameter(alloc::format!(
                    "block {b} outside [{k}]"
                )));
            }
        }
        for l in &selection {
            match split_row_label(l) {
                Some((b, _)) if b <= k => {}
                _ => return Err(Error::UnknownLabel(l.clone())),
            }
        }
        Ok(Equipartition {
            k,
            blocks,
            quota,
            selection,
        })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn quota(&self) -> usize {
        self.quota
    }

    pub fn selection(&self) -> &[Label] {
        &self.selection
    }

    pub fn count_in(&self, block: usize) -> usize {
        self.selection
            .iter()
            .filter(|l| split_row_label(l).is_some_and(|(b, _)| b == block))
            .count()
    }

    /// Every block of `blocks` holds at least `quota` rows.
    pub fn is_valid(&self) -> bool {
        self.blocks.iter().all(|&b| self.count_in(b) >= self.quota)
    }

    /// Every block of `blocks` holds exactly `quota` rows.
    pub fn is_exact(&self) -> bool {
        self.blocks.iter().all(|&b| self.count_in(b) == self.quota)
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Streams every member of a family exactly once.
pub struct Members {
    base: BooleanMatrix,
    m: usize,
    row_combos: Vec<Vec<usize>>,
    odometer: Vec<usize>,
    cols: Vec<usize>,
    n_cols: usize,
    done: bool,
}

pub fn enumerate_members(spec: &BracketSpec, cap: u64) -> Result<Members> {
    let count = spec.member_count();
    if count > BigUint::from(cap) {
        return Err(Error::FamilyTooLarge { count });
    }
    let base = k_fold_interlace(&spec.matrix, spec.p)?;
    let quota = spec
        .col_quota()
        .to_usize()
        .expect("bounded by the interlace width");
    Ok(Members {
        m: spec.matrix.n_rows(),
        row_combos: combinations(spec.matrix.n_rows(), spec.row_quota()),
        odometer: vec![0; spec.p],
        cols: (0..quota).collect(),
        n_cols: base.n_cols(),
        base,
        done: false,
    })
}

impl Members {
    fn current(&self) -> BooleanMatrix {
        let rows: Vec<usize> = self
            .odometer
            .iter()
            .enumerate()
            .flat_map(|(block, &c)| self.row_combos[c].iter().map(move |&r| block * self.m + r))
            .collect();
        self.base.extract_indices(&rows, &self.cols)
    }

    fn advance(&mut self) {
        let (n, k) = (self.n_cols, self.cols.len());
        if let Some(i) = (0..k).rev().find(|&i| self.cols[i] != i + n - k) {
            self.cols[i] += 1;
            for x in i + 1..k {
                self.cols[x] = self.cols[x - 1] + 1;
            }
            return;
        }
        for (x, c) in self.cols.iter_mut().enumerate() {
            *c = x;
        }
        for d in self.odometer.iter_mut().rev() {
            *d += 1;
            if *d < self.row_combos.len() {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }
}

impl Iterator for Members {
    type Item = BooleanMatrix;

    fn next(&mut self) -> Option<BooleanMatrix> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.advance();
        Some(out)
    }
}

/// Whether `candidate` is a member of the family: its rows form an exact
/// `T`-equipartition of `[p] × rows(M)`, it has `⌈n^p y⌉` columns from
/// `cols(M)^p`, and every entry agrees with `⟨M⟩^p`.
pub fn is_member(spec: &BracketSpec, candidate: &BooleanMatrix) -> bool {
    let m = &spec.matrix;
    let mut per_block = vec![0usize; spec.p];
    let mut rows = Vec::with_capacity(candidate.n_rows());
    for l in candidate.rows() {
        let Some((b, inner)) = split_row_label(l) else {
            return false;
        };
        let Some(r) = m.row_index(inner) else {
            return false;
        };
        if b > spec.p {
            return false;
        }
        per_block[b - 1] += 1;
        rows.push((b - 1, r));
    }
    if per_block.iter().any(|&c| c != spec.row_quota()) {
        return false;
    }
    if BigUint::from(candidate.n_cols()) != spec.col_quota() {
        return false;
    }
    let mut cols = Vec::with_capacity(candidate.n_cols());
    for l in candidate.cols() {
        let Some(items) = l.items() else { return false };
        if items.len() != spec.p {
            return false;
        }
        let Some(idx) = items
            .iter()
            .map(|y| m.col_index(y))
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        cols.push(idx);
    }
    rows.iter().enumerate().all(|(i, &(b, r))| {
        cols.iter()
            .enumerate()
            .all(|(j, c)| candidate.get(i, j) == m.get(r, c[b]))
    })
}

#[derive(Clone, Debug)]
pub struct FamilyComplexityResult {
    pub value: u32,
    /// `true` when every member was examined.
    pub exact: bool,
    pub members_examined: u64,
    pub witness: BooleanMatrix,
}

pub fn family_complexity(
    spec: &BracketSpec,
    cap: u64,
    samples: u64,
) -> Result<FamilyComplexityResult> {
    family_complexity_with(spec, cap, samples, 0, &mut Solver::new())
}

/// Exact minimum when the family has at most `cap` members; otherwise the
/// minimum over `samples` members drawn with a seeded ChaCha stream, which
/// is an upper bound on the true minimum.
pub fn family_complexity_with(
    spec: &BracketSpec,
    cap: u64,
    samples: u64,
    seed: u64,
    solver: &mut Solver,
) -> Result<FamilyComplexityResult> {
    match enumerate_members(spec, cap) {
        Ok(members) => minimize(members, true, solver),
        Err(Error::FamilyTooLarge { .. }) if samples > 0 => {
            let members = sample_members(spec, samples, seed)?;
            minimize(members.into_iter(), false, solver)
        }
        Err(e) => Err(e),
    }
}

fn minimize(
    members: impl Iterator<Item = BooleanMatrix>,
    exact: bool,
    solver: &mut Solver,
) -> Result<FamilyComplexityResult> {
    let mut best: Option<(u32, BooleanMatrix)> = None;
    let mut examined = 0;
    for member in members {
        examined += 1;
        match &best {
            None => {
                let v = solver.value(&member)?;
                best = Some((v, member));
            }
            Some((v, _)) if *v > 0 && solver.decide(&member, v - 1)? => {
                let v = solver.value(&member)?;
                best = Some((v, member));
            }
            Some(_) => {}
        }
        if best.as_ref().is_some_and(|b| b.0 == 0) {
            break;
        }
    }
    let (value, witness) = best.ok_or(Error::EmptySelection)?;
    Ok(FamilyComplexityResult {
        value,
        exact,
        members_examined: examined,
        witness,
    })
}

fn sample_members(spec: &BracketSpec, samples: u64, seed: u64) -> Result<Vec<BooleanMatrix>> {
    let base = k_fold_interlace(&spec.matrix, spec.p)?;
    let m = spec.matrix.n_rows();
    let t = spec.row_quota();
    let quota = spec
        .col_quota()
        .to_usize()
        .expect("bounded by the interlace width");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..samples)
        .map(|_| {
            let mut rows = Vec::with_capacity(spec.p * t);
            for block in 0..spec.p {
                let mut pick = sample(&mut rng, m, t).into_vec();
                pick.sort_unstable();
                rows.extend(pick.into_iter().map(|r| block * m + r));
            }
            let mut cols = sample(&mut rng, base.n_cols(), quota).into_vec();
            cols.sort_unstable();
            base.extract_indices(&rows, &cols)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockBalance {
    pub beta: Fraction,
    /// `⌈q(β − x)/(1 − x)⌉`, or 0 when `β < x`.
    pub k: usize,
    /// One-based blocks, each holding at least `T` selected rows.
    pub blocks: Vec<usize>,
    pub selection: Vec<Label>,
}

/// Keeps `k = ⌈q(β − x)/(1 − x)⌉` full blocks of a row selection in
/// `[q] × R` (`|R| = m`), where a block is full when it holds `⌈m x⌉` rows.
/// The first full blocks by index are kept.
pub fn block_balance(selection: &[Label], q: usize, m: usize, x: Fraction) -> Result<BlockBalance> {
    if q == 0 || m == 0 || x.is_zero() || x > Fraction::one() {
        return Err(Error::InvalidParameter(
            "need q, m ≥ 1 and 0 < x ≤ 1".into(),
        ));
    }
    let mut counts = vec![0usize; q];
    for l in selection {
        match split_row_label(l) {
            Some((b, _)) if b <= q => counts[b - 1] += 1,
            _ => return Err(Error::UnknownLabel(l.clone())),
        }
    }
    let beta = Fraction::new(selection.len() as u64, (q * m) as u64);
    if beta < x {
        return Ok(BlockBalance {
            beta,
            k: 0,
            blocks: Vec::new(),
            selection: Vec::new(),
        });
    }
    let k = if x.is_one() {
        q
    } else {
        let v = Fraction::from_integer(q as u64) * (beta - x) / (Fraction::one() - x);
        v.ceil().to_integer() as usize
    };
    let t = Density::rational(x)?.quota_u64(m as u64) as usize;
    let blocks: Vec<usize> = (1..=q).filter(|&b| counts[b - 1] >= t).take(k).collect();
    if blocks.len() < k {
        return Err(Error::InvalidParameter(
            "selection has fewer full blocks than its density forces; duplicate labels?".into(),
        ));
    }
    let keep: HashSet<usize> = blocks.iter().copied().collect();
    let selection = selection
        .iter()
        .filter(|l| split_row_label(l).is_some_and(|(b, _)| keep.contains(&b)))
        .cloned()
        .collect();
    Ok(BlockBalance {
        beta,
        k,
        blocks,
        selection,
    })
}

/// Which rows and columns of the relaxed interlace were kept, and the labels
/// they carry in the classical member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub blocks: Vec<usize>,
    /// `(member row, relaxed row)`.
    pub rows: Vec<(Label, Label)>,
    /// `(member column, relaxed column)`.
    pub cols: Vec<(Label, Label)>,
}

#[derive(Clone, Debug)]
pub struct ClassicalExtraction {
    pub member: BooleanMatrix,
    pub spec: BracketSpec,
    pub certificate: MembershipCertificate,
}

/// From a `(Q,T)`-equipartition `R'` and a column subset `C'` of
/// `N = ⟨M⟩^{q,S}`, extracts a member of `⟦M⟧^t_{x, y'}` with `t = |Q|`,
/// `x = T/m` and `y' = y/(1+ε)`.
///
/// `C'` lists distinct columns of `N`; each stands for all its copies in
/// `S`, so `|C'|` is counted with multiplicity and must be at least `y|S|`.
/// Rows are trimmed to the first `T` per block in label order, and each
/// projected column pattern is represented by its first column in `N`.
pub fn relaxed_to_classical(
    base: &BooleanMatrix,
    relaxed: &RelaxedInterlace,
    s: &BalancedColumnSet,
    rows: &Equipartition,
    cols: &[Label],
    y: Fraction,
) -> Result<ClassicalExtraction> {
    let n = &relaxed.matrix;
    let blocks = rows.blocks();
    let t = blocks.len();
    let quota_t = rows.quota();
    let m = base.n_rows();
    if t == 0 || t > s.q() || quota_t > m || s.alphabet() != base.cols() {
        return Err(Error::InvalidParameter(
            "inconsistent relaxed-to-classical inputs".into(),
        ));
    }
    if !rows.is_valid() {
        return Err(Error::InvalidParameter(
            "row selection is not a (Q,T)-equipartition".into(),
        ));
    }
    let col_index: HashMap<&Label, usize> =
        n.cols().iter().enumerate().map(|(j, l)| (l, j)).collect();
    let mut chosen: Vec<usize> = cols
        .iter()
        .map(|l| {
            col_index
                .get(l)
                .copied()
                .ok_or_else(|| Error::UnknownLabel(l.clone()))
        })
        .collect::<Result<_>>()?;
    chosen.sort_unstable();
    chosen.dedup();
    let weight: u64 = chosen.iter().map(|&j| relaxed.multiplicity[j]).sum();
    if (weight as u128) * (*y.denom() as u128) < (*y.numer() as u128) * (s.len() as u128) {
        return Err(Error::InvalidParameter(
            "column selection is sparser than y".into(),
        ));
    }

    // step 1: first T rows of each block of Q, by label order
    let mut row_pairs = Vec::with_capacity(t * quota_t);
    for (pos, &b) in blocks.iter().enumerate() {
        let mut inner: Vec<&Label> = rows
            .selection()
            .iter()
            .filter_map(|l| split_row_label(l).filter(|(bb, _)| *bb == b).map(|x| x.1))
            .collect();
        inner.sort_unstable();
        inner.dedup();
        inner.truncate(quota_t);
        // member rows follow the base matrix's row order within a block
        inner.sort_by_key(|l| base.row_index(l));
        for r in inner {
            row_pairs.push((row_label(pos + 1, r), row_label(b, r)));
        }
    }

    // step 2: one representative per projected pattern
    let eps = s.epsilon();
    let y_prime = y
        .numer()
        .checked_mul(*eps.denom())
        .zip(y.denom().checked_mul(eps.denom() + eps.numer()))
        .map(|(a, b)| Fraction::new(a, b))
        .ok_or_else(|| Error::InvalidParameter("y/(1+ε) overflows".into()))?;
    let spec = BracketSpec::new(
        base.clone(),
        t,
        Density::rational(Fraction::new(quota_t as u64, m as u64))?,
        Density::rational(y_prime)?,
    )?;
    let required = spec.col_quota().to_u64().unwrap_or(u64::MAX);
    let mut seen = HashSet::new();
    let mut reps: Vec<(Vec<usize>, usize)> = Vec::new();
    for &j in &chosen {
        let tuple = n.cols()[j].items().expect("relaxed columns are tuples");
        let projected: Vec<usize> = blocks
            .iter()
            .map(|&b| base.col_index(&tuple[b - 1]).expect("alphabet checked"))
            .collect();
        if seen.insert(projected.clone()) {
            reps.push((projected, j));
        }
    }
    if (reps.len() as u64) < required {
        return Err(Error::DensityTooLow {
            found: reps.len() as u64,
            required,
        });
    }
    reps.truncate(required as usize);
    // member columns in the classical interlace's order
    reps.sort_unstable();
    let col_pairs: Vec<(Label, Label)> = reps
        .iter()
        .map(|(proj, j)| {
            let label = Label::tuple(proj.iter().map(|&c| base.cols()[c].clone()));
            (label, n.cols()[*j].clone())
        })
        .collect();

    let n_rows: Vec<usize> = row_pairs
        .iter()
        .map(|(_, l)| n.row_index(l).ok_or_else(|| Error::UnknownLabel(l.clone())))
        .collect::<Result<_>>()?;
    let n_cols: Vec<usize> = reps.iter().map(|r| r.1).collect();
    let member = n.extract_indices(&n_rows, &n_cols).relabel(
        row_pairs.iter().map(|p| p.0.clone()).collect(),
        col_pairs.iter().map(|p| p.0.clone()).collect(),
    )?;
    Ok(ClassicalExtraction {
        member,
        spec,
        certificate: MembershipCertificate {
            blocks: blocks.to_vec(),
            rows: row_pairs,
            cols: col_pairs,
        },
    })
}

impl MembershipCertificate {
    /// Checks, entry by entry, that `member` agrees both with the relaxed
    /// interlace at the recorded rows and columns and with the classical
    /// interlace `⟨M⟩^t` at its own labels, and that it lies in the family.
    pub fn verify(
        &self,
        base: &BooleanMatrix,
        relaxed: &BooleanMatrix,
        spec: &BracketSpec,
        member: &BooleanMatrix,
    ) -> bool {
        if member.n_rows() != self.rows.len() || member.n_cols() != self.cols.len() {
            return false;
        }
        for (i, (mr, nr)) in self.rows.iter().enumerate() {
            if &member.rows()[i] != mr {
                return false;
            }
            let Some((b, inner)) = split_row_label(mr) else {
                return false;
            };
            let Some(r) = base.row_index(inner) else {
                return false;
            };
            for (j, (mc, nc)) in self.cols.iter().enumerate() {
                if &member.cols()[j] != mc {
                    return false;
                }
                let Some(y) = mc.get(b - 1).and_then(|y| base.col_index(y)) else {
                    return false;
                };
                let classical = base.get(r, y);
                let Ok(from_relaxed) = relaxed.entry(nr, nc) else {
                    return false;
                };
                if member.get(i, j) != classical || from_relaxed != classical {
                    return false;
                }
            }
        }
        is_member(spec, member)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize;
    use crate::interlace::relaxed_interlace;
    use crate::reservoir::full_product;

    fn frac(n: u64, d: u64) -> Fraction {
        Fraction::new(n, d)
    }

    fn spec(m: BooleanMatrix, p: usize, x: Fraction, y: Fraction) -> BracketSpec {
        BracketSpec::new(m, p, x.into(), y.into()).unwrap()
    }

    #[test]
    fn full_selection_is_phi() {
        let s = spec(BooleanMatrix::phi(), 1, frac(1, 1), frac(1, 1));
        let members: Vec<_> = enumerate_members(&s, 10).unwrap().collect();
        assert_eq!(members.len(), 1);
        assert_eq!(
            canonicalize(&members[0]),
            canonicalize(&BooleanMatrix::phi())
        );
    }

    #[test]
    fn half_columns_of_phi() {
        let s = spec(BooleanMatrix::phi(), 1, frac(1, 1), frac(1, 2));
        let members: Vec<_> = enumerate_members(&s, 10).unwrap().collect();
        assert_eq!(members.len(), 2);
        let mut bits: Vec<bool> = members.iter().map(|m| m.get(0, 0)).collect();
        bits.sort();
        assert_eq!(bits, [false, true]);
        assert!(members.iter().all(|m| is_member(&s, m)));
        assert_eq!(family_complexity(&s, 10, 0).unwrap().value, 0);
    }

    #[test]
    fn square_of_phi() {
        let s = spec(BooleanMatrix::phi(), 2, frac(1, 1), frac(1, 1));
        assert_eq!(s.member_count(), BigUint::one());
        let r = family_complexity(&s, 10, 0).unwrap();
        assert_eq!((r.value, r.exact), (2, true));
    }

    #[test]
    fn too_large_and_sampling() {
        let s = spec(BooleanMatrix::phi(), 4, frac(1, 1), frac(1, 2));
        assert!(matches!(
            enumerate_members(&s, 100),
            Err(Error::FamilyTooLarge { .. })
        ));
        let r = family_complexity(&s, 100, 5).unwrap();
        assert!(!r.exact);
        assert_eq!(r.members_examined, 5);
        assert!(is_member(&s, &r.witness));
    }

    #[test]
    fn enumeration_count_matches_formula() {
        let m = BooleanMatrix::from_strs(&["10", "01", "11"]).unwrap();
        let s = spec(m, 2, frac(2, 3), frac(1, 2));
        let n = enumerate_members(&s, 10_000).unwrap().count();
        assert_eq!(BigUint::from(n), s.member_count());
        assert_eq!(n, 3 * 3 * 6);
    }

    fn block_rows(spread: &[usize]) -> Vec<Label> {
        spread
            .iter()
            .enumerate()
            .flat_map(|(b, &c)| (1..=c as i64).map(move |r| row_label(b + 1, &Label::atom(r))))
            .collect()
    }

    #[test]
    fn block_balance_examples() {
        let all = block_rows(&[4, 4, 4, 4]);
        let r = block_balance(&all, 4, 4, frac(1, 2)).unwrap();
        assert_eq!((r.k, r.blocks.clone()), (4, vec![1, 2, 3, 4]));
        assert_eq!(r.selection, all);

        let sparse = block_rows(&[4, 1, 1, 1]);
        let r = block_balance(&sparse, 4, 4, frac(1, 2)).unwrap();
        assert_eq!(r.beta, frac(7, 16));
        assert!(r.blocks.is_empty() && r.selection.is_empty());

        let r = block_balance(&block_rows(&[4, 1]), 2, 4, frac(1, 2)).unwrap();
        assert_eq!((r.k, r.blocks), (1, vec![1]));
        assert_eq!(r.selection.len(), 4);
    }

    #[test]
    fn relaxed_to_classical_with_full_product() {
        let base = BooleanMatrix::from_strs(&["10", "11"]).unwrap();
        let s = full_product(2, 2, base.cols()).unwrap();
        let relaxed = relaxed_interlace(&base, 2, &s).unwrap();
        let eq = Equipartition::new(2, vec![1, 2], 2, relaxed.matrix.rows().to_vec()).unwrap();
        let out = relaxed_to_classical(&base, &relaxed, &s, &eq, relaxed.matrix.cols(), frac(1, 1))
            .unwrap();
        let classical = k_fold_interlace(&base, 2).unwrap();
        assert_eq!(out.member, classical);
        assert!(out
            .certificate
            .verify(&base, &relaxed.matrix, &out.spec, &out.member));
    }
}
