//! The φ → M1 → M2 → M3 → M4 reduction from 4-bin vector bin packing.
//!
//! M1 and M2 are relaxed interlaces and are built explicitly. M3 (a 4-fold
//! interlace of M2ᵀ) and M4 are too wide to store in general, so both are
//! evaluated entry-by-entry from indices and only materialized on request
//! under a cell budget.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use crate::harness::Binding;
use crate::interlace::{relaxed_interlace, row_label, RelaxedInterlace};
use crate::reservoir::{build_balanced_set, default_epsilon, full_product, BalancedColumnSet};
use crate::{BooleanMatrix, Error, Fraction, Label, Result};

pub const BINS: usize = 4;
pub const DUP: usize = 32;

/// An instance of {0,1}-vector bin packing into `m` bins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VbpInstance {
    d: usize,
    m: usize,
    vectors: Vec<Vec<bool>>,
    processed: bool,
}

impl VbpInstance {
    pub fn new(d: usize, m: usize, vectors: Vec<Vec<bool>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if let Some(i) = vectors.iter().position(|v| v.len() != d) {
            return Err(Error::Shape(format!(
                "vector {} has length {}, expected {d}",
                i + 1,
                vectors[i].len()
            )));
        }
        Ok(VbpInstance {
            d,
            m,
            vectors,
            processed: false,
        })
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vectors(&self) -> &[Vec<bool>] {
        &self.vectors
    }

    pub fn is_processed(&self) -> bool {
        self.processed
    }

    /// Marks an instance as already preprocessed. Needs a power-of-two
    /// dimension and at most four vectors per coordinate.
    pub fn assume_processed(mut self) -> Result<Self> {
        if !self.d.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "dimension {} is not a power of two",
                self.d
            )));
        }
        if let Some(c) = (0..self.d).find(|&c| self.load(c) > BINS) {
            return Err(Error::InvalidParameter(format!(
                "coordinate {} holds more than {BINS} vectors",
                c + 1
            )));
        }
        self.processed = true;
        Ok(self)
    }

    /// Number of vectors with a 1 at coordinate `c` (0-based).
    pub fn load(&self, c: usize) -> usize {
        self.vectors.iter().filter(|v| v[c]).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preprocessed {
    Ready(VbpInstance),
    /// Some coordinate (1-based) is 1 in more vectors than there are bins.
    ImmediateNo {
        coordinate: usize,
    },
}

/// Rejects overloaded coordinates, triplicates every vector into three
/// disjoint coordinate blocks (vector-major order) and zero-pads the
/// dimension to a power of two. Already processed instances pass through.
pub fn preprocess(raw: &VbpInstance) -> Result<Preprocessed> {
    if raw.m != BINS {
        return Err(Error::BinCountUnsupported(raw.m));
    }
    if raw.processed {
        return Ok(Preprocessed::Ready(raw.clone()));
    }
    if let Some(c) = (0..raw.d).find(|&c| raw.load(c) > BINS) {
        return Ok(Preprocessed::ImmediateNo { coordinate: c + 1 });
    }
    let d = (3 * raw.d).next_power_of_two();
    let mut vectors = Vec::with_capacity(3 * raw.n());
    for v in &raw.vectors {
        for copy in 0..3 {
            let mut w = vec![false; d];
            w[copy * raw.d..(copy + 1) * raw.d].copy_from_slice(v);
            vectors.push(w);
        }
    }
    Ok(Preprocessed::Ready(VbpInstance {
        d,
        m: raw.m,
        vectors,
        processed: true,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReservoirKind {
    /// Every tuple once; exactly balanced.
    FullProduct,
    /// Small-bias construction with the given or default accuracy.
    Balanced,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionParams {
    pub q1: usize,
    pub t1: usize,
    pub q2: usize,
    pub t2: usize,
    pub q3: usize,
    pub t3: usize,
    pub dup: usize,
    pub b0: u64,
    pub b1: u64,
    pub b1_prime: u64,
    pub b2: u64,
    pub b2_prime: u64,
    pub delta: Fraction,
    pub big_delta: u64,
    pub x: Fraction,
    pub eps1: Option<Fraction>,
    pub eps2: Option<Fraction>,
    pub stage1: ReservoirKind,
    pub stage2: ReservoirKind,
}

fn ceil_log2_big(x: &BigUint) -> u64 {
    let bits = x.bits();
    if bits == 0 {
        0
    } else if (x - 1u8) & x == BigUint::ZERO {
        bits - 1
    } else {
        bits
    }
}

/// Least power of two `2^k ≥ 3L / log₂ L`.
fn t2_default(l: u64) -> usize {
    let target = BigUint::one() << (3 * l) as usize;
    let mut k = 0u32;
    while num_traits::pow(BigUint::from(l), 1usize << k) < target {
        k += 1;
    }
    1 << k
}

/// Parameters for dimension `d` with every constant `c_i = i`.
pub fn default_params(d: usize) -> Result<ReductionParams> {
    if d < 4 {
        return Err(Error::DomainTooSmall(d));
    }
    if !d.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "dimension {d} is not a power of two"
        )));
    }
    let l = d.trailing_zeros() as u64;
    let q1 = (2 * l * l).next_power_of_two() as usize - 2;
    let t1 = ((64 * l).next_power_of_two() as usize).min(q1);
    let q2 = d;
    let t2 = t2_default(l).min(q2);
    let lb = BigUint::from(l);
    Ok(ReductionParams {
        q1,
        t1,
        q2,
        t2,
        q3: BINS,
        t3: BINS,
        dup: DUP,
        b0: ceil_log2_big(&num_traits::pow(BigUint::from(64 * l), 64)),
        b1: 2 * l,
        b1_prime: 3 * l,
        b2: ceil_log2_big(&num_traits::pow(lb.clone(), 3)),
        b2_prime: ceil_log2_big(&num_traits::pow(lb, 4)),
        delta: Fraction::new(1, 10),
        big_delta: 5,
        x: Fraction::new(1, 32),
        eps1: None,
        eps2: None,
        stage1: ReservoirKind::Balanced,
        stage2: ReservoirKind::Balanced,
    })
}

impl ReductionParams {
    /// Small exact profile: `q1 = t1 = 2`, `q2 = d`, `t2 = 2`, full products.
    pub fn toy(d: usize) -> Result<Self> {
        let mut p = default_params(d)?;
        p.q1 = 2;
        p.t1 = 2;
        p.t2 = 2;
        p.stage1 = ReservoirKind::FullProduct;
        p.stage2 = ReservoirKind::FullProduct;
        Ok(p)
    }

    /// Profile for size measurement: the toy first stage, and a
    /// small-bias second stage of the default order with `t2 ≤ 2`.
    pub fn growth(d: usize) -> Result<Self> {
        let mut p = default_params(d)?;
        p.q1 = 2;
        p.t1 = 2;
        p.t2 = p.t2.min(2);
        p.stage1 = ReservoirKind::FullProduct;
        p.stage2 = ReservoirKind::Balanced;
        Ok(p)
    }

    /// Applies `q1, t1, q2, t2, eps1, eps2, full1, full2` overrides.
    pub fn apply(&mut self, b: &Binding) -> Result<()> {
        for (key, v) in b.iter() {
            let int = || -> Result<usize> {
                if !v.is_integer() {
                    return Err(Error::InvalidParameter(format!("{key} must be an integer")));
                }
                Ok(v.to_integer() as usize)
            };
            let kind = || -> Result<ReservoirKind> {
                match int()? {
                    0 => Ok(ReservoirKind::Balanced),
                    1 => Ok(ReservoirKind::FullProduct),
                    _ => Err(Error::InvalidParameter(format!("{key} must be 0 or 1"))),
                }
            };
            match key {
                "q1" => self.q1 = int()?,
                "t1" => self.t1 = int()?,
                "q2" => self.q2 = int()?,
                "t2" => self.t2 = int()?,
                "eps1" => self.eps1 = Some(v),
                "eps2" => self.eps2 = Some(v),
                "full1" => self.stage1 = kind()?,
                "full2" => self.stage2 = kind()?,
                "q3" | "t3" | "dup" => {
                    return Err(Error::InvalidParameter(format!(
                        "{key} is fixed by the construction"
                    )))
                }
                _ => return Err(Error::InvalidParameter(format!("unknown parameter {key}"))),
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.q3 != BINS || self.t3 != BINS || self.dup != DUP {
            return Err(Error::InvalidParameter(
                "need q3 = t3 = 4 and dup = 32".into(),
            ));
        }
        if self.q1 == 0 || self.t1 == 0 || self.t1 > self.q1 || self.t2 == 0 || self.t2 > self.q2 {
            return Err(Error::InvalidParameter(
                "need 1 <= t1 <= q1 and 1 <= t2 <= q2".into(),
            ));
        }
        Ok(())
    }
}

/// One relaxed-interlace stage together with its reservoir.
#[derive(Clone, Debug)]
pub struct Stage {
    pub reservoir: BalancedColumnSet,
    pub interlace: RelaxedInterlace,
}

impl Stage {
    pub fn matrix(&self) -> &BooleanMatrix {
        &self.interlace.matrix
    }
}

fn reservoir(
    kind: ReservoirKind,
    q: usize,
    t: usize,
    alphabet: &[Label],
    eps: Option<Fraction>,
) -> Result<BalancedColumnSet> {
    match kind {
        ReservoirKind::FullProduct => full_product(q, t, alphabet),
        ReservoirKind::Balanced => {
            let eps = eps.unwrap_or_else(|| default_epsilon(q, t, alphabet.len()));
            build_balanced_set(q, t, alphabet, eps)
        }
    }
}

/// `M1 = ⟨φ⟩^{q1, S_{q1,t1}(cols φ)}`.
pub fn build_stage1(params: &ReductionParams) -> Result<Stage> {
    params.validate()?;
    let phi = BooleanMatrix::phi();
    let s = reservoir(params.stage1, params.q1, params.t1, phi.cols(), params.eps1)?;
    let interlace = relaxed_interlace(&phi, params.q1, &s)?;
    Ok(Stage {
        reservoir: s,
        interlace,
    })
}

/// `M2 = ⟨M1ᵀ⟩^{q2, S_{q2,t2}(R1)}`.
pub fn build_stage2(params: &ReductionParams, stage1: &Stage) -> Result<Stage> {
    let m1t = stage1.matrix().transpose();
    let s = reservoir(params.stage2, params.q2, params.t2, m1t.cols(), params.eps2)?;
    let interlace = relaxed_interlace(&m1t, params.q2, &s)?;
    Ok(Stage {
        reservoir: s,
        interlace,
    })
}

/// `M3 = ⟨M2ᵀ⟩^4`, evaluated on demand. Rows are `[4] × C2` block-major;
/// columns are `R2^4` in lexicographic order.
#[derive(Clone, Debug)]
pub struct Stage3 {
    m2: BooleanMatrix,
}

fn check_cells(rows: u128, cols: u128, budget: u128) -> Result<()> {
    let cells = rows.saturating_mul(cols);
    if cells > budget {
        return Err(Error::SizeOverflow { cells, budget });
    }
    Ok(())
}

pub fn build_stage3(stage2: &Stage) -> Stage3 {
    Stage3 {
        m2: stage2.matrix().clone(),
    }
}

impl Stage3 {
    pub fn n_rows(&self) -> usize {
        BINS * self.m2.n_cols()
    }

    pub fn n_cols(&self) -> u128 {
        (self.m2.n_rows() as u128).pow(BINS as u32)
    }

    /// The four `R2` indices selected by column `c`.
    pub fn selectors(&self, c: u128) -> [usize; BINS] {
        let r2 = self.m2.n_rows() as u128;
        let mut out = [0; BINS];
        let mut rest = c;
        for slot in (0..BINS).rev() {
            out[slot] = (rest % r2) as usize;
            rest /= r2;
        }
        out
    }

    pub fn column_of(&self, selectors: [usize; BINS]) -> u128 {
        let r2 = self.m2.n_rows() as u128;
        selectors.iter().fold(0, |acc, &s| acc * r2 + s as u128)
    }

    pub fn get(&self, row: usize, col: u128) -> bool {
        let per = self.m2.n_cols();
        let (slot, c2) = (row / per, row % per);
        self.m2.get(self.selectors(col)[slot], c2)
    }

    pub fn row_label(&self, row: usize) -> Label {
        let per = self.m2.n_cols();
        row_label(row / per + 1, &self.m2.cols()[row % per])
    }

    pub fn col_label(&self, col: u128) -> Label {
        Label::tuple(
            self.selectors(col)
                .iter()
                .map(|&s| self.m2.rows()[s].clone()),
        )
    }

    pub fn materialize(&self, budget: u128) -> Result<BooleanMatrix> {
        check_cells(self.n_rows() as u128, self.n_cols(), budget)?;
        let cols = (0..self.n_cols()).map(|c| self.col_label(c)).collect();
        let rows = (0..self.n_rows()).map(|r| self.row_label(r)).collect();
        BooleanMatrix::from_fn(rows, cols, |r, c| self.get(r, c as u128))
    }
}

/// Where a row of M4 comes from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RowOrigin {
    /// Row `index` of M3.
    Stage3 { index: usize },
    /// Instance vector, 1-based.
    Vector(usize),
}

/// Where a column of M4 comes from: copy `j' ∈ [32]` of the M3 column with
/// the given `R2` selectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColOrigin {
    pub copy: usize,
    pub selectors: [usize; BINS],
}

/// `⟨φ⟩^5(p, j')` with `j' ∈ [32]` read as five bits, most significant first;
/// bit 0 stands for column 1 of φ.
pub fn phi5(p: usize, copy: usize) -> bool {
    ((copy - 1) >> (5 - p)) & 1 == 0
}

/// M4, evaluated on demand.
#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub params: ReductionParams,
    pub instance: VbpInstance,
    pub stage1: Stage,
    pub stage2: Stage,
    pub stage3: Stage3,
    /// `rank[v][c]`: position (1-based) of vector `v` among the vectors with
    /// a 1 at coordinate `c`, if it has one there.
    rank: Vec<Vec<Option<u8>>>,
}

/// Runs the whole construction on a preprocessed instance.
pub fn reduce(instance: &VbpInstance, params: &ReductionParams) -> Result<ReductionOutput> {
    if !instance.processed {
        return Err(Error::InvalidParameter(
            "instance must be preprocessed first".into(),
        ));
    }
    if params.q2 < instance.d {
        return Err(Error::InvalidParameter(format!(
            "q2 = {} cannot encode {} dimensions",
            params.q2, instance.d
        )));
    }
    let stage1 = build_stage1(params)?;
    let stage2 = build_stage2(params, &stage1)?;
    let stage3 = build_stage3(&stage2);
    Ok(build_stage4(instance, params, stage1, stage2, stage3))
}

pub fn build_stage4(
    instance: &VbpInstance,
    params: &ReductionParams,
    stage1: Stage,
    stage2: Stage,
    stage3: Stage3,
) -> ReductionOutput {
    let mut seen = vec![0u8; instance.d];
    let rank = instance
        .vectors
        .iter()
        .map(|v| {
            v.iter()
                .zip(seen.iter_mut())
                .map(|(&bit, count)| {
                    bit.then(|| {
                        *count += 1;
                        *count
                    })
                })
                .collect()
        })
        .collect();
    ReductionOutput {
        params: params.clone(),
        instance: instance.clone(),
        stage1,
        stage2,
        stage3,
        rank,
    }
}

impl ReductionOutput {
    pub fn n_rows(&self) -> usize {
        self.stage3.n_rows() + self.instance.n()
    }

    pub fn n_cols(&self) -> u128 {
        DUP as u128 * self.stage3.n_cols()
    }

    fn n_c1(&self) -> usize {
        self.stage1.matrix().n_cols()
    }

    /// Coordinate (0-based) encoded by an `R2` index: its block.
    pub fn dimension_of(&self, r2: usize) -> usize {
        r2 / self.n_c1()
    }

    pub fn col_origin(&self, col: u128) -> ColOrigin {
        let c3 = self.stage3.n_cols();
        ColOrigin {
            copy: (col / c3) as usize + 1,
            selectors: self.stage3.selectors(col % c3),
        }
    }

    pub fn col_index(&self, origin: &ColOrigin) -> u128 {
        (origin.copy as u128 - 1) * self.stage3.n_cols() + self.stage3.column_of(origin.selectors)
    }

    pub fn row_origin(&self, row: usize) -> RowOrigin {
        let r3 = self.stage3.n_rows();
        if row < r3 {
            RowOrigin::Stage3 { index: row }
        } else {
            RowOrigin::Vector(row - r3 + 1)
        }
    }

    pub fn row_label(&self, row: usize) -> Label {
        match self.row_origin(row) {
            RowOrigin::Stage3 { index } => self.stage3.row_label(index),
            RowOrigin::Vector(v) => Label::tuple([Label::atom(v as i64)]),
        }
    }

    pub fn col_label(&self, col: u128) -> Label {
        let o = self.col_origin(col);
        let c3 = self.stage3.column_of(o.selectors);
        Label::pair(Label::atom(o.copy as i64), self.stage3.col_label(c3))
    }

    /// Entry of M4. M3 rows ignore the copy index; a vector row reads
    /// `⟨φ⟩^5(p, j')` when all four selectors are one `R2` element whose
    /// dimension holds the vector as its `p`-th member, and `⟨φ⟩^5(5, j')`
    /// otherwise.
    pub fn get(&self, row: usize, col: u128) -> bool {
        let o = self.col_origin(col);
        match self.row_origin(row) {
            RowOrigin::Stage3 { index } => self.stage3.get(index, col % self.stage3.n_cols()),
            RowOrigin::Vector(v) => {
                let s = o.selectors[0];
                let dim = self.dimension_of(s);
                let p = if o.selectors.iter().all(|&x| x == s) && dim < self.instance.d {
                    self.rank[v - 1][dim].map_or(5, usize::from)
                } else {
                    5
                };
                phi5(p, o.copy)
            }
        }
    }

    pub fn materialize(&self, budget: u128) -> Result<BooleanMatrix> {
        check_cells(self.n_rows() as u128, self.n_cols(), budget)?;
        let rows = (0..self.n_rows()).map(|r| self.row_label(r)).collect();
        let cols = (0..self.n_cols()).map(|c| self.col_label(c)).collect();
        BooleanMatrix::from_fn(rows, cols, |r, c| self.get(r, c as u128))
    }

    /// Block `i` (0-based) and M1 row `r` such that no M2 column selects
    /// `r` in block `i`; `None` when every M1 copy in M2 is complete.
    pub fn missing_selector(&self) -> Option<(usize, usize)> {
        let s = &self.stage2.reservoir;
        let p = s.p();
        let mut seen = vec![false; s.q() * p];
        for (tuple, _) in s.entries() {
            for (i, &sym) in tuple.iter().enumerate() {
                seen[i * p + sym as usize] = true;
            }
        }
        seen.iter().position(|&x| !x).map(|k| (k / p, k % p))
    }

    /// Vectors (0-based) with a 1 at coordinate `c`, in input order.
    pub fn active_at(&self, c: usize) -> Vec<usize> {
        (0..self.instance.n())
            .filter(|&v| self.instance.vectors[v][c])
            .collect()
    }

    /// Submatrix over the columns `(j', (s,s,s,s))` with `s` in block
    /// `block` (1-based) and the rows of M3, the vectors active at the
    /// block's dimension, and one inactive vector. After removing
    /// duplicates it is `⟨φ⟩^{q1+1+i}` with `i` active vectors.
    pub fn extract_gap_submatrix(&self, block: usize, dim: usize) -> Result<BooleanMatrix> {
        if block == 0 || block > self.params.q2 {
            return Err(Error::InvalidParameter(format!(
                "block {block} is outside [1, {}]",
                self.params.q2
            )));
        }
        if dim != block || dim > self.instance.d {
            return Err(Error::InvalidParameter(format!(
                "block {block} encodes dimension {block}; got dimension {dim}"
            )));
        }
        let p = self.stage2.reservoir.p();
        for r in 0..p {
            let realized = self
                .stage2
                .reservoir
                .entries()
                .iter()
                .any(|(t, _)| t[block - 1] as usize == r);
            if !realized {
                let row = &self.stage1.matrix().rows()[r];
                return Err(Error::NoSuchColumn(format!(
                    "M1 row {row} in block {block}"
                )));
            }
        }
        let c = dim - 1;
        let active = self.active_at(c);
        let idle = (0..self.instance.n())
            .find(|v| !self.instance.vectors[*v][c])
            .ok_or_else(|| {
                Error::InvalidParameter(format!("every vector is active at dimension {dim}"))
            })?;
        let r3 = self.stage3.n_rows();
        let rows: Vec<usize> = (0..r3)
            .chain(active.iter().chain([&idle]).map(|v| r3 + v))
            .collect();
        let nc1 = self.n_c1();
        let mut cols = Vec::with_capacity(DUP * nc1);
        for j in 0..nc1 {
            let s = (block - 1) * nc1 + j;
            for copy in 1..=DUP {
                cols.push(self.col_index(&ColOrigin {
                    copy,
                    selectors: [s; BINS],
                }));
            }
        }
        BooleanMatrix::from_fn(
            rows.iter().map(|&r| self.row_label(r)).collect(),
            cols.iter().map(|&c| self.col_label(c)).collect(),
            |i, j| self.get(rows[i], cols[j]),
        )
    }

    pub fn sizes(&self) -> SizeReport {
        SizeReport::of(
            &self.params,
            self.stage1.matrix(),
            &self.stage2,
            self.instance.n(),
        )
    }
}

/// Stage sizes. Row counts of M3 and M4 count the reservoir multiset of
/// M2 columns; `r4_distinct` counts distinct tuples instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeReport {
    pub r1: u128,
    pub c1: u128,
    pub r2: u128,
    pub c2: u128,
    pub c2_distinct: u128,
    pub r3: u128,
    pub c3: u128,
    pub r4: u128,
    pub r4_distinct: u128,
    pub c4: u128,
}

impl SizeReport {
    pub fn of(params: &ReductionParams, m1: &BooleanMatrix, stage2: &Stage, n: usize) -> Self {
        let r2 = stage2.matrix().n_rows() as u128;
        let c2 = stage2.reservoir.len() as u128;
        let c2_distinct = stage2.matrix().n_cols() as u128;
        let r3 = params.q3 as u128 * c2;
        let c3 = r2.pow(params.q3 as u32);
        SizeReport {
            r1: m1.n_rows() as u128,
            c1: m1.n_cols() as u128,
            r2,
            c2,
            c2_distinct,
            r3,
            c3,
            r4: r3 + n as u128,
            r4_distinct: params.q3 as u128 * c2_distinct + n as u128,
            c4: params.dup as u128 * c3,
        }
    }
}

/// Builds stages 1 and 2 for `params` and reports all stage sizes for an
/// instance with `n` vectors.
pub fn size_report(params: &ReductionParams, n: usize) -> Result<SizeReport> {
    let s1 = build_stage1(params)?;
    let s2 = build_stage2(params, &s1)?;
    Ok(SizeReport::of(params, s1.matrix(), &s2, n))
}

impl core::fmt::Display for RowOrigin {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RowOrigin::Stage3 { index } => write!(f, "stage3\t{}", index + 1),
            RowOrigin::Vector(v) => write!(f, "vector\t{v}"),
        }
    }
}

impl core::fmt::Display for ColOrigin {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.copy)?;
        for s in self.selectors {
            write!(f, "\t{}", s + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize;
    use crate::interlace::k_fold_interlace;

    fn inst(d: usize, rows: &[&str]) -> VbpInstance {
        let v = rows
            .iter()
            .map(|r| r.chars().map(|c| c == '1').collect())
            .collect();
        VbpInstance::new(d, 4, v).unwrap()
    }

    fn ready(p: Preprocessed) -> VbpInstance {
        match p {
            Preprocessed::Ready(i) => i,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preprocess_single_vector() {
        let out = ready(preprocess(&inst(1, &["1"])).unwrap());
        assert_eq!((out.n(), out.d()), (3, 4));
        for (k, v) in out.vectors().iter().enumerate() {
            let ones: Vec<usize> = (0..4).filter(|&c| v[c]).collect();
            assert_eq!(ones, [k]);
        }
        assert_eq!(preprocess(&out).unwrap(), Preprocessed::Ready(out));
    }

    #[test]
    fn pigeonhole() {
        let raw = inst(2, &["10", "10", "11", "10", "10"]);
        assert_eq!(
            preprocess(&raw).unwrap(),
            Preprocessed::ImmediateNo { coordinate: 1 }
        );
        let bad = VbpInstance::new(2, 3, vec![]).unwrap();
        assert!(matches!(
            preprocess(&bad),
            Err(Error::BinCountUnsupported(3))
        ));
    }

    #[test]
    fn table_values() {
        let p = default_params(16).unwrap();
        assert_eq!((p.q1, p.q2, p.t2, p.q3, p.t3, p.dup), (30, 16, 8, 4, 4, 32));
        assert_eq!(p.delta, Fraction::new(1, 10));
        assert_eq!((p.b1, p.b1_prime, p.b2, p.b2_prime), (8, 12, 6, 8));
        // 64 log(256) = 512
        assert_eq!(p.b0, 512);
        let p = default_params(4).unwrap();
        assert_eq!((p.q1, p.q2), (6, 4));
        assert!(matches!(default_params(2), Err(Error::DomainTooSmall(2))));
    }

    #[test]
    fn toy_stage_one_is_two_fold() {
        let p = ReductionParams::toy(4).unwrap();
        let s1 = build_stage1(&p).unwrap();
        assert_eq!((s1.matrix().n_rows(), s1.matrix().n_cols()), (2, 4));
        let two = k_fold_interlace(&BooleanMatrix::phi(), 2).unwrap();
        assert_eq!(canonicalize(s1.matrix()), canonicalize(&two));
    }

    #[test]
    fn phi5_matches_interlace() {
        let f = k_fold_interlace(&BooleanMatrix::phi(), 5).unwrap();
        for p in 1..=5 {
            for copy in 1..=32 {
                assert_eq!(phi5(p, copy), f.get(p - 1, copy - 1));
            }
        }
    }

    #[test]
    fn gap_counts_active_vectors() {
        let i = ready(preprocess(&inst(1, &["1"])).unwrap());
        let out = reduce(&i, &ReductionParams::toy(i.d()).unwrap()).unwrap();
        let g = out.extract_gap_submatrix(1, 1).unwrap();
        let want = k_fold_interlace(&BooleanMatrix::phi(), 2 + 1 + 1).unwrap();
        assert_eq!(canonicalize(&g), canonicalize(&want));
        let g = out.extract_gap_submatrix(4, 4).unwrap();
        let want = k_fold_interlace(&BooleanMatrix::phi(), 3).unwrap();
        assert_eq!(canonicalize(&g), canonicalize(&want));
    }
}
