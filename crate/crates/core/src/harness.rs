//! Finite checks of inequalities between bracket-family complexities.
//!
//! Each check evaluates premises and conclusions exactly when the families
//! are small enough to enumerate. A check whose premises fail passes
//! vacuously; a check involving sampled values is never reported as a
//! failure.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashMap;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bracket::{family_complexity_with, BracketSpec, DEFAULT_ENUMERATION_CAP};
use crate::canonical::canonicalize;
use crate::density::{Density, Exponent};
use crate::interlace::k_fold_interlace;
use crate::rank::ceil_log2;
use crate::solver::Solver;
use crate::{BooleanMatrix, Error, Fraction, Result};

/// Rational stand-in for the irrational upper bound `1/√2 − 1/2` on δ.
pub const DELTA_MAX: Fraction = Fraction::new_raw(207, 1000);
pub const DEFAULT_SAMPLES: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInfinity,
    Value(i64),
}

impl Bound {
    fn plus(self, k: i64) -> Bound {
        match self {
            Bound::NegInfinity => Bound::NegInfinity,
            Bound::Value(v) => Bound::Value(v + k),
        }
    }
}

impl From<u32> for Bound {
    fn from(v: u32) -> Self {
        Bound::Value(v as i64)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInfinity => f.write_str("-inf"),
            Bound::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl Relation {
    fn holds(self, left: Bound, right: Bound) -> bool {
        match self {
            Relation::Ge => left >= right,
            Relation::Le => left <= right,
            Relation::Eq => left == right,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "==",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Some premise is false, so the implication holds trivially.
    VacuousPass,
    Fail,
    /// A needed value is only a sampled upper bound.
    NotExact,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::VacuousPass => "vacuous-pass",
            Verdict::Fail => "fail",
            Verdict::NotExact => "not-exact",
        }
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::VacuousPass)
    }
}

/// One compared pair of quantities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub label: String,
    pub left: Bound,
    pub relation: Relation,
    pub right: Bound,
    pub exact: bool,
}

impl Part {
    pub fn holds(&self) -> bool {
        self.relation.holds(self.left, self.right)
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {} [{}{}]",
            self.label,
            self.left,
            self.relation.symbol(),
            self.right,
            if self.holds() { "holds" } else { "violated" },
            if self.exact { "" } else { ", sampled" }
        )
    }
}

/// Named parameter values, parsed from `k=v,...`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Binding(BTreeMap<String, Fraction>);

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: Fraction) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<Fraction> {
        self.0.get(name).copied()
    }

    fn require(&self, name: &str) -> Result<Fraction> {
        self.get(name)
            .ok_or_else(|| Error::BindingViolation(format!("missing parameter {name}")))
    }

    fn integer(&self, name: &str) -> Result<u64> {
        let v = self.require(name)?;
        if !v.is_integer() {
            return Err(Error::BindingViolation(format!(
                "{name} must be an integer"
            )));
        }
        Ok(v.to_integer())
    }

    fn integer_or(&self, name: &str, default: u64) -> Result<u64> {
        if self.get(name).is_some() {
            self.integer(name)
        } else {
            Ok(default)
        }
    }

    fn density(&self, name: &str) -> Result<Density> {
        let v = self.require(name)?;
        Density::rational(v)
            .map_err(|_| Error::BindingViolation(format!("{name} must lie in (0,1]")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Fraction)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Parses an integer, `a/b`, or a decimal such as `0.25`.
pub fn parse_fraction(s: &str) -> Option<Fraction> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0).then(|| Fraction::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let den = 10u64.checked_pow(digits)?;
        let int: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().ok()?
        };
        return Some(Fraction::new(int.checked_mul(den)?.checked_add(frac)?, den));
    }
    s.parse().ok().map(Fraction::from_integer)
}

impl FromStr for Binding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut b = Binding::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::BindingViolation(format!("expected name=value, got {item}"))
            })?;
            let value = parse_fraction(v)
                .ok_or_else(|| Error::BindingViolation(format!("cannot read value of {k}: {v}")))?;
            b.0.insert(k.trim().to_string(), value);
        }
        Ok(b)
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaName {
    Monotonicity,
    Projection,
    Partition,
    NewPartition,
    HardSeed,
    ColumnPartition,
    Transpose,
    Robust9_16,
}

impl LemmaName {
    pub const ALL: [LemmaName; 8] = [
        LemmaName::Monotonicity,
        LemmaName::Projection,
        LemmaName::Partition,
        LemmaName::NewPartition,
        LemmaName::HardSeed,
        LemmaName::ColumnPartition,
        LemmaName::Transpose,
        LemmaName::Robust9_16,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaName::Monotonicity => "monotonicity",
            LemmaName::Projection => "projection",
            LemmaName::Partition => "partition",
            LemmaName::NewPartition => "new_partition",
            LemmaName::HardSeed => "hard_seed",
            LemmaName::ColumnPartition => "column_partition",
            LemmaName::Transpose => "transpose",
            LemmaName::Robust9_16 => "robust9_16",
        }
    }
}

impl FromStr for LemmaName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown lemma {s}")))
    }
}

#[derive(Clone, Debug)]
pub struct LemmaCheckResult {
    pub lemma: String,
    pub binding: Binding,
    pub premises: Vec<Part>,
    pub conclusions: Vec<Part>,
    pub verdict: Verdict,
}

impl LemmaCheckResult {
    fn new(lemma: &str, binding: Binding, premises: Vec<Part>, conclusions: Vec<Part>) -> Self {
        let verdict = judge(&premises, &conclusions);
        LemmaCheckResult {
            lemma: lemma.to_string(),
            binding,
            premises,
            conclusions,
            verdict,
        }
    }

    /// The conclusion shown in one-line reports: the first violated one,
    /// otherwise the first.
    pub fn headline(&self) -> Option<&Part> {
        self.conclusions
            .iter()
            .find(|p| !p.holds())
            .or(self.conclusions.first())
    }

    pub fn left(&self) -> Option<Bound> {
        self.headline().map(|p| p.left)
    }

    pub fn right(&self) -> Option<Bound> {
        self.headline().map(|p| p.right)
    }

    pub fn exact(&self) -> bool {
        self.premises
            .iter()
            .chain(&self.conclusions)
            .all(|p| p.exact)
    }

    /// `LEMMA name verdict left right`.
    pub fn machine_line(&self) -> String {
        let show = |b: Option<Bound>| b.map_or_else(|| "-".to_string(), |b| b.to_string());
        format!(
            "LEMMA {} {} {} {}",
            self.lemma,
            self.verdict.as_str(),
            show(self.left()),
            show(self.right())
        )
    }
}

impl fmt::Display for LemmaCheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lemma {} with {}", self.lemma, self.binding)?;
        for p in &self.premises {
            writeln!(f, "  premise    {p}")?;
        }
        for p in &self.conclusions {
            writeln!(f, "  conclusion {p}")?;
        }
        write!(f, "  verdict    {}", self.verdict.as_str())
    }
}

fn judge(premises: &[Part], conclusions: &[Part]) -> Verdict {
    if premises.iter().any(|p| p.exact && !p.holds()) {
        return Verdict::VacuousPass;
    }
    if conclusions.iter().any(|p| p.exact && !p.holds()) {
        return if premises.iter().all(|p| p.exact) {
            Verdict::Fail
        } else {
            Verdict::NotExact
        };
    }
    if premises.iter().chain(conclusions).all(|p| p.exact) {
        Verdict::Pass
    } else {
        Verdict::NotExact
    }
}

/// A family complexity together with whether it is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Valued {
    pub value: u32,
    pub exact: bool,
}

type FamilyKey = (usize, usize, Vec<bool>, usize, Density, Density);

/// Evaluates family complexities with a shared solver and cache.
pub struct Harness {
    solver: Solver,
    cap: u64,
    samples: u64,
    cache: HashMap<FamilyKey, Valued>,
}

impl Default for Harness {
    fn default() -> Self {
        Self::new()
    }
}

fn part(
    label: impl Into<String>,
    left: Bound,
    relation: Relation,
    right: Bound,
    exact: bool,
) -> Part {
    Part {
        label: label.into(),
        left,
        relation,
        right,
        exact,
    }
}

fn frac(n: u64, d: u64) -> Fraction {
    Fraction::new(n, d)
}

fn pow2_neg(b: u64) -> Result<Fraction> {
    if b >= 63 {
        return Err(Error::BindingViolation("b too large".into()));
    }
    Ok(frac(1, 1 << b))
}

fn check_delta(delta: Fraction) -> Result<()> {
    if delta.is_zero() || delta > DELTA_MAX {
        return Err(Error::BindingViolation(format!(
            "delta must lie in (0, {DELTA_MAX}]"
        )));
    }
    Ok(())
}

/// `⌈log₂(p + log₂ y)⌉ + 1`, or `−∞` when `p + log₂ y ≤ 0`. Very negative
/// values are clipped from above at −15, which keeps `≥` checks sound.
pub fn hard_seed_bound(p: u64, y: Fraction) -> Bound {
    let a = BigUint::from(*y.numer());
    let b = BigUint::from(*y.denom());
    // 2^(p + log y) = 2^p a / b
    let lhs = &a << p as usize;
    if lhs <= b {
        return Bound::NegInfinity;
    }
    // P(k): 2^p a / b ≤ 2^(2^k)
    let holds = |k: i64| -> bool {
        if k >= 0 {
            lhs <= &b << (1usize << k)
        } else {
            let j = (-k) as u32;
            let e = 1u32 << j;
            num_traits::pow(lhs.clone(), e as usize) <= num_traits::pow(b.clone(), e as usize) * 2u8
        }
    };
    let mut k = ceil_log2(p) as i64;
    while k > -16 && holds(k - 1) {
        k -= 1;
    }
    Bound::Value(k + 1)
}

impl Harness {
    pub fn new() -> Self {
        Self::with_limits(DEFAULT_ENUMERATION_CAP, DEFAULT_SAMPLES)
    }

    /// `samples = 0` turns oversized families into `FamilyTooLarge` errors.
    pub fn with_limits(cap: u64, samples: u64) -> Self {
        Harness {
            solver: Solver::new(),
            cap,
            samples,
            cache: HashMap::new(),
        }
    }

    pub fn solver(&mut self) -> &mut Solver {
        &mut self.solver
    }

    pub fn matrix_complexity(&mut self, m: &BooleanMatrix) -> Result<u32> {
        self.solver.value(m)
    }

    pub fn comp(&mut self, m: &BooleanMatrix, p: usize, x: Density, y: Density) -> Result<Valued> {
        let bits: Vec<bool> = (0..m.n_rows()).flat_map(|i| m.row_bits(i)).collect();
        let key = (m.n_rows(), m.n_cols(), bits, p, x, y);
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let spec = BracketSpec::new(m.clone(), p, x, y)?;
        let r = family_complexity_with(&spec, self.cap, self.samples, 0, &mut self.solver)?;
        let v = Valued {
            value: r.value,
            exact: r.exact,
        };
        self.cache.insert(key, v);
        Ok(v)
    }

    /// Conditions 1 and 2 of `(δ,b)`-robustness.
    pub fn check_robustness(
        &mut self,
        m: &BooleanMatrix,
        delta: Fraction,
        b: u32,
    ) -> Result<LemmaCheckResult> {
        check_delta(delta)?;
        let binding = Binding::new()
            .with("delta", delta)
            .with("b", Fraction::from_integer(b as u64));
        let conditions = self.robust_conditions(m, delta, b)?;
        Ok(LemmaCheckResult::new(
            "robustness",
            binding,
            Vec::new(),
            conditions,
        ))
    }

    fn robust_conditions(
        &mut self,
        m: &BooleanMatrix,
        delta: Fraction,
        b: u32,
    ) -> Result<Vec<Part>> {
        let d = self.matrix_complexity(m)?;
        let x = Density::rational(pow2_neg(b as u64)?)?;
        let y = Density::rational(frac(1, 2) + delta)?;
        let c2 = self.comp(m, 1, x, y)?;
        Ok(alloc::vec![
            part(
                "condition 1: D(M) >= 1",
                d.into(),
                Relation::Ge,
                Bound::Value(1),
                true
            ),
            part(
                "condition 2: comp[M]^1_{2^-b,1/2+delta} >= D(M)",
                c2.value.into(),
                Relation::Ge,
                d.into(),
                c2.exact
            ),
        ])
    }

    /// Conditions 3 to 5 as consequences of robustness. Needs `b ≥ 1` so
    /// that the row fraction `2^(1−b)` of condition 5 is at most 1.
    pub fn check_double_interlace(
        &mut self,
        m: &BooleanMatrix,
        delta: Fraction,
        b: u32,
    ) -> Result<LemmaCheckResult> {
        check_delta(delta)?;
        if b == 0 {
            return Err(Error::BindingViolation("condition 5 needs b >= 1".into()));
        }
        let binding = Binding::new()
            .with("delta", delta)
            .with("b", Fraction::from_integer(b as u64));
        let premises = self.robust_conditions(m, delta, b)?;
        let d: Bound = self.matrix_complexity(m)?.into();
        let x = Density::rational(pow2_neg(b as u64)?)?;
        let x2 = Density::rational(pow2_neg(b as u64 - 1)?)?;
        let c3 = self.comp(m, 1, x, Density::rational(frac(1, 8) + delta / 4)?)?;
        let c4 = self.comp(m, 1, x, Density::rational(frac(1, 4) + delta / 2)?)?;
        let half = frac(1, 2) + delta;
        let c5 = self.comp(m, 2, x2, Density::rational(half * half)?)?;
        let conclusions = alloc::vec![
            part(
                "condition 3: comp[M]^1_{2^-b,1/8+delta/4} >= D(M)-2",
                c3.value.into(),
                Relation::Ge,
                d.plus(-2),
                c3.exact
            ),
            part(
                "condition 3: D(M)-2 >= 1",
                d.plus(-2),
                Relation::Ge,
                Bound::Value(1),
                true
            ),
            part(
                "condition 4: comp[M]^1_{2^-b,1/4+delta/2} >= D(M)-1",
                c4.value.into(),
                Relation::Ge,
                d.plus(-1),
                c4.exact
            ),
            part(
                "condition 5: comp[M]^2_{2^(1-b),(1/2+delta)^2} >= D(M)+1",
                c5.value.into(),
                Relation::Ge,
                d.plus(1),
                c5.exact
            ),
        ];
        Ok(LemmaCheckResult::new(
            "double_interlace",
            binding,
            premises,
            conclusions,
        ))
    }

    pub fn check_named(
        &mut self,
        name: LemmaName,
        m: &BooleanMatrix,
        binding: &Binding,
    ) -> Result<LemmaCheckResult> {
        let (premises, conclusions) = match name {
            LemmaName::Monotonicity => self.monotonicity(m, binding)?,
            LemmaName::Projection => self.projection(m, binding)?,
            LemmaName::Partition => self.partition(m, binding)?,
            LemmaName::NewPartition => self.new_partition(m, binding)?,
            LemmaName::HardSeed => self.hard_seed(m, binding)?,
            LemmaName::ColumnPartition => self.column_partition(m, binding)?,
            LemmaName::Transpose => self.transpose(m, binding)?,
            LemmaName::Robust9_16 => self.robust9_16(m, binding)?,
        };
        Ok(LemmaCheckResult::new(
            name.as_str(),
            binding.clone(),
            premises,
            conclusions,
        ))
    }

    /// `comp[M]^{p'}_{x',y'} ≤ comp[M]^p_{x,y}` for `p' ≤ p`, `x' ≤ x`,
    /// `y' ≤ y`. Primed values are `pp`, `xp`, `yp` and default to the
    /// unprimed ones.
    fn monotonicity(&mut self, m: &BooleanMatrix, b: &Binding) -> Result<(Vec<Part>, Vec<Part>)> {
        let p = b.integer("p")?;
        let (x, y) = (b.density("x")?, b.density("y")?);
        let pp = b.integer_or("pp", p)?;
        let xp = if b.get("xp").is_some() {
            b.density("xp")?
        } else {
            x
        };
        let yp = if b.get("yp").is_some() {
            b.density("yp")?
        } else {
            y
        };
        if pp == 0 || pp > p || xp > x || yp > y {
            return Err(Error::BindingViolation(
                "need 1 <= pp <= p, xp <= x, yp <= y".into(),
            ));
        }
        let small = self.comp(m, pp as usize, xp, yp)?;
        let large = self.comp(m, p as usize, x, y)?;
        Ok((
            Vec::new(),
            alloc::vec![part(
                "comp[M]^pp_{xp,yp} <= comp[M]^p_{x,y}",
                small.value.into(),
                Relation::Le,
                large.value.into(),
                small.exact && large.exact,
            )],
        ))
    }

    /// `comp[M]^p_{x,y} ≥ comp[M]^l_{x,y^(l/p)}` for `1 ≤ l ≤ p`.
    fn projection(&mut self, m: &BooleanMatrix, b: &Binding) -> Result<(Vec<Part>, Vec<Part>)> {
        let p = b.integer("p")?;
        let l = b.integer("l")?;
        if l == 0 || l > p {
            return Err(Error::BindingViolation("need 1 <= l <= p".into()));
        }
        let (x, y) = (b.density("x")?, b.density("y")?);
        let full = self.comp(m, p as usize, x, y)?;
        let proj = self.comp(m, l as usize, x, y.pow(Exponent::new(l, p)))?;
        Ok((
            Vec::new(),
            alloc::vec![part(
                "comp[M]^p_{x,y} >= comp[M]^l_{x,y^(l/p)}",
                full.value.into(),
                Relation::Ge,
                proj.value.into(),
                full.exact && proj.exact,
            )],
        ))
    }

    /// If `comp[M]^{2p}_{2x,y/4} ≥ 1` then both partition inequalities hold.
    /// Needs `0 < x ≤ 1/2`, `τ ∈ [0,1]` with `p(1−τ)` integral, `delta ∈ {0,1}`.
    fn partition(&mut self, m: &BooleanMatrix, b: &Binding) -> Result<(Vec<Part>, Vec<Part>)> {
        let p = b.integer("p")?;
        let delta = b.integer_or("delta", 0)?;
        let tau = b.get("tau").unwrap_or_else(Fraction::zero);
        let xr = b.require("x")?;
        let y = b.density("y")?;
        if p == 0 || delta > 1 || tau > Fraction::one() || xr.is_zero() || xr > frac(1, 2) {
            return Err(Error::BindingViolation(
                "need p >= 1, delta in {0,1}, 0 <= tau <= 1, 0 < x <= 1/2".into(),
            ));
        }
        let rest = Fraction::from_integer(p) * (Fraction::one() - tau);
        if !rest.is_integer() {
            return Err(Error::BindingViolation(
                "p(1 - tau) must be an integer".into(),
            ));
        }
        let x = Density::rational(xr)?;
        let x2 = Density::rational(xr * 2)?;
        let yr = y.as_rational().expect("bound from a fraction");
        let premise = self.comp(m, 2 * p as usize, x2, Density::rational(yr / 4)?)?;
        let a_left = self.comp(m, (2 * p + delta) as usize, x2, y)?;
        let a_right = self.comp(m, (p + delta) as usize, x, y)?;
        let b_left = self.comp(m, 2 * p as usize, x2, y)?;
        let (tn, td) = (*tau.numer(), *tau.denom());
        let first = self.comp(m, p as usize, x, y.pow(Exponent::new(td, tn + td)))?;
        let second = self.comp(
            m,
            rest.to_integer() as usize + 1,
            x,
            y.pow(Exponent::new(tn, tn + td)),
        )?;
        let min = first.value.min(second.value);
        Ok((
            alloc::vec![part("comp[M]^2p_{2x,y/4} >= 1", premise.value.into(), Relation::Ge, Bound::Value(1), premise.exact)],
            alloc::vec![
                part(
                    "comp[M]^(2p+delta)_{2x,y} >= 1 + comp[M]^(p+delta)_{x,y}",
                    a_left.value.into(),
                    Relation::Ge,
                    Bound::from(a_right.value).plus(1),
                    a_left.exact && a_right.exact,
                ),
                part(
                    "comp[M]^2p_{2x,y} >= 1 + min(comp[M]^p_{x,y^(1/(1+tau))}, comp[M]^(p(1-tau)+1)_{x,y^(tau/(1+tau))})",
                    b_left.value.into(),
                    Relation::Ge,
                    Bound::from(min).plus(1),
                    b_left.exact && first.exact && second.exact,
                ),
            ],
        ))
    }

    /// If `comp[M]^p_{x,y/4} ≥ 1` and `(ρ−1)^k ≤ ρ^(k−s)` then
    /// `comp[M]^{2^k((ρ−1)/(ρ−2))^s p}_{2^k x, y^(ρ^s)} ≥ k + comp[M]^p_{x,y}`.
    fn new_partition(&mut self, m: &BooleanMatrix, b: &Binding) -> Result<(Vec<Part>, Vec<Part>)> {
        let k = b.integer("k")?;
        let s = b.integer("s")?;
        let p = b.integer("p")?;
        let rho = b.require("rho")?;
        let xr = b.require("x")?;
        let y = b.density("y")?;
        if s > k || p == 0 || rho <= Fraction::from_integer(2) || k >= 62 {
            return Err(Error::BindingViolation(
                "need s <= k, p >= 1, rho > 2".into(),
            ));
        }
        if xr.is_zero() || xr > frac(1, 1 << k) {
            return Err(Error::BindingViolation("need 0 < x <= 2^-k".into()));
        }
        let ratio = (rho - 1) / (rho - 2);
        let big_p = num_traits::pow(ratio, s as usize) * Fraction::from_integer((1 << k) * p);
        if !big_p.is_integer() {
            return Err(Error::BindingViolation(
                "2^k ((rho-1)/(rho-2))^s p must be an integer".into(),
            ));
        }
        let lhs = num_traits::pow(rho - 1, k as usize);
        let rhs = num_traits::pow(rho, (k - s) as usize);
        let yr = y.as_rational().expect("bound from a fraction");
        let premise = self.comp(
            m,
            p as usize,
            Density::rational(xr)?,
            Density::rational(yr / 4)?,
        )?;
        let rho_s = num_traits::pow(rho, s as usize);
        let left = self.comp(
            m,
            big_p.to_integer() as usize,
            Density::rational(xr * (1 << k))?,
            y.pow(Exponent::new(*rho_s.numer(), *rho_s.denom())),
        )?;
        let right = self.comp(m, p as usize, Density::rational(xr)?, y)?;
        // the arithmetic premise is reported as 0/1 on the left against 1
        let arith = Bound::Value(i64::from(lhs <= rhs));
        Ok((
            alloc::vec![
                part(
                    "comp[M]^p_{x,y/4} >= 1",
                    premise.value.into(),
                    Relation::Ge,
                    Bound::Value(1),
                    premise.exact
                ),
                part(
                    "[(rho-1)^k <= rho^(k-s)]",
                    arith,
                    Relation::Ge,
                    Bound::Value(1),
                    true
                ),
            ],
            alloc::vec![part(
                "comp[M]^P_{2^k x,y^(rho^s)} >= k + comp[M]^p_{x,y}",
                left.value.into(),
                Relation::Ge,
                Bound::from(right.value).plus(k as i64),
                left.exact && right.exact,
            )],
        ))
    }

    /// `comp[φ]^p_{x,y} ≥ ⌈log(p + log y)⌉ + 1`; `M` must be `φ` up to
    /// permutation and duplication.
    fn hard_seed(&mut self, m: &BooleanMatrix, b: &Binding) -> Result<(Vec<Part>, Vec<Part>)> {
        if canonicalize(m) != canonicalize(&BooleanMatrix::phi()) {
            return Err(Error::BindingViolation(
                "hard_seed is stated for phi = [1 0]".into(),
            ));
        }
        let p = b.integer("p")?;
        if p == 0 {
            return Err(Error::BindingViolation("need p >= 1".into()));
        }
        let (x, y) = (b.density("x")?, b.density("y")?);
        let left = self.comp(m, p as usize, x, y)?;
        let right = hard_seed_bound(p, y.as_rational().expect("bound from a fraction"));
        Ok((
            Vec::new(),
            alloc::vec![part(
                "comp[phi]^p_{x,y} >= ceil(log(p + log y)) + 1",
                left.value.into(),
                Relation::Ge,
                right,
                left.exact,
            )],
        ))
    }

    /// `k + m + comp[φ]^p_{x,y} ≥ comp[φ]^p_{min(1,2^k x),min(1,2^m y)}`;
    /// `M` must be `φ` up to permutation and duplication.
    fn column_partition(
        &mut self,
        mat: &BooleanMatrix,
        b: &Binding,
    ) -> Result<(Vec<Part>, Vec<Part>)> {
        if canonicalize(mat) != canonicalize(&BooleanMatrix::phi()) {
            return Err(Error::BindingViolation(
                "column_partition is stated for phi = [1 0]".into(),
            ));
        }
        let p = b.integer("p")?;
        let k = b.integer("k")?;
        let m = b.integer("m")?;
        let (x, y) = (b.density("x")?, b.density("y")?);
        if p == 0 || k > 32 || m > 32 {
            return Err(Error::BindingViolation("need p >= 1 and k, m <= 32".into()));
        }
        let base = self.comp(mat, p as usize, x, y)?;
        let xs = x.scale_pow2_capped(k as u32).expect("rational");
        let ys = y.scale_pow2_capped(m as u32).expect("rational");
        let scaled = self.comp(mat, p as usize, xs, ys)?;
        Ok((
            Vec::new(),
            alloc::vec![part(
                "k + m + comp[M]^p_{x,y} >= comp[M]^p_{min(1,2^k x),min(1,2^m y)}",
                Bound::from(base.value).plus((k + m) as i64),
                Relation::Ge,
                scaled.value.into(),
                base.exact && scaled.exact,
            )],
        ))
    }

    /// `comp[M]^1_{x,y} = comp[Mᵀ]^1_{y,x}`.
    fn transpose(&mut self, m: &BooleanMatrix, b: &Binding) -> Result<(Vec<Part>, Vec<Part>)> {
        let (x, y) = (b.density("x")?, b.density("y")?);
        let direct = self.comp(m, 1, x, y)?;
        let swapped = self.comp(&m.transpose(), 1, y, x)?;
        Ok((
            Vec::new(),
            alloc::vec![part(
                "comp[M]^1_{x,y} == comp[M^T]^1_{y,x}",
                direct.value.into(),
                Relation::Eq,
                swapped.value.into(),
                direct.exact && swapped.exact,
            )],
        ))
    }

    /// For a `(δ,b)`-robust `M` with `3 ≤ D(M) ≤ b`:
    /// `comp[M]^{2^p+1}_{2^(p−b+1),1/2+δ} ≥ D(M)+p+1 ≥ D(⟨M⟩^{2^(p+1)})`.
    /// Limited to `p ∈ {0,1}`.
    fn robust9_16(&mut self, m: &BooleanMatrix, b: &Binding) -> Result<(Vec<Part>, Vec<Part>)> {
        let p = b.integer("p")?;
        let depth = b.integer("b")?;
        let delta = b.require("delta")?;
        check_delta(delta)?;
        if p > 1 {
            return Err(Error::BindingViolation(
                "robust9_16 is checked for p in {0,1} only".into(),
            ));
        }
        let mut premises = self.robust_conditions(m, delta, depth as u32)?;
        let d = self.matrix_complexity(m)?;
        premises.push(part(
            "3 <= D(M)",
            d.into(),
            Relation::Ge,
            Bound::Value(3),
            true,
        ));
        premises.push(part(
            "D(M) <= b",
            d.into(),
            Relation::Le,
            Bound::Value(depth as i64),
            true,
        ));
        if premises.iter().any(|q| q.exact && !q.holds()) {
            return Ok((premises, Vec::new()));
        }
        let x = Density::rational(pow2_neg(depth - p - 1)?)?;
        let y = Density::rational(frac(1, 2) + delta)?;
        let family = self.comp(m, (1 << p) + 1, x, y)?;
        let interlaced = k_fold_interlace(m, 1 << (p + 1))?;
        let top = self.solver.value(&interlaced)?;
        let mid = Bound::from(d).plus(p as i64 + 1);
        Ok((
            premises,
            alloc::vec![
                part(
                    "comp[M]^(2^p+1)_{2^(p-b+1),1/2+delta} >= D(M)+p+1",
                    family.value.into(),
                    Relation::Ge,
                    mid,
                    family.exact
                ),
                part(
                    "D(M)+p+1 >= D(<M>^(2^(p+1)))",
                    mid,
                    Relation::Ge,
                    top.into(),
                    true
                ),
            ],
        ))
    }
}
