//! `(q,t)`-balanced column sets: multisets of `q`-tuples over an alphabet
//! whose marginals on any `t` coordinates are close to uniform.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::binomial;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::rank::ceil_log2;
use crate::small_bias::{build_with_degree, degree_for_bias, DEFAULT_MAX_SAMPLES};
use crate::{Error, Fraction, Label, Result};

pub const DEFAULT_VERIFY_BUDGET: u128 = 10_000_000;
pub const FULL_PRODUCT_LIMIT: u128 = 1 << 20;
const SAMPLED_SETS_PER_SIZE: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Powering construction over GF(2^degree) with the given modulus.
    Aghp {
        degree: u32,
        modulus: u64,
        samples: u64,
    },
    FullProduct {
        samples: u64,
    },
}

impl Generator {
    /// Size of the underlying bit-string multiset before dropping.
    pub fn samples(&self) -> u64 {
        match *self {
            Generator::Aghp { samples, .. } | Generator::FullProduct { samples } => samples,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BalancedColumnSet {
    q: usize,
    t: usize,
    alphabet: Vec<Label>,
    epsilon: Fraction,
    realized: Fraction,
    realized_exact: bool,
    generator: Generator,
    entries: Vec<(Vec<u32>, u64)>,
    total: u64,
}

/// `min(2^-(t⌈log p⌉ + 2), 1/q²)`.
pub fn default_epsilon(q: usize, t: usize, p: usize) -> Fraction {
    let shift = t as u32 * ceil_log2(p as u64) + 2;
    let a = if shift < 63 {
        Fraction::new(1, 1 << shift)
    } else {
        Fraction::new(1, 1 << 62)
    };
    let b = Fraction::new(1, (q as u64).saturating_mul(q as u64).max(1));
    a.min(b)
}

fn check_shape(q: usize, t: usize, alphabet: &[Label]) -> Result<()> {
    if t == 0 || t > q {
        return Err(Error::InvalidParameter(alloc::format!(
            "need 1 <= t <= q, got t={t} q={q}"
        )));
    }
    if alphabet.len() < 2 {
        return Err(Error::InvalidParameter(
            "alphabet needs at least two symbols".into(),
        ));
    }
    let mut sorted: Vec<&Label> = alphabet.iter().collect();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateLabel(w[0].clone()));
    }
    Ok(())
}

/// Builds `S_{q,t}(C)`: an ε/2^{tℓ}-biased space on `qℓ` bits, decoded
/// block-wise (symbol `i` of `C` is the `ℓ`-bit big-endian number `i`),
/// dropping every tuple containing an unused codeword.
pub fn build_balanced_set(
    q: usize,
    t: usize,
    alphabet: &[Label],
    epsilon: Fraction,
) -> Result<BalancedColumnSet> {
    build_balanced_set_with(q, t, alphabet, epsilon, DEFAULT_MAX_SAMPLES)
}

pub fn build_balanced_set_with(
    q: usize,
    t: usize,
    alphabet: &[Label],
    epsilon: Fraction,
    max_samples: u64,
) -> Result<BalancedColumnSet> {
    check_shape(q, t, alphabet)?;
    if *epsilon.numer() == 0 || epsilon >= Fraction::from_integer(1) {
        return Err(Error::InvalidParameter("epsilon must lie in (0,1)".into()));
    }
    let p = alphabet.len();
    let ell = ceil_log2(p as u64) as usize;
    let shift = t * ell;
    let denom = (*epsilon.denom() as u128)
        .checked_shl(shift as u32)
        .filter(|d| d >> shift == *epsilon.denom() as u128)
        .ok_or(Error::DegreeOverflow {
            degree: shift as u32,
            max: crate::gf2m::MAX_DEGREE,
        })?;
    let m = degree_for_bias(q * ell, *epsilon.numer() as u128, denom)?;
    let space = build_with_degree(q * ell, m, max_samples)?;
    let mask = (1u128 << ell) - 1;
    let mut entries = Vec::new();
    'samples: for (bits, count) in space.entries() {
        let mut tuple = Vec::with_capacity(q);
        for block in 0..q {
            let raw = (bits >> (block * ell)) & mask;
            // bit block·ℓ is the most significant bit of the symbol
            let sym = (raw.reverse_bits() >> (128 - ell)) as usize;
            if sym >= p {
                continue 'samples;
            }
            tuple.push(sym as u32);
        }
        entries.push((tuple, count));
    }
    if entries.is_empty() {
        return Err(Error::EmptyReservoir);
    }
    entries.sort_unstable();
    let generator = Generator::Aghp {
        degree: m,
        modulus: space.field().modulus(),
        samples: space.len(),
    };
    Ok(BalancedColumnSet::assemble(
        q,
        t,
        alphabet.to_vec(),
        epsilon,
        generator,
        entries,
    ))
}

/// The complete product `C^q`, each tuple once; accuracy 0.
pub fn full_product(q: usize, t: usize, alphabet: &[Label]) -> Result<BalancedColumnSet> {
    check_shape(q, t, alphabet)?;
    let p = alphabet.len();
    let size = (p as u128).checked_pow(q as u32).unwrap_or(u128::MAX);
    if size > FULL_PRODUCT_LIMIT {
        return Err(Error::SizeOverflow {
            cells: size,
            budget: FULL_PRODUCT_LIMIT,
        });
    }
    let mut entries = Vec::with_capacity(size as usize);
    let mut digits = vec![0u32; q];
    for _ in 0..size {
        entries.push((digits.clone(), 1));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if (*d as usize) < p {
                break;
            }
            *d = 0;
        }
    }
    let generator = Generator::FullProduct {
        samples: size as u64,
    };
    Ok(BalancedColumnSet::assemble(
        q,
        t,
        alphabet.to_vec(),
        Fraction::from_integer(0),
        generator,
        entries,
    ))
}

impl BalancedColumnSet {
    fn assemble(
        q: usize,
        t: usize,
        alphabet: Vec<Label>,
        epsilon: Fraction,
        generator: Generator,
        entries: Vec<(Vec<u32>, u64)>,
    ) -> Self {
        let total = entries.iter().map(|e| e.1).sum();
        let mut s = BalancedColumnSet {
            q,
            t,
            alphabet,
            epsilon,
            realized: Fraction::from_integer(0),
            realized_exact: true,
            generator,
            entries,
            total,
        };
        let report = verify_balance(&s);
        s.realized = report.max_deviation;
        s.realized_exact = report.mode == BalanceMode::Exhaustive;
        s
    }

    /// Rebuilds a set from an explicit tuple multiset, e.g. one read from a
    /// file. The realized accuracy is re-measured.
    pub fn from_tuples(
        q: usize,
        t: usize,
        alphabet: Vec<Label>,
        epsilon: Fraction,
        generator: Generator,
        tuples: impl IntoIterator<Item = Vec<u32>>,
    ) -> Result<Self> {
        check_shape(q, t, &alphabet)?;
        let mut all: Vec<Vec<u32>> = tuples.into_iter().collect();
        if all.is_empty() {
            return Err(Error::EmptyReservoir);
        }
        for tuple in &all {
            if tuple.len() != q || tuple.iter().any(|&c| c as usize >= alphabet.len()) {
                return Err(Error::Shape(alloc::format!(
                    "bad reservoir tuple {tuple:?}"
                )));
            }
        }
        all.sort_unstable();
        let mut entries: Vec<(Vec<u32>, u64)> = Vec::new();
        for tuple in all {
            match entries.last_mut() {
                Some((last, n)) if *last == tuple => *n += 1,
                _ => entries.push((tuple, 1)),
            }
        }
        Ok(Self::assemble(q, t, alphabet, epsilon, generator, entries))
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn p(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    /// The target accuracy the set was built for.
    pub fn epsilon(&self) -> Fraction {
        self.epsilon
    }

    /// Largest relative deviation measured over `|J| ≤ t` projections.
    pub fn realized_epsilon(&self) -> Fraction {
        self.realized
    }

    /// Whether the realized accuracy came from exhaustive verification.
    pub fn realized_exact(&self) -> bool {
        self.realized_exact
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Distinct tuples (alphabet indices) with multiplicities, ascending.
    pub fn entries(&self) -> &[(Vec<u32>, u64)] {
        &self.entries
    }

    /// Size counted with multiplicity.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Every tuple, repeated by multiplicity.
    pub fn iter_multiset(&self) -> impl Iterator<Item = &[u32]> {
        self.entries
            .iter()
            .flat_map(|(t, n)| core::iter::repeat_n(t.as_slice(), *n as usize))
    }

    /// `(qℓ · 2^{tℓ} / ε)²`, rounded up; `None` for ε = 0.
    pub fn size_bound(&self) -> Option<BigUint> {
        if *self.epsilon.numer() == 0 {
            return None;
        }
        let ell = ceil_log2(self.p() as u64) as usize;
        let num = BigUint::from((self.q * ell) as u64)
            * (BigUint::from(1u8) << (self.t * ell))
            * BigUint::from(*self.epsilon.denom());
        let den = BigUint::from(*self.epsilon.numer());
        let root = (&num + &den - 1u8) / &den;
        Some(&root * &root)
    }

    /// `samples ≤ 4 · size_bound`.
    pub fn within_size_bound(&self) -> bool {
        match self.size_bound() {
            None => true,
            Some(b) => BigUint::from(self.generator.samples()) <= b * 4u8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceMode {
    Exhaustive,
    /// Only `index_sets` randomly drawn sets per projection size were tested.
    Sampled {
        index_sets: usize,
    },
}

/// The worst projection of one size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionWorst {
    pub size: usize,
    /// Zero-based coordinates.
    pub index_set: Vec<usize>,
    pub pattern: Vec<u32>,
    /// `|freq · p^|J| − 1|`.
    pub deviation: Fraction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    pub per_size: Vec<ProjectionWorst>,
    pub max_deviation: Fraction,
    pub epsilon: Fraction,
    pub mode: BalanceMode,
    pub pass: bool,
}

pub fn verify_balance(s: &BalancedColumnSet) -> BalanceReport {
    verify_balance_with(s, DEFAULT_VERIFY_BUDGET, 0)
}

/// Exhaustive when `C(q,t) · p^t ≤ budget`; otherwise a fixed number of
/// index sets per size is drawn from a ChaCha stream seeded with `seed`.
pub fn verify_balance_with(s: &BalancedColumnSet, budget: u128, seed: u64) -> BalanceReport {
    let (q, t, p) = (s.q, s.t, s.p() as u128);
    let checks = binomial(q as u128, t as u128).saturating_mul(p.saturating_pow(t as u32));
    let mode = if checks <= budget {
        BalanceMode::Exhaustive
    } else {
        BalanceMode::Sampled {
            index_sets: SAMPLED_SETS_PER_SIZE,
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_size = Vec::with_capacity(t);
    for size in 1..=t {
        let sets: Vec<Vec<usize>> = match mode {
            BalanceMode::Exhaustive => combinations(q, size),
            BalanceMode::Sampled { index_sets } => (0..index_sets)
                .map(|_| {
                    let mut j = sample(&mut rng, q, size).into_vec();
                    j.sort_unstable();
                    j
                })
                .collect(),
        };
        let mut worst: Option<ProjectionWorst> = None;
        for j in sets {
            let (pattern, deviation) = worst_pattern(s, &j);
            if worst.as_ref().is_none_or(|w| deviation > w.deviation) {
                worst = Some(ProjectionWorst {
                    size,
                    index_set: j,
                    pattern,
                    deviation,
                });
            }
        }
        per_size.extend(worst);
    }
    let max_deviation = per_size
        .iter()
        .map(|w| w.deviation)
        .max()
        .unwrap_or_else(|| Fraction::from_integer(0));
    BalanceReport {
        pass: max_deviation <= s.epsilon,
        per_size,
        max_deviation,
        epsilon: s.epsilon,
        mode,
    }
}

fn worst_pattern(s: &BalancedColumnSet, j: &[usize]) -> (Vec<u32>, Fraction) {
    let p = s.p();
    let cells = p.pow(j.len() as u32);
    let mut counts = vec![0u64; cells];
    for (tuple, n) in &s.entries {
        let idx = j.iter().fold(0usize, |acc, &c| acc * p + tuple[c] as usize);
        counts[idx] += n;
    }
    let total = s.total as u128;
    let mut best = (0usize, 0u128);
    for (idx, &c) in counts.iter().enumerate() {
        let diff = (c as u128 * cells as u128).abs_diff(total);
        if idx == 0 || diff > best.1 {
            best = (idx, diff);
        }
    }
    let mut pattern = vec![0u32; j.len()];
    let mut rest = best.0;
    for slot in pattern.iter_mut().rev() {
        *slot = (rest % p) as u32;
        rest /= p;
    }
    (pattern, ratio_up(best.1, total))
}

/// `num/den` as a `Fraction`, rounded up if it does not fit.
fn ratio_up(mut num: u128, mut den: u128) -> Fraction {
    let g = num_integer::gcd(num, den);
    num /= g;
    den /= g;
    while num > u64::MAX as u128 || den > u64::MAX as u128 {
        num = num.div_ceil(2);
        den /= 2;
    }
    Fraction::new(num as u64, den.max(1) as u64)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] != i + n - k) else {
            return out;
        };
        c[i] += 1;
        for x in i + 1..k {
            c[x] = c[x - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(p: i64) -> Vec<Label> {
        (0..p).map(Label::atom).collect()
    }

    #[test]
    fn full_product_is_exact() {
        let s = full_product(2, 2, &bits(2)).unwrap();
        assert_eq!(s.len(), 4);
        let r = verify_balance(&s);
        assert!(r.pass);
        assert_eq!(r.max_deviation, Fraction::from_integer(0));
    }

    #[test]
    fn degenerate_reservoir_fails() {
        let s = BalancedColumnSet::from_tuples(
            3,
            2,
            bits(2),
            Fraction::new(1, 10),
            Generator::FullProduct { samples: 1 },
            [vec![0, 0, 0]],
        )
        .unwrap();
        let r = verify_balance(&s);
        assert!(!r.pass);
        assert_eq!(r.per_size[0].deviation, Fraction::from_integer(1));
        assert_eq!(r.per_size[1].deviation, Fraction::from_integer(3));
    }

    #[test]
    fn default_epsilon_values() {
        assert_eq!(default_epsilon(8, 2, 2), Fraction::new(1, 64));
        assert_eq!(default_epsilon(4, 2, 2), Fraction::new(1, 16));
        assert_eq!(default_epsilon(4, 1, 3), Fraction::new(1, 16));
    }

    #[test]
    fn combination_count() {
        assert_eq!(combinations(8, 2).len(), 28);
        assert_eq!(combinations(5, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(4, 3)[3], vec![1, 2, 3]);
    }

    #[test]
    fn q4_t2_every_block_pair_sees_all_patterns() {
        let s = build_balanced_set(4, 2, &bits(2), default_epsilon(4, 2, 2)).unwrap();
        for j in combinations(4, 2) {
            let mut seen = [false; 4];
            for (t, _) in s.entries() {
                seen[(t[j[0]] * 2 + t[j[1]]) as usize] = true;
            }
            assert!(seen.iter().all(|&x| x));
        }
        assert!(verify_balance(&s).pass);
    }

    #[test]
    fn non_power_of_two_alphabet_drops_codewords() {
        let s = build_balanced_set(3, 1, &bits(3), Fraction::new(1, 8)).unwrap();
        assert!(s.entries().iter().all(|(t, _)| t.iter().all(|&c| c < 3)));
        assert!(s.len() < s.generator().samples());
    }
}
