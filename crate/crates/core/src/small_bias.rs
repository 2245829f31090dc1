//! ε-biased sample spaces by the powering construction: for field elements
//! `x, y ∈ GF(2^m)` the sample has bit `i` equal to `⟨x^i, y⟩`.
//!
//! A nonempty parity over bits `S` is the inner product of `y` with
//! `Σ_{i∈S} x^i`, a nonzero polynomial in `x` of degree below `n`, so its
//! bias is at most `(n − 1)/2^m`.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::gf2m::{Gf2m, MAX_DEGREE, MIN_DEGREE};
use crate::{Error, Fraction, Result};

pub const MAX_BITS: usize = 128;
pub const DEFAULT_MAX_SAMPLES: u64 = 1 << 30;
const DENSE_BITS: usize = 20;

#[derive(Clone, Debug)]
pub struct SmallBiasSpace {
    n_bits: usize,
    field: Gf2m,
    counts: Counts,
}

#[derive(Clone, Debug)]
enum Counts {
    Dense(Vec<u64>),
    Sparse(HashMap<u128, u64>),
}

/// Smallest table degree `m` with `2^m ≥ n_bits / epsilon`.
pub fn field_degree_for(n_bits: usize, epsilon: Fraction) -> Result<u32> {
    if *epsilon.numer() == 0 || epsilon >= Fraction::from_integer(1) {
        return Err(Error::InvalidParameter("epsilon must lie in (0,1)".into()));
    }
    degree_for_bias(n_bits, *epsilon.numer() as u128, *epsilon.denom() as u128)
}

/// Smallest table degree `m` with `2^m · numer ≥ n_bits · denom`.
pub fn degree_for_bias(n_bits: usize, numer: u128, denom: u128) -> Result<u32> {
    let need = (n_bits as u128).checked_mul(denom);
    let mut m = MIN_DEGREE;
    loop {
        match need {
            Some(need) if (numer << m) >= need => return Ok(m),
            _ => {}
        }
        m += 1;
        if m > MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                degree: m,
                max: MAX_DEGREE,
            });
        }
    }
}

pub fn build_eps_biased_space(n_bits: usize, epsilon: Fraction) -> Result<SmallBiasSpace> {
    build_eps_biased_space_with(n_bits, epsilon, DEFAULT_MAX_SAMPLES)
}

pub fn build_eps_biased_space_with(
    n_bits: usize,
    epsilon: Fraction,
    max_samples: u64,
) -> Result<SmallBiasSpace> {
    let m = field_degree_for(n_bits, epsilon)?;
    build_with_degree(n_bits, m, max_samples)
}

/// The space over GF(2^m): `2^(2m)` samples of `n_bits` bits each.
pub fn build_with_degree(n_bits: usize, m: u32, max_samples: u64) -> Result<SmallBiasSpace> {
    if n_bits == 0 || n_bits > MAX_BITS {
        return Err(Error::InvalidParameter(alloc::format!(
            "bit length {n_bits} outside 1..={MAX_BITS}"
        )));
    }
    let field = Gf2m::new(m)?;
    let samples = 1u64 << (2 * m);
    if samples > max_samples {
        return Err(Error::BudgetExceeded {
            what: "small-bias samples",
            limit: max_samples,
        });
    }
    let mut counts = if n_bits <= DENSE_BITS {
        Counts::Dense(vec![0; 1 << n_bits])
    } else {
        Counts::Sparse(HashMap::new())
    };
    let order = field.order();
    let mut powers = vec![0u64; n_bits];
    let mut masks = vec![0u128; m as usize];
    for x in 0..order {
        let mut p = 1u64;
        for slot in powers.iter_mut() {
            *slot = p;
            p = field.mul(p, x);
        }
        // masks[b] holds, for every bit i of the sample, bit b of x^i
        for (b, mask) in masks.iter_mut().enumerate() {
            *mask = powers
                .iter()
                .enumerate()
                .fold(0u128, |acc, (i, &xi)| acc | (((xi >> b) & 1) as u128) << i);
        }
        // walk y in Gray-code order so consecutive samples differ by one mask
        let mut s = 0u128;
        match &mut counts {
            Counts::Dense(c) => {
                c[0] += 1;
                for g in 1..order {
                    s ^= masks[g.trailing_zeros() as usize];
                    c[s as usize] += 1;
                }
            }
            Counts::Sparse(c) => {
                *c.entry(0).or_default() += 1;
                for g in 1..order {
                    s ^= masks[g.trailing_zeros() as usize];
                    *c.entry(s).or_default() += 1;
                }
            }
        }
    }
    Ok(SmallBiasSpace {
        n_bits,
        field,
        counts,
    })
}

impl SmallBiasSpace {
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn field(&self) -> Gf2m {
        self.field
    }

    /// Number of samples, counted with multiplicity: `2^(2m)`.
    pub fn len(&self) -> u64 {
        1 << (2 * self.field.degree())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distinct samples with their multiplicities, ascending. Bit `i` of the
    /// value is bit `i` of the sample.
    pub fn entries(&self) -> Vec<(u128, u64)> {
        let mut out: Vec<(u128, u64)> = match &self.counts {
            Counts::Dense(c) => c
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(v, &n)| (v as u128, n))
                .collect(),
            Counts::Sparse(c) => c.iter().map(|(&v, &n)| (v, n)).collect(),
        };
        out.sort_unstable();
        out
    }

    /// `|Pr[parity of bits in mask = 0] − Pr[= 1]|` over the multiset.
    pub fn bias(&self, mask: u128) -> Fraction {
        let mut even = 0i128;
        for (v, n) in self.entries() {
            if (v & mask).count_ones().is_multiple_of(2) {
                even += n as i128;
            } else {
                even -= n as i128;
            }
        }
        Fraction::new(even.unsigned_abs() as u64, self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bit_is_exactly_balanced() {
        let s = build_eps_biased_space(1, Fraction::new(1, 5)).unwrap();
        assert_eq!(s.bias(1), Fraction::from_integer(0));
        let e = s.entries();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].1, e[1].1);
    }

    #[test]
    fn four_bits_all_parities() {
        let eps = Fraction::new(1, 16);
        let s = build_eps_biased_space(4, eps).unwrap();
        assert_eq!(s.field().degree(), 6);
        assert_eq!(s.len(), 1 << 12);
        for mask in 1..16u128 {
            assert!(s.bias(mask) <= eps, "mask {mask:b}");
        }
    }

    #[test]
    fn degree_choice_is_minimal() {
        assert_eq!(field_degree_for(16, Fraction::new(1, 256)).unwrap(), 12);
        assert_eq!(field_degree_for(17, Fraction::new(1, 256)).unwrap(), 13);
        assert_eq!(field_degree_for(1, Fraction::new(1, 2)).unwrap(), 2);
    }

    #[test]
    fn overflow_and_budget() {
        assert!(matches!(
            field_degree_for(1 << 20, Fraction::new(1, 1 << 10)),
            Err(Error::DegreeOverflow { .. })
        ));
        assert!(matches!(
            build_eps_biased_space_with(8, Fraction::new(1, 1 << 10), 1 << 20),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn wide_samples_use_sparse_counts() {
        let s = build_eps_biased_space(40, Fraction::new(1, 2)).unwrap();
        let total: u64 = s.entries().iter().map(|e| e.1).sum();
        assert_eq!(total, s.len());
    }
}
