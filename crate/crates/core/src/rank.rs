//! Rank-based lower bounds on communication complexity.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::grid::Grid;
use crate::BooleanMatrix;

/// `⌈log₂ n⌉`, with `0` for `n ≤ 1`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn rational_rank(m: &BooleanMatrix) -> usize {
    bareiss_rank(&m.grid().dedup().0)
}

/// `⌈log₂ rank_ℚ(M)⌉`; never exceeds `D(M)`.
pub fn real_rank_lower_bound(m: &BooleanMatrix) -> u32 {
    ceil_log2(rational_rank(m) as u64)
}

pub(crate) fn bareiss_rank(g: &Grid) -> usize {
    let (r, c) = (g.rows(), g.cols());
    let mut a: Vec<Vec<BigInt>> = (0..r)
        .map(|i| (0..c).map(|j| BigInt::from(g.get(i, j) as u8)).collect())
        .collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..c {
        if rank == r {
            break;
        }
        let Some(p) = (rank..r).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..r {
            for j in col + 1..c {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

/// Rank modulo a large prime. Never exceeds the rational rank.
fn mod_p_rank(rows: usize, cols: usize, entry: impl Fn(usize, usize) -> bool) -> usize {
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|i| (0..cols).map(|j| entry(i, j) as u64).collect())
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let inv = pow_mod(a[rank][col], PRIME - 2);
        for i in rank + 1..rows {
            if a[i][col] == 0 {
                continue;
            }
            let f = mul_mod(a[i][col], inv);
            for j in col..cols {
                let sub = mul_mod(f, a[rank][j]);
                a[i][j] = (a[i][j] + PRIME - sub) % PRIME;
            }
        }
        rank += 1;
    }
    rank
}

/// `⌈log₂(rank(M) + rank(J − M))⌉`: a protocol tree has at least that many
/// leaves, one monochromatic rectangle per leaf.
pub(crate) fn leaf_lower_bound(g: &Grid) -> u32 {
    let ones = mod_p_rank(g.rows(), g.cols(), |i, j| g.get(i, j));
    let zeros = mod_p_rank(g.rows(), g.cols(), |i, j| !g.get(i, j));
    ceil_log2((ones + zeros) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize) -> BooleanMatrix {
        let bits: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        BooleanMatrix::from_bits(&bits).unwrap()
    }

    #[test]
    fn zeros_give_zero() {
        let z = BooleanMatrix::from_strs(&["000", "000"]).unwrap();
        assert_eq!(rational_rank(&z), 0);
        assert_eq!(real_rank_lower_bound(&z), 0);
    }

    #[test]
    fn identity_four() {
        assert_eq!(rational_rank(&identity(4)), 4);
        assert_eq!(real_rank_lower_bound(&identity(4)), 2);
        assert_eq!(leaf_lower_bound(identity(4).grid()), 3);
    }

    #[test]
    fn rank_deficient_needs_column_skips() {
        let m = BooleanMatrix::from_strs(&["0110", "0011", "0101", "0000"]).unwrap();
        assert_eq!(rational_rank(&m), 3);
        let n = BooleanMatrix::from_strs(&["110", "011", "101"]).unwrap();
        assert_eq!(rational_rank(&n), 3);
        let k = BooleanMatrix::from_strs(&["1100", "0011", "1111"]).unwrap();
        assert_eq!(rational_rank(&k), 2);
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<u32> = (0..10).map(ceil_log2).collect();
        assert_eq!(got, [0, 0, 1, 2, 2, 3, 3, 3, 3, 4]);
    }
}
