//! Arithmetic in GF(2^m) for 2 ≤ m ≤ 24, over a fixed table of irreducible
//! polynomials so that every construction is reproducible.

use crate::{Error, Result};

pub const MIN_DEGREE: u32 = 2;
pub const MAX_DEGREE: u32 = 24;

/// Irreducible polynomial of each degree, leading term included.
/// `0x13` is `x^4 + x + 1`.
const IRREDUCIBLE: [u64; 25] = [
    0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B, 0x20009, 0x40081, 0x80027, 0x100009, 0x200005, 0x400003, 0x800021, 0x1000087,
];

pub fn irreducible(degree: u32) -> Option<u64> {
    (MIN_DEGREE..=MAX_DEGREE)
        .contains(&degree)
        .then(|| IRREDUCIBLE[degree as usize])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2m {
    degree: u32,
    modulus: u64,
}

impl Gf2m {
    pub fn new(degree: u32) -> Result<Self> {
        let modulus = irreducible(degree).ok_or(Error::DegreeOverflow {
            degree,
            max: MAX_DEGREE,
        })?;
        Ok(Gf2m { degree, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        1 << self.degree
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.modulus, self.degree)
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }
}

#[inline]
fn mul_mod(mut a: u64, mut b: u64, modulus: u64, degree: u32) -> u64 {
    let top = 1u64 << degree;
    let mut r = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    r
}

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test: `f` of degree `m` is irreducible iff `x^(2^m) ≡ x (mod f)`
/// and `gcd(x^(2^(m/r)) − x, f) = 1` for every prime `r | m`.
pub fn is_irreducible(f: u64) -> bool {
    let m = poly_degree(f);
    if !(1..=62).contains(&m) {
        return false;
    }
    let m = m as u32;
    let x = poly_rem(0b10, f);
    let frob = |k: u32| {
        let mut v = x;
        for _ in 0..k {
            v = mul_mod(v, v, f, m);
        }
        v
    };
    if frob(m) != x {
        return false;
    }
    let mut n = m;
    let mut r = 2;
    while n > 1 {
        if n.is_multiple_of(r) {
            while n.is_multiple_of(r) {
                n /= r;
            }
            let h = frob(m / r) ^ x;
            if poly_gcd(f, h) != 1 {
                return false;
            }
        }
        r += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_table_is_irreducible() {
        for m in MIN_DEGREE..=MAX_DEGREE {
            let f = irreducible(m).unwrap();
            assert_eq!(poly_degree(f), m as i32);
            assert!(is_irreducible(f), "degree {m}");
        }
    }

    #[test]
    fn rabin_rejects_reducibles() {
        // x^2 + 1 = (x + 1)^2, x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert!(!is_irreducible(0b101));
        assert!(!is_irreducible(0b10101));
        assert!(is_irreducible(0b111));
        // x^6 + x^3 + 1 is irreducible, x^6 + x + 1 too; x^6 + x^5 + x^4 + x^3 + x^2 + x + 1 is not
        assert!(is_irreducible(0b1001001));
        assert!(!is_irreducible(0b1111111));
    }

    #[test]
    fn multiplicative_group_order() {
        for m in [2, 3, 5, 8, 11] {
            let f = Gf2m::new(m).unwrap();
            for a in 1..f.order().min(300) {
                assert_eq!(f.pow(a, f.order() - 1), 1);
            }
        }
    }

    #[test]
    fn degree_out_of_table() {
        assert!(matches!(
            Gf2m::new(25),
            Err(Error::DegreeOverflow { degree: 25, .. })
        ));
        assert!(Gf2m::new(1).is_err());
    }
}
