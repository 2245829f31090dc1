//! Exact densities of the form `base^exp` with rational `base ∈ (0,1]` and
//! rational `exp ≥ 0`, so that quotas `⌈N · y⌉` are never under-counted.

use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Pow, Zero};

use crate::{Error, Fraction, Result};

pub type Exponent = Ratio<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Density {
    base: Fraction,
    exp: Exponent,
}

impl Density {
    pub fn new(base: Fraction, exp: Exponent) -> Result<Self> {
        if base.is_zero() || base > Fraction::one() {
            return Err(Error::InvalidParameter(alloc::format!(
                "density {base} outside (0,1]"
            )));
        }
        // a zero exponent is the constant 1
        if exp.is_zero() || base.is_one() {
            return Ok(Self::one());
        }
        Ok(Density { base, exp })
    }

    pub fn rational(value: Fraction) -> Result<Self> {
        Self::new(value, Exponent::one())
    }

    pub fn one() -> Self {
        Density {
            base: Fraction::one(),
            exp: Exponent::one(),
        }
    }

    pub fn base(&self) -> Fraction {
        self.base
    }

    pub fn exponent(&self) -> Exponent {
        self.exp
    }

    /// `(base^exp)^e`.
    pub fn pow(&self, e: Exponent) -> Self {
        Self::new(self.base, self.exp * e).expect("base already validated")
    }

    /// The value when it is rational with a small representation.
    pub fn as_rational(&self) -> Option<Fraction> {
        if !self.exp.is_integer() {
            return None;
        }
        let e = u32::try_from(*self.exp.numer()).ok()?;
        let n = self.base.numer().checked_pow(e)?;
        let d = self.base.denom().checked_pow(e)?;
        Some(Fraction::new(n, d))
    }

    /// `min(1, 2^k · value)`; only defined for rational values.
    pub fn scale_pow2_capped(&self, k: u32) -> Option<Self> {
        let v = self.as_rational()?;
        let num = 1u64.checked_shl(k).and_then(|s| v.numer().checked_mul(s));
        let scaled = match num {
            Some(n) if n < *v.denom() => Fraction::new(n, *v.denom()),
            _ => Fraction::one(),
        };
        Some(Self::rational(scaled).expect("positive"))
    }

    /// `⌈n · value⌉`, computed exactly.
    pub fn quota(&self, n: &BigUint) -> BigUint {
        // smallest Q with Q^den · b^num ≥ n^den · a^num, where base = a/b
        let (num, den) = (*self.exp.numer(), *self.exp.denom());
        let a = BigUint::from(*self.base.numer());
        let b = BigUint::from(*self.base.denom());
        let rhs = Pow::pow(n, den) * Pow::pow(&a, num);
        let scale = Pow::pow(&b, num);
        let ok = |q: &BigUint| Pow::pow(q, den) * &scale >= rhs;
        let (mut lo, mut hi) = (BigUint::zero(), n.clone());
        while lo < hi {
            let mid = (&lo + &hi) >> 1;
            if ok(&mid) {
                hi = mid;
            } else {
                lo = mid + 1u8;
            }
        }
        lo
    }

    pub fn quota_u64(&self, n: u64) -> u64 {
        self.quota(&BigUint::from(n))
            .try_into()
            .expect("quota is at most n")
    }
}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> Ordering {
        // compare (a/b)^(n1/d1) with (c/d)^(n2/d2) after raising to d1·d2
        let e1 = *self.exp.numer() * *other.exp.denom();
        let e2 = *other.exp.numer() * *self.exp.denom();
        let lhs = Pow::pow(BigUint::from(*self.base.numer()), e1)
            * Pow::pow(BigUint::from(*other.base.denom()), e2);
        let rhs = Pow::pow(BigUint::from(*other.base.numer()), e2)
            * Pow::pow(BigUint::from(*self.base.denom()), e1);
        lhs.cmp(&rhs)
    }
}

impl From<Fraction> for Density {
    /// Panics unless `0 < value ≤ 1`.
    fn from(value: Fraction) -> Self {
        Density::rational(value).expect("density in (0,1]")
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.is_one() {
            write!(f, "{}", self.base)
        } else {
            write!(f, "({})^({})", self.base, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: u64, d: u64) -> Fraction {
        Fraction::new(n, d)
    }

    #[test]
    fn rational_quota() {
        let half = Density::rational(frac(1, 2)).unwrap();
        assert_eq!(half.quota_u64(2), 1);
        assert_eq!(half.quota_u64(5), 3);
        let six_tenths = Density::rational(frac(6, 10)).unwrap();
        assert_eq!(six_tenths.quota_u64(2), 2);
        assert_eq!(Density::one().quota_u64(7), 7);
    }

    #[test]
    fn root_quota_is_exact() {
        // (1/4)^(1/2) = 1/2 exactly
        let d = Density::new(frac(1, 4), Exponent::new(1, 2)).unwrap();
        assert_eq!(d.quota_u64(16), 8);
        assert_eq!(d, d);
        assert_eq!(
            d.cmp(&Density::rational(frac(1, 2)).unwrap()),
            Ordering::Equal
        );
        // (1/2)^(1/2) ≈ 0.7071 so ⌈16 · 0.7071⌉ = 12
        let r = Density::new(frac(1, 2), Exponent::new(1, 2)).unwrap();
        assert_eq!(r.quota_u64(16), 12);
    }

    #[test]
    fn ordering() {
        let a = Density::rational(frac(1, 2)).unwrap();
        let b = Density::new(frac(1, 2), Exponent::new(1, 3)).unwrap();
        assert!(a < b);
        assert!(b < Density::one());
    }

    #[test]
    fn scaling() {
        let q = Density::rational(frac(1, 4)).unwrap();
        assert_eq!(
            q.scale_pow2_capped(1).unwrap().as_rational(),
            Some(frac(1, 2))
        );
        assert_eq!(
            q.scale_pow2_capped(3).unwrap().as_rational(),
            Some(frac(1, 1))
        );
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Density::rational(frac(0, 1)).is_err());
        assert!(Density::rational(frac(3, 2)).is_err());
    }
}
