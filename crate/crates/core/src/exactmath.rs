//! Exact integer and rational primitives shared by every bound computation.
//!
//! Integers are [`BigUint`]/[`BigInt`] and rationals are [`BigRational`], which
//! is kept in lowest terms with a positive denominator after every operation.
//! Nothing on a certification path touches floating point.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Nat = BigUint;
pub type Rat = BigRational;

/// Default denominator used when square roots have to be under-approximated.
pub fn default_sqrt_scale() -> Nat {
    Nat::from(10u32).pow(40)
}

/// Binomial coefficient `C(n, r)`, zero when `r > n`.
pub fn binom(n: u64, r: u64) -> Nat {
    if r > n {
        return Nat::zero();
    }
    let r = r.min(n - r);
    let mut acc = Nat::one();
    for i in 1..=r {
        // acc * (n - r + i) is divisible by i at every step
        acc *= n - r + i;
        acc /= i;
    }
    acc
}

/// Signed binomial coefficient, handy in alternating sums.
pub fn binom_int(n: u64, r: u64) -> BigInt {
    BigInt::from(binom(n, r))
}

/// `⌈a / b⌉`.
pub fn ceil_div(a: &Nat, b: &Nat) -> Result<Nat> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a.div_ceil(b))
}

/// Smallest integer not below `x`.
pub fn ceil_rat(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// `Σ_{j=i}^{ell} (−1)^{i+j} C(ell, j) C(j, i)`, which is 1 when `i = ell` and 0 otherwise.
pub fn alt_binom_sum(i: u64, ell: u64) -> Result<BigInt> {
    if i > ell {
        return Err(Error::InvalidRange { i, ell });
    }
    let mut sum = BigInt::zero();
    for j in i..=ell {
        let term = binom_int(ell, j) * binom_int(j, i);
        if (i + j).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// Certified under-approximation of `√x`: `⌊√(x·scale²)⌋ / scale`.
///
/// The result `r` satisfies `r ≤ √x < r + 1/scale`.
pub fn sqrt_lower(x: &Rat, scale: &Nat) -> Result<Rat> {
    if x.is_negative() {
        return Err(Error::NegativeRadicand);
    }
    if scale.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let scale_int = BigInt::from(scale.clone());
    let scaled = x * Rat::from_integer(&scale_int * &scale_int);
    // floor(sqrt(y)) == floor(sqrt(floor(y))) for y >= 0
    let floor = scaled.floor().to_integer();
    let root = floor
        .to_biguint()
        .expect("nonnegative after the radicand check")
        .sqrt();
    Ok(Rat::new(BigInt::from(root), scale_int))
}

/// Smallest integer `x ≥ 0` with `x^e ≥ target`. `e` must be positive.
pub(crate) fn ceil_root(target: &Nat, e: u32) -> Nat {
    assert!(e > 0);
    let mut root = target.nth_root(e);
    while root.pow(e) < *target {
        root += 1u32;
    }
    root
}

/// Serde adapter writing big integers as decimal strings.
pub mod decimal {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let text = String::deserialize(d)?;
        text.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn nat(n: u64) -> Nat {
        Nat::from(n)
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(5, 2), nat(10));
        assert_eq!(binom(17, 0), nat(1));
        assert_eq!(binom(0, 0), nat(1));
        assert_eq!(binom(3, 7), nat(0));
        // 148 * 147 / 2
        assert_eq!(binom(148, 2), nat(10878));
    }

    #[test]
    fn binom_large_argument() {
        // C(10000, 3) = 10000 * 9999 * 9998 / 6
        let expected = nat(10000) * nat(9999) * nat(9998) / nat(6);
        assert_eq!(binom(10_000, 3), expected);
        assert_eq!(binom(10_000, 9_997), expected);
    }

    #[test]
    fn pascal_rule() {
        for n in 1..=60u64 {
            for r in 1..=n {
                assert_eq!(binom(n, r), binom(n - 1, r - 1) + binom(n - 1, r), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn ceil_div_examples() {
        assert_eq!(ceil_div(&nat(7), &nat(3)).unwrap(), nat(3));
        assert_eq!(ceil_div(&nat(6), &nat(3)).unwrap(), nat(2));
        assert_eq!(ceil_div(&nat(144), &nat(28)).unwrap(), nat(6));
        assert!(matches!(ceil_div(&nat(1), &nat(0)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn alt_binom_sum_exhaustive() {
        assert_eq!(alt_binom_sum(3, 3).unwrap(), BigInt::one());
        assert_eq!(alt_binom_sum(2, 5).unwrap(), BigInt::zero());
        assert_eq!(alt_binom_sum(0, 0).unwrap(), BigInt::one());
        for ell in 0..=12 {
            for i in 0..=ell {
                let expected = if i == ell { 1 } else { 0 };
                assert_eq!(alt_binom_sum(i, ell).unwrap(), BigInt::from(expected));
            }
        }
        assert!(matches!(alt_binom_sum(3, 2), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn sqrt_lower_examples() {
        let scale = nat(1_000_000);
        let four = Rat::from_integer(BigInt::from(4));
        assert_eq!(sqrt_lower(&four, &scale).unwrap(), Rat::from_integer(BigInt::from(2)));
        assert_eq!(sqrt_lower(&four, &nat(7)).unwrap(), Rat::from_integer(BigInt::from(2)));
        assert!(sqrt_lower(&Rat::zero(), &scale).unwrap().is_zero());
        let two = Rat::from_integer(BigInt::from(2));
        assert_eq!(
            sqrt_lower(&two, &scale).unwrap(),
            Rat::new(BigInt::from(1_414_213), BigInt::from(1_000_000))
        );
        let neg = Rat::from_integer(BigInt::from(-1));
        assert!(matches!(sqrt_lower(&neg, &scale), Err(Error::NegativeRadicand)));
    }

    #[test]
    fn ceil_root_matches_definition() {
        assert_eq!(ceil_root(&nat(27), 3), nat(3));
        assert_eq!(ceil_root(&nat(28), 3), nat(4));
        assert_eq!(ceil_root(&nat(0), 2), nat(0));
        assert_eq!(ceil_root(&nat(1), 5), nat(1));
    }

    proptest! {
        #[test]
        fn sqrt_lower_brackets_root(num in 0u64..1_000_000, den in 1u64..1000, scale in 1u64..100_000) {
            let x = Rat::new(BigInt::from(num), BigInt::from(den));
            let scale_nat = nat(scale);
            let r = sqrt_lower(&x, &scale_nat).unwrap();
            prop_assert!(&r * &r <= x);
            let step = Rat::new(BigInt::one(), BigInt::from(scale));
            let upper = &r + step;
            prop_assert!(&upper * &upper > x);
        }

        #[test]
        fn ceil_div_is_unique_quotient(a in 1u64..1_000_000, b in 1u64..10_000) {
            let q = ceil_div(&nat(a), &nat(b)).unwrap().to_u64().unwrap();
            prop_assert!((q - 1) * b < a && a <= q * b);
        }
    }
}
