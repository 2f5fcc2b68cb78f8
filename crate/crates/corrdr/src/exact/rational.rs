//! Arbitrary-precision rational scalars.
//!
//! `Rat` is `num_rational::BigRational`, which already maintains the
//! invariants we need: always fully reduced, denominator positive, zero
//! stored as 0/1. This module adds the constructors and the canonical text
//! form used throughout serialization ("n" for integers, "n/d" otherwise).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational number.
pub type Rat = BigRational;

/// `n/d` as a `Rat`.
///
/// # Panics
/// Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a `Rat`.
pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Canonical text form: integers render without a denominator, everything
/// else as `num/den` with the sign on the numerator.
pub fn to_text(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse the canonical text form produced by [`to_text`].
pub fn from_text(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::config(format!("bad integer literal {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s.trim())?)),
        Some((n, d)) => {
            let den = parse_int(d.trim())?;
            if den.is_zero() {
                return Err(Error::config("zero denominator"));
            }
            Ok(BigRational::new(parse_int(n.trim())?, den))
        }
    }
}

/// Exact integer power with negative exponents allowed.
///
/// # Panics
/// Panics on `0^k` with `k < 0`.
pub fn pow(base: &Rat, exp: i64) -> Rat {
    if exp >= 0 {
        num_traits::pow::pow(base.clone(), exp as usize)
    } else {
        assert!(!base.is_zero(), "0 to a negative power");
        num_traits::pow::pow(base.clone(), (-exp) as usize).recip()
    }
}

/// True if `x` is an integer.
pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// The integer value of `x`, if it is one.
pub fn as_integer(x: &Rat) -> Option<BigInt> {
    is_integer(x).then(|| x.numer().clone())
}

/// `|x|`.
pub fn abs(x: &Rat) -> Rat {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_and_sign_normalized() {
        let x = rat(2, -4);
        assert_eq!(x.numer(), &BigInt::from(-1));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(rat(0, 7), rat_int(0));
        assert_eq!(rat(0, 7).denom(), &BigInt::from(1));
    }

    #[test]
    fn text_round_trip() {
        for (n, d, s) in [(1, 2, "1/2"), (-3, 1, "-3"), (6, -4, "-3/2"), (0, 5, "0")] {
            let x = rat(n, d);
            assert_eq!(to_text(&x), s);
            assert_eq!(from_text(s).unwrap(), x);
        }
        assert!(from_text("1/0").is_err());
        assert!(from_text("x").is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(pow(&rat(2, 3), 2), rat(4, 9));
        assert_eq!(pow(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(pow(&rat(5, 1), 0), rat_int(1));
    }
}
