//! Exact nonnegative rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseRatError;

/// A nonnegative rational number in lowest terms.
///
/// Textual form is `num/den`, or just `num` when the denominator is one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(Ratio<BigUint>);

impl Rat {
    pub fn new(num: u64, den: u64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat(Ratio::new(BigUint::from(num), BigUint::from(den)))
    }

    pub fn from_big(num: BigUint, den: BigUint) -> Rat {
        assert!(!den.is_zero(), "zero denominator");
        Rat(Ratio::new(num, den))
    }

    pub fn integer(n: u64) -> Rat {
        Rat::new(n, 1)
    }

    pub fn zero() -> Rat {
        Rat(Ratio::zero())
    }

    pub fn one() -> Rat {
        Rat(Ratio::one())
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `2^-exp`.
    pub fn pow2_inv(exp: u32) -> Rat {
        Rat(Ratio::new(BigUint::one(), BigUint::one() << exp))
    }

    /// Difference `self - rhs`, or `None` when it would be negative.
    pub fn checked_sub(&self, rhs: &Rat) -> Option<Rat> {
        if rhs > self {
            None
        } else {
            Some(Rat(&self.0 - &rhs.0))
        }
    }

    pub fn halve(&self) -> Rat {
        Rat(&self.0 / BigUint::from(2u32))
    }

    /// `floor(self * n)` as an integer, saturating at `u64::MAX`.
    pub fn floor_times(&self, n: u64) -> u64 {
        let scaled = &self.0 * BigUint::from(n);
        scaled.to_integer().to_u64().unwrap_or(u64::MAX)
    }

    /// `ceil(self * n)` as an integer, saturating at `u64::MAX`.
    pub fn ceil_times(&self, n: u64) -> u64 {
        let scaled = &self.0 * BigUint::from(n);
        scaled.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
    }

    /// If `self = k/n` for an integer `k`, return `k`.
    pub fn numerator_over(&self, n: u64) -> Option<u64> {
        let n = BigUint::from(n);
        let (q, r) = (self.numer() * &n).div_rem(self.denom());
        if r.is_zero() {
            q.to_u64()
        } else {
            None
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let s = s.trim();
        let parse_int = |t: &str| -> Result<BigUint, ParseRatError> {
            let t = t.trim();
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseRatError::Malformed(s.to_string()));
            }
            t.parse::<BigUint>()
                .map_err(|_| ParseRatError::Malformed(s.to_string()))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let num = parse_int(n)?;
                let den = parse_int(d)?;
                if den.is_zero() {
                    return Err(ParseRatError::ZeroDenominator);
                }
                Ok(Rat::from_big(num, den))
            }
            None => Ok(Rat::from_big(parse_int(s)?, BigUint::one())),
        }
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

/// Panics on negative results; use [`Rat::checked_sub`] when unsure.
impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        self.checked_sub(rhs).expect("negative rational")
    }
}

impl PartialEq<u64> for Rat {
    fn eq(&self, other: &u64) -> bool {
        self.0 == Ratio::from_integer(BigUint::from(*other))
    }
}

impl PartialOrd<u64> for Rat {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        self.0.partial_cmp(&Ratio::from_integer(BigUint::from(*other)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        assert_eq!(Rat::new(2, 16), Rat::new(1, 8));
        assert_eq!(Rat::new(2, 16).to_string(), "1/8");
        assert_eq!(Rat::integer(3).to_string(), "3/1");
        assert_eq!("4".parse::<Rat>().unwrap(), Rat::integer(4));
        assert_eq!(" 6 / 12 ".parse::<Rat>().unwrap(), Rat::new(1, 2));
    }

    #[test]
    fn rejects_bad_text() {
        assert!("1/0".parse::<Rat>().is_err());
        assert!("-1/2".parse::<Rat>().is_err());
        assert!("1/2/3".parse::<Rat>().is_err());
        assert!("".parse::<Rat>().is_err());
    }

    #[test]
    fn grid_arithmetic() {
        assert_eq!(Rat::new(1, 16).numerator_over(16), Some(1));
        assert_eq!(Rat::new(1, 8).numerator_over(16), Some(2));
        assert_eq!(Rat::new(1, 3).numerator_over(16), None);
        assert_eq!(Rat::new(1, 3).ceil_times(16), 6);
        assert_eq!(Rat::new(1, 3).floor_times(16), 5);
        assert_eq!(Rat::new(3, 4).checked_sub(&Rat::one()), None);
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(n in 0u64..100_000, d in 1u64..100_000) {
            let r = Rat::new(n, d);
            prop_assert_eq!(r.to_string().parse::<Rat>().unwrap(), r);
        }

        #[test]
        fn addition_is_exact(a in 0u64..1000, b in 0u64..1000, d in 1u64..1000) {
            prop_assert_eq!(&Rat::new(a, d) + &Rat::new(b, d), Rat::new(a + b, d));
        }
    }
}
