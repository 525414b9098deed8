//! Arbitrary-precision rationals kept in lowest terms.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, parse, Error, Result};

/// An exact rational number with a positive denominator and coprime parts.
///
/// `Display` always writes `numerator/denominator`, including integers
/// (`"3/1"`), so the textual form is uniform across every output.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Result<Self> {
        let den = denominator.into();
        if den.is_zero() {
            return Err(domain("rational with zero denominator"));
        }
        Ok(Self(BigRational::new(numerator.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    /// `numerator / denominator` for machine integers; panics on a zero denominator.
    pub fn ratio(numerator: i64, denominator: i64) -> Self {
        Self::new(numerator, denominator).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    /// The exact value of a finite binary float.
    pub fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(Self)
            .ok_or_else(|| domain(format!("{x} is not a finite number")))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// True when the denominator is positive and shares no factor with the numerator.
    pub fn is_canonical(&self) -> bool {
        self.denom().is_positive() && self.numer().gcd(self.denom()).is_one()
    }

    pub fn pow(&self, exp: u32) -> Self {
        Self(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    /// Nearest double; correct to within one unit in the last place.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    /// `floor(self * 2^64)` for values in `[0, 1]`, as used by Bernoulli thresholds.
    pub fn scaled_floor_2_64(&self) -> Result<u128> {
        if self.is_negative() || self.0 > BigRational::one() {
            return Err(domain(format!("{self} is not in [0, 1]")));
        }
        let scaled = (self.numer() << 64usize).div_floor(self.denom());
        Ok(scaled.to_u128().expect("value in [0, 2^64]"))
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// Accepts `p/q`, a plain integer, or a decimal such as `0.3`, `-1.25` or `2.5e-3`.
/// Decimals are converted exactly (`0.3` is `3/10`).
impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let s = text.trim();
        if s.is_empty() {
            return Err(parse("empty rational"));
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num
                .trim()
                .parse()
                .map_err(|_| parse(format!("bad numerator in {s:?}")))?;
            let den: BigInt = den
                .trim()
                .parse()
                .map_err(|_| parse(format!("bad denominator in {s:?}")))?;
            return Self::new(num, den).map_err(|_| parse(format!("zero denominator in {s:?}")));
        }
        parse_decimal(s).ok_or_else(|| parse(format!("not a rational or decimal: {s:?}")))
    }
}

fn parse_decimal(s: &str) -> Option<ExactRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let magnitude = BigUint::parse_bytes(all_digits.as_bytes(), 10)?;
    let sign = if negative { Sign::Minus } else { Sign::Plus };
    let numer = BigInt::from_biguint(sign, magnitude);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-shift) as usize))
    };
    Some(ExactRational(value))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

impl std::iter::Product for ExactRational {
    fn product<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::one(), |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(
            "1/2".parse::<ExactRational>().unwrap(),
            ExactRational::ratio(1, 2)
        );
        assert_eq!(
            "0.3".parse::<ExactRational>().unwrap(),
            ExactRational::ratio(3, 10)
        );
        assert_eq!(
            "-1.25".parse::<ExactRational>().unwrap(),
            ExactRational::ratio(-5, 4)
        );
        assert_eq!(
            "2.5e-3".parse::<ExactRational>().unwrap(),
            ExactRational::ratio(1, 400)
        );
        assert_eq!(
            "1E2".parse::<ExactRational>().unwrap(),
            ExactRational::from(100)
        );
        assert_eq!(
            ".5".parse::<ExactRational>().unwrap(),
            ExactRational::ratio(1, 2)
        );
        assert_eq!(
            "6/-4".parse::<ExactRational>().unwrap(),
            ExactRational::ratio(-3, 2)
        );
        for bad in ["", "1/0", "abc", "1.2.3", "--1", "1/x", "."] {
            assert!(
                bad.parse::<ExactRational>().is_err(),
                "{bad:?} should not parse"
            );
        }
    }

    #[test]
    fn display_is_always_num_over_den() {
        assert_eq!(ExactRational::from(3).to_string(), "3/1");
        assert_eq!(ExactRational::ratio(6, -8).to_string(), "-3/4");
        assert_eq!(ExactRational::zero().to_string(), "0/1");
    }

    #[test]
    fn results_stay_canonical() {
        let a = ExactRational::ratio(2, 6);
        let b = ExactRational::ratio(-10, 4);
        for r in [&a + &b, &a - &b, &a * &b, &a / &b, a.pow(3)] {
            assert!(r.is_canonical(), "{r}");
        }
    }

    #[test]
    fn bernoulli_threshold_endpoints() {
        assert_eq!(ExactRational::zero().scaled_floor_2_64().unwrap(), 0);
        assert_eq!(
            ExactRational::one().scaled_floor_2_64().unwrap(),
            1u128 << 64
        );
        assert_eq!(
            ExactRational::ratio(1, 2).scaled_floor_2_64().unwrap(),
            1u128 << 63
        );
        assert_eq!(
            ExactRational::ratio(1, 3).scaled_floor_2_64().unwrap(),
            (1u128 << 64) / 3
        );
        assert!(ExactRational::ratio(3, 2).scaled_floor_2_64().is_err());
    }

    #[test]
    fn from_f64_is_exact() {
        assert_eq!(
            ExactRational::from_f64(0.375).unwrap(),
            ExactRational::ratio(3, 8)
        );
        assert!(ExactRational::from_f64(f64::NAN).is_err());
    }
}
