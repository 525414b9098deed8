//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::numtheory::ExactRational;

/// Coefficients in ascending degree order; trailing zeros are always trimmed,
/// so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    coefficients: Vec<ExactRational>,
}

impl RationalPolynomial {
    pub fn new(coefficients: Vec<ExactRational>) -> Self {
        let mut p = Self { coefficients };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactRational) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate α.
    pub fn alpha() -> Self {
        Self::new(vec![ExactRational::zero(), ExactRational::one()])
    }

    fn trim(&mut self) {
        while self.coefficients.last().is_some_and(ExactRational::is_zero) {
            self.coefficients.pop();
        }
    }

    pub fn coefficients(&self) -> &[ExactRational] {
        &self.coefficients
    }

    pub fn coefficient(&self, power: usize) -> ExactRational {
        self.coefficients.get(power).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Degree of the trimmed form; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        self.coefficients
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, c| acc * x + c)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::constant(ExactRational::one()), |acc, _| &acc * self)
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        Self::new(self.coefficients.iter().map(|a| a * c).collect())
    }

    /// `α^r (1 - α)^u` expanded by the binomial theorem.
    pub fn bernstein(r: u32, u: u32) -> Self {
        let mut coefficients = vec![ExactRational::zero(); (r + u + 1) as usize];
        let mut binom = num_bigint::BigInt::from(1u32);
        for j in 0..=u {
            let signed = if j % 2 == 0 {
                binom.clone()
            } else {
                -binom.clone()
            };
            coefficients[(r + j) as usize] = ExactRational::from_integer(signed);
            binom = binom * (u - j) / (j + 1);
        }
        Self::new(coefficients)
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coefficients.len().max(rhs.coefficients.len());
        RationalPolynomial::new(
            (0..n)
                .map(|i| self.coefficient(i) + rhs.coefficient(i))
                .collect(),
        )
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coefficients.len().max(rhs.coefficients.len());
        RationalPolynomial::new(
            (0..n)
                .map(|i| self.coefficient(i) - rhs.coefficient(i))
                .collect(),
        )
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out =
            vec![ExactRational::zero(); self.coefficients.len() + rhs.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in rhs.coefficients.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        RationalPolynomial::new(out)
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .bytes()
        .map(|b| DIGITS[(b - b'0') as usize])
        .collect()
}

/// Renders as e.g. `1/2 − 1/2·α + 1/2·α²`.
impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0/1");
        }
        let mut first = true;
        for (power, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            match (first, c.is_negative()) {
                (true, true) => write!(f, "−")?,
                (true, false) => {}
                (false, true) => write!(f, " − ")?,
                (false, false) => write!(f, " + ")?,
            }
            write!(f, "{magnitude}")?;
            match power {
                0 => {}
                1 => write!(f, "·α")?,
                _ => write!(f, "·α{}", superscript(power))?,
            }
            first = false;
        }
        Ok(())
    }
}
