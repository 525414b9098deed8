//! Closed intervals of doubles with outward rounding.
//!
//! Every arithmetic result is computed in round-to-nearest and then widened
//! by one unit in the last place on each side, which dominates the rounding
//! error of a single operation.

use std::fmt;

use crate::error::{domain, Result};
use crate::numtheory::ExactRational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(domain(format!("invalid interval [{lower}, {upper}]")));
        }
        Ok(Self { lower, upper })
    }

    pub fn point(x: f64) -> Self {
        Self { lower: x, upper: x }
    }

    /// Encloses `x` assuming it carries at most one ulp of error.
    pub fn around(x: f64) -> Self {
        Self {
            lower: x.next_down(),
            upper: x.next_up(),
        }
    }

    /// Encloses the exact value of a rational.
    pub fn from_rational(r: &ExactRational) -> Self {
        let x = r.to_f64();
        Self {
            lower: x.next_down().next_down(),
            upper: x.next_up().next_up(),
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        (self.upper - self.lower).next_up()
    }

    pub fn midpoint(&self) -> f64 {
        self.lower / 2.0 + self.upper / 2.0
    }

    /// Half-width measured from the midpoint, rounded so that
    /// `[mid - hw, mid + hw]` still covers the interval.
    pub fn half_width(&self) -> f64 {
        let mid = self.midpoint();
        (mid - self.lower).max(self.upper - mid).next_up()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lower: (self.lower + other.lower).next_down(),
            upper: (self.upper + other.upper).next_up(),
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lower: (self.lower - other.upper).next_down(),
            upper: (self.upper - other.lower).next_up(),
        }
    }

    pub fn scale(&self, c: f64) -> Interval {
        let (a, b) = (self.lower * c, self.upper * c);
        Interval {
            lower: a.min(b).next_down(),
            upper: a.max(b).next_up(),
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            self.lower * other.lower,
            self.lower * other.upper,
            self.upper * other.lower,
            self.upper * other.upper,
        ];
        let lo = products.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lower: lo.next_down(),
            upper: hi.next_up(),
        }
    }

    /// Quotient of intervals; the divisor must be strictly positive.
    pub fn div_positive(&self, divisor: &Interval) -> Result<Interval> {
        if divisor.lower <= 0.0 {
            return Err(domain(
                "division by an interval that is not strictly positive",
            ));
        }
        let quotients = [
            self.lower / divisor.lower,
            self.lower / divisor.upper,
            self.upper / divisor.lower,
            self.upper / divisor.upper,
        ];
        let lo = quotients.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = quotients.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Interval {
            lower: lo.next_down(),
            upper: hi.next_up(),
        })
    }

    pub fn powi(&self, exp: u32) -> Interval {
        (0..exp).fold(Interval::point(1.0), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}
