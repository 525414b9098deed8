//! Rigorous enclosures of `∏_{p ≥ k} (1 - k/p²)`.
//!
//! Two independent routes are provided:
//!
//! * [`euler_product`] compares the product against `∏_p (1 - 1/p²)^k = (6/π²)^k`.
//!   Past the cutoff `P` the ratio `(1 - k x)/(1 - x)^k` with `x = 1/p²` lies in
//!   `[1 - k² x², 1]`, so the tail costs only `k²/(3(P-1)³)` and a few thousand
//!   primes reach tolerances near double precision.
//! * [`euler_product_truncated`] multiplies the factors directly and bounds the
//!   tail by `Σ_{n ≥ P} k/n² ≤ k/(P-1)`. It never touches π and serves as a
//!   cross-check of the first route.

use crate::error::{domain, resource, Result};
use crate::numtheory::{primes_below, Interval};

/// Largest prime cutoff the direct route will sieve to.
pub const MAX_PRIME_CUTOFF: u64 = 1 << 31;

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// An enclosure together with the prime cutoff that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerEnclosure {
    pub interval: Interval,
    /// Primes below this bound were multiplied explicitly.
    pub prime_cutoff: u64,
}

fn check_args(k: u32, tolerance: f64) -> Result<()> {
    if k == 0 {
        return Err(domain("Euler product index k must be >= 1"));
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(domain(format!(
            "tolerance must be positive and finite, got {tolerance}"
        )));
    }
    Ok(())
}

/// `1 - k/p²` rounded to nearest carries at most one ulp of error; two are allowed.
fn factor(k: u32, p: u64) -> Interval {
    let pf = p as f64;
    let f = 1.0 - f64::from(k) / (pf * pf);
    Interval::new(f.next_down().next_down(), f.next_up().next_up()).expect("ordered")
}

fn six_over_pi_squared() -> Interval {
    let x = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let slack = 8.0 * UNIT_ROUNDOFF;
    Interval::new(
        (x * (1.0 - slack)).next_down(),
        (x * (1.0 + slack)).next_up(),
    )
    .expect("ordered")
}

/// Encloses `∏_{p ≥ k}(1 - k/p²)` in an interval of width at most `tolerance`.
pub fn euler_product(k: u32, tolerance: f64) -> Result<Interval> {
    euler_product_enclosure(k, tolerance).map(|e| e.interval)
}

pub fn euler_product_enclosure(k: u32, tolerance: f64) -> Result<EulerEnclosure> {
    check_args(k, tolerance)?;
    let kf = f64::from(k);
    // smallest P with k²/(3(P-1)³) <= tolerance/4
    let needed = (4.0 * kf * kf / (3.0 * tolerance)).cbrt().ceil() + 1.0;
    let cutoff = needed.max(f64::from(k) + 1.0).max(3.0) as u64;
    if cutoff > MAX_PRIME_CUTOFF {
        return Err(resource(format!(
            "tolerance {tolerance} needs a prime cutoff above {MAX_PRIME_CUTOFF}"
        )));
    }
    let interval = comparison_route(k, cutoff)?;
    if interval.width() > tolerance {
        return Err(resource(format!(
            "tolerance {tolerance} is below the attainable double-precision accuracy for k = {k} \
             (best width {:e})",
            interval.width()
        )));
    }
    Ok(EulerEnclosure {
        interval,
        prime_cutoff: cutoff,
    })
}

fn comparison_route(k: u32, cutoff: u64) -> Result<Interval> {
    let primes = primes_below(cutoff);
    let mut head = Interval::point(1.0);
    let mut zeta_part = Interval::point(1.0);
    for &p in &primes {
        zeta_part = zeta_part.mul(&factor(1, p));
        if p >= u64::from(k) {
            head = head.mul(&factor(k, p));
        }
    }
    // ∏_{p ≥ P}(1 - 1/p²)
    let zeta_tail = six_over_pi_squared().div_positive(&zeta_part)?;
    let kf = f64::from(k);
    let pm1 = (cutoff - 1) as f64;
    let ratio_floor = (1.0 - (kf * kf / (3.0 * pm1 * pm1 * pm1)).next_up()).next_down();
    let ratio = Interval::new(ratio_floor, 1.0)?;
    Ok(head.mul(&zeta_tail.powi(k)).mul(&ratio))
}

/// Direct truncation: multiply the factors for `k ≤ p < P` and bound the
/// remainder by `k/(P-1)`, with `P = ⌈2k/tolerance⌉ + 1`.
pub fn euler_product_truncated(k: u32, tolerance: f64) -> Result<EulerEnclosure> {
    check_args(k, tolerance)?;
    let needed = (2.0 * f64::from(k) / tolerance).ceil() + 1.0;
    if needed > MAX_PRIME_CUTOFF as f64 {
        return Err(resource(format!(
            "tolerance {tolerance} needs a prime cutoff above {MAX_PRIME_CUTOFF}"
        )));
    }
    let cutoff = (needed as u64).max(u64::from(k) + 1);
    let head = primes_below(cutoff)
        .into_iter()
        .filter(|&p| p >= u64::from(k))
        .fold(Interval::point(1.0), |acc, p| acc.mul(&factor(k, p)));
    let tail_floor = (1.0 - (f64::from(k) / (cutoff - 1) as f64).next_up()).next_down();
    let interval = head.mul(&Interval::new(tail_floor.max(0.0), 1.0)?);
    if interval.width() > tolerance {
        return Err(resource(format!(
            "direct truncation could not reach tolerance {tolerance} (width {:e})",
            interval.width()
        )));
    }
    Ok(EulerEnclosure {
        interval,
        prime_cutoff: cutoff,
    })
}
