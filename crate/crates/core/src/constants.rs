//! Exact visibility constants.
//!
//! For `k` consecutive walk points the limiting proportion is
//! `c_k(α) = b_k(α) · ∏_{p ≥ k}(1 - k/p²)`, where
//! `b_k(α) = Σ_s α^{r(s)} (1-α)^{u(s)} ∏_{p<k} (1 - |B_p(s)|/p²)`
//! sums over the `2^{k-1}` step sequences. Restricting visibility to primes
//! below `m` gives the level constant `c_k(m; α)`, a finite product.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{domain, resource, Result};
use crate::lattice::StepSequence;
use crate::numtheory::{euler_product_enclosure, primes_below, ExactRational, Interval};
use crate::poly::RationalPolynomial;

/// Largest `k` for which `b_k` is enumerated (`2^{k-1}` sequences).
pub const MAX_K: u32 = 20;

/// Enclosure of `c_k(α)` with the ingredients that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantReport {
    pub k: u32,
    pub b_poly: RationalPolynomial,
    pub alpha: ExactRational,
    /// `b_k(α)`, exact.
    pub b_value: ExactRational,
    pub euler_interval: Interval,
    pub c_interval: Interval,
    pub prime_cutoff_used: u64,
}

pub(crate) fn check_alpha(alpha: &ExactRational) -> Result<()> {
    if alpha.is_negative() || *alpha > ExactRational::one() {
        return Err(domain(format!("alpha = {alpha} is outside [0, 1]")));
    }
    Ok(())
}

fn check_k(k: u32, cap: u32) -> Result<()> {
    if k == 0 {
        return Err(domain("k must be >= 1"));
    }
    if k > cap {
        return Err(resource(format!("k = {k} exceeds the cap of {cap}")));
    }
    Ok(())
}

/// Number of distinct classes of the offsets mod `p` (`p ≤ 19` here, so `p² < 384`).
fn distinct_classes(offsets: &[crate::lattice::LatticePoint], p: u64) -> u64 {
    let mut seen = [0u64; 6];
    let mut count = 0;
    for o in offsets {
        let idx = ((o.x % p) * p + o.y % p) as usize;
        let (word, bit) = (idx / 64, idx % 64);
        if seen[word] >> bit & 1 == 0 {
            seen[word] |= 1 << bit;
            count += 1;
        }
    }
    count
}

/// `Σ_s α^{r(s)}(1-α)^{u(s)} ∏_{p<q}(1 - |B_p(s)|/p²)` over sequences of `k` points.
fn obstruction_polynomial(k: u32, q: u64) -> RationalPolynomial {
    let primes = primes_below(q);
    let squares: Vec<u128> = primes.iter().map(|&p| u128::from(p * p)).collect();
    let len = k as usize;
    // weight numerators grouped by the number of right steps
    let by_right = (0..1u64 << (len - 1))
        .into_par_iter()
        .fold(
            || vec![0u128; len],
            |mut acc, mask| {
                let s = StepSequence::from_mask(len, mask);
                let weight: u128 = primes
                    .iter()
                    .zip(&squares)
                    .map(|(&p, &sq)| sq - u128::from(distinct_classes(s.offsets(), p)))
                    .product();
                acc[s.right_count() as usize] += weight;
                acc
            },
        )
        .reduce(
            || vec![0u128; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let denominator: u128 = squares.iter().product();
    by_right
        .into_iter()
        .enumerate()
        .filter(|(_, w)| *w != 0)
        .fold(RationalPolynomial::zero(), |acc, (r, w)| {
            let coeff = ExactRational::new(BigInt::from(w), BigInt::from(denominator))
                .expect("positive denominator");
            let term = RationalPolynomial::bernstein(r as u32, k - 1 - r as u32).scale(&coeff);
            &acc + &term
        })
}

/// The polynomial `b_k(α)`, exact. `b_1 = b_2 = 1`.
pub fn b_poly(k: u32) -> Result<RationalPolynomial> {
    check_k(k, MAX_K)?;
    Ok(obstruction_polynomial(k, u64::from(k)))
}

/// `∏_{k ≤ p < m}(1 - k/p²)`, exact.
fn finite_euler_product(k: u32, m: u64) -> ExactRational {
    let (num, den) = primes_below(m)
        .into_iter()
        .filter(|&p| p >= u64::from(k))
        .fold((BigInt::from(1), BigInt::from(1)), |(num, den), p| {
            let sq = BigInt::from(p) * p;
            (num * (&sq - k), den * sq)
        });
    // reducing once at the end is far cheaper than after every factor
    ExactRational::new(num, den).expect("positive denominator")
}

/// Encloses `c_k(α)` in an interval of width at most `tolerance`.
pub fn c_value(k: u32, alpha: &ExactRational, tolerance: f64) -> Result<ConstantReport> {
    check_alpha(alpha)?;
    let b_poly = b_poly(k)?;
    let b_value = b_poly.eval(alpha);
    let euler = euler_product_enclosure(k, tolerance / 2.0)?;
    let c_interval = Interval::from_rational(&b_value).mul(&euler.interval);
    Ok(ConstantReport {
        k,
        b_poly,
        alpha: alpha.clone(),
        b_value,
        euler_interval: euler.interval,
        c_interval,
        prime_cutoff_used: euler.prime_cutoff,
    })
}

/// `c_k(α)` for a real α; the double is converted to its exact binary value.
pub fn c_value_f64(k: u32, alpha: f64, tolerance: f64) -> Result<ConstantReport> {
    c_value(k, &ExactRational::from_f64(alpha)?, tolerance)
}

/// `c_k(m; α) = b_k(α) ∏_{k ≤ p < m}(1 - k/p²)`, exact. For `m ≤ k` the product is empty.
pub fn c_level(k: u32, m: u64, alpha: &ExactRational) -> Result<ExactRational> {
    check_alpha(alpha)?;
    if m < 2 {
        return Err(domain("level m must be >= 2"));
    }
    Ok(b_poly(k)?.eval(alpha) * finite_euler_product(k, m))
}

/// Limiting proportion of `k` consecutive points visible at level `m`:
/// `Σ_s P(s) ∏_{p<m}(1 - |B_p(s)|/p²)`.
///
/// Agrees with [`c_level`] whenever `m ≥ k`. For `m < k` only the primes below
/// `m` constrain the walk, so the result is not `b_k(α)`.
pub fn level_constant(k: u32, m: u64, alpha: &ExactRational) -> Result<ExactRational> {
    check_alpha(alpha)?;
    check_k(k, MAX_K)?;
    if m < 2 {
        return Err(domain("level m must be >= 2"));
    }
    let head = obstruction_polynomial(k, m.min(u64::from(k))).eval(alpha);
    Ok(head * finite_euler_product(k, m))
}

/// Limit of the proportion of runs of exactly `k` visible points:
/// `c_k - 2c_{k+1} + c_{k+2}`.
pub fn run_exact_limit(k: u32, alpha: &ExactRational, tolerance: f64) -> Result<Interval> {
    check_k(k, MAX_K - 2)?;
    let part = tolerance / 8.0;
    let a = c_value(k, alpha, part)?.c_interval;
    let b = c_value(k + 1, alpha, part)?.c_interval;
    let c = c_value(k + 2, alpha, part)?.c_interval;
    Ok(a.sub(&b.scale(2.0)).add(&c))
}

/// Limit of the proportion of visibility changes: `2c_1(α) - 2c_2(α)`,
/// which equals `12/π² - 2∏_p(1 - 2/p²)` for every α.
pub fn visibility_change_limit(alpha: &ExactRational, tolerance: f64) -> Result<Interval> {
    let part = tolerance / 8.0;
    let one = c_value(1, alpha, part)?.c_interval;
    let two = c_value(2, alpha, part)?.c_interval;
    Ok(one.sub(&two).scale(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::ratio(n, d)
    }

    fn poly(c: &[(i64, i64)]) -> RationalPolynomial {
        RationalPolynomial::new(c.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn first_four_polynomials() {
        assert_eq!(b_poly(1).unwrap(), poly(&[(1, 1)]));
        assert_eq!(b_poly(2).unwrap(), poly(&[(1, 1)]));
        assert_eq!(b_poly(3).unwrap(), poly(&[(1, 2), (-1, 2), (1, 2)]));
        assert_eq!(b_poly(4).unwrap(), poly(&[(6, 18), (-13, 18), (13, 18)]));
    }

    #[test]
    fn k_cap_is_enforced() {
        assert!(matches!(b_poly(21), Err(crate::Error::Resource(_))));
        assert!(matches!(b_poly(0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn c_level_examples() {
        for alpha in [q(0, 1), q(1, 3), q(1, 1)] {
            assert_eq!(c_level(1, 3, &alpha).unwrap(), q(3, 4));
        }
        assert_eq!(c_level(2, 4, &q(1, 2)).unwrap(), q(7, 18));
        assert_eq!(
            c_level(4, 3, &q(1, 2)).unwrap(),
            b_poly(4).unwrap().eval(&q(1, 2))
        );
        assert!(c_level(1, 1, &q(1, 2)).is_err());
        assert!(c_level(1, 3, &q(3, 2)).is_err());
    }

    #[test]
    fn level_constant_below_k_differs_from_b() {
        // only p = 2 constrains three points at level 3
        let v = level_constant(3, 3, &q(1, 2)).unwrap();
        assert_eq!(v, b_poly(3).unwrap().eval(&q(1, 2)));
        assert_eq!(level_constant(3, 2, &q(1, 2)).unwrap(), q(1, 1));
        assert_eq!(level_constant(2, 4, &q(1, 2)).unwrap(), q(7, 18));
    }

    #[test]
    fn c_value_half() {
        let expect = [(1, 0.6079), (2, 0.3226), (3, 0.1882), (4, 0.1041)];
        for (k, v) in expect {
            let r = c_value(k, &q(1, 2), 1e-6).unwrap();
            assert!(
                (r.c_interval.midpoint() - v).abs() < 5e-5,
                "k={k} {}",
                r.c_interval
            );
            assert!(r.c_interval.width() <= 1e-6);
        }
    }

    #[test]
    fn derived_limits() {
        let runs = run_exact_limit(1, &q(1, 2), 1e-4).unwrap();
        assert!((runs.midpoint() - 0.1509).abs() < 1e-3, "{runs}");
        assert!(runs.width() <= 1e-4);
        let a = visibility_change_limit(&q(1, 5), 1e-4).unwrap();
        let b = visibility_change_limit(&q(7, 10), 1e-4).unwrap();
        assert_eq!(a, b);
        assert!((a.midpoint() - 0.57059).abs() < 1e-4, "{a}");
        assert!(a.width() <= 1e-4);
        assert!(run_exact_limit(19, &q(1, 2), 1e-4).is_err());
    }
}
