//! Primes, gcd, and the Möbius function.

use num_bigint::BigInt;

use crate::error::{domain, Result};
use crate::numtheory::ExactRational;

const SEGMENT: u64 = 1 << 18;

/// All primes strictly below `limit`, ascending. Segmented sieve of Eratosthenes.
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit <= 2 {
        return Vec::new();
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = small_sieve(root.min(limit));
    if root >= limit {
        return base;
    }

    let mut primes = base.clone();
    let mut low = root;
    let mut marks = vec![false; SEGMENT as usize];
    while low < limit {
        let high = (low + SEGMENT).min(limit);
        let len = (high - low) as usize;
        marks[..len].fill(true);
        for &p in &base {
            if p * p >= high {
                break;
            }
            let mut m = (p * p).max(low.div_ceil(p) * p);
            while m < high {
                marks[(m - low) as usize] = false;
                m += p;
            }
        }
        primes.extend((0..len).filter(|&i| marks[i]).map(|i| low + i as u64));
        low = high;
    }
    primes
}

fn small_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n <= 2 {
        return Vec::new();
    }
    let mut is_prime = vec![true; n];
    is_prime[0] = false;
    is_prime[1] = false;
    let mut i = 2;
    while i * i < n {
        if is_prime[i] {
            for j in (i * i..n).step_by(i) {
                is_prime[j] = false;
            }
        }
        i += 1;
    }
    (0..n).filter(|&i| is_prime[i]).map(|i| i as u64).collect()
}

/// Deterministic primality by trial division; intended for moduli, not big inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Binary (Stein) gcd with `gcd(0, 0) = 0` and `gcd(a, 0) = a`.
#[inline]
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Distinct prime divisors of `n`, ascending. `prime_divisors(0)` and
/// `prime_divisors(1)` are empty.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    if n.is_multiple_of(2) {
        out.push(2);
        while n.is_multiple_of(2) {
            n /= 2;
        }
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The Möbius function μ(n).
pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(domain("mobius(0) is undefined"));
    }
    let mut m = n;
    let mut sign = 1i8;
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return Ok(0);
            }
            sign = -sign;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// μ(0..=n) by a linear sieve; index 0 holds 0.
pub fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![0i8; n + 1];
    if n == 0 {
        return mu;
    }
    mu[1] = 1;
    let mut composite = vec![false; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Exact value of `Σ_{d ≤ n} μ(d)/d · ⌊n/d⌋`, which is `6n/π² + O(log n)`.
pub fn weighted_mobius_sum(n: u64) -> Result<ExactRational> {
    if n == 0 {
        return Err(domain("weighted_mobius_sum needs n >= 1"));
    }
    let mu = mobius_table(n as usize);
    // Every squarefree d <= n divides the primorial of n.
    let common: BigInt = primes_below(n + 1).into_iter().map(BigInt::from).product();
    let numerator: BigInt = (1..=n)
        .filter(|&d| mu[d as usize] != 0)
        .map(|d| (&common / d) * (n / d) * i32::from(mu[d as usize]))
        .sum();
    ExactRational::new(numerator, common)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_primes(limit: u64) -> Vec<u64> {
        (2..limit)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn primes_below_small_cases() {
        assert!(primes_below(0).is_empty());
        assert!(primes_below(2).is_empty());
        assert_eq!(primes_below(3), vec![2]);
        assert_eq!(primes_below(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_below(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn segmented_sieve_matches_trial_division() {
        for limit in [100, 1_000, 20_000, 70_001] {
            assert_eq!(
                primes_below(limit),
                trial_division_primes(limit),
                "limit {limit}"
            );
        }
        // crosses several segments
        let big = primes_below(3_000_000);
        assert_eq!(big.len(), 216_816);
        assert!(big.iter().all(|&p| p < 3_000_000));
        assert!(big.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mobius(2).unwrap(), -1);
        assert_eq!(mobius(6).unwrap(), 1);
        assert!(mobius(0).is_err());
    }

    #[test]
    fn mobius_table_agrees_with_pointwise() {
        let table = mobius_table(5_000);
        for n in 1..=5_000u64 {
            assert_eq!(table[n as usize], mobius(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn mobius_divisor_sum_identity() {
        let mu = mobius_table(10_000);
        let mut divisor_sum = vec![0i32; 10_001];
        for (d, &mu_d) in mu.iter().enumerate().skip(1) {
            for m in (d..=10_000).step_by(d) {
                divisor_sum[m] += i32::from(mu_d);
            }
        }
        assert_eq!(divisor_sum[1], 1);
        assert!(divisor_sum[2..].iter().all(|&s| s == 0));
    }

    #[test]
    fn gcd_conventions() {
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(gcd(7, 0), 7);
        assert_eq!(gcd(0, 9), 9);
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(1 << 40, 3 << 20), 1 << 20);
        for a in 0..60u64 {
            for b in 0..60u64 {
                assert_eq!(gcd(a, b), num_integer::gcd(a, b));
            }
        }
    }

    #[test]
    fn prime_divisors_examples() {
        assert!(prime_divisors(0).is_empty());
        assert!(prime_divisors(1).is_empty());
        assert_eq!(prime_divisors(360), vec![2, 3, 5]);
        assert_eq!(prime_divisors(1320), vec![2, 3, 5, 11]);
        assert_eq!(prime_divisors(97), vec![97]);
    }

    #[test]
    fn is_prime_small() {
        let listed: Vec<u64> = (0..100).filter(|&n| is_prime(n)).collect();
        assert_eq!(listed, primes_below(100));
    }

    #[test]
    fn weighted_mobius_sum_values() {
        assert_eq!(weighted_mobius_sum(1).unwrap(), ExactRational::one());
        assert_eq!(
            weighted_mobius_sum(10).unwrap(),
            ExactRational::ratio(1307, 210)
        );
        assert!(weighted_mobius_sum(0).is_err());
        let s = weighted_mobius_sum(1000).unwrap();
        assert!(s.is_canonical());
        let target = 6000.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((s.to_f64() - target).abs() <= 8.0 * 1000f64.ln());
    }
}
