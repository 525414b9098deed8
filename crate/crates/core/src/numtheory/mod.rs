//! Number-theoretic primitives shared by the rest of the crate.

mod arith;
mod euler;
mod interval;
mod rational;

pub use arith::{
    gcd, is_prime, mobius, mobius_table, prime_divisors, primes_below, weighted_mobius_sum,
};
pub use euler::{
    euler_product, euler_product_enclosure, euler_product_truncated, EulerEnclosure,
    MAX_PRIME_CUTOFF,
};
pub use interval::Interval;
pub use rational::ExactRational;
