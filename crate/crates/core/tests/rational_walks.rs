use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;
use viswalk::numtheory::{gcd, mobius, ExactRational};
use viswalk::rational_walks::{
    column_density, limit_density, m_offsets, parse_periodic_binary, verify_empirically,
    PeriodicBinary,
};

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

/// Start of column `i` (0-based) and the period vector, found by walking.
fn column_geometry(pb: &PeriodicBinary, i: usize) -> ((u64, u64), (u64, u64)) {
    let walk = |digits: &[u8]| {
        let right = digits.iter().filter(|&&d| d == 1).count() as u64;
        (right, digits.len() as u64 - right)
    };
    let (x0, y0) = walk(pb.aperiodic());
    let (ri, ti) = walk(&pb.periodic()[..=i]);
    ((x0 + ri, y0 + ti), walk(pb.periodic()))
}

/// Fraction of `k ∈ [0, M)` with the column point visible, `M = |m_i|`.
fn brute_column(pb: &PeriodicBinary, i: usize) -> ExactRational {
    let ((a, b), (r, t)) = column_geometry(pb, i);
    let m = m_offsets(pb)[i].abs().to_u64().unwrap();
    if m == 0 {
        return q(0, 1);
    }
    let hits = (0..m).filter(|k| gcd(a + k * r, b + k * t) == 1).count() as u64;
    ExactRational::new(hits, m).unwrap()
}

/// `Σ_{d | m} μ(d) S(d) / d` with `S(d)` counted directly.
fn divisor_sum_column(pb: &PeriodicBinary, i: usize) -> ExactRational {
    let ((a, b), (r, t)) = column_geometry(pb, i);
    let m = m_offsets(pb)[i].abs().to_u64().unwrap();
    if m == 0 {
        return q(0, 1);
    }
    (1..=m)
        .filter(|d| m.is_multiple_of(*d))
        .map(|d| {
            let s = (0..d)
                .filter(|k| (a + k * r) % d == 0 && (b + k * t) % d == 0)
                .count();
            ExactRational::from_integer(mobius(d).unwrap())
                * ExactRational::new(s as u64, d).unwrap()
        })
        .sum()
}

fn expansion() -> impl Strategy<Value = PeriodicBinary> {
    (
        prop::collection::vec(0u8..2, 0..8),
        prop::collection::vec(0u8..2, 1..8),
    )
        .prop_filter("period of all ones", |(_, p)| p.contains(&0))
        .prop_map(|(a, p)| PeriodicBinary::new(a, p).unwrap())
}

#[test]
fn worked_examples() {
    for (x, n, d) in [
        ("0.(10)", 1, 2),
        ("0.10000(10)", 7, 12),
        ("0.11(101)", 13, 18),
        ("0.1000(0110)", 2, 3),
        ("0.10000(0110)", 5, 6),
        ("0.1000(0111)", 817, 1320),
    ] {
        let pb = parse_periodic_binary(x).unwrap();
        assert_eq!(limit_density(&pb).unwrap().limit, q(n, d), "{x}");
        let check = verify_empirically(&pb, 200_000).unwrap();
        assert!(check.within_bound, "{x}: {check:?}");
    }
}

#[test]
fn three_column_example() {
    let pb = parse_periodic_binary("0.11(101)").unwrap();
    let deltas: Vec<_> = (1..=3).map(|i| column_density(&pb, i).unwrap()).collect();
    assert_eq!(deltas, vec![q(2, 3), q(1, 1), q(1, 2)]);
}

#[test]
fn examples_rotate_and_converge() {
    for x in [
        "0.(10)",
        "0.10000(10)",
        "0.11(101)",
        "0.1000(0110)",
        "0.10000(0110)",
        "0.1000(0111)",
    ] {
        let pb = parse_periodic_binary(x).unwrap();
        let limit = limit_density(&pb).unwrap().limit;
        assert_eq!(limit_density(&pb.rotated()).unwrap().limit, limit, "{x}");
        let devs: Vec<f64> = [1_000u64, 10_000, 100_000, 1_000_000]
            .iter()
            .map(|&n| verify_empirically(&pb, n).unwrap().deviation)
            .collect();
        let last = devs[3];
        assert!(devs[..3].iter().all(|&d| last <= d), "{x}: {devs:?}");
        assert!(last < 1e-4, "{x}: {devs:?}");
    }
}

#[test]
fn all_zero_period() {
    let pb = parse_periodic_binary("0.(0)").unwrap();
    let c = verify_empirically(&pb, 100).unwrap();
    assert_eq!(c.empirical, q(1, 100));
    assert_eq!(c.limit, q(0, 1));
}

proptest! {
    #[test]
    fn formula_matches_brute_force(pb in expansion()) {
        for i in 0..pb.period_len() {
            let formula = column_density(&pb, i + 1).unwrap();
            prop_assert_eq!(&formula, &brute_column(&pb, i), "{} column {}", pb, i + 1);
            prop_assert_eq!(&formula, &divisor_sum_column(&pb, i));
        }
    }

    #[test]
    fn limit_unchanged_by_rotation(pb in expansion()) {
        let a = limit_density(&pb).unwrap().limit;
        prop_assert_eq!(limit_density(&pb.rotated()).unwrap().limit, a);
    }

    #[test]
    fn denominator_divides_period_times_radicals(pb in expansion()) {
        let r = limit_density(&pb).unwrap();
        let mut bound = pb.period_len() as u64;
        for m in &r.m_values {
            let m = m.abs().to_u64().unwrap();
            if m > 1 {
                bound *= viswalk::numtheory::prime_divisors(m).iter().product::<u64>();
            }
        }
        let den = r.limit.denom().to_u64().unwrap();
        prop_assert_eq!(bound % den, 0);
        prop_assert!(!r.limit.is_negative() && r.limit <= ExactRational::one());
    }

    #[test]
    fn empirical_within_deterministic_bound(pb in expansion(), n in 50u64..20_000) {
        let c = verify_empirically(&pb, n).unwrap();
        prop_assert!(c.within_bound, "{}: {:?}", pb, c);
    }

    #[test]
    fn display_round_trips(pb in expansion()) {
        prop_assert_eq!(parse_periodic_binary(&pb.to_string()).unwrap(), pb);
    }
}
