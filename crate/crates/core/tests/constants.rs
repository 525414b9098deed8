use proptest::prelude::*;
use viswalk::constants::{
    b_poly, c_level, c_value, level_constant, run_exact_limit, visibility_change_limit, MAX_K,
};
use viswalk::lattice::{count_admissible_classes, StepSequence};
use viswalk::numtheory::{primes_below, ExactRational};
use viswalk::poly::RationalPolynomial;

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

fn poly(c: &[(i64, i64)]) -> RationalPolynomial {
    RationalPolynomial::new(c.iter().map(|&(n, d)| q(n, d)).collect())
}

fn prob(s: &StepSequence, alpha: &ExactRational) -> ExactRational {
    alpha.pow(s.right_count()) * (ExactRational::one() - alpha).pow(s.up_count())
}

/// `Σ_s P(s) |A_k(s)| / D_k²`, with `|A_k(s)|` from residue enumeration.
fn enumerated_b(k: usize, alpha: &ExactRational) -> ExactRational {
    let d: u64 = primes_below(k as u64).iter().product();
    StepSequence::all(k)
        .map(|s| {
            let count = count_admissible_classes(&s, k as u64).unwrap();
            prob(&s, alpha) * ExactRational::new(count, d * d).unwrap()
        })
        .sum()
}

#[test]
fn small_polynomials() {
    assert_eq!(b_poly(1).unwrap(), poly(&[(1, 1)]));
    assert_eq!(b_poly(2).unwrap(), poly(&[(1, 1)]));
    assert_eq!(b_poly(3).unwrap(), poly(&[(1, 2), (-1, 2), (1, 2)]));
    assert_eq!(b_poly(4).unwrap(), poly(&[(6, 18), (-13, 18), (13, 18)]));
}

#[test]
fn frozen_polynomials() {
    // computed independently with a computer algebra system
    let expected = [
        (5, poly(&[(1, 3), (-19, 18), (29, 18), (-10, 9), (5, 9)])),
        (
            6,
            poly(&[(4, 15), (-101, 90), (953, 450), (-448, 225), (224, 225)]),
        ),
        (
            7,
            poly(&[
                (4, 15),
                (-25, 18),
                (301, 90),
                (-1022, 225),
                (866, 225),
                (-142, 75),
                (142, 225),
            ]),
        ),
        (
            8,
            poly(&[
                (8, 35),
                (-6277, 4410),
                (12701, 3150),
                (-143887, 22050),
                (48017, 7350),
                (-28843, 7350),
                (28843, 22050),
            ]),
        ),
    ];
    for (k, p) in expected {
        assert_eq!(b_poly(k).unwrap(), p, "b_{k}");
    }
}

#[test]
fn degree_and_symmetry() {
    for k in 1..=10u32 {
        let b = b_poly(k).unwrap();
        assert_eq!(b.degree() as u32, 2 * ((k - 1) / 2), "deg b_{k}");
        for i in 0..=50 {
            let a = q(i, 50);
            assert_eq!(
                b.eval(&a),
                b.eval(&(ExactRational::one() - &a)),
                "k = {k}, α = {a}"
            );
        }
    }
}

#[test]
fn values_are_probabilities() {
    for k in 1..=9u32 {
        let b = b_poly(k).unwrap();
        for i in 0..=100 {
            let v = b.eval(&q(i, 100));
            assert!(
                !v.is_negative() && v <= ExactRational::one(),
                "b_{k}({i}/100) = {v}"
            );
        }
    }
}

#[test]
fn enumeration_matches_polynomial() {
    let alphas: Vec<_> = [
        (0, 1),
        (1, 7),
        (1, 5),
        (1, 3),
        (2, 5),
        (1, 2),
        (4, 7),
        (2, 3),
        (9, 10),
        (1, 1),
    ]
    .iter()
    .map(|&(n, d)| q(n, d))
    .collect();
    for k in 1..=8usize {
        let b = b_poly(k as u32).unwrap();
        for a in &alphas {
            assert_eq!(enumerated_b(k, a), b.eval(a), "k = {k}, α = {a}");
        }
    }
}

#[test]
fn half_alpha_constants() {
    let oracle = [
        0.607927, 0.322634, 0.18823, 0.104115, 0.064065, 0.035188, 0.021913, 0.011943,
    ];
    for (k, want) in (1..=8u32).zip(oracle) {
        let r = c_value(k, &q(1, 2), 1e-9).unwrap();
        assert!(r.c_interval.width() <= 1e-9);
        assert!(
            (r.c_interval.midpoint() - want).abs() < 1e-6,
            "c_{k} = {}",
            r.c_interval
        );
    }
}

#[test]
fn constants_are_decreasing_in_k() {
    for a in [q(1, 2), q(3, 10), q(1, 10)] {
        let cs: Vec<_> = (1..=10u32)
            .map(|k| c_value(k, &a, 1e-9).unwrap().c_interval)
            .collect();
        for w in cs.windows(2) {
            assert!(
                w[1].upper() < w[0].lower(),
                "α = {a}: {} then {}",
                w[0],
                w[1]
            );
        }
    }
}

#[test]
fn level_constants_converge_to_full_constant() {
    for k in 1..=4u32 {
        let full = c_value(k, &q(1, 2), 1e-9).unwrap().c_interval;
        let lv = c_level(k, 1000, &q(1, 2)).unwrap().to_f64();
        // the tail over p ≥ 1000 is within k/999 of 1
        assert!(
            lv >= full.lower() && lv - full.upper() <= k as f64 / 999.0,
            "k = {k}"
        );
        assert!((lv - full.midpoint()).abs() < 5e-3);
    }
}

#[test]
fn level_constant_small_values() {
    assert_eq!(c_level(2, 4, &q(1, 2)).unwrap(), q(7, 18));
    assert_eq!(level_constant(2, 4, &q(1, 2)).unwrap(), q(7, 18));
    for k in 1..=5u32 {
        for m in [3u64, 4, 6] {
            let a = q(1, 3);
            let d: u64 = primes_below(m).iter().product();
            let oracle: ExactRational = StepSequence::all(k as usize)
                .map(|s| {
                    prob(&s, &a)
                        * ExactRational::new(count_admissible_classes(&s, m).unwrap(), d * d)
                            .unwrap()
                })
                .sum();
            assert_eq!(
                level_constant(k, m, &a).unwrap(),
                oracle,
                "k = {k}, m = {m}"
            );
        }
    }
}

#[test]
fn run_and_change_limits() {
    let runs = [0.150889, 0.050288, 0.044066, 0.011172];
    for (k, want) in (1..=4u32).zip(runs) {
        let i = run_exact_limit(k, &q(1, 2), 1e-9).unwrap();
        assert!((i.midpoint() - want).abs() < 1e-6, "k = {k}: {i}");
    }
    for a in [q(1, 2), q(3, 10), q(7, 10)] {
        let ch = visibility_change_limit(&a, 1e-9).unwrap();
        assert!((ch.midpoint() - 0.5705860058552651).abs() < 1e-8, "{ch}");
    }
}

#[test]
fn bad_arguments() {
    assert!(b_poly(0).is_err());
    assert!(b_poly(MAX_K + 1).is_err());
    assert!(c_value(3, &q(3, 2), 1e-6).is_err());
    assert!(c_value(3, &q(-1, 2), 1e-6).is_err());
    assert!(c_level(3, 1, &q(1, 2)).is_err());
}

proptest! {
    #[test]
    fn symmetric_under_complement(k in 1u32..=9, n in 0i64..=1000) {
        let a = q(n, 1000);
        let b = b_poly(k).unwrap();
        prop_assert_eq!(b.eval(&a), b.eval(&(ExactRational::one() - &a)));
    }

    #[test]
    fn c_interval_holds_b_times_euler(k in 1u32..=6, n in 0i64..=100) {
        let r = c_value(k, &q(n, 100), 1e-8).unwrap();
        let b = r.b_value.to_f64();
        let e = r.euler_interval;
        prop_assert!(r.c_interval.contains(b * e.midpoint()));
        prop_assert!(r.c_interval.width() <= 1e-8);
    }
}
