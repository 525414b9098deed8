//! Acceptance checks grouped into suites, shared by the test harness and the CLI.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::constants::{b_poly, c_level, c_value, level_constant};
use crate::error::{parse, Error, Result};
use crate::lattice::{count_admissible_classes, residue_obstructions, StepSequence};
use crate::numtheory::{primes_below, ExactRational, Interval};
use crate::poly::RationalPolynomial;
use crate::rational_walks::{limit_density, m_offsets, parse_periodic_binary};
use crate::simulator::{
    deterministic_walk, simulate, simulate_stream, ExpectedConstants, WalkConfig, WalkStats,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Exact,
    Oracle,
    Statistical,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Exact => "exact",
            Suite::Oracle => "oracle",
            Suite::Statistical => "statistical",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Suite::Exact),
            "oracle" => Ok(Suite::Oracle),
            "statistical" => Ok(Suite::Statistical),
            "all" => Ok(Suite::All),
            other => Err(parse(format!("unknown suite {other:?}"))),
        }
    }
}

/// One measured quantity and the condition it was held to.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub name: String,
    pub value: String,
    pub requirement: String,
    pub ok: bool,
}

impl Measurement {
    fn new(
        name: impl Into<String>,
        value: impl fmt::Display,
        requirement: impl Into<String>,
        ok: bool,
    ) -> Self {
        Self {
            name: name.into(),
            value: value.to_string(),
            requirement: requirement.into(),
            ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub suite: Suite,
    pub passed: bool,
    /// Not run because the time budget ran out; counts as a failure.
    pub skipped: bool,
    pub elapsed: Duration,
    pub measurements: Vec<Measurement>,
    /// Set when the check itself errored.
    pub error: Option<String>,
}

impl Outcome {
    /// `PASS`/`FAIL` line with the failing measurements, if any.
    pub fn summary_line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{status} [{}] {} ({:.2}s)",
            self.id,
            self.title,
            self.elapsed.as_secs_f64()
        );
        if self.skipped {
            line.push_str(": skipped, time budget exhausted");
        }
        if let Some(e) = &self.error {
            line.push_str(&format!(": error: {e}"));
        }
        let bad: Vec<_> = self.measurements.iter().filter(|m| !m.ok).collect();
        for m in bad.iter().take(5) {
            line.push_str(&format!(
                "; {} = {} (need {})",
                m.name, m.value, m.requirement
            ));
        }
        if bad.len() > 5 {
            line.push_str(&format!("; … {} more", bad.len() - 5));
        }
        line
    }
}

struct Criterion {
    id: u32,
    title: &'static str,
    suite: Suite,
    check: fn() -> Result<Vec<Measurement>>,
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        id: 1,
        title: "exact polynomials b_1..b_4",
        suite: Suite::Exact,
        check: exact_polynomials,
    },
    Criterion {
        id: 2,
        title: "constants c_1..c_4 at alpha 1/2",
        suite: Suite::Exact,
        check: half_constants,
    },
    Criterion {
        id: 3,
        title: "rational-walk densities",
        suite: Suite::Exact,
        check: rational_densities,
    },
    Criterion {
        id: 4,
        title: "CRT enumeration identities",
        suite: Suite::Oracle,
        check: crt_identities,
    },
    Criterion {
        id: 5,
        title: "degree and symmetry of b_k",
        suite: Suite::Oracle,
        check: degree_symmetry,
    },
    Criterion {
        id: 6,
        title: "Monte Carlo convergence",
        suite: Suite::Statistical,
        check: monte_carlo,
    },
    Criterion {
        id: 7,
        title: "level-4 convergence",
        suite: Suite::Statistical,
        check: level_convergence,
    },
    Criterion {
        id: 8,
        title: "deterministic walk 0.1000(0110)",
        suite: Suite::Statistical,
        check: deterministic_cross_check,
    },
    Criterion {
        id: 9,
        title: "reproducibility and stream merge",
        suite: Suite::Statistical,
        check: reproducibility,
    },
];

/// Runs the criteria of `suite` in order. Criteria starting after `budget` has
/// elapsed are skipped and fail.
pub fn run_suite(suite: Suite, budget: Option<Duration>) -> Vec<Outcome> {
    run_suite_with(suite, budget, |_| {})
}

/// As [`run_suite`], calling `report` after each criterion.
pub fn run_suite_with(
    suite: Suite,
    budget: Option<Duration>,
    mut report: impl FnMut(&Outcome),
) -> Vec<Outcome> {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    for c in CRITERIA.iter().filter(|c| suite.includes(c.suite)) {
        let outcome = if budget.is_some_and(|b| start.elapsed() >= b) {
            Outcome {
                id: c.id,
                title: c.title,
                suite: c.suite,
                passed: false,
                skipped: true,
                elapsed: Duration::ZERO,
                measurements: Vec::new(),
                error: None,
            }
        } else {
            let t = Instant::now();
            let result = (c.check)();
            let elapsed = t.elapsed();
            let (measurements, error) = match result {
                Ok(m) => (m, None),
                Err(e) => (Vec::new(), Some(e.to_string())),
            };
            Outcome {
                id: c.id,
                title: c.title,
                suite: c.suite,
                passed: error.is_none()
                    && !measurements.is_empty()
                    && measurements.iter().all(|m| m.ok),
                skipped: false,
                elapsed,
                measurements,
                error,
            }
        };
        report(&outcome);
        outcomes.push(outcome);
    }
    outcomes
}

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

fn poly(c: &[(i64, i64)]) -> RationalPolynomial {
    RationalPolynomial::new(c.iter().map(|&(n, d)| q(n, d)).collect())
}

fn exact_polynomials() -> Result<Vec<Measurement>> {
    let expected = [
        (1, poly(&[(1, 1)])),
        (2, poly(&[(1, 1)])),
        (3, poly(&[(1, 2), (-1, 2), (1, 2)])),
        (4, poly(&[(6, 18), (-13, 18), (13, 18)])),
    ];
    expected
        .into_iter()
        .map(|(k, want)| {
            let got = b_poly(k)?;
            let ok = got == want;
            Ok(Measurement::new(
                format!("b_{k}"),
                got,
                want.to_string(),
                ok,
            ))
        })
        .collect()
}

fn half_constants() -> Result<Vec<Measurement>> {
    let printed = ["0.6079", "0.3226", "0.1882", "0.1041"];
    (1..=4u32)
        .zip(printed)
        .map(|(k, want)| {
            let i = c_value(k, &q(1, 2), 1e-9)?.c_interval;
            let ok = i.width() <= 5e-5
                && format!("{:.4}", i.lower()) == want
                && format!("{:.4}", i.upper()) == want;
            Ok(Measurement::new(
                format!("c_{k}(1/2)"),
                i,
                format!("width <= 5e-5, rounds to {want}"),
                ok,
            ))
        })
        .collect()
}

fn rational_densities() -> Result<Vec<Measurement>> {
    let mut out = Vec::new();
    for (x, want) in [
        ("0.(10)", q(1, 2)),
        ("0.10000(10)", q(7, 12)),
        ("0.11(101)", q(13, 18)),
        ("0.1000(0110)", q(2, 3)),
        ("0.10000(0110)", q(5, 6)),
        ("0.1000(0111)", q(817, 1320)),
    ] {
        let got = limit_density(&parse_periodic_binary(x)?)?.limit;
        let ok = got == want;
        out.push(Measurement::new(
            format!("limit {x}"),
            got,
            want.to_string(),
            ok,
        ));
    }
    for (x, want) in [
        ("0.1000(0110)", [6u64, 4, 2, 4]),
        ("0.10000(0110)", [8, 6, 4, 6]),
        ("0.1000(0111)", [11, 10, 9, 8]),
    ] {
        let got: Vec<u64> = m_offsets(&parse_periodic_binary(x)?)
            .iter()
            .map(|m| m.abs().to_u64().unwrap_or(u64::MAX))
            .collect();
        let ok = got == want;
        out.push(Measurement::new(
            format!("|m_i| {x}"),
            format!("{got:?}"),
            format!("{want:?}"),
            ok,
        ));
    }
    Ok(out)
}

fn sequence_probability(s: &StepSequence, alpha: &ExactRational) -> ExactRational {
    alpha.pow(s.right_count()) * (ExactRational::one() - alpha).pow(s.up_count())
}

fn crt_identities() -> Result<Vec<Measurement>> {
    let mut mismatches = 0u64;
    let mut checked = 0u64;
    for k in 1..=5usize {
        for s in StepSequence::all(k) {
            for m in [3u64, 4, 6] {
                let product: u64 = primes_below(m)
                    .iter()
                    .map(|&p| p * p - residue_obstructions(&s, p) as u64)
                    .product();
                checked += 1;
                mismatches += u64::from(count_admissible_classes(&s, m)? != product);
            }
        }
    }
    let mut out = vec![Measurement::new(
        "enumeration vs product (k <= 5, m in {3,4,6})",
        format!("{mismatches} mismatches of {checked}"),
        "0 mismatches",
        mismatches == 0,
    )];
    let alphas = [
        (0, 1),
        (1, 9),
        (1, 5),
        (1, 3),
        (2, 5),
        (1, 2),
        (4, 7),
        (2, 3),
        (7, 8),
        (1, 1),
    ];
    for k in 1..=6usize {
        let b = b_poly(k as u32)?;
        let d: u64 = primes_below(k as u64).iter().product();
        let mut bad = 0;
        for &(n, den) in &alphas {
            let a = q(n, den);
            let mut total = ExactRational::zero();
            for s in StepSequence::all(k) {
                let count = count_admissible_classes(&s, k as u64)?;
                total = total + sequence_probability(&s, &a) * ExactRational::new(count, d * d)?;
            }
            bad += usize::from(total != b.eval(&a));
        }
        out.push(Measurement::new(
            format!("sum P(s)|A_{k}(s)|/D^2 vs b_{k}"),
            format!("{bad} mismatches of {}", alphas.len()),
            "0 mismatches",
            bad == 0,
        ));
    }
    Ok(out)
}

fn degree_symmetry() -> Result<Vec<Measurement>> {
    let mut out = Vec::new();
    for k in 1..=8u32 {
        let b = b_poly(k)?;
        let want = 2 * ((k as usize - 1) / 2);
        out.push(Measurement::new(
            format!("deg b_{k}"),
            b.degree(),
            format!("{want}"),
            b.degree() == want,
        ));
        // b(α) - b(1-α) has degree ≤ deg b, so agreement at deg b + 1 points is an identity
        let one = RationalPolynomial::constant(ExactRational::one());
        let mirrored = compose(&b, &(&one - &RationalPolynomial::alpha()));
        out.push(Measurement::new(
            format!("b_{k}(a) - b_{k}(1-a)"),
            &b - &mirrored,
            "0/1",
            mirrored == b,
        ));
    }
    Ok(out)
}

fn compose(p: &RationalPolynomial, inner: &RationalPolynomial) -> RationalPolynomial {
    p.coefficients()
        .iter()
        .rev()
        .fold(RationalPolynomial::zero(), |acc, c| {
            &(&acc * inner) + &RationalPolynomial::constant(c.clone())
        })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Median and per-seed deviations of one statistic from its limit.
fn deviation_checks(label: &str, proportions: &[f64], limit: &Interval) -> [Measurement; 2] {
    let target = limit.midpoint();
    let med = median(&mut proportions.to_vec());
    let worst = proportions
        .iter()
        .map(|p| (p - target).abs())
        .fold(0.0, f64::max);
    let med_dev = (med - target).abs();
    [
        Measurement::new(
            format!("{label} median deviation"),
            format!("{med_dev:.6}"),
            "< 0.005",
            med_dev < 0.005,
        ),
        Measurement::new(
            format!("{label} worst seed deviation"),
            format!("{worst:.6}"),
            "< 0.02",
            worst < 0.02,
        ),
    ]
}

fn monte_carlo() -> Result<Vec<Measurement>> {
    const SEEDS: u64 = 16;
    const STEPS: u64 = 1_000_000;
    const K: usize = 4;
    let mut out = Vec::new();
    for alpha_text in ["0.3", "0.5", "0.7"] {
        let alpha: ExactRational = alpha_text.parse()?;
        let expected = ExpectedConstants::compute(&alpha, K, None, 1e-9)?;
        let runs: Vec<WalkStats> = (0..SEEDS)
            .into_par_iter()
            .map(|seed| simulate(&WalkConfig::new(alpha.clone(), STEPS, K, seed)))
            .collect::<Result<_>>()?;
        for k in 1..=K {
            let props: Vec<f64> = runs.iter().map(|s| s.proportion(k)).collect();
            out.extend(deviation_checks(
                &format!("a={alpha_text} consecutive k={k}"),
                &props,
                &expected.consecutive[k - 1],
            ));
        }
        let props: Vec<f64> = runs.iter().map(WalkStats::change_proportion).collect();
        out.extend(deviation_checks(
            &format!("a={alpha_text} changes"),
            &props,
            &expected.change,
        ));
        for k in 1..=K {
            let limit = expected.exact_runs[k - 1].expect("k + 2 <= MAX_K");
            let props: Vec<f64> = runs.iter().map(|s| s.exact_run_proportion(k)).collect();
            out.extend(deviation_checks(
                &format!("a={alpha_text} exact runs k={k}"),
                &props,
                &limit,
            ));
        }
    }
    Ok(out)
}

fn level_convergence() -> Result<Vec<Measurement>> {
    let alpha = q(1, 2);
    let mut config = WalkConfig::new(alpha.clone(), 1_000_000, 3, 2024);
    config.level = Some(4);
    let stats = simulate(&config)?;
    (1..=3u32)
        .map(|k| {
            let exact = c_level(k, 4, &alpha)?;
            debug_assert_eq!(exact, level_constant(k, 4, &alpha)?);
            let got = stats.level_proportion(k as usize).expect("level tracked");
            let dev = (got - exact.to_f64()).abs();
            Ok(Measurement::new(
                format!("k={k} level-4 proportion vs {exact}"),
                format!("{got:.6} (deviation {dev:.6})"),
                "deviation < 0.01",
                dev < 0.01,
            ))
        })
        .collect()
}

fn deterministic_cross_check() -> Result<Vec<Measurement>> {
    let pb = parse_periodic_binary("0.1000(0110)")?;
    let n = 1_000_000;
    let stats = deterministic_walk(pb.steps(), n, 1)?;
    let got = stats.proportion(1);
    let dev = (got - 2.0 / 3.0).abs();
    Ok(vec![Measurement::new(
        "proportion after 10^6 steps",
        format!("{got:.6} (deviation {dev:.2e})"),
        "within 0.005 of 2/3",
        dev < 0.005,
    )])
}

fn reproducibility() -> Result<Vec<Measurement>> {
    let mut config = WalkConfig::new(q(1, 2), 1_000_000, 4, 9);
    config.level = Some(6);
    let a = simulate(&config)?;
    let b = simulate(&config)?;
    config.streams = 4;
    let whole = simulate(&config)?;
    let again = simulate(&config)?;
    let parts = (0..4)
        .map(|j| simulate_stream(&config, j))
        .collect::<Result<Vec<_>>>()?;
    let merged = parts[1..]
        .iter()
        .try_fold(parts[0].clone(), |acc, p| acc.merge(p))?;
    let split: u64 = parts.iter().map(|p| p.steps_counted).sum();
    Ok(vec![
        Measurement::new(
            "repeat with seed 9",
            if a == b { "identical" } else { "different" },
            "identical",
            a == b,
        ),
        Measurement::new(
            "repeat with 4 streams",
            if whole == again {
                "identical"
            } else {
                "different"
            },
            "identical",
            whole == again,
        ),
        Measurement::new(
            "4-stream run vs merged streams",
            if whole == merged {
                "identical"
            } else {
                "different"
            },
            "identical",
            whole == merged,
        ),
        Measurement::new("steps across streams", split, "1000000", split == 1_000_000),
    ])
}
