//! Seeded Monte Carlo for α-random walks and deterministic digit-driven walks.
//!
//! A walk starts at the origin and steps right `(1, 0)` with probability α,
//! up `(0, 1)` otherwise. For `n` counted indices and window `k_max` the walk
//! is extended to `n + k_max` points so that every statistic indexed by
//! `i ≤ n` sees its full look-ahead. `X_0` (the origin) counts as not visible.
//!
//! Reproducibility contract: stream `j` draws 64-bit words from ChaCha8
//! seeded with `seed_from_u64(seed)` and switched to stream `j`; a word `w`
//! is a right step iff `w < ⌊α·2⁶⁴⌋`. With `streams = s` the `n` steps are
//! split into `s` independent walks (the first `n mod s` get one extra step)
//! whose statistics are summed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constants::{c_value, check_alpha, level_constant, run_exact_limit, MAX_K};
use crate::error::{domain, resource, Result};
use crate::lattice::LevelFilter;
use crate::numtheory::{gcd, ExactRational, Interval};

/// Upper bound on counted steps per simulation.
pub const MAX_STEPS: u64 = 10_000_000_000;

/// Name recorded in output metadata for the step generator.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.3/seed_from_u64+set_stream";

#[derive(Clone, Debug, PartialEq)]
pub struct WalkConfig {
    pub alpha: ExactRational,
    pub steps: u64,
    pub k_max: usize,
    pub level: Option<u64>,
    pub seed: u64,
    pub streams: u32,
}

impl WalkConfig {
    pub fn new(alpha: ExactRational, steps: u64, k_max: usize, seed: u64) -> Self {
        Self {
            alpha,
            steps,
            k_max,
            level: None,
            seed,
            streams: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(&self.alpha)?;
        if self.steps > MAX_STEPS {
            return Err(resource(format!(
                "{} steps exceeds the cap of {MAX_STEPS}",
                self.steps
            )));
        }
        check_window(self.k_max)?;
        if self.streams == 0 {
            return Err(domain("streams must be >= 1"));
        }
        if let Some(m) = self.level {
            if m < 2 {
                return Err(domain("level m must be >= 2"));
            }
        }
        Ok(())
    }

    /// Steps assigned to stream `j`.
    pub fn stream_steps(&self, j: u32) -> u64 {
        let s = u64::from(self.streams);
        self.steps / s + u64::from(u64::from(j) < self.steps % s)
    }
}

fn check_window(k_max: usize) -> Result<()> {
    if k_max == 0 {
        return Err(domain("k_max must be >= 1"));
    }
    if k_max > MAX_K as usize {
        return Err(resource(format!(
            "k_max = {k_max} exceeds the cap of {MAX_K}"
        )));
    }
    Ok(())
}

/// Mergeable visibility counters for one or more walks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkStats {
    pub k_max: usize,
    pub level: Option<u64>,
    pub steps_counted: u64,
    /// Entry `k-1` counts indices `i ≤ n` with `P_i, …, P_{i+k-1}` all visible.
    pub consecutive_visible: Vec<u64>,
    /// Entry `k-1` counts maximal runs of exactly `k` visible points starting at `i ≤ n`.
    pub exact_run_counts: Vec<u64>,
    /// Visible points `P_i`, `i ≤ n`, lying in runs longer than `k_max`.
    pub long_run_visible: u64,
    /// Indices `i ≤ n` where `P_{i-1}` and `P_i` differ in visibility.
    pub change_count: u64,
    /// Same as `consecutive_visible` for visibility at level `m`.
    pub level_consecutive: Option<Vec<u64>>,
}

impl WalkStats {
    pub fn empty(k_max: usize, level: Option<u64>) -> Self {
        Self {
            k_max,
            level,
            steps_counted: 0,
            consecutive_visible: vec![0; k_max],
            exact_run_counts: vec![0; k_max],
            long_run_visible: 0,
            change_count: 0,
            level_consecutive: level.map(|_| vec![0; k_max]),
        }
    }

    /// `S̄_{n,k}`: the proportion of indices starting `k` consecutive visible points.
    pub fn proportion(&self, k: usize) -> f64 {
        ratio(self.consecutive_visible[k - 1], self.steps_counted)
    }

    pub fn level_proportion(&self, k: usize) -> Option<f64> {
        self.level_consecutive
            .as_ref()
            .map(|v| ratio(v[k - 1], self.steps_counted))
    }

    pub fn exact_run_proportion(&self, k: usize) -> f64 {
        ratio(self.exact_run_counts[k - 1], self.steps_counted)
    }

    pub fn change_proportion(&self) -> f64 {
        ratio(self.change_count, self.steps_counted)
    }

    /// Componentwise sum; the two sides must share `k_max` and level.
    pub fn merge(&self, other: &WalkStats) -> Result<WalkStats> {
        if self.k_max != other.k_max || self.level != other.level {
            return Err(domain(format!(
                "cannot merge stats with (k_max, level) = ({}, {:?}) and ({}, {:?})",
                self.k_max, self.level, other.k_max, other.level
            )));
        }
        let add = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
        Ok(WalkStats {
            k_max: self.k_max,
            level: self.level,
            steps_counted: self.steps_counted + other.steps_counted,
            consecutive_visible: add(&self.consecutive_visible, &other.consecutive_visible),
            exact_run_counts: add(&self.exact_run_counts, &other.exact_run_counts),
            long_run_visible: self.long_run_visible + other.long_run_visible,
            change_count: self.change_count + other.change_count,
            level_consecutive: match (&self.level_consecutive, &other.level_consecutive) {
                (Some(a), Some(b)) => Some(add(a, b)),
                _ => None,
            },
        })
    }
}

fn ratio(count: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        count as f64 / n as f64
    }
}

pub fn merge(a: &WalkStats, b: &WalkStats) -> Result<WalkStats> {
    a.merge(b)
}

/// Turns a 0/1 sequence `X_1, …, X_H` into run-based counts, one maximal run at a time.
struct RunTracker {
    n: u64,
    consecutive: Vec<u64>,
    exact: Option<Vec<u64>>,
    long_run_visible: u64,
    run_start: Option<u64>,
}

impl RunTracker {
    fn new(n: u64, k_max: usize, track_exact: bool) -> Self {
        Self {
            n,
            consecutive: vec![0; k_max],
            exact: track_exact.then(|| vec![0; k_max]),
            long_run_visible: 0,
            run_start: None,
        }
    }

    #[inline]
    fn observe(&mut self, i: u64, visible: bool) {
        match (visible, self.run_start) {
            (true, None) => self.run_start = Some(i),
            (false, Some(start)) => {
                self.close(start, i, true);
                self.run_start = None;
            }
            _ => {}
        }
    }

    /// Run occupies `[start, end)`; `terminated` means `X_end = 0` was observed.
    fn close(&mut self, start: u64, end: u64, terminated: bool) {
        if start > self.n {
            return;
        }
        let k_max = self.consecutive.len() as u64;
        for k in 1..=k_max {
            if end < start + k {
                break;
            }
            let last = self.n.min(end - k);
            self.consecutive[(k - 1) as usize] += last - start + 1;
        }
        let len = end - start;
        if let Some(exact) = self.exact.as_mut() {
            if terminated && len <= k_max {
                exact[(len - 1) as usize] += 1;
            } else {
                self.long_run_visible += self.n.min(end - 1) - start + 1;
            }
        }
    }

    fn finish(&mut self, horizon: u64) {
        if let Some(start) = self.run_start.take() {
            self.close(start, horizon + 1, false);
        }
    }
}

/// Walks `n + k_max` points drawn from `next_step` (`true` = right) and counts.
fn walk_kernel(
    n: u64,
    k_max: usize,
    level: Option<&LevelFilter>,
    mut next_step: impl FnMut() -> Option<bool>,
) -> Result<WalkStats> {
    let mut stats = WalkStats::empty(k_max, level.map(LevelFilter::level));
    if n == 0 {
        return Ok(stats);
    }
    let horizon = n + k_max as u64;
    let mut full = RunTracker::new(n, k_max, true);
    let mut partial = level.map(|_| RunTracker::new(n, k_max, false));
    let (mut x, mut y) = (0u64, 0u64);
    let mut previous = false;
    for i in 1..=horizon {
        match next_step() {
            Some(true) => x += 1,
            Some(false) => y += 1,
            None => {
                return Err(domain(format!(
                    "digit stream exhausted after {} of {horizon} steps",
                    i - 1
                )))
            }
        }
        let g = gcd(x, y);
        let visible = g == 1;
        full.observe(i, visible);
        if let (Some(tracker), Some(filter)) = (partial.as_mut(), level) {
            tracker.observe(i, filter.accepts_gcd(g));
        }
        if i <= n {
            stats.change_count += u64::from(visible != previous);
            previous = visible;
        }
    }
    full.finish(horizon);
    stats.steps_counted = n;
    stats.consecutive_visible = full.consecutive;
    stats.exact_run_counts = full.exact.expect("tracked");
    stats.long_run_visible = full.long_run_visible;
    if let Some(mut tracker) = partial {
        tracker.finish(horizon);
        stats.level_consecutive = Some(tracker.consecutive);
    }
    Ok(stats)
}

/// Runs stream `j` of the configuration on its own.
pub fn simulate_stream(config: &WalkConfig, j: u32) -> Result<WalkStats> {
    config.validate()?;
    if j >= config.streams {
        return Err(domain(format!(
            "stream {j} out of range for {} streams",
            config.streams
        )));
    }
    let threshold = config.alpha.scaled_floor_2_64()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::from(j));
    let filter = config.level.map(LevelFilter::new);
    walk_kernel(
        config.stream_steps(j),
        config.k_max,
        filter.as_ref(),
        || Some(u128::from(rng.next_u64()) < threshold),
    )
}

/// Runs all streams (in parallel) and merges them in stream order.
pub fn simulate(config: &WalkConfig) -> Result<WalkStats> {
    config.validate()?;
    let parts: Vec<WalkStats> = (0..config.streams)
        .into_par_iter()
        .map(|j| simulate_stream(config, j))
        .collect::<Result<_>>()?;
    parts
        .iter()
        .try_fold(WalkStats::empty(config.k_max, config.level), |acc, s| {
            acc.merge(s)
        })
}

/// Same statistics as [`simulate`], with steps taken from binary digits
/// (`true`/1 = right). The stream must supply `n + k_max` digits.
pub fn deterministic_walk<I>(digits: I, n: u64, k_max: usize) -> Result<WalkStats>
where
    I: IntoIterator<Item = bool>,
{
    check_window(k_max)?;
    let mut digits = digits.into_iter();
    walk_kernel(n, k_max, None, || digits.next())
}

/// Which statistic a report row compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Consecutive,
    LevelConsecutive,
    ExactRun,
    Change,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Consecutive => "consecutive",
            Quantity::LevelConsecutive => "level_consecutive",
            Quantity::ExactRun => "exact_run",
            Quantity::Change => "change",
        }
    }
}

/// Limit values the empirical proportions are compared with.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedConstants {
    /// `c_k(α)` for `k = 1..=k_max`.
    pub consecutive: Vec<Interval>,
    /// `c_k - 2c_{k+1} + c_{k+2}` where `k + 2 ≤ MAX_K`.
    pub exact_runs: Vec<Option<Interval>>,
    pub change: Interval,
    /// Exact level constants for `k = 1..=k_max`.
    pub level: Option<Vec<ExactRational>>,
}

impl ExpectedConstants {
    pub fn compute(
        alpha: &ExactRational,
        k_max: usize,
        level: Option<u64>,
        tolerance: f64,
    ) -> Result<Self> {
        check_window(k_max)?;
        let consecutive = (1..=k_max as u32)
            .map(|k| c_value(k, alpha, tolerance).map(|r| r.c_interval))
            .collect::<Result<Vec<_>>>()?;
        let exact_runs = (1..=k_max as u32)
            .map(|k| {
                if k + 2 <= MAX_K {
                    run_exact_limit(k, alpha, tolerance).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let change = crate::constants::visibility_change_limit(alpha, tolerance)?;
        let level = level
            .map(|m| {
                (1..=k_max as u32)
                    .map(|k| level_constant(k, m, alpha))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        Ok(Self {
            consecutive,
            exact_runs,
            change,
            level,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub quantity: Quantity,
    /// Window length; 1 for changes.
    pub k: usize,
    pub count: u64,
    pub proportion: f64,
    pub expected: Interval,
    /// Distance from the proportion to the expected interval.
    pub deviation: f64,
    pub threshold: f64,
    pub flagged: bool,
}

/// Compares proportions with limits, flagging deviations above
/// `flag_multiple · n^{-1/4}`. Empty when no steps were counted.
pub fn empirical_report(
    stats: &WalkStats,
    expected: &ExpectedConstants,
    flag_multiple: f64,
) -> Vec<ReportRow> {
    let n = stats.steps_counted;
    if n == 0 {
        return Vec::new();
    }
    let threshold = flag_multiple * (n as f64).powf(-0.25);
    let row = |quantity, k, count: u64, expected: Interval| {
        let proportion = count as f64 / n as f64;
        let deviation = (expected.lower() - proportion)
            .max(proportion - expected.upper())
            .max(0.0);
        ReportRow {
            quantity,
            k,
            count,
            proportion,
            expected,
            deviation,
            threshold,
            flagged: deviation > threshold,
        }
    };
    let mut rows = Vec::new();
    for k in 1..=stats.k_max.min(expected.consecutive.len()) {
        rows.push(row(
            Quantity::Consecutive,
            k,
            stats.consecutive_visible[k - 1],
            expected.consecutive[k - 1],
        ));
    }
    if let (Some(counts), Some(exact)) = (&stats.level_consecutive, &expected.level) {
        for k in 1..=stats.k_max.min(exact.len()) {
            rows.push(row(
                Quantity::LevelConsecutive,
                k,
                counts[k - 1],
                Interval::from_rational(&exact[k - 1]),
            ));
        }
    }
    for k in 1..=stats.k_max.min(expected.exact_runs.len()) {
        if let Some(limit) = expected.exact_runs[k - 1] {
            rows.push(row(
                Quantity::ExactRun,
                k,
                stats.exact_run_counts[k - 1],
                limit,
            ));
        }
    }
    rows.push(row(
        Quantity::Change,
        1,
        stats.change_count,
        expected.change,
    ));
    rows
}
