//! Exact visible-point densities of walks encoded by eventually periodic
//! binary expansions `0.a_1…a_m (a_{m+1}…a_{m+l})`.
//!
//! After the aperiodic prefix the walk sits at `(x₀, y₀)`. Write `(r_i, t_i)`
//! for the displacement after the first `i` periodic digits and `(r, t)` for
//! the full period. Column `i` holds the points
//! `(x₀ + r_i + j r, y₀ + t_i + j t)`, `j ≥ 0`; any common divisor of such a
//! point divides `m_i = t(x₀ + r_i) - r(y₀ + t_i)`, so visibility in the
//! column is periodic and has an exact density `δ_i`. The walk's limiting
//! proportion of visible points is the mean of the `δ_i`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{domain, parse, resource, Error, Result};
use crate::lattice::LatticePoint;
use crate::numtheory::{gcd, prime_divisors, ExactRational};
use crate::simulator::deterministic_walk;

/// Longest accepted digit string (prefix plus period).
pub const MAX_DIGITS: usize = 1 << 20;

/// A binary expansion split into an aperiodic prefix and a nonempty period.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicBinary {
    aperiodic: Vec<u8>,
    periodic: Vec<u8>,
}

impl PeriodicBinary {
    pub fn new(aperiodic: Vec<u8>, periodic: Vec<u8>) -> Result<Self> {
        if periodic.is_empty() {
            return Err(domain("the period must contain at least one digit"));
        }
        if aperiodic.iter().chain(&periodic).any(|&d| d > 1) {
            return Err(domain("binary digits must be 0 or 1"));
        }
        if periodic.iter().all(|&d| d == 1) {
            return Err(domain(
                "a period of all ones is excluded: the expansion ends in repeating 1s, \
                 which has an equivalent terminating form",
            ));
        }
        if aperiodic.len() + periodic.len() > MAX_DIGITS {
            return Err(resource(format!("more than {MAX_DIGITS} digits")));
        }
        Ok(Self {
            aperiodic,
            periodic,
        })
    }

    pub fn aperiodic(&self) -> &[u8] {
        &self.aperiodic
    }

    pub fn periodic(&self) -> &[u8] {
        &self.periodic
    }

    pub fn period_len(&self) -> usize {
        self.periodic.len()
    }

    /// Endless step stream: `true` for a 1 (right), `false` for a 0 (up).
    pub fn steps(&self) -> impl Iterator<Item = bool> + '_ {
        self.aperiodic
            .iter()
            .chain(self.periodic.iter().cycle())
            .map(|&d| d == 1)
    }

    /// Same value with the first period digit moved into the prefix and the period rotated.
    pub fn rotated(&self) -> Self {
        let mut aperiodic = self.aperiodic.clone();
        aperiodic.push(self.periodic[0]);
        let mut periodic = self.periodic.clone();
        periodic.rotate_left(1);
        Self {
            aperiodic,
            periodic,
        }
    }
}

impl fmt::Display for PeriodicBinary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = |ds: &[u8]| ds.iter().map(|d| char::from(b'0' + d)).collect::<String>();
        write!(
            f,
            "0.{}({})",
            digits(&self.aperiodic),
            digits(&self.periodic)
        )
    }
}

/// Parses `0.<digits>(<digits>)`, e.g. `0.1000(0110)` or `0.(10)`.
impl FromStr for PeriodicBinary {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let s = text.trim();
        let body = s
            .strip_prefix("0.")
            .ok_or_else(|| parse(format!("{s:?}: expected a leading \"0.\"")))?;
        let (prefix, rest) = body
            .split_once('(')
            .ok_or_else(|| parse(format!("{s:?}: expected a parenthesised period")))?;
        let period = rest
            .strip_suffix(')')
            .ok_or_else(|| parse(format!("{s:?}: expected the period to end with ')'")))?;
        let digits = |part: &str| -> Result<Vec<u8>> {
            part.bytes()
                .map(|b| match b {
                    b'0' => Ok(0),
                    b'1' => Ok(1),
                    _ => Err(parse(format!(
                        "{s:?}: {:?} is not a binary digit",
                        b as char
                    ))),
                })
                .collect()
        };
        let aperiodic = digits(prefix)?;
        let periodic = digits(period)?;
        if periodic.is_empty() {
            return Err(parse(format!("{s:?}: the period is empty")));
        }
        PeriodicBinary::new(aperiodic, periodic).map_err(|e| match e {
            Error::Domain(msg) => parse(format!("{s:?}: {msg}")),
            other => other,
        })
    }
}

pub fn parse_periodic_binary(text: &str) -> Result<PeriodicBinary> {
    text.parse()
}

/// Walk geometry shared by every column.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Geometry {
    start: LatticePoint,
    period: (u64, u64),
    columns: Vec<(u64, u64)>,
}

impl Geometry {
    fn of(pb: &PeriodicBinary) -> Self {
        let mut here = LatticePoint::ORIGIN;
        for &d in &pb.aperiodic {
            if d == 1 {
                here.x += 1;
            } else {
                here.y += 1;
            }
        }
        let mut columns = Vec::with_capacity(pb.periodic.len());
        let (mut r, mut t) = (0u64, 0u64);
        for &d in &pb.periodic {
            if d == 1 {
                r += 1;
            } else {
                t += 1;
            }
            columns.push((r, t));
        }
        Self {
            start: here,
            period: (r, t),
            columns,
        }
    }

    /// First point of column `i` (0-based here).
    fn column_base(&self, i: usize) -> (u64, u64) {
        let (ri, ti) = self.columns[i];
        (self.start.x + ri, self.start.y + ti)
    }

    fn m_value(&self, i: usize) -> BigInt {
        let (a, b) = self.column_base(i);
        let (r, t) = self.period;
        BigInt::from(t) * a - BigInt::from(r) * b
    }
}

/// Everything needed to read off the limiting density.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    /// Point reached after the aperiodic digits.
    pub x0y0: LatticePoint,
    /// Displacement `(r, t)` over one period.
    pub period_vector: (u64, u64),
    /// `(r_i, t_i)` for `i = 1..=l`.
    pub column_offsets: Vec<(u64, u64)>,
    /// Signed `m_i`.
    pub m_values: Vec<BigInt>,
    pub deltas: Vec<ExactRational>,
    pub limit: ExactRational,
}

/// The signed `m_i = t(x₀ + r_i) - r(y₀ + t_i)` for `i = 1..=l`.
pub fn m_offsets(pb: &PeriodicBinary) -> Vec<BigInt> {
    let g = Geometry::of(pb);
    (0..pb.period_len()).map(|i| g.m_value(i)).collect()
}

fn column_delta(g: &Geometry, i: usize) -> Result<ExactRational> {
    let m = g.m_value(i);
    if m.is_zero() {
        // the column lies on a ray through the origin; only its first point can be visible
        return Ok(ExactRational::zero());
    }
    let magnitude = m.abs().to_u64().ok_or_else(|| {
        resource(format!(
            "|m_{}| = {} does not fit in 64 bits",
            i + 1,
            m.abs()
        ))
    })?;
    let (r, t) = g.period;
    let (a, b) = g.column_base(i);
    let shared = gcd(magnitude, gcd(r, t));
    let mut delta = ExactRational::one();
    for p in prime_divisors(magnitude) {
        if shared.is_multiple_of(p) {
            // p divides r and t: either every point of the column is divisible by p or none is
            if a % p == 0 && b % p == 0 {
                return Ok(ExactRational::zero());
            }
        } else {
            delta = delta * ExactRational::new(p - 1, p).expect("p > 0");
        }
    }
    Ok(delta)
}

/// Density `δ_i` of visible points in column `i` (1-based).
pub fn column_density(pb: &PeriodicBinary, i: usize) -> Result<ExactRational> {
    if i == 0 || i > pb.period_len() {
        return Err(domain(format!(
            "column {i} is outside 1..={}",
            pb.period_len()
        )));
    }
    column_delta(&Geometry::of(pb), i - 1)
}

/// The limiting proportion of visible points, `(1/l) Σ δ_i`, with its ingredients.
pub fn limit_density(pb: &PeriodicBinary) -> Result<DensityReport> {
    let g = Geometry::of(pb);
    let l = pb.period_len();
    let deltas = (0..l)
        .map(|i| column_delta(&g, i))
        .collect::<Result<Vec<_>>>()?;
    let limit =
        deltas.iter().cloned().sum::<ExactRational>() / ExactRational::from_integer(l as u64);
    Ok(DensityReport {
        x0y0: g.start,
        period_vector: g.period,
        m_values: (0..l).map(|i| g.m_value(i)).collect(),
        column_offsets: g.columns,
        deltas,
        limit,
    })
}

/// Empirical proportion over a finite walk compared with the exact limit.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCheck {
    pub steps: u64,
    pub visible: u64,
    pub empirical: ExactRational,
    pub limit: ExactRational,
    pub deviation: f64,
    /// Deterministic bound `C/n` on `|S̄_n - limit|`.
    pub bound: ExactRational,
    pub within_bound: bool,
}

/// Walks `n` steps and checks the proportion of visible points.
///
/// Column `i` is periodic with period `rad(|m_i|)`, so after `N` of its points
/// the visible count is within `rad(|m_i|)` of `N δ_i` (within 1 when
/// `m_i = 0`). Adding the prefix and the uneven split of `n` between columns
/// gives `|S̄_n - limit| ≤ (2·prefix + l + Σ_i rad(|m_i|)) / n`.
pub fn verify_empirically(pb: &PeriodicBinary, n: u64) -> Result<EmpiricalCheck> {
    let l = pb.period_len() as u64;
    if n < l {
        return Err(domain(format!(
            "need at least one full period ({l} steps), got {n}"
        )));
    }
    let report = limit_density(pb)?;
    let stats = deterministic_walk(pb.steps(), n, 1)?;
    let visible = stats.consecutive_visible[0];
    let empirical = ExactRational::new(visible, n).expect("n > 0");
    let deviation = (&empirical - &report.limit).abs().to_f64();
    let mut constant = 2 * pb.aperiodic.len() as u64 + l;
    for m in &report.m_values {
        constant += match m.abs().to_u64() {
            Some(0) => 1,
            Some(v) => prime_divisors(v).iter().product::<u64>(),
            None => return Err(resource("m_i does not fit in 64 bits")),
        };
    }
    let bound = ExactRational::new(constant, n).expect("n > 0");
    let within_bound = (&empirical - &report.limit).abs() <= bound;
    Ok(EmpiricalCheck {
        steps: n,
        visible,
        empirical,
        limit: report.limit,
        deviation,
        bound,
        within_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pb(s: &str) -> PeriodicBinary {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::ratio(n, d)
    }

    #[test]
    fn parses_examples() {
        let x = pb("0.1000(0110)");
        assert_eq!(x.aperiodic(), &[1, 0, 0, 0]);
        assert_eq!(x.periodic(), &[0, 1, 1, 0]);
        let y = pb("0.(10)");
        assert!(y.aperiodic().is_empty());
        assert_eq!(y.periodic(), &[1, 0]);
        assert_eq!(x.to_string(), "0.1000(0110)");
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "0.0(1)", "0.(11)", "0.1000", "1.(01)", "0.(0120)", "0.()", "0.1(0", "0.1(0)1",
        ] {
            assert!(
                matches!(bad.parse::<PeriodicBinary>(), Err(Error::Parse(_))),
                "{bad}"
            );
        }
        let msg = "0.0(1)".parse::<PeriodicBinary>().unwrap_err().to_string();
        assert!(msg.contains("all ones"), "{msg}");
    }

    #[test]
    fn column_densities() {
        let x = pb("0.1000(0110)");
        assert_eq!(column_density(&x, 1).unwrap(), q(2, 3));
        assert_eq!(column_density(&x, 2).unwrap(), q(0, 1));
        assert_eq!(column_density(&x, 3).unwrap(), q(1, 1));
        assert_eq!(column_density(&x, 4).unwrap(), q(1, 1));
        assert_eq!(column_density(&pb("0.(0)"), 1).unwrap(), q(0, 1));
        assert!(column_density(&x, 0).is_err());
        assert!(column_density(&x, 5).is_err());
    }

    #[test]
    fn worked_example_densities() {
        for (x, n, d) in [
            ("0.(10)", 1, 2),
            ("0.10000(10)", 7, 12),
            ("0.11(101)", 13, 18),
            ("0.1000(0110)", 2, 3),
            ("0.10000(0110)", 5, 6),
            ("0.1000(0111)", 817, 1320),
        ] {
            assert_eq!(limit_density(&pb(x)).unwrap().limit, q(n, d), "{x}");
        }
    }

    #[test]
    fn m_values_for_worked_examples() {
        let abs = |s: &str| -> Vec<u64> {
            m_offsets(&pb(s))
                .iter()
                .map(|m| m.abs().to_u64().unwrap())
                .collect()
        };
        assert_eq!(abs("0.1000(0110)"), vec![6, 4, 2, 4]);
        assert_eq!(abs("0.10000(0110)"), vec![8, 6, 4, 6]);
        assert_eq!(abs("0.1000(0111)"), vec![11, 10, 9, 8]);
    }

    #[test]
    fn report_fields() {
        let r = limit_density(&pb("0.1000(0110)")).unwrap();
        assert_eq!(r.x0y0, LatticePoint::new(1, 3));
        assert_eq!(r.period_vector, (2, 2));
        assert_eq!(r.column_offsets, vec![(0, 1), (1, 1), (2, 1), (2, 2)]);
        assert_eq!(r.limit, q(2, 3));
    }

    #[test]
    fn trivial_walk_check() {
        let c = verify_empirically(&pb("0.(0)"), 100).unwrap();
        assert_eq!(c.empirical, q(1, 100));
        assert_eq!(c.limit, q(0, 1));
        assert!(c.within_bound);
        assert!(verify_empirically(&pb("0.(0110)"), 3).is_err());
    }
}
