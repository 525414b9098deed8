//! Visibility predicates, step sequences, and residue-class enumeration.
//!
//! A step sequence `s = (s_0, …, s_{k-1})` records the cumulative offsets of `k`
//! consecutive walk points, with `s_0 = (0, 0)`. For a prime `p` the class of a
//! base point `(x, y)` mod `p` is obstructed when `(x, y) ≡ -s_i` for some `i`;
//! otherwise every translated point is `p`-visible.

use std::collections::BTreeSet;

use crate::error::{domain, resource, Result};
use crate::numtheory::{gcd, is_prime, primes_below};

/// Largest product of primes `∏_{p<m} p` that [`count_admissible_classes`] enumerates.
pub const MAX_ENUMERATION_MODULUS: u64 = 2310;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LatticePoint {
    pub x: u64,
    pub y: u64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: u64, y: u64) -> Self {
        Self { x, y }
    }
}

/// Visible from the origin: `gcd(x, y) = 1`. The origin itself is not visible.
#[inline]
pub fn is_visible(point: LatticePoint) -> bool {
    gcd(point.x, point.y) == 1
}

/// True when `p` does not divide both coordinates.
pub fn is_p_visible(point: LatticePoint, p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(domain(format!("{p} is not prime")));
    }
    Ok(!point.x.is_multiple_of(p) || !point.y.is_multiple_of(p))
}

/// `p`-visible for every prime `p < m`. Vacuously true for `m < 2`.
pub fn is_visible_at_level(point: LatticePoint, m: u64) -> bool {
    LevelFilter::new(m).accepts_gcd(gcd(point.x, point.y))
}

/// Precomputed primes below a level `m`, for repeated level-visibility tests.
#[derive(Clone, Debug)]
pub struct LevelFilter {
    level: u64,
    primes: Vec<u64>,
}

impl LevelFilter {
    pub fn new(level: u64) -> Self {
        Self {
            level,
            primes: primes_below(level),
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Level visibility expressed through the coordinate gcd `g`.
    #[inline]
    pub fn accepts_gcd(&self, g: u64) -> bool {
        match g {
            1 => true,
            0 => self.primes.is_empty(),
            _ => self.primes.iter().all(|&p| !g.is_multiple_of(p)),
        }
    }
}

/// Cumulative offsets of `k` consecutive walk points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepSequence {
    offsets: Vec<LatticePoint>,
    right_count: u32,
    up_count: u32,
}

impl StepSequence {
    /// Builds a sequence from unit steps; `true` is a right step `(1, 0)`.
    pub fn from_steps(steps: &[bool]) -> Self {
        let mut offsets = Vec::with_capacity(steps.len() + 1);
        let mut here = LatticePoint::ORIGIN;
        offsets.push(here);
        for &right in steps {
            if right {
                here.x += 1;
            } else {
                here.y += 1;
            }
            offsets.push(here);
        }
        let right_count = here.x as u32;
        let up_count = here.y as u32;
        Self {
            offsets,
            right_count,
            up_count,
        }
    }

    /// Builds a sequence from explicit offsets, checking that consecutive
    /// offsets differ by a unit step and that the first is the origin.
    pub fn from_offsets(offsets: &[LatticePoint]) -> Result<Self> {
        if offsets.first() != Some(&LatticePoint::ORIGIN) {
            return Err(domain("step sequence must start at (0, 0)"));
        }
        let mut steps = Vec::with_capacity(offsets.len() - 1);
        for w in offsets.windows(2) {
            match (w[1].x.checked_sub(w[0].x), w[1].y.checked_sub(w[0].y)) {
                (Some(1), Some(0)) => steps.push(true),
                (Some(0), Some(1)) => steps.push(false),
                _ => {
                    return Err(domain(format!(
                        "{:?} -> {:?} is not a unit step",
                        w[0], w[1]
                    )))
                }
            }
        }
        Ok(Self::from_steps(&steps))
    }

    /// The sequence whose `i`-th step is right iff bit `i` of `mask` is set.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        let steps: Vec<bool> = (0..len - 1).map(|i| mask >> i & 1 == 1).collect();
        Self::from_steps(&steps)
    }

    /// All `2^{k-1}` sequences of `k` points, in mask order.
    pub fn all(k: usize) -> impl Iterator<Item = StepSequence> {
        assert!(k >= 1, "a step sequence has at least one point");
        (0..1u64 << (k - 1)).map(move |mask| Self::from_mask(k, mask))
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn offsets(&self) -> &[LatticePoint] {
        &self.offsets
    }

    /// Number of right steps `r(s)`.
    pub fn right_count(&self) -> u32 {
        self.right_count
    }

    /// Number of up steps `u(s)`.
    pub fn up_count(&self) -> u32 {
        self.up_count
    }

    /// Swaps right and up steps.
    pub fn complement(&self) -> Self {
        let steps: Vec<bool> = self.offsets.windows(2).map(|w| w[1].x == w[0].x).collect();
        Self::from_steps(&steps)
    }
}

/// A set of residue classes `(x mod n, y mod n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueClassSet {
    modulus: u64,
    classes: BTreeSet<(u64, u64)>,
}

impl ResidueClassSet {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, x: u64, y: u64) -> bool {
        self.classes.contains(&(x % self.modulus, y % self.modulus))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.classes.iter().copied()
    }
}

fn negated_class(offset: LatticePoint, p: u64) -> (u64, u64) {
    ((p - offset.x % p) % p, (p - offset.y % p) % p)
}

/// The obstructed classes: `(x, y) ≡ -s_i (mod p)` for some `i`.
pub fn obstruction_set(s: &StepSequence, p: u64) -> ResidueClassSet {
    assert!(p >= 1, "modulus must be positive");
    ResidueClassSet {
        modulus: p,
        classes: s.offsets.iter().map(|&o| negated_class(o, p)).collect(),
    }
}

/// The complement of [`obstruction_set`] among the `p²` classes.
pub fn admissible_set(s: &StepSequence, p: u64) -> ResidueClassSet {
    let blocked = obstruction_set(s, p);
    let classes = (0..p)
        .flat_map(|x| (0..p).map(move |y| (x, y)))
        .filter(|&(x, y)| !blocked.classes.contains(&(x, y)))
        .collect();
    ResidueClassSet {
        modulus: p,
        classes,
    }
}

/// Number of distinct obstructed classes mod `p`; equal to `k` once `p ≥ k`.
pub fn residue_obstructions(s: &StepSequence, p: u64) -> usize {
    obstruction_set(s, p).len()
}

/// Number of classes mod `D = ∏_{p<m} p` whose translates of `s` are all
/// visible at level `m`, counted by direct enumeration of the `D²` classes.
pub fn count_admissible_classes(s: &StepSequence, m: u64) -> Result<u64> {
    let primes = primes_below(m);
    let modulus: u64 = primes.iter().product();
    if modulus > MAX_ENUMERATION_MODULUS {
        return Err(resource(format!(
            "enumeration modulus {modulus} exceeds {MAX_ENUMERATION_MODULUS}"
        )));
    }
    let offsets = s.offsets();
    let mut count = 0u64;
    for x in 0..modulus {
        for y in 0..modulus {
            let admissible = primes.iter().all(|&p| {
                offsets
                    .iter()
                    .all(|o| (x + o.x) % p != 0 || (y + o.y) % p != 0)
            });
            if admissible {
                count += 1;
            }
        }
    }
    Ok(count)
}
