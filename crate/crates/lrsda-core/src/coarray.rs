//! Exact integer multiset algebra for sum/difference co-arrays.
//!
//! Everything here is combinatorial and exact: lags are `i64`, multiplicities
//! are `u64`, redundancies are rationals. The enumeration in [`so_eca`] is the
//! ground truth against which every closed-form DOF or hole-freeness claim is
//! adjudicated.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::array::SensorArray;

/// One of the four second-order cumulant cases and the lag it assigns to an
/// ordered sensor pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SocCase {
    /// `p₁ + p₂` (conjugate-free product).
    Sum,
    /// `p₁ − p₂` (ordinary covariance).
    Diff,
    /// `−p₁ + p₂` (conjugated-first covariance).
    NegDiff,
    /// `−p₁ − p₂` (fully conjugated product).
    NegSum,
}

impl SocCase {
    pub const ALL: [SocCase; 4] = [
        SocCase::Sum,
        SocCase::Diff,
        SocCase::NegDiff,
        SocCase::NegSum,
    ];

    /// Case index 1..=4 as conventionally numbered.
    pub fn index(self) -> usize {
        match self {
            SocCase::Sum => 1,
            SocCase::Diff => 2,
            SocCase::NegDiff => 3,
            SocCase::NegSum => 4,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            1 => Some(SocCase::Sum),
            2 => Some(SocCase::Diff),
            3 => Some(SocCase::NegDiff),
            4 => Some(SocCase::NegSum),
            _ => None,
        }
    }

    /// Lag contributed by the ordered pair `(p1, p2)`.
    pub fn lag(self, p1: i64, p2: i64) -> i64 {
        match self {
            SocCase::Sum => p1 + p2,
            SocCase::Diff => p1 - p2,
            SocCase::NegDiff => -p1 + p2,
            SocCase::NegSum => -p1 - p2,
        }
    }
}

/// A multiset of integer lags: map lag → multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagMultiset {
    entries: BTreeMap<i64, u64>,
    /// Sensor count of the generating array.
    source_size: usize,
}

impl LagMultiset {
    pub fn new(entries: BTreeMap<i64, u64>, source_size: usize) -> Self {
        debug_assert!(entries.values().all(|&m| m >= 1));
        Self {
            entries,
            source_size,
        }
    }

    pub fn entries(&self) -> &BTreeMap<i64, u64> {
        &self.entries
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn multiplicity(&self, lag: i64) -> u64 {
        self.entries.get(&lag).copied().unwrap_or(0)
    }

    /// Sum of all multiplicities.
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn unique_lags(&self) -> Vec<i64> {
        self.entries.keys().copied().collect()
    }

    pub fn contains(&self, lag: i64) -> bool {
        self.entries.contains_key(&lag)
    }

    /// The mirror multiset with every lag negated.
    pub fn negated(&self) -> Self {
        let entries = self.entries.iter().map(|(&l, &m)| (-l, m)).collect();
        Self {
            entries,
            source_size: self.source_size,
        }
    }

    /// Multiset-sum (bag sum): multiplicities add.
    pub fn multiset_sum(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        for (&lag, &m) in &other.entries {
            *entries.entry(lag).or_insert(0) += m;
        }
        Self {
            entries,
            source_size: self.source_size.max(other.source_size),
        }
    }

    pub fn summary(&self) -> CoArraySummary {
        CoArraySummary::from_unique_lags(self.unique_lags())
    }
}

/// Consecutive extent, holes, and DOF of a co-array's unique-lag set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoArraySummary {
    /// Sorted unique lags.
    pub unique_lags: Vec<i64>,
    /// Largest `U ≥ 0` with every lag of `[−U, U]` present (−1 if 0 absent).
    pub u: i64,
    /// Missing non-negative integers below the maximum lag.
    pub holes: Vec<i64>,
    /// `2U + 1`, the usable virtual sensors of the consecutive segment.
    pub dof: i64,
}

impl CoArraySummary {
    pub fn from_unique_lags(unique_lags: Vec<i64>) -> Self {
        debug_assert!(unique_lags.windows(2).all(|w| w[0] < w[1]));
        let contains = |lag: i64| unique_lags.binary_search(&lag).is_ok();
        let mut u = -1;
        if contains(0) {
            u = 0;
            while contains(u + 1) && contains(-u - 1) {
                u += 1;
            }
        }
        let max = unique_lags.last().copied().unwrap_or(0);
        let holes = (0..max).filter(|&lag| !contains(lag)).collect();
        let dof = if u >= 0 { 2 * u + 1 } else { 0 };
        Self {
            unique_lags,
            u,
            holes,
            dof,
        }
    }

    /// True when the non-negative lags run contiguously to the maximum.
    pub fn is_hole_free(&self) -> bool {
        self.holes.is_empty()
    }
}

/// Cross sum `{ pᵢ + pⱼ }` of two position sets, as a set.
pub fn cross_sum(s: &[i64], s_prime: &[i64]) -> Vec<i64> {
    let mut sums: Vec<i64> = s
        .iter()
        .flat_map(|&p| s_prime.iter().map(move |&q| p + q))
        .collect();
    sums.sort_unstable();
    sums.dedup();
    sums
}

// above this aperture, dense counting buffers would dwarf the N² pair work
const DENSE_APERTURE_LIMIT: i64 = 1 << 21;

fn pair_multiset(s: &SensorArray, case: SocCase) -> LagMultiset {
    let positions = s.positions();
    let max = s.aperture();
    if max <= DENSE_APERTURE_LIMIT {
        let offset = 2 * max;
        let mut counts = vec![0u64; (4 * max + 1) as usize];
        for &p1 in positions {
            for &p2 in positions {
                counts[(case.lag(p1, p2) + offset) as usize] += 1;
            }
        }
        let entries = counts
            .iter()
            .enumerate()
            .filter(|&(_, &m)| m > 0)
            .map(|(i, &m)| (i as i64 - offset, m))
            .collect();
        return LagMultiset::new(entries, positions.len());
    }
    let mut entries = BTreeMap::new();
    for &p1 in positions {
        for &p2 in positions {
            *entries.entry(case.lag(p1, p2)).or_insert(0) += 1;
        }
    }
    LagMultiset::new(entries, s.len())
}

/// Sum co-array: multiset of `pᵢ + pⱼ` over all ordered pairs.
pub fn sca(s: &SensorArray) -> LagMultiset {
    pair_multiset(s, SocCase::Sum)
}

/// Difference co-array: multiset of `pᵢ − pⱼ` over all ordered pairs.
pub fn dca(s: &SensorArray) -> LagMultiset {
    pair_multiset(s, SocCase::Diff)
}

/// The lag multiset of a single cumulant case, enumerated directly from
/// ordered pairs (the mirror relations between cases are a test target, not
/// an assumption here).
pub fn soca(s: &SensorArray, case: SocCase) -> LagMultiset {
    pair_multiset(s, case)
}

/// The extended co-array: multiset-sum of all four cumulant cases, plus the
/// summary of its unique-lag set. Total multiplicity is `4N²`.
///
/// Counts only the sum and difference pair multisets and composes the other
/// two cases by mirror symmetry; the quadruple-loop oracle in the test suite
/// checks this shortcut on every small array.
pub fn so_eca(s: &SensorArray) -> (LagMultiset, CoArraySummary) {
    let positions = s.positions();
    let max = s.aperture();
    if max <= DENSE_APERTURE_LIMIT {
        // sums live in [0, 2max], diffs in [-max, max]
        let mut sums = vec![0u64; (2 * max + 1) as usize];
        let mut diffs = vec![0u64; (2 * max + 1) as usize];
        for &p1 in positions {
            for &p2 in positions {
                sums[(p1 + p2) as usize] += 1;
                diffs[(p1 - p2 + max) as usize] += 1;
            }
        }
        let mut entries = BTreeMap::new();
        for z in -2 * max..=2 * max {
            let mut m = 0;
            if z >= 0 {
                m += sums[z as usize]; // case 1
            }
            if z <= 0 {
                m += sums[(-z) as usize]; // case 4
            }
            if z.abs() <= max {
                // cases 2 and 3
                m += diffs[(z + max) as usize] + diffs[(-z + max) as usize];
            }
            if m > 0 {
                entries.insert(z, m);
            }
        }
        let combined = LagMultiset::new(entries, positions.len());
        let summary = combined.summary();
        return (combined, summary);
    }
    let sum = pair_multiset(s, SocCase::Sum);
    let diff = pair_multiset(s, SocCase::Diff);
    let combined = sum
        .multiset_sum(&diff)
        .multiset_sum(&diff.negated())
        .multiset_sum(&sum.negated());
    let summary = combined.summary();
    (combined, summary)
}

/// Weight function per pair type, available for arrays that carry sub-array
/// metadata. `first_only` counts pairs inside sub-array 1, `mixed` counts
/// pairs straddling sub-array 1 and sub-arrays 2∪3 (both orders), and
/// `tail_only` counts pairs inside sub-arrays 2∪3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDecomposition {
    pub first_only: BTreeMap<i64, u64>,
    pub mixed: BTreeMap<i64, u64>,
    pub tail_only: BTreeMap<i64, u64>,
}

/// The weight function `W(z)`: multiplicity of every lag across all ordered
/// pairs and all four cumulant cases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub weights: BTreeMap<i64, u64>,
    pub decomposition: Option<WeightDecomposition>,
}

fn count_pairs_into(acc: &mut BTreeMap<i64, u64>, left: &[i64], right: &[i64]) {
    for case in SocCase::ALL {
        for &p1 in left {
            for &p2 in right {
                *acc.entry(case.lag(p1, p2)).or_insert(0) += 1;
            }
        }
    }
}

/// Computes `W(z)` for an array; identical to the SO-ECA multiset entries.
pub fn weight_function(s: &SensorArray) -> WeightFunction {
    let (multiset, _) = so_eca(s);
    let decomposition = s.subarrays().map(|subs| {
        let tail: Vec<i64> = subs.second.iter().chain(&subs.third).copied().collect();
        let mut first_only = BTreeMap::new();
        let mut mixed = BTreeMap::new();
        let mut tail_only = BTreeMap::new();
        count_pairs_into(&mut first_only, &subs.first, &subs.first);
        count_pairs_into(&mut mixed, &subs.first, &tail);
        count_pairs_into(&mut mixed, &tail, &subs.first);
        count_pairs_into(&mut tail_only, &tail, &tail);
        WeightDecomposition {
            first_only,
            mixed,
            tail_only,
        }
    });
    WeightFunction {
        weights: multiset.entries().clone(),
        decomposition,
    }
}

/// Redundancy of an `N`-sensor array with a consecutive sum co-array,
/// `(N(N+1)/2)/(2N+1)`, exact. Evaluated verbatim; note the claimed lower
/// bound of 1 fails for small `N` (3/5 at `N = 2`).
pub fn redundancy_sum(n: i64) -> Rational64 {
    assert!(n >= 1, "sensor count must be positive");
    Rational64::new(n * (n + 1) / 2, 2 * n + 1)
}

/// Redundancy of an `N`-sensor array with a consecutive difference co-array
/// of aperture `L`, `(N(N−1)/2)/L`, exact.
pub fn redundancy_diff(n: i64, aperture_l: i64) -> Rational64 {
    assert!(n >= 1, "sensor count must be positive");
    assert!(aperture_l >= 1, "aperture must be positive");
    Rational64::new(n * (n - 1) / 2, aperture_l)
}

/// Redundancy of an extended co-array: `N²/U` with `U` enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Redundancy {
    Finite(Rational64),
    /// `U = 0`: no consecutive segment beyond the origin.
    Infinite,
}

impl Redundancy {
    pub fn as_f64(&self) -> f64 {
        match self {
            Redundancy::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Redundancy::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<Rational64> {
        match self {
            Redundancy::Finite(r) => Some(*r),
            Redundancy::Infinite => None,
        }
    }
}

impl fmt::Display for Redundancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Redundancy::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Redundancy::Infinite => write!(f, "inf"),
        }
    }
}

/// `R_w = N²/U` for the enumerated extended co-array of `s`.
pub fn redundancy_soeca(s: &SensorArray) -> Redundancy {
    let (_, summary) = so_eca(s);
    let n = s.len() as i64;
    if summary.u <= 0 {
        Redundancy::Infinite
    } else {
        Redundancy::Finite(Rational64::new(n * n, summary.u))
    }
}

/// Lower bound on the extended co-array redundancy,
/// `L₂(N) = (1 + 2/(3π)) · 2N²/(N² + N)`.
pub fn redundancy_lower_bound(n: u64) -> f64 {
    assert!(n >= 1, "sensor count must be positive");
    let n = n as f64;
    (1.0 + 2.0 / (3.0 * PI)) * 2.0 * n * n / (n * n + n)
}

/// Upper bound on the consecutive segment size, `|𝕌| ≤ 1 + 2N²/L₂(N)`;
/// approaches `0.8249 N²` (i.e. `0.4125 N²` per side) for large `N`.
pub fn asymptotic_u_bound(n: u64) -> f64 {
    let k = (n as f64) * (n as f64);
    1.0 + 2.0 * k / redundancy_lower_bound(n)
}
