//! Construction of the low-redundancy sum-and-difference array (LR-SDA) and
//! of the closed-form DOF expressions it is compared against.
//!
//! The LR-SDA is three side-by-side ULAs: sub-array 1 with inter-spacing
//! `N₂+1`, and sub-arrays 2 and 3 with unit spacing, the whole geometry
//! shifted right by `δ`. Closed-form DOF values computed here are *claims*;
//! the enumeration in [`crate::coarray`] is authoritative.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array::{SensorArray, SubArrays};
use crate::coarray;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

fn require(cond: bool, message: impl Into<String>) -> Result<(), GeometryError> {
    if cond {
        Ok(())
    } else {
        Err(GeometryError::InvalidParam(message.into()))
    }
}

/// Sizing of an LR-SDA: `n1` sensors in sub-array 1, `n2` split between
/// sub-array 2 (`n2 − eta` sensors) and sub-array 3 (`eta` sensors), the
/// whole array shifted right by `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LrSdaParams {
    pub n1: u32,
    pub n2: u32,
    pub eta: u32,
    pub delta: u32,
}

/// Default tail split: `η = ⌈n2/2⌉ − 1`.
pub fn default_eta(n2: u32) -> u32 {
    n2.div_ceil(2) - 1
}

/// Largest admissible shift: `δ ≤ ⌊(n2+1)/2⌋`.
pub fn max_delta(n2: u32) -> u32 {
    n2.div_ceil(2)
}

impl LrSdaParams {
    /// Params with the default `η` policy and a given shift.
    pub fn with_default_eta(n1: u32, n2: u32, delta: u32) -> Self {
        Self {
            n1,
            n2,
            eta: default_eta(n2),
            delta,
        }
    }

    pub fn total_sensors(&self) -> u32 {
        self.n1 + self.n2
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        require(self.n1 >= 1, "n1 must be at least 1")?;
        require(self.n2 >= 1, "n2 must be at least 1")?;
        require(
            self.eta < self.n2,
            format!(
                "eta={} must leave sub-array 2 non-empty (eta <= n2-1 = {})",
                self.eta,
                self.n2 - 1
            ),
        )?;
        require(
            self.delta <= max_delta(self.n2),
            format!(
                "delta={} exceeds floor((n2+1)/2) = {}",
                self.delta,
                max_delta(self.n2)
            ),
        )?;
        Ok(())
    }
}

/// Expands LR-SDA parameters into sensor positions.
///
/// Sub-array 1 runs from `δ` in steps of `n2+1`; sub-array 2 fills
/// `(n1−1)(n2+1)+η+1+δ ..= (n1−1)(n2+1)+n2+δ`; sub-array 3 fills
/// `n1(n2+1)+1+δ ..= n1(n2+1)+η+δ`. The result always has `n1 + n2` sensors.
pub fn build_lr_sda(params: &LrSdaParams) -> Result<SensorArray, GeometryError> {
    params.validate()?;
    let (n1, n2, eta, delta) = (
        params.n1 as i64,
        params.n2 as i64,
        params.eta as i64,
        params.delta as i64,
    );
    let span = (n1 - 1) * (n2 + 1);

    let first: Vec<i64> = (0..n1).map(|k| delta + k * (n2 + 1)).collect();
    let second: Vec<i64> = (span + eta + 1 + delta..=span + n2 + delta).collect();
    let third: Vec<i64> = (n1 * (n2 + 1) + 1 + delta..=n1 * (n2 + 1) + eta + delta).collect();

    let mut positions = first.clone();
    positions.extend(&second);
    positions.extend(&third);

    let label = format!(
        "lr-sda(n1={}, n2={}, eta={}, delta={})",
        params.n1, params.n2, params.eta, params.delta
    );
    let array = SensorArray::new(positions, label)
        .map_err(|e| GeometryError::InvalidParam(e.to_string()))?
        .with_subarrays(SubArrays {
            first,
            second,
            third,
        });
    debug_assert_eq!(array.len() as u32, params.total_sensors());
    Ok(array)
}

/// Picks the shift `δ ∈ [0, ⌊(n2+1)/2⌋]` whose geometry maximizes the
/// enumerated consecutive extent `U`, ties broken toward larger `δ`.
/// Returns the winning shift and its `U`.
pub fn select_delta(n1: u32, n2: u32, eta: u32) -> Result<(u32, i64), GeometryError> {
    let mut best: Option<(u32, i64)> = None;
    for delta in 0..=max_delta(n2) {
        let params = LrSdaParams { n1, n2, eta, delta };
        let array = build_lr_sda(&params)?;
        let (_, summary) = coarray::so_eca(&array);
        match best {
            Some((_, u)) if summary.u < u => {}
            _ => best = Some((delta, summary.u)),
        }
    }
    Ok(best.expect("delta range is never empty"))
}

/// Round-half-up of `num/den` for non-negative operands.
fn round_half_up(num: u32, den: u32) -> u32 {
    (2 * num + den) / (2 * den)
}

/// Closed-form sensor-allocation candidates for `n` total sensors.
///
/// Both sizing rules place `n2` sensors in the tail: `⌈(n−1)/2⌋` for the
/// single-sensor third sub-array and `⌈(2n−1)/4⌋` for the default tail split
/// (`⌈·⌋` read as round-half-up). Each candidate carries the shift found by
/// [`select_delta`]; callers resolve the winner by enumerated DOF.
pub fn optimal_split(n: u32) -> Result<Vec<LrSdaParams>, GeometryError> {
    require(n >= 2, "total sensor count must be at least 2")?;
    let mut candidates = Vec::new();
    let sizings = [
        (round_half_up(n - 1, 2), false), // third sub-array pinned to one sensor
        (round_half_up(2 * n - 1, 4), true), // default tail split
    ];
    for (n2, use_default_eta) in sizings {
        if n2 < 1 || n2 >= n {
            continue;
        }
        let n1 = n - n2;
        let eta = if use_default_eta {
            default_eta(n2)
        } else {
            1.min(n2 - 1)
        };
        let (delta, _) = select_delta(n1, n2, eta)?;
        let params = LrSdaParams { n1, n2, eta, delta };
        if !candidates.contains(&params) {
            candidates.push(params);
        }
    }
    Ok(candidates)
}

/// The two closed-form allocation branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EtaBranch {
    One,
    AtLeastTwo,
}

/// Relaxed real-valued optimum `n1*` minimizing total sensors for a target
/// one-sided consecutive extent `e`; rounding to neighbouring integers is the
/// caller's job.
pub fn min_sensors_for_aperture(
    e: i64,
    branch: EtaBranch,
    delta: i64,
) -> Result<f64, GeometryError> {
    match branch {
        EtaBranch::One => {
            require(
                e >= 2 * delta,
                format!("target extent {e} must be at least 2*delta = {}", 2 * delta),
            )?;
            Ok(2f64.sqrt() * ((e - 2 * delta) as f64).sqrt() / 2.0)
        }
        EtaBranch::AtLeastTwo => {
            require(
                e + 3 >= 2 * delta,
                format!(
                    "target extent {e} must be at least 2*delta - 3 = {}",
                    2 * delta - 3
                ),
            )?;
            Ok((-1.0 + 2f64.sqrt() * ((e + 3 - 2 * delta) as f64).sqrt()) / 2.0)
        }
    }
}

/// The published closed-form DOF expressions for the LR-SDA. They disagree
/// with each other and with enumeration for some inputs; treat the co-array
/// enumerator as authoritative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DofFormula {
    /// `4n1(n2+1) + 4η + 4δ + 1`, from the claimed hole-free span.
    HoleFreeSpan,
    /// `4n1n2 + 4n1 + 4δ + 1`, the η=1 branch.
    EtaOne,
    /// `4n1n2 + 4n1 + 4η + 4δ + 1`, the η≥2 branch.
    EtaAtLeastTwo,
    /// `−4n2² + (4n−4)n2 + 4n + 4δ + 1` with `n = n1+n2`.
    QuadraticInN2,
}

impl DofFormula {
    pub const ALL: [DofFormula; 4] = [
        DofFormula::HoleFreeSpan,
        DofFormula::EtaOne,
        DofFormula::EtaAtLeastTwo,
        DofFormula::QuadraticInN2,
    ];
}

/// Evaluates one of the claimed DOF closed forms verbatim.
pub fn claimed_dof(params: &LrSdaParams, formula: DofFormula) -> i64 {
    let (n1, n2, eta, delta) = (
        params.n1 as i64,
        params.n2 as i64,
        params.eta as i64,
        params.delta as i64,
    );
    let n = n1 + n2;
    match formula {
        DofFormula::HoleFreeSpan => 4 * n1 * (n2 + 1) + 4 * eta + 4 * delta + 1,
        DofFormula::EtaOne => 4 * n1 * n2 + 4 * n1 + 4 * delta + 1,
        DofFormula::EtaAtLeastTwo => 4 * n1 * n2 + 4 * n1 + 4 * eta + 4 * delta + 1,
        DofFormula::QuadraticInN2 => -4 * n2 * n2 + (4 * n - 4) * n2 + 4 * n + 4 * delta + 1,
    }
}

/// Sizing of a comparator array together with its published closed-form DOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComparatorSpec {
    TsEna { n1: i64, n2: i64 },
    Genams { n: i64 },
    Nadis { n: i64 },
    TnaI { n1: i64, n2: i64 },
    TnaII { n1: i64, n2: i64 },
}

impl ComparatorSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ComparatorSpec::TsEna { .. } => "TS-ENA",
            ComparatorSpec::Genams { .. } => "GENAMS",
            ComparatorSpec::Nadis { .. } => "NADiS",
            ComparatorSpec::TnaI { .. } => "TNA-I",
            ComparatorSpec::TnaII { .. } => "TNA-II",
        }
    }
}

/// Evaluates the published closed-form DOF for a comparator array.
///
/// The GENAMS expression contains non-integer intermediate terms for some
/// `n`; it is evaluated in exact rationals and truncated at the end, and its
/// result should be treated as best-effort.
pub fn comparator_dof(spec: ComparatorSpec) -> Result<i64, GeometryError> {
    let positive = |value: i64, name: &str| {
        require(value >= 1, format!("{name} must be positive, got {value}"))
    };
    match spec {
        ComparatorSpec::TsEna { n1, n2 } => {
            positive(n1, "n1")?;
            positive(n2, "n2")?;
            Ok(2 * (n1 + 1) * n2 + 7 * n1 + 1)
        }
        ComparatorSpec::Genams { n } => {
            positive(n, "n")?;
            let p3 = Rational64::from_integer(4 * ((n + 5) / 6));
            let n = Rational64::from_integer(n);
            let one = Rational64::from_integer(1);
            let value = Rational64::from_integer(2)
                * (Rational64::from_integer(4) * (p3 + one) / Rational64::from_integer(4)
                    + Rational64::from_integer(2)
                        * ((p3 - one) / Rational64::from_integer(2))
                        * ((p3 + one) / Rational64::from_integer(4))
                    + p3 * (n - p3)
                    - Rational64::from_integer(2)
                    - (p3 - one) / Rational64::from_integer(2));
            Ok(value.to_integer())
        }
        ComparatorSpec::Nadis { n } => {
            positive(n, "n")?;
            Ok(n * n + n - 1)
        }
        ComparatorSpec::TnaI { n1, n2 } => {
            positive(n1, "n1")?;
            positive(n2, "n2")?;
            Ok(4 * n1 * n2 + 4 * n1 - 3)
        }
        ComparatorSpec::TnaII { n1, n2 } => {
            positive(n1, "n1")?;
            positive(n2, "n2")?;
            Ok(4 * n1 * n2 + 4 * n1 + 2 * n2 - 3)
        }
    }
}
