//! Exact arithmetic for the unambiguous-steering (signal reconstruction)
//! conditions: rational LCM tests over sensor positions, the iterated-LCM
//! loop for arithmetic sequences, and the per-sub-array coefficient
//! construction for the LR-SDA. No floating point anywhere in this module.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::array::SensorArray;
use crate::geometry::{build_lr_sda, LrSdaParams};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReconstructionError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

fn require(cond: bool, message: impl Into<String>) -> Result<(), ReconstructionError> {
    if cond {
        Ok(())
    } else {
        Err(ReconstructionError::InvalidParam(message.into()))
    }
}

/// LCM of the arithmetic sequence `{β₁, β₁+β₂, …, β₁+(n−1)β₂}` by iterated
/// pairwise LCM, exact at arbitrary precision.
pub fn lcm_arith_sequence(beta1: u64, beta2: u64, n: u64) -> Result<BigUint, ReconstructionError> {
    require(beta1 >= 1, "beta1 must be a positive integer")?;
    require(beta2 >= 1, "beta2 must be a positive integer")?;
    require(n >= 1, "sequence length must be positive")?;
    let mut result = BigUint::from(beta1);
    for i in 1..n {
        result = result.lcm(&BigUint::from(beta1 + i * beta2));
    }
    Ok(result)
}

/// Smallest positive rational that is an integer multiple of every input:
/// `lcm(numerators) / gcd(denominators)` in lowest terms.
pub fn lcm_of_rationals(values: &[BigRational]) -> Result<BigRational, ReconstructionError> {
    require(!values.is_empty(), "need at least one value")?;
    for v in values {
        require(v.is_positive(), format!("values must be positive, got {v}"))?;
    }
    let mut numer = values[0].numer().magnitude().clone();
    let mut denom = values[0].denom().magnitude().clone();
    for v in &values[1..] {
        numer = numer.lcm(v.numer().magnitude());
        denom = denom.gcd(v.denom().magnitude());
    }
    Ok(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
}

/// Outcome of the aliasing test on a physical geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityCheck {
    /// `lcm(λ/p₁, …, λ/p_N)` over non-zero positions, exact, with `λ`
    /// expressed in units of `d`.
    pub lcm_value: BigRational,
    /// True iff `lcm_value ≥ 2`.
    pub passes: bool,
    /// Number of zero positions excluded from the quotient (flagged: the
    /// test is undefined for a sensor at the origin).
    pub zero_positions_excluded: usize,
}

/// Evaluates the aliasing condition `lcm(λ/p₁, …, λ/p_N) ≥ 2` exactly.
///
/// Positions are integers in units of `d`; `lambda_over_d` is `λ/d` (2 for
/// half-wavelength spacing), so each term is `lambda_over_d / p`.
pub fn check_reconstruction(
    s: &SensorArray,
    lambda_over_d: Rational64,
) -> Result<AmbiguityCheck, ReconstructionError> {
    require(
        lambda_over_d > Rational64::zero(),
        "wavelength must be positive",
    )?;
    let lambda = BigRational::new(
        BigInt::from(*lambda_over_d.numer()),
        BigInt::from(*lambda_over_d.denom()),
    );
    let mut terms = Vec::new();
    let mut excluded = 0;
    for &p in s.positions() {
        if p == 0 {
            excluded += 1;
        } else {
            terms.push(&lambda / BigRational::from(BigInt::from(p)));
        }
    }
    require(!terms.is_empty(), "all sensor positions are zero")?;
    let lcm_value = lcm_of_rationals(&terms)?;
    let passes = lcm_value >= BigRational::from(BigInt::from(2));
    Ok(AmbiguityCheck {
        lcm_value,
        passes,
        zero_positions_excluded: excluded,
    })
}

/// A per-sub-array LCM surrogate: the published expression is a falling
/// product of the block's consecutive positions, which is not their true
/// LCM; both are reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLcm {
    /// Product of the block's sensor positions (the published factorial
    /// ratio, evaluated over the actual shifted positions).
    pub product: BigUint,
    /// True LCM of the block's sensor positions.
    pub true_lcm: BigUint,
}

fn block_lcm(positions: &[i64]) -> BlockLcm {
    let mut product = BigUint::one();
    let mut true_lcm = BigUint::one();
    for &p in positions {
        let p = BigUint::from(p as u64);
        product *= &p;
        true_lcm = true_lcm.lcm(&p);
    }
    BlockLcm { product, true_lcm }
}

/// Three-way LCM through the published nested-gcd expression,
/// `((ab/gcd(a,b))·c) / gcd(ab/gcd(a,b), c)`.
fn nested_gcd_lcm(a: &BigUint, b: &BigUint, c: &BigUint) -> BigUint {
    let ab = a * b / a.gcd(b);
    &ab * c / ab.gcd(c)
}

/// Full reconstruction report for an LR-SDA geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionReport {
    pub params: LrSdaParams,
    pub positions: Vec<i64>,
    /// The geometry-level aliasing check on the actual positions.
    pub ambiguity: AmbiguityCheck,
    /// Set when the construction is degenerate (`δ = 0` puts a sensor at the
    /// origin, so the arithmetic-sequence LCM loop does not apply).
    pub degenerate: Option<String>,
    /// Arithmetic-sequence LCM of sub-array 1 (a true LCM).
    pub lcm1: Option<BigUint>,
    pub lcm2: Option<BlockLcm>,
    pub lcm3: Option<BlockLcm>,
    /// Nested-gcd combination of the three block values (product variant).
    pub combined_lcm: Option<BigUint>,
    /// Same combination using the true block LCMs.
    pub combined_true_lcm: Option<BigUint>,
    /// Smallest positive integer `k ≥ 2·combined_lcm/λ` (λ in units of `d`).
    pub min_k: Option<BigUint>,
    /// `c_n = k·p_n / LCM_block`, one exact rational per sensor.
    pub coefficients: Option<Vec<BigRational>>,
}

/// Evaluates the LR-SDA reconstruction condition exactly.
///
/// `LCM₁` comes from the iterated-LCM loop on sub-array 1's arithmetic
/// sequence (first term `δ`, step `n2+1`); `LCM₂`/`LCM₃` are the published
/// factorial ratios over the actual sub-array positions, evaluated as
/// falling products (with true-LCM variants alongside). For `δ = 0` the
/// loop's first term vanishes and the report marks the case degenerate.
pub fn lr_sda_reconstruction(
    params: &LrSdaParams,
    lambda_over_d: Rational64,
) -> Result<ReconstructionReport, ReconstructionError> {
    let array =
        build_lr_sda(params).map_err(|e| ReconstructionError::InvalidParam(e.to_string()))?;
    let ambiguity = check_reconstruction(&array, lambda_over_d)?;
    let subs = array
        .subarrays()
        .expect("lr-sda arrays carry sub-array metadata");

    if params.delta == 0 {
        return Ok(ReconstructionReport {
            params: *params,
            positions: array.positions().to_vec(),
            ambiguity,
            degenerate: Some(
                "delta = 0: sub-array 1 starts at the origin, the arithmetic-sequence \
                 LCM loop requires a positive first term"
                    .into(),
            ),
            lcm1: None,
            lcm2: None,
            lcm3: None,
            combined_lcm: None,
            combined_true_lcm: None,
            min_k: None,
            coefficients: None,
        });
    }

    let lcm1 = lcm_arith_sequence(
        params.delta as u64,
        (params.n2 + 1) as u64,
        params.n1 as u64,
    )?;
    let lcm2 = block_lcm(&subs.second);
    let lcm3 = block_lcm(&subs.third);
    let combined_lcm = nested_gcd_lcm(&lcm1, &lcm2.product, &lcm3.product);
    let combined_true_lcm = nested_gcd_lcm(&lcm1, &lcm2.true_lcm, &lcm3.true_lcm);

    // k >= 2 L / λ, smallest positive integer
    let two_l = BigRational::from(BigInt::from(2) * BigInt::from(combined_lcm.clone()));
    let lambda = BigRational::new(
        BigInt::from(*lambda_over_d.numer()),
        BigInt::from(*lambda_over_d.denom()),
    );
    let bound = two_l / lambda;
    let mut min_k = bound.ceil().to_integer().magnitude().clone();
    if min_k.is_zero() {
        min_k = BigUint::one();
    }

    let k = BigInt::from(min_k.clone());
    let mut coefficients = Vec::with_capacity(array.len());
    for (block, positions) in [
        (BigInt::from(lcm1.clone()), &subs.first),
        (BigInt::from(lcm2.product.clone()), &subs.second),
        (BigInt::from(lcm3.product.clone()), &subs.third),
    ] {
        for &p in positions {
            coefficients.push(BigRational::new(&k * BigInt::from(p), block.clone()));
        }
    }

    Ok(ReconstructionReport {
        params: *params,
        positions: array.positions().to_vec(),
        ambiguity,
        degenerate: None,
        lcm1: Some(lcm1),
        lcm2: Some(lcm2),
        lcm3: Some(lcm3),
        combined_lcm: Some(combined_lcm),
        combined_true_lcm: Some(combined_true_lcm),
        min_k: Some(min_k),
        coefficients: Some(coefficients),
    })
}
