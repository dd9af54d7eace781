//! Simulation of non-circular far-field narrowband sources and the four
//! sample second-order cumulant matrices of the received snapshots.
//!
//! Sources are strictly real zero-mean Gaussian amplitudes (maximally
//! non-circular, so the conjugate-free moments do not vanish); noise is
//! circular complex Gaussian. Everything is driven by a named, portable,
//! seedable generator so that runs are reproducible across platforms and
//! trial order.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array::SensorArray;
use crate::coarray::SocCase;

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

/// One simulated observation setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Source angles in degrees, strictly increasing, inside (−90, 90).
    pub angles_deg: Vec<f64>,
    pub snr_db: f64,
    pub snapshots: usize,
    pub seed: u64,
    /// Per-source power; all sources share it.
    pub source_power: f64,
}

impl Scenario {
    pub fn new(
        angles_deg: Vec<f64>,
        snr_db: f64,
        snapshots: usize,
        seed: u64,
    ) -> Result<Self, SignalError> {
        let scenario = Self {
            angles_deg,
            snr_db,
            snapshots,
            seed,
            source_power: 1.0,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if self.angles_deg.is_empty() {
            return Err(SignalError::InvalidScenario(
                "need at least one source".into(),
            ));
        }
        for pair in self.angles_deg.windows(2) {
            if pair[1] <= pair[0] {
                return Err(SignalError::InvalidScenario(format!(
                    "angles must be strictly increasing: {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        for &a in &self.angles_deg {
            if !a.is_finite() || a.abs() >= 90.0 {
                return Err(SignalError::InvalidScenario(format!(
                    "angle {a} outside (-90, 90)"
                )));
            }
        }
        if self.snapshots == 0 {
            return Err(SignalError::InvalidScenario(
                "need at least one snapshot".into(),
            ));
        }
        if !self.source_power.is_finite() || self.source_power <= 0.0 {
            return Err(SignalError::InvalidScenario(
                "source power must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn num_sources(&self) -> usize {
        self.angles_deg.len()
    }

    /// Total noise variance per sensor, `σ² = power / 10^(SNR/10)`.
    pub fn noise_variance(&self) -> f64 {
        self.source_power * 10f64.powf(-self.snr_db / 10.0)
    }
}

/// Seed for a derived stream, so that trials are order-independent
/// functions of `(master seed, stream index)`. SplitMix64 finalizer.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-sensor steering phase `e^{jπ p sinθ}` under half-wavelength spacing.
pub fn steering_vector(s: &SensorArray, theta_deg: f64) -> DVector<Complex64> {
    let u = theta_deg.to_radians().sin();
    DVector::from_iterator(
        s.len(),
        s.positions()
            .iter()
            .map(|&p| Complex64::from_polar(1.0, PI * p as f64 * u)),
    )
}

/// Received snapshots `X = A S + N`, one column per snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotMatrix {
    pub values: DMatrix<Complex64>,
    pub array: SensorArray,
}

fn draw_standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Real source amplitude matrix, `D×K`, entries `√power · N(0,1)`.
fn generate_sources(rng: &mut ChaCha8Rng, d: usize, k: usize, power: f64) -> DMatrix<Complex64> {
    let scale = power.sqrt();
    let mut s = DMatrix::zeros(d, k);
    for t in 0..k {
        for i in 0..d {
            s[(i, t)] = Complex64::new(scale * draw_standard_normal(rng), 0.0);
        }
    }
    s
}

/// Circular complex Gaussian noise, `N×K`, total variance `variance`.
fn generate_noise(rng: &mut ChaCha8Rng, n: usize, k: usize, variance: f64) -> DMatrix<Complex64> {
    let scale = (variance / 2.0).sqrt();
    let mut m = DMatrix::zeros(n, k);
    for t in 0..k {
        for i in 0..n {
            let re = scale * draw_standard_normal(rng);
            let im = scale * draw_standard_normal(rng);
            m[(i, t)] = Complex64::new(re, im);
        }
    }
    m
}

/// Simulates `K` snapshots of `D` real-amplitude sources plus circular
/// noise; fully determined by the scenario seed.
pub fn simulate(s: &SensorArray, scenario: &Scenario) -> Result<SnapshotMatrix, SignalError> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let n = s.len();
    let d = scenario.num_sources();
    let k = scenario.snapshots;

    let mut manifold = DMatrix::zeros(n, d);
    for (i, &theta) in scenario.angles_deg.iter().enumerate() {
        manifold.set_column(i, &steering_vector(s, theta));
    }
    let sources = generate_sources(&mut rng, d, k, scenario.source_power);
    let noise = generate_noise(&mut rng, n, k, scenario.noise_variance());
    Ok(SnapshotMatrix {
        values: &manifold * sources + noise,
        array: s.clone(),
    })
}

/// The four sample cumulant matrices of the snapshots.
#[derive(Debug, Clone)]
pub struct SocSet {
    /// `(1/K) Σ x xᵀ`
    pub r1: DMatrix<Complex64>,
    /// `(1/K) Σ x xᴴ`
    pub r2: DMatrix<Complex64>,
    /// `(1/K) Σ x* xᵀ`
    pub r3: DMatrix<Complex64>,
    /// `(1/K) Σ x* xᴴ`
    pub r4: DMatrix<Complex64>,
}

impl SocSet {
    pub fn dim(&self) -> usize {
        self.r1.nrows()
    }

    pub fn case(&self, case: SocCase) -> &DMatrix<Complex64> {
        match case {
            SocCase::Sum => &self.r1,
            SocCase::Diff => &self.r2,
            SocCase::NegDiff => &self.r3,
            SocCase::NegSum => &self.r4,
        }
    }
}

/// Sample estimates of the four cumulant cases. Each case is computed
/// directly from the data; the case relations (`r3 = r2ᵀ`, `r4 = r1*`) hold
/// as finite-sample identities and are left to tests, not enforced here.
pub fn estimate_soc(x: &SnapshotMatrix) -> SocSet {
    let k = x.values.ncols() as f64;
    let xt = x.values.transpose();
    let xh = x.values.adjoint();
    let xc = x.values.conjugate();
    SocSet {
        r1: &x.values * &xt / Complex64::from(k),
        r2: &x.values * &xh / Complex64::from(k),
        r3: &xc * &xt / Complex64::from(k),
        r4: &xc * &xh / Complex64::from(k),
    }
}

/// Exact (infinite-snapshot) cumulants for equal-power real-amplitude
/// sources: the noiseless-limit injection used by oracle tests.
pub fn analytic_soc(
    s: &SensorArray,
    angles_deg: &[f64],
    source_power: f64,
    noise_variance: f64,
) -> SocSet {
    let n = s.len();
    let mut r1 = DMatrix::zeros(n, n);
    let mut r2 = DMatrix::zeros(n, n);
    for &theta in angles_deg {
        let a = steering_vector(s, theta);
        let p = Complex64::from(source_power);
        r1 += &a * a.transpose() * p;
        r2 += &a * a.adjoint() * p;
    }
    let noise = DMatrix::from_diagonal_element(n, n, Complex64::from(noise_variance));
    // noise enters only the conjugate-bearing cases
    let r2 = r2 + &noise;
    let r3 = r2.conjugate();
    let r4 = r1.conjugate();
    SocSet { r1, r2, r3, r4 }
}

/// The stacked vector of all four vectorized cumulant cases, length `4N²`.
/// Within each case the entry for the ordered pair `(l1, l2)` sits at index
/// `l1·N + l2`, matching the Kronecker ordering of the virtual steering
/// vectors.
#[derive(Debug, Clone)]
pub struct CombinedCumulantVector {
    values: Vec<Complex64>,
    n: usize,
}

impl CombinedCumulantVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sensor_count(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The `N²` entries of one cumulant case.
    pub fn segment(&self, case: SocCase) -> &[Complex64] {
        let n2 = self.n * self.n;
        let start = (case.index() - 1) * n2;
        &self.values[start..start + n2]
    }

    /// Rebuilds the `N×N` matrix a segment was stacked from.
    pub fn unstack(&self, case: SocCase) -> DMatrix<Complex64> {
        let n = self.n;
        let seg = self.segment(case);
        DMatrix::from_fn(n, n, |l1, l2| seg[l1 * n + l2])
    }
}

/// Stacks the four cumulant matrices into one `4N²` vector.
pub fn combine_cumulants(soc: &SocSet) -> CombinedCumulantVector {
    let n = soc.dim();
    let mut values = Vec::with_capacity(4 * n * n);
    for case in SocCase::ALL {
        let r = soc.case(case);
        for l1 in 0..n {
            for l2 in 0..n {
                values.push(r[(l1, l2)]);
            }
        }
    }
    CombinedCumulantVector { values, n }
}

/// Virtual steering vector of one cumulant case: entry `l1·N + l2` carries
/// the phase of that case's lag for the pair `(p_{l1}, p_{l2})`.
pub fn virtual_steering(s: &SensorArray, theta_deg: f64, case: SocCase) -> Vec<Complex64> {
    let u = theta_deg.to_radians().sin();
    let positions = s.positions();
    let n = positions.len();
    let mut b = Vec::with_capacity(n * n);
    for l1 in 0..n {
        for l2 in 0..n {
            let lag = case.lag(positions[l1], positions[l2]);
            b.push(Complex64::from_polar(1.0, PI * lag as f64 * u));
        }
    }
    b
}
