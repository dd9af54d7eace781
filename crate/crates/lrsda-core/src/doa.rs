//! From the combined cumulant vector to angle estimates: averaging duplicate
//! lags onto the virtual ULA, spatial smoothing to restore rank, MUSIC on the
//! smoothed matrix, peak extraction, and RMSE scoring.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array::SensorArray;
use crate::coarray::{so_eca, SocCase};
use crate::signal::CombinedCumulantVector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DoaError {
    #[error("degenerate array: the consecutive co-array segment is only the origin")]
    DegenerateArray,
    #[error("cannot split subspaces: {requested} sources with smoothed dimension {dim}")]
    Identifiability { requested: usize, dim: usize },
    #[error("under-resolved: found {found} of {requested} peaks")]
    UnderResolved { found: usize, requested: usize },
}

/// The measurement of the virtual ULA: one averaged complex value per lag in
/// `[−U, U]`, plus the multiplicity that was averaged at each lag.
#[derive(Debug, Clone)]
pub struct VirtualMeasurement {
    /// Index `z + U` holds the value at lag `z`.
    pub values: Vec<Complex64>,
    pub u: i64,
    /// Weight-function counts restricted to the segment.
    pub averaging_counts: Vec<u64>,
}

/// Averages every combined-vector entry onto its lag, keeping the segment
/// `[−U, U]` of the enumerated co-array. Entries outside the consecutive
/// segment are dropped; duplicate lags are combined by plain arithmetic mean.
/// Lag 0 retains the noise power carried by the conjugate-bearing cases (no
/// denoising step is applied).
pub fn lag_average(c: &CombinedCumulantVector, s: &SensorArray) -> VirtualMeasurement {
    assert_eq!(
        c.sensor_count(),
        s.len(),
        "cumulant vector and array disagree on N"
    );
    let (_, summary) = so_eca(s);
    let u = summary.u.max(0);
    let len = (2 * u + 1) as usize;
    let mut sums = vec![Complex64::default(); len];
    let mut counts = vec![0u64; len];
    let positions = s.positions();
    let n = positions.len();
    for case in SocCase::ALL {
        let segment = c.segment(case);
        for l1 in 0..n {
            for l2 in 0..n {
                let lag = case.lag(positions[l1], positions[l2]);
                if lag.abs() <= u {
                    let idx = (lag + u) as usize;
                    sums[idx] += segment[l1 * n + l2];
                    counts[idx] += 1;
                }
            }
        }
    }
    let values = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &m)| s / Complex64::from(m as f64))
        .collect();
    VirtualMeasurement {
        values,
        u,
        averaging_counts: counts,
    }
}

/// Maximal square smoothing: `U+1` windows of length `U+1` over the virtual
/// measurement, `R = (1/(U+1)) Σ zᵢ zᵢᴴ`. The result is Hermitian positive
/// semidefinite with rank equal to the number of incoherent sources.
pub fn spatial_smoothing(z: &VirtualMeasurement) -> DMatrix<Complex64> {
    let m = (z.u + 1) as usize;
    let mut r = DMatrix::zeros(m, m);
    for start in 0..m {
        let window = DVector::from_fn(m, |j, _| z.values[start + j]);
        r += &window * window.adjoint();
    }
    r / Complex64::from(m as f64)
}

/// A pseudo-spectrum sampled on a uniform angle grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MusicSpectrum {
    pub grid_deg: Vec<f64>,
    pub values: Vec<f64>,
}

/// MUSIC pseudo-spectrum of a smoothed virtual-ULA covariance.
///
/// Eigenvectors of the `d` largest eigenvalues span the signal subspace; the
/// spectrum is the inverse of the noise-subspace projection energy of the
/// length-`U+1` virtual steering vector, scanned over
/// `[−89.9°, 89.9°]` in steps of `grid_step_deg`.
pub fn music(
    r_ss: &DMatrix<Complex64>,
    num_sources: usize,
    grid_step_deg: f64,
) -> Result<MusicSpectrum, DoaError> {
    let dim = r_ss.nrows();
    if num_sources == 0 || num_sources >= dim {
        return Err(DoaError::Identifiability {
            requested: num_sources,
            dim,
        });
    }
    assert!(grid_step_deg > 0.0, "grid step must be positive");

    let eigen = r_ss.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .unwrap()
    });

    // Signal-subspace complement: for an orthonormal eigenbasis,
    // ‖Eₙᴴ v‖² = ‖v‖² − ‖Eₛᴴ v‖², so only d projections per grid point.
    let signal: Vec<DVector<Complex64>> = order[..num_sources]
        .iter()
        .map(|&i| eigen.eigenvectors.column(i).into_owned())
        .collect();

    let limit = 89.9f64;
    let steps = (2.0 * limit / grid_step_deg).floor() as usize;
    let mut grid_deg = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let norm_sq = dim as f64;
    for k in 0..=steps {
        let theta = -limit + k as f64 * grid_step_deg;
        let u = theta.to_radians().sin();
        let phase = std::f64::consts::PI * u;
        let v = DVector::from_fn(dim, |j, _| Complex64::from_polar(1.0, phase * j as f64));
        let mut signal_energy = 0.0;
        for e in &signal {
            signal_energy += e.dotc(&v).norm_sqr();
        }
        let denom = (norm_sq - signal_energy).max(1e-30);
        grid_deg.push(theta);
        values.push(1.0 / denom);
    }
    Ok(MusicSpectrum { grid_deg, values })
}

/// The `d` largest strict local maxima of a spectrum, each refined by
/// three-point parabolic interpolation, returned sorted ascending.
pub fn find_peaks(spectrum: &MusicSpectrum, num_sources: usize) -> Result<Vec<f64>, DoaError> {
    let v = &spectrum.values;
    let mut maxima: Vec<(usize, f64)> = Vec::new();
    for i in 1..v.len().saturating_sub(1) {
        if v[i] > v[i - 1] && v[i] > v[i + 1] {
            maxima.push((i, v[i]));
        }
    }
    if maxima.len() < num_sources {
        return Err(DoaError::UnderResolved {
            found: maxima.len(),
            requested: num_sources,
        });
    }
    maxima.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let step = spectrum.grid_deg[1] - spectrum.grid_deg[0];
    let mut peaks: Vec<f64> = maxima[..num_sources]
        .iter()
        .map(|&(i, _)| {
            let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
            let offset = 0.5 * (a - c) / (a - 2.0 * b + c);
            spectrum.grid_deg[i] + offset * step
        })
        .collect();
    peaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(peaks)
}

/// Full pipeline from a combined cumulant vector to sorted angle estimates.
pub fn estimate_doas(
    c: &CombinedCumulantVector,
    s: &SensorArray,
    num_sources: usize,
    grid_step_deg: f64,
) -> Result<Vec<f64>, DoaError> {
    let z = lag_average(c, s);
    if z.u < 1 {
        return Err(DoaError::DegenerateArray);
    }
    let r_ss = spatial_smoothing(&z);
    let spectrum = music(&r_ss, num_sources, grid_step_deg)?;
    find_peaks(&spectrum, num_sources)
}

/// RMSE of sorted-order-associated estimates over a batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseOutcome {
    /// Degrees; `None` when every trial was excluded.
    pub rmse_deg: Option<f64>,
    pub used_trials: usize,
    pub excluded_trials: usize,
}

/// Scores per-trial estimates against the true angles: each resolved trial
/// contributes `Σᵢ (θ̂ᵢ − θᵢ)²` with positional association of the sorted
/// lists; under-resolved trials (`None` or wrong count) are excluded and
/// counted.
pub fn rmse(trials: &[Option<Vec<f64>>], truth: &[f64]) -> RmseOutcome {
    let d = truth.len();
    let mut sorted_truth = truth.to_vec();
    sorted_truth.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut sum_sq = 0.0;
    let mut used = 0usize;
    let mut excluded = 0usize;
    for trial in trials {
        match trial {
            Some(estimates) if estimates.len() == d => {
                let mut sorted = estimates.clone();
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                sum_sq += sorted
                    .iter()
                    .zip(&sorted_truth)
                    .map(|(e, t)| (e - t) * (e - t))
                    .sum::<f64>();
                used += 1;
            }
            _ => excluded += 1,
        }
    }
    let rmse_deg = (used > 0).then(|| (sum_sq / (used as f64 * d as f64)).sqrt());
    RmseOutcome {
        rmse_deg,
        used_trials: used,
        excluded_trials: excluded,
    }
}
