//! Physical sensor geometries on the integer grid.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from constructing a [`SensorArray`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArrayError {
    #[error("sensor positions must be strictly increasing: {0} then {1}")]
    NotIncreasing(i64, i64),
    #[error("sensor positions must be non-negative: {0}")]
    Negative(i64),
    #[error("array must contain at least one sensor")]
    Empty,
}

/// Positions of the three sub-ULAs making up an LR-SDA, kept so that the
/// weight function can be decomposed by pair type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubArrays {
    pub first: Vec<i64>,
    pub second: Vec<i64>,
    pub third: Vec<i64>,
}

/// A sparse linear array: strictly increasing, non-negative sensor positions
/// in units of the unit spacing `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorArray {
    positions: Vec<i64>,
    label: String,
    /// Unit spacing over wavelength, `d/λ`; half-wavelength by default.
    d_over_lambda: Rational64,
    /// Present only for arrays built from LR-SDA parameters.
    subarrays: Option<SubArrays>,
}

impl SensorArray {
    /// Builds an array from positions in units of `d`, with `d = λ/2`.
    pub fn new(positions: Vec<i64>, label: impl Into<String>) -> Result<Self, ArrayError> {
        if positions.is_empty() {
            return Err(ArrayError::Empty);
        }
        if positions[0] < 0 {
            return Err(ArrayError::Negative(positions[0]));
        }
        for pair in positions.windows(2) {
            if pair[1] <= pair[0] {
                return Err(ArrayError::NotIncreasing(pair[0], pair[1]));
            }
        }
        Ok(Self {
            positions,
            label: label.into(),
            d_over_lambda: Rational64::new(1, 2),
            subarrays: None,
        })
    }

    pub(crate) fn with_subarrays(mut self, subarrays: SubArrays) -> Self {
        self.subarrays = Some(subarrays);
        self
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of physical sensors.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn d_over_lambda(&self) -> Rational64 {
        self.d_over_lambda
    }

    /// `λ/d` as an exact rational (2 for half-wavelength spacing).
    pub fn lambda_over_d(&self) -> Rational64 {
        self.d_over_lambda.recip()
    }

    pub fn subarrays(&self) -> Option<&SubArrays> {
        self.subarrays.as_ref()
    }

    /// Largest position, i.e. the array aperture in units of `d`.
    pub fn aperture(&self) -> i64 {
        *self.positions.last().expect("array is non-empty")
    }

    /// The same geometry translated by `c` units; `c` may be negative as long
    /// as every position stays non-negative.
    pub fn shifted(&self, c: i64) -> Result<Self, ArrayError> {
        let positions = self.positions.iter().map(|p| p + c).collect();
        let mut shifted = Self::new(positions, format!("{}+{}", self.label, c))?;
        shifted.subarrays = self.subarrays.as_ref().map(|s| SubArrays {
            first: s.first.iter().map(|p| p + c).collect(),
            second: s.second.iter().map(|p| p + c).collect(),
            third: s.third.iter().map(|p| p + c).collect(),
        });
        Ok(shifted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_increasing_positions() {
        let a = SensorArray::new(vec![0, 1, 5, 8], "test").unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.aperture(), 8);
        assert_eq!(a.lambda_over_d(), Rational64::new(2, 1));
    }

    #[test]
    fn rejects_duplicates_and_disorder() {
        assert_eq!(
            SensorArray::new(vec![0, 3, 3], "dup").unwrap_err(),
            ArrayError::NotIncreasing(3, 3)
        );
        assert_eq!(
            SensorArray::new(vec![4, 2], "rev").unwrap_err(),
            ArrayError::NotIncreasing(4, 2)
        );
        assert_eq!(
            SensorArray::new(vec![-1, 2], "neg").unwrap_err(),
            ArrayError::Negative(-1)
        );
        assert_eq!(
            SensorArray::new(vec![], "empty").unwrap_err(),
            ArrayError::Empty
        );
    }

    #[test]
    fn shift_preserves_spacing() {
        let a = SensorArray::new(vec![1, 4, 6], "base").unwrap();
        let b = a.shifted(3).unwrap();
        assert_eq!(b.positions(), &[4, 7, 9]);
        assert!(a.shifted(-2).is_err());
    }
}
