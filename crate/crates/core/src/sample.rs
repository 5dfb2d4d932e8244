use serde::Serialize;

use crate::error::{Error, Result};

/// A one-dimensional collection of nonnegative speckle amplitudes.
///
/// `normalized` is only ever set by [`crate::ingest::normalize_rms`], which
/// guarantees the RMS of `values` is 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeSample {
    values: Vec<f64>,
    normalized: bool,
}

impl AmplitudeSample {
    /// Wraps raw amplitudes. Every value must be finite and nonnegative.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidValue { index });
        }
        Ok(Self {
            values,
            normalized: false,
        })
    }

    pub(crate) fn from_normalized(values: Vec<f64>) -> Self {
        Self {
            values,
            normalized: true,
        }
    }

    pub(crate) fn from_trusted(values: Vec<f64>) -> Self {
        Self {
            values,
            normalized: false,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Root mean square of the values.
    pub fn rms(&self) -> f64 {
        mean_square(&self.values).sqrt()
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean of squares, summed in ascending order so the result does not depend
/// on the order of `values`.
pub(crate) fn mean_square(values: &[f64]) -> f64 {
    let mut squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    squares.sort_unstable_by(f64::total_cmp);
    squares.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation with the n-1 divisor.
pub(crate) fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

pub(crate) fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}
