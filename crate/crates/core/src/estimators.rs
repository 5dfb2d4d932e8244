//! Nonparametric summaries of an amplitude sample: empirical CDF, Gaussian
//! kernel density estimate, empirical characteristic function and the
//! contrast ratio.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sample::{mean, sample_std, sorted, AmplitudeSample};

pub const DEFAULT_CUTOFF: f64 = 0.05;
pub const DEFAULT_AMPLITUDE_POINTS: usize = 512;
pub const DEFAULT_AMPLITUDE_MAX: f64 = 3.0;
pub const DEFAULT_FREQUENCY_POINTS: usize = 128;
pub const DEFAULT_FREQUENCY_MAX: f64 = 20.0;

/// Kernel contributions farther than this many bandwidths are dropped; the
/// Gaussian tail there is below 1e-17 of the peak.
const KERNEL_REACH: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridDomain {
    Amplitude,
    Frequency,
}

/// Strictly increasing evaluation abscissae.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalGrid {
    points: Vec<f64>,
    domain: GridDomain,
}

impl EvalGrid {
    pub fn new(points: Vec<f64>, domain: GridDomain) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(invalid("grid", "points must be finite"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("grid", "points must be strictly increasing"));
        }
        if domain == GridDomain::Amplitude && points[0] < 0.0 {
            return Err(invalid("grid", "amplitude grids cannot start below zero"));
        }
        Ok(Self { points, domain })
    }

    /// `count` evenly spaced points covering `[lo, hi]` inclusive.
    pub fn uniform(lo: f64, hi: f64, count: usize, domain: GridDomain) -> Result<Self> {
        match count {
            0 => Err(Error::EmptyGrid),
            1 => Self::new(vec![lo], domain),
            _ => {
                if !(hi > lo) {
                    return Err(invalid("grid", format!("empty range [{lo}, {hi}]")));
                }
                let step = (hi - lo) / (count - 1) as f64;
                let mut points: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
                points[count - 1] = hi;
                Self::new(points, domain)
            }
        }
    }

    /// Default amplitude grid: 512 points on `[cutoff, max(3, sample max)]`.
    pub fn default_amplitude(sample: &AmplitudeSample, cutoff: f64) -> Result<Self> {
        let top = sample
            .values()
            .iter()
            .copied()
            .fold(DEFAULT_AMPLITUDE_MAX, f64::max);
        Self::uniform(cutoff, top, DEFAULT_AMPLITUDE_POINTS, GridDomain::Amplitude)
    }

    /// Default frequency grid: 128 points on `[0, 20]`.
    pub fn default_frequency() -> Self {
        Self::uniform(0.0, DEFAULT_FREQUENCY_MAX, DEFAULT_FREQUENCY_POINTS, GridDomain::Frequency)
            .expect("static grid is valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn domain(&self) -> GridDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// `h = (0.75 n)^(-1/5) * sample std`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdeSettings {
    pub bandwidth: Bandwidth,
    /// Abscissae below this value are excluded from KDE output.
    pub boundary_cutoff: f64,
}

impl Default for KdeSettings {
    fn default() -> Self {
        Self {
            bandwidth: Bandwidth::Auto,
            boundary_cutoff: DEFAULT_CUTOFF,
        }
    }
}

impl KdeSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.boundary_cutoff >= 0.0 && self.boundary_cutoff.is_finite()) {
            return Err(invalid("cutoff", "must be a nonnegative finite number"));
        }
        if let Bandwidth::Fixed(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return Err(invalid("bandwidth", format!("must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// The automatic bandwidth rule applied to `values`.
pub fn auto_bandwidth(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::TooSmall {
            needed: 2,
            got: values.len(),
        });
    }
    let sd = sample_std(values);
    if !(sd > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((0.75 * values.len() as f64).powf(-0.2) * sd)
}

/// A Gaussian KDE over a sorted copy of the data.
#[derive(Debug, Clone)]
pub struct Kde {
    data: Vec<f64>,
    bandwidth: f64,
}

impl Kde {
    pub fn fit(sample: &AmplitudeSample, settings: &KdeSettings) -> Result<Self> {
        settings.validate()?;
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let bandwidth = match settings.bandwidth {
            Bandwidth::Auto => auto_bandwidth(sample.values())?,
            Bandwidth::Fixed(h) => h,
        };
        Ok(Self {
            data: sorted(sample.values()),
            bandwidth,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let reach = KERNEL_REACH * h;
        let lo = self.data.partition_point(|&v| v < x - reach);
        let hi = self.data.partition_point(|&v| v <= x + reach);
        let sum: f64 = self.data[lo..hi]
            .iter()
            .map(|&v| {
                let z = (x - v) / h;
                (-0.5 * z * z).exp()
            })
            .sum();
        sum / ((2.0 * PI).sqrt() * h * self.data.len() as f64)
    }

    /// Densities at the grid points at or above `cutoff`.
    pub fn evaluate(&self, grid: &EvalGrid, cutoff: f64) -> Result<Vec<(f64, f64)>> {
        let out: Vec<(f64, f64)> = grid
            .points()
            .iter()
            .filter(|&&x| x >= cutoff)
            .map(|&x| (x, self.density(x)))
            .collect();
        if out.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(out)
    }
}

/// Fraction of the sample at or below `t`.
pub fn ecdf_eval(sample: &AmplitudeSample, t: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let count = sample.values().iter().filter(|&&v| v <= t).count();
    Ok(count as f64 / sample.len() as f64)
}

pub fn kde_eval(
    sample: &AmplitudeSample,
    grid: &EvalGrid,
    settings: &KdeSettings,
) -> Result<Vec<(f64, f64)>> {
    Kde::fit(sample, settings)?.evaluate(grid, settings.boundary_cutoff)
}

/// `(1/n) sum_i exp(i t X_i)` at every grid frequency.
pub fn ecf_eval(sample: &AmplitudeSample, grid: &EvalGrid) -> Result<Vec<(f64, Complex64)>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if grid.domain() != GridDomain::Frequency {
        return Err(invalid("grid", "characteristic functions need a frequency grid"));
    }
    Ok(ecf_values(sample.values(), grid.points())
        .into_iter()
        .zip(grid.points())
        .map(|(c, &t)| (t, c))
        .collect())
}

pub(crate) fn ecf_values(values: &[f64], freqs: &[f64]) -> Vec<Complex64> {
    let n = values.len() as f64;
    freqs
        .iter()
        .map(|&t| {
            let (mut re, mut im) = (0.0, 0.0);
            for &x in values {
                let (s, c) = (t * x).sin_cos();
                re += c;
                im += s;
            }
            Complex64::new(re / n, im / n)
        })
        .collect()
}

/// Sample standard deviation (n-1 divisor) over the sample mean.
pub fn contrast_ratio(sample: &AmplitudeSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let m = mean(sample.values());
    if !(m > 0.0) {
        return Err(Error::ZeroMean);
    }
    Ok(sample_std(sample.values()) / m)
}
