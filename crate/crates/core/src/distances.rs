//! Model-free distances between a normalized amplitude sample and the
//! benchmark Rayleigh law, in the CDF, PDF and characteristic-function
//! domains plus the contrast-ratio offset.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::benchmark::{self, CfTable};
use crate::error::{Error, Result};
use crate::estimators::{
    self, contrast_ratio, Bandwidth, EvalGrid, GridDomain, Kde, KdeSettings,
    DEFAULT_AMPLITUDE_POINTS, DEFAULT_FREQUENCY_MAX, DEFAULT_FREQUENCY_POINTS,
};
use crate::sample::{sorted, AmplitudeSample};

/// Grid and KDE configuration shared by the grid-based distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceSettings {
    /// Points on the amplitude grid `[cutoff, max(3, sample max)]`.
    pub grid_points: usize,
    pub freq_points: usize,
    pub freq_max: f64,
    pub kde: KdeSettings,
}

impl Default for DistanceSettings {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_AMPLITUDE_POINTS,
            freq_points: DEFAULT_FREQUENCY_POINTS,
            freq_max: DEFAULT_FREQUENCY_MAX,
            kde: KdeSettings::default(),
        }
    }
}

impl DistanceSettings {
    pub fn amplitude_grid(&self, sample: &AmplitudeSample) -> Result<EvalGrid> {
        let top = sample
            .values()
            .iter()
            .copied()
            .fold(estimators::DEFAULT_AMPLITUDE_MAX, f64::max);
        EvalGrid::uniform(
            self.kde.boundary_cutoff,
            top,
            self.grid_points,
            GridDomain::Amplitude,
        )
    }

    pub fn frequency_grid(&self) -> Result<EvalGrid> {
        EvalGrid::uniform(0.0, self.freq_max, self.freq_points, GridDomain::Frequency)
    }
}

/// Grid metadata recorded alongside the distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMeta {
    pub grid_points: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub freq_points: usize,
    pub freq_max: f64,
    pub cutoff: f64,
    pub bandwidth_rule: Bandwidth,
    pub bandwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceReport {
    pub d_ks: f64,
    pub d_mse: f64,
    pub d_mmd: f64,
    /// Signed: sample contrast ratio minus the Rayleigh value.
    pub d_cr: f64,
    pub n: usize,
    pub settings: GridMeta,
}

impl DistanceReport {
    /// The four distances in report order.
    pub fn values(&self) -> [f64; 4] {
        [self.d_ks, self.d_mse, self.d_mmd, self.d_cr]
    }
}

pub const DISTANCE_NAMES: [&str; 4] = ["d_ks", "d_mse", "d_mmd", "d_cr"];

fn require_normalized(sample: &AmplitudeSample) -> Result<()> {
    if !sample.is_normalized() {
        return Err(Error::Unnormalized);
    }
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(())
}

/// Classical one-sample Kolmogorov-Smirnov statistic of `values` against
/// `cdf`, taking both one-sided gaps at every order statistic.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let xs = sorted(values);
    ks_sorted(&xs, cdf)
}

fn ks_sorted<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    })
}

pub fn d_ks(sample: &AmplitudeSample) -> Result<f64> {
    require_normalized(sample)?;
    Ok(ks_statistic(sample.values(), benchmark::cdf_unchecked))
}

/// Mean squared gap between tabulated densities and the benchmark PDF.
pub fn mse_against_benchmark(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let ss: f64 = curve
        .iter()
        .map(|&(x, d)| {
            let gap = d - benchmark::pdf_unchecked(x);
            gap * gap
        })
        .sum();
    Ok(ss / curve.len() as f64)
}

pub fn d_mse(sample: &AmplitudeSample, grid: &EvalGrid, kde: &KdeSettings) -> Result<f64> {
    require_normalized(sample)?;
    let curve = estimators::kde_eval(sample, grid, kde)?;
    mse_against_benchmark(&curve)
}

/// Root-mean-square modulus gap between two characteristic functions
/// tabulated on the same frequencies.
pub fn cf_rms_gap(empirical: &[Complex64], reference: &[Complex64]) -> Result<f64> {
    if empirical.is_empty() || empirical.len() != reference.len() {
        return Err(Error::EmptyGrid);
    }
    let ss: f64 = empirical
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok((ss / empirical.len() as f64).sqrt())
}

fn default_cf_table() -> &'static CfTable {
    static TABLE: OnceLock<CfTable> = OnceLock::new();
    TABLE.get_or_init(|| CfTable::new(EvalGrid::default_frequency().points()))
}

fn cf_table_for(points: &[f64]) -> std::borrow::Cow<'static, CfTable> {
    let table = default_cf_table();
    if table.matches(points) {
        std::borrow::Cow::Borrowed(table)
    } else {
        std::borrow::Cow::Owned(CfTable::new(points))
    }
}

pub fn d_mmd(sample: &AmplitudeSample, freq_grid: &EvalGrid) -> Result<f64> {
    require_normalized(sample)?;
    let ecf: Vec<Complex64> = estimators::ecf_eval(sample, freq_grid)?
        .into_iter()
        .map(|(_, c)| c)
        .collect();
    let table = cf_table_for(freq_grid.points());
    cf_rms_gap(&ecf, table.values())
}

/// Contrast ratio minus `sqrt(4/pi - 1)`. Scale invariant, so raw samples
/// are accepted too.
pub fn d_cr(sample: &AmplitudeSample) -> Result<f64> {
    Ok(contrast_ratio(sample)? - benchmark::cr_theoretical())
}

/// All four distances computed on shared grids.
pub fn distance_report(sample: &AmplitudeSample, settings: &DistanceSettings) -> Result<DistanceReport> {
    require_normalized(sample)?;
    if sample.len() < 2 {
        return Err(Error::TooSmall {
            needed: 2,
            got: sample.len(),
        });
    }
    // Sorting once makes every accumulation order-independent.
    let ordered = AmplitudeSample::from_normalized(sorted(sample.values()));
    let amp_grid = settings.amplitude_grid(&ordered)?;
    let freq_grid = settings.frequency_grid()?;

    let d_ks = ks_sorted(ordered.values(), benchmark::cdf_unchecked);

    let kde = Kde::fit(&ordered, &settings.kde)?;
    let curve = kde.evaluate(&amp_grid, settings.kde.boundary_cutoff)?;
    let d_mse = mse_against_benchmark(&curve)?;

    let ecf = estimators::ecf_values(ordered.values(), freq_grid.points());
    let table = cf_table_for(freq_grid.points());
    let d_mmd = cf_rms_gap(&ecf, table.values())?;

    let d_cr = d_cr(&ordered)?;

    Ok(DistanceReport {
        d_ks,
        d_mse,
        d_mmd,
        d_cr,
        n: ordered.len(),
        settings: GridMeta {
            grid_points: curve.len(),
            grid_min: curve[0].0,
            grid_max: curve[curve.len() - 1].0,
            freq_points: freq_grid.len(),
            freq_max: settings.freq_max,
            cutoff: settings.kde.boundary_cutoff,
            bandwidth_rule: settings.kde.bandwidth,
            bandwidth: kde.bandwidth(),
        },
    })
}
