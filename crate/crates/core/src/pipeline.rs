//! Image-to-distance plumbing shared by the CLI commands: decode, undo the
//! log mapping, cut the ROI, normalize, measure.

use serde::Serialize;

use crate::distances::{distance_report, DistanceReport, DistanceSettings};
use crate::error::Result;
use crate::ingest::{extract_roi, inverse_log_transform, normalize_rms, PixelMatrix, RoiSpec};
use crate::sample::AmplitudeSample;

/// Sub-ROIs smaller than this are skipped by [`roi_sweep`].
pub const MIN_SWEEP_PIXELS: usize = 100;

/// Area fractions used by [`roi_sweep`] when none are given.
pub const DEFAULT_SWEEP_FRACTIONS: [f64; 7] = [
    1.0 / 64.0,
    1.0 / 32.0,
    1.0 / 16.0,
    1.0 / 8.0,
    1.0 / 4.0,
    1.0 / 2.0,
    1.0,
];

/// How stored pixel values map back to amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mapping")]
pub enum PixelMapping {
    /// Pixels are already linear amplitudes.
    Linear,
    /// Pixels were log-compressed over this many decades.
    Log { decades: f64 },
}

impl PixelMapping {
    pub fn to_amplitudes(&self, pixels: &PixelMatrix) -> Result<PixelMatrix> {
        match *self {
            PixelMapping::Linear => Ok(pixels.clone()),
            PixelMapping::Log { decades } => inverse_log_transform(pixels, decades),
        }
    }
}

/// Log-compresses linear amplitudes the way scanners store B-scans: the
/// brightest pixel maps to `depth`, `decades` below it maps to 0, and
/// anything darker is clipped. Inverting with [`PixelMapping::Log`] returns
/// the amplitudes up to a common scale factor.
pub fn log_compress(amplitudes: &PixelMatrix, decades: f64, depth: f64) -> Result<PixelMatrix> {
    if !(decades > 0.0 && decades.is_finite()) {
        return Err(crate::error::invalid("decades", "must be positive"));
    }
    let top = amplitudes.data().iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return Err(crate::Error::AllZero);
    }
    let data = amplitudes
        .data()
        .iter()
        .map(|&a| (depth * (1.0 + (a / top).log10() / decades)).clamp(0.0, depth))
        .collect();
    PixelMatrix::new(amplitudes.rows(), amplitudes.cols(), data, depth)
}

/// Normalized amplitude sample from one ROI of an amplitude image.
pub fn roi_sample(amplitudes: &PixelMatrix, roi: &RoiSpec) -> Result<AmplitudeSample> {
    normalize_rms(&extract_roi(amplitudes, roi)?)
}

pub fn roi_distances(amplitudes: &PixelMatrix, roi: &RoiSpec, settings: &DistanceSettings) -> Result<DistanceReport> {
    distance_report(&roi_sample(amplitudes, roi)?, settings)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub fraction: f64,
    pub roi: RoiSpec,
    pub area: usize,
    /// `None` when the sub-ROI was skipped; see `note`.
    pub report: Option<DistanceReport>,
    pub note: Option<String>,
}

/// Distances over nested, centered sub-ROIs of `base` whose areas are the
/// given fractions of the base area.
pub fn roi_sweep(
    amplitudes: &PixelMatrix,
    base: &RoiSpec,
    fractions: &[f64],
    settings: &DistanceSettings,
) -> Result<Vec<SweepRow>> {
    // Validates the base ROI up front.
    extract_roi(amplitudes, base)?;
    fractions
        .iter()
        .map(|&fraction| {
            let roi = base.centered_fraction(fraction);
            let area = roi.area();
            if area < MIN_SWEEP_PIXELS {
                return Ok(SweepRow {
                    fraction,
                    roi,
                    area,
                    report: None,
                    note: Some(format!(
                        "skipped: {area} pixels is below the {MIN_SWEEP_PIXELS}-pixel minimum"
                    )),
                });
            }
            Ok(SweepRow {
                fraction,
                roi,
                area,
                report: Some(roi_distances(amplitudes, &roi, settings)?),
                note: None,
            })
        })
        .collect()
}
