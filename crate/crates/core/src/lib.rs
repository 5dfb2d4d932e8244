//! Model-free speckle amplitude statistics.
//!
//! After RMS normalization, fully developed speckle amplitude follows a
//! Rayleigh law with the fixed scale `sqrt(2)/2`. This crate measures how far
//! an empirical amplitude sample departs from that benchmark using four
//! distances (Kolmogorov-Smirnov on the CDF, mean squared KDE error on the
//! PDF, an RMS gap between characteristic functions, and the contrast-ratio
//! offset), and contrasts it with classical maximum-likelihood fitting of
//! seven amplitude families.
//!
//! A phasor-sum simulator ([`sim`]) generates ground truth so every property
//! can be checked without clinical data.
//!
//! ```
//! use speckle_core::{distances, ingest, sim};
//!
//! let raw = sim::sample_rayleigh(20_000, 3.0, 7).unwrap();
//! let sample = ingest::normalize_rms(&raw).unwrap();
//! let report = distances::distance_report(&sample, &Default::default()).unwrap();
//! assert!(report.d_ks < 0.02);
//! ```

pub mod benchmark;
pub mod cli;
pub mod distances;
pub mod distfit;
pub mod error;
pub mod estimators;
pub mod ingest;
pub mod pipeline;
mod quad;
pub mod sample;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use sample::AmplitudeSample;

/// Toolkit version embedded in every CLI output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
