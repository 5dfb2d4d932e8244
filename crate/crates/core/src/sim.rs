//! Monte-Carlo speckle generators.
//!
//! Every generator splits its output into fixed-size chunks and seeds chunk
//! `c` (starting at index `s`) with `seed ^ s`. Output is therefore a pure
//! function of the arguments, independent of how many threads produce it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::sample::AmplitudeSample;

/// Number of draws produced from one derived seed.
pub const CHUNK_LEN: usize = 1 << 16;

/// How many elementary phasors contribute to each amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum ScattererModel {
    Fixed { count: u64 },
    /// Negative binomial with the given mean and shape; variance is
    /// `mean + mean^2 / alpha`.
    NegBinomial { mean: f64, alpha: f64 },
}

impl ScattererModel {
    pub fn mean(&self) -> f64 {
        match *self {
            ScattererModel::Fixed { count } => count as f64,
            ScattererModel::NegBinomial { mean, .. } => mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_samples: usize,
    pub scatterers: ScattererModel,
    pub seed: u64,
}

impl SimConfig {
    pub fn fixed(n_samples: usize, count: u64, seed: u64) -> Self {
        Self {
            n_samples,
            scatterers: ScattererModel::Fixed { count },
            seed,
        }
    }

    pub fn neg_binomial(n_samples: usize, mean: f64, alpha: f64, seed: u64) -> Self {
        Self {
            n_samples,
            scatterers: ScattererModel::NegBinomial { mean, alpha },
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(invalid("n_samples", "must be at least 1"));
        }
        match self.scatterers {
            ScattererModel::Fixed { count } if count == 0 => {
                Err(invalid("scatterers", "fixed scatterer count must be at least 1"))
            }
            ScattererModel::NegBinomial { mean, .. } if !(mean > 0.0 && mean.is_finite()) => {
                Err(invalid("mean", format!("must be positive, got {mean}")))
            }
            ScattererModel::NegBinomial { alpha, .. } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(invalid("alpha", format!("must be positive, got {alpha}")))
            }
            _ => Ok(()),
        }
    }
}

fn chunked<F>(n: usize, seed: u64, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let starts: Vec<usize> = (0..n).step_by(CHUNK_LEN).collect();
    let chunks: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&start| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ start as u64);
            let len = CHUNK_LEN.min(n - start);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    chunks.concat()
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("n", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// Modulus of a sum of `count` unit phasors with independent uniform phases.
fn phasor_modulus<R: Rng>(rng: &mut R, count: u64) -> f64 {
    match count {
        0 => 0.0,
        // A single unit phasor has modulus one regardless of phase.
        1 => 1.0,
        _ => {
            let (mut re, mut im) = (0.0, 0.0);
            for _ in 0..count {
                let (s, c) = rng.random_range(-PI..PI).sin_cos();
                re += c;
                im += s;
            }
            re.hypot(im)
        }
    }
}

/// Amplitudes of random phasor sums, scaled by the square root of the mean
/// scatterer count so that `E[A^2] = 1`.
pub fn sample_phasor_sum(config: &SimConfig) -> Result<AmplitudeSample> {
    config.validate()?;
    let scale = config.scatterers.mean().sqrt().recip();
    let values = match config.scatterers {
        ScattererModel::Fixed { count } => chunked(config.n_samples, config.seed, |rng| {
            phasor_modulus(rng, count) * scale
        }),
        ScattererModel::NegBinomial { mean, alpha } => {
            let intensity = Gamma::new(alpha, mean / alpha)
                .map_err(|e| invalid("alpha", e.to_string()))?;
            chunked(config.n_samples, config.seed, |rng| {
                let lambda: f64 = intensity.sample(rng);
                let count = if lambda > 0.0 {
                    Poisson::new(lambda).map(|p| p.sample(rng) as u64).unwrap_or(0)
                } else {
                    0
                };
                phasor_modulus(rng, count) * scale
            })
        }
    };
    Ok(AmplitudeSample::from_trusted(values))
}

/// Rayleigh inverse CDF.
pub fn rayleigh_quantile(u: f64, sigma: f64) -> f64 {
    sigma * (-2.0 * (-u).ln_1p()).sqrt()
}

/// Burr (type XII, with scale) inverse CDF.
pub fn burr_quantile(u: f64, alpha: f64, c: f64, k: f64) -> f64 {
    alpha * ((1.0 - u).powf(-1.0 / k) - 1.0).max(0.0).powf(1.0 / c)
}

pub fn sample_rayleigh(n: usize, sigma: f64, seed: u64) -> Result<AmplitudeSample> {
    check_count(n)?;
    check_positive("sigma", sigma)?;
    let values = chunked(n, seed, |rng| rayleigh_quantile(rng.random::<f64>(), sigma));
    Ok(AmplitudeSample::from_trusted(values))
}

/// K-distributed amplitudes with unit mean square, drawn as a Rayleigh
/// amplitude whose mean intensity is itself Gamma(alpha, 1/alpha).
pub fn sample_k(n: usize, alpha: f64, seed: u64) -> Result<AmplitudeSample> {
    check_count(n)?;
    check_positive("alpha", alpha)?;
    let local_mean = Gamma::new(alpha, 1.0 / alpha).map_err(|e| invalid("alpha", e.to_string()))?;
    let values = chunked(n, seed, |rng| {
        let mu: f64 = local_mean.sample(rng);
        let u: f64 = rng.random();
        (mu * -(-u).ln_1p()).sqrt()
    });
    Ok(AmplitudeSample::from_trusted(values))
}

pub fn sample_burr(n: usize, alpha: f64, c: f64, k: f64, seed: u64) -> Result<AmplitudeSample> {
    check_count(n)?;
    check_positive("alpha", alpha)?;
    check_positive("c", c)?;
    check_positive("k", k)?;
    let values = chunked(n, seed, |rng| burr_quantile(rng.random::<f64>(), alpha, c, k));
    Ok(AmplitudeSample::from_trusted(values))
}
