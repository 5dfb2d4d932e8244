//! Maximum-likelihood fitting of parametric amplitude families and a
//! KDE-referenced goodness-of-fit score.

pub mod bessel;
mod families;
pub mod nelder_mead;

use std::cmp::Ordering;

use serde::{Serialize, Serializer};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::estimators::{EvalGrid, Kde, KdeSettings};
use crate::sample::{mean, mean_square, sorted, AmplitudeSample};

pub use families::Family;
use nelder_mead::{golden_section, minimize, NelderMeadOptions};

/// Minimum number of positive values for the iterative fits.
pub const MIN_FIT_SAMPLES: usize = 10;

const STARTS: usize = 5;
const SCREEN_TOLERANCE: f64 = 1e-6;
const SCREEN_ITERATIONS: usize = 400;

/// Search interval for the K-distribution shape.
const K_ALPHA_RANGE: (f64, f64) = (1e-2, 1e5);
const K_LOG_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub family: Family,
    pub params: Vec<f64>,
    /// Log-likelihood summed over the positive values used in the fit.
    pub log_likelihood: f64,
    pub gof: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub n_used: usize,
    pub dropped_zeros: usize,
}

impl FitResult {
    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.family.pdf(&self.params, x)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.family
            .param_names()
            .iter()
            .position(|n| *n == name)
            .map(|i| self.params[i])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let params: serde_json::Map<String, serde_json::Value> = self
            .family
            .param_names()
            .iter()
            .zip(&self.params)
            .map(|(n, v)| (n.to_string(), serde_json::json!(v)))
            .collect();
        serde_json::json!({
            "family": self.family.tag(),
            "params": params,
            "log_likelihood": self.log_likelihood,
            "gof": self.gof,
            "converged": self.converged,
            "iterations": self.iterations,
            "n_used": self.n_used,
            "dropped_zeros": self.dropped_zeros,
        })
    }
}

impl Serialize for FitResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Positive amplitudes with cached logarithms.
struct FitData {
    x: Vec<f64>,
    lnx: Vec<f64>,
    dropped_zeros: usize,
}

impl FitData {
    fn new(sample: &AmplitudeSample) -> Self {
        let x: Vec<f64> = sorted(sample.values()).into_iter().filter(|&v| v > 0.0).collect();
        let lnx = x.iter().map(|v| v.ln()).collect();
        Self {
            dropped_zeros: sample.len() - x.len(),
            x,
            lnx,
        }
    }

    fn len(&self) -> usize {
        self.x.len()
    }

    fn log_likelihood(&self, family: Family, params: &[f64]) -> f64 {
        self.x
            .iter()
            .zip(&self.lnx)
            .map(|(&x, &l)| family.ln_pdf(params, x, l))
            .sum()
    }

    fn mean_ll(&self, family: Family, params: &[f64]) -> f64 {
        self.log_likelihood(family, params) / self.len() as f64
    }

    fn moments(&self) -> Moments {
        let m1 = mean(&self.x);
        let m2 = self.x.iter().map(|v| v * v).sum::<f64>() / self.len() as f64;
        let m4 = self.x.iter().map(|v| v.powi(4)).sum::<f64>() / self.len() as f64;
        let mut s = self.x.clone();
        let mid = s.len() / 2;
        s.select_nth_unstable_by(mid, f64::total_cmp);
        Moments {
            mean: m1,
            mean_square: m2,
            fourth: m4,
            median: s[mid],
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    mean: f64,
    mean_square: f64,
    fourth: f64,
    median: f64,
}

impl Moments {
    fn var(&self) -> f64 {
        (self.mean_square - self.mean * self.mean).max(f64::MIN_POSITIVE)
    }

    /// Weibull shape whose contrast ratio matches the sample, by bisection.
    fn weibull_shape(&self) -> f64 {
        let target = self.var().sqrt() / self.mean;
        let cr = |k: f64| {
            let g1 = ln_gamma(1.0 + 1.0 / k);
            let g2 = ln_gamma(1.0 + 2.0 / k);
            ((g2 - 2.0 * g1).exp() - 1.0).max(0.0).sqrt()
        };
        let (mut lo, mut hi) = (0.05f64, 50.0f64);
        for _ in 0..60 {
            let mid = (lo * hi).sqrt();
            // Contrast ratio falls as the shape grows.
            if cr(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo * hi).sqrt()
    }
}

fn to_free(family: Family, params: &[f64]) -> Vec<f64> {
    params
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if family == Family::Nakagami && i == 0 {
                (p - 0.5).max(1e-9).ln()
            } else {
                p.ln()
            }
        })
        .collect()
}

fn from_free(family: Family, theta: &[f64]) -> Vec<f64> {
    theta
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if family == Family::Nakagami && i == 0 {
                0.5 + t.exp()
            } else {
                t.exp()
            }
        })
        .collect()
}

/// Moment-informed starting points, five per family.
fn starting_points(family: Family, m: &Moments) -> Vec<Vec<f64>> {
    let k0 = m.weibull_shape();
    let weibull_scale = |k: f64| m.mean / ln_gamma(1.0 + 1.0 / k).exp();
    let gamma_shape = m.mean * m.mean / m.var();
    let naka_shape = (m.mean_square * m.mean_square / (m.fourth - m.mean_square * m.mean_square).max(1e-12))
        .max(0.5 + 1e-3);
    let factors = [1.0, 0.5, 2.0, 0.75, 1.5];
    match family {
        Family::Weibull => factors
            .iter()
            .map(|f| {
                let k = k0 * f;
                vec![weibull_scale(k), k]
            })
            .collect(),
        Family::Gamma => factors
            .iter()
            .map(|f| {
                let a = gamma_shape * f;
                vec![a, m.mean / a]
            })
            .collect(),
        Family::Nakagami => factors
            .iter()
            .map(|f| vec![(naka_shape * f).max(0.5 + 1e-3), m.mean_square])
            .collect(),
        Family::GeneralizedGamma => {
            let match_mean = |c: f64, d: f64| {
                let a = m.mean * (ln_gamma(d) - ln_gamma(d + 1.0 / c)).exp();
                vec![a, c, d]
            };
            vec![
                match_mean(k0, 1.0),
                match_mean(1.0, gamma_shape),
                match_mean(2.0, naka_shape),
                match_mean(0.5 * k0, 2.0),
                match_mean(1.5 * k0, 0.5),
            ]
        }
        Family::Burr => {
            let match_median = |c: f64, k: f64| {
                let alpha = m.median / ((2f64.powf(1.0 / k) - 1.0).powf(1.0 / c));
                vec![alpha, c, k]
            };
            vec![
                match_median(k0, 1.0),
                match_median(k0, 4.0),
                match_median(1.5 * k0, 0.7),
                match_median(1.2 * k0, 10.0),
                match_median(2.0 * k0, 0.5),
            ]
        }
        Family::Rayleigh | Family::KDist => Vec::new(),
    }
}

/// Closed-form Rayleigh scale MLE, `sqrt(sum A^2 / 2n)`.
pub fn rayleigh_mle(sample: &AmplitudeSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok((0.5 * mean_square(sample.values())).sqrt())
}

/// Bayes estimator of the Rayleigh scale,
/// `sqrt(2) Gamma(n+2) / (2 Gamma(n+5/2)) * sqrt(sum A^2)`.
pub fn bayes_sigma(sample: &AmplitudeSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len() as f64;
    let ss = n * mean_square(sample.values());
    let ratio = (ln_gamma(n + 2.0) - ln_gamma(n + 2.5)).exp();
    Ok(std::f64::consts::FRAC_1_SQRT_2 * ratio * ss.sqrt())
}

/// Maximum-likelihood fit of one family. Zero amplitudes are dropped and
/// counted. The Rayleigh fit is the exact closed form over all values; the
/// K fit pins the mean square to the data and searches the shape; the other
/// families use a multi-start simplex search in log-parameter space.
pub fn mle_fit(family: Family, sample: &AmplitudeSample) -> Result<FitResult> {
    let data = FitData::new(sample);
    if family == Family::Rayleigh {
        let sigma = rayleigh_mle(sample)?;
        if !(sigma > 0.0) {
            return Err(Error::AllZero);
        }
        return Ok(FitResult {
            family,
            params: vec![sigma],
            log_likelihood: data.log_likelihood(family, &[sigma]),
            gof: None,
            converged: true,
            iterations: 0,
            n_used: data.len(),
            dropped_zeros: data.dropped_zeros,
        });
    }
    if data.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooSmall {
            needed: MIN_FIT_SAMPLES,
            got: data.len(),
        });
    }
    if data.x[0] == data.x[data.len() - 1] {
        return Err(Error::ZeroVariance);
    }
    let moments = data.moments();
    if family == Family::KDist {
        return Ok(fit_k(&data, &moments));
    }

    let objective = |theta: &[f64]| -data.mean_ll(family, &from_free(family, theta));
    let screen = NelderMeadOptions {
        f_tolerance: SCREEN_TOLERANCE,
        max_iterations: SCREEN_ITERATIONS,
        ..Default::default()
    };
    let mut iterations = 0;
    let mut best: Option<nelder_mead::Minimum> = None;
    for start in starting_points(family, &moments).into_iter().take(STARTS) {
        let m = minimize(objective, &to_free(family, &start), &screen);
        iterations += m.iterations;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let best = best.expect("every iterative family has starting points");
    let polished = minimize(objective, &best.x, &NelderMeadOptions::default());
    iterations += polished.iterations;
    let params = from_free(family, &polished.x);
    Ok(FitResult {
        family,
        log_likelihood: data.log_likelihood(family, &params),
        params,
        gof: None,
        converged: polished.converged && polished.value.is_finite(),
        iterations,
        n_used: data.len(),
        dropped_zeros: data.dropped_zeros,
    })
}

fn fit_k(data: &FitData, moments: &Moments) -> FitResult {
    let ms = moments.mean_square;
    let objective = |log_alpha: f64| {
        let v = -data.mean_ll(Family::KDist, &[log_alpha.exp(), ms]);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (lo, hi) = (K_ALPHA_RANGE.0.ln(), K_ALPHA_RANGE.1.ln());
    // Coarse scan to bracket the maximum, then golden-section refinement.
    let steps = 16;
    let grid: Vec<f64> = (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&g| objective(g)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(steps)];
    let (log_alpha, value, iters) = golden_section(objective, a, b, K_LOG_TOLERANCE);
    let params = vec![log_alpha.exp(), ms];
    FitResult {
        family: Family::KDist,
        log_likelihood: data.log_likelihood(Family::KDist, &params),
        params,
        gof: None,
        converged: value.is_finite(),
        iterations: steps + 1 + iters,
        n_used: data.len(),
        dropped_zeros: data.dropped_zeros,
    }
}

/// Mean squared gap between a density and a tabulated KDE curve.
pub fn gof_from_curve<F: Fn(f64) -> f64>(pdf: F, curve: &[(f64, f64)]) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let ss: f64 = curve
        .iter()
        .map(|&(x, k)| {
            let gap = pdf(x) - k;
            gap * gap
        })
        .sum();
    Ok(ss / curve.len() as f64)
}

/// Goodness of fit: mean over the post-cutoff grid of `(pdf_fit - KDE)^2`.
pub fn gof_mse(fit: &FitResult, sample: &AmplitudeSample, grid: &EvalGrid, kde: &KdeSettings) -> Result<f64> {
    if !fit.converged {
        return Err(Error::NotConverged(fit.family.tag()));
    }
    if !sample.is_normalized() {
        return Err(Error::Unnormalized);
    }
    fit.family.validate(&fit.params)?;
    let curve = Kde::fit(sample, kde)?.evaluate(grid, kde.boundary_cutoff)?;
    gof_from_curve(|x| fit.family.ln_pdf(&fit.params, x, x.ln()).exp(), &curve)
}

fn rank_order(a: &FitResult, b: &FitResult) -> Ordering {
    let key = |f: &FitResult| match (f.converged, f.gof) {
        (true, Some(g)) if g.is_finite() => (0, g),
        _ => (1, 0.0),
    };
    let (ka, kb) = (key(a), key(b));
    ka.0.cmp(&kb.0)
        .then(ka.1.total_cmp(&kb.1))
        .then(a.family.n_params().cmp(&b.family.n_params()))
        .then(a.family.cmp(&b.family))
}

/// Fits every requested family and sorts by goodness of fit (best first).
/// Ties go to fewer parameters, then tag order; unconverged fits sort last.
pub fn rank_families(
    sample: &AmplitudeSample,
    families: &[Family],
    grid: &EvalGrid,
    kde: &KdeSettings,
) -> Result<Vec<FitResult>> {
    if !sample.is_normalized() {
        return Err(Error::Unnormalized);
    }
    let curve = Kde::fit(sample, kde)?.evaluate(grid, kde.boundary_cutoff)?;
    let mut results = Vec::with_capacity(families.len());
    for &family in families {
        let mut fit = mle_fit(family, sample)?;
        if fit.converged {
            fit.gof = Some(gof_from_curve(
                |x| fit.family.ln_pdf(&fit.params, x, x.ln()).exp(),
                &curve,
            )?);
        }
        results.push(fit);
    }
    results.sort_by(rank_order);
    Ok(results)
}
