//! The fixed reference law for RMS-normalized fully developed speckle:
//! Rayleigh with scale `sqrt(2)/2`, i.e. density `2x exp(-x^2)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;

/// Rayleigh scale of the benchmark law.
pub const SIGMA: f64 = FRAC_1_SQRT_2;

/// Upper integration limit for the characteristic function; the benchmark
/// density is below 1e-12 beyond it.
pub const CF_CUTOFF: f64 = 5.5;

const CF_ABS_TOL: f64 = 1e-10;

/// Contrast ratio of a Rayleigh amplitude, `sqrt(4/pi - 1)`.
pub fn cr_theoretical() -> f64 {
    (4.0 / PI - 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkConstants {
    pub sigma: f64,
    pub cr_theoretical: f64,
}

impl Default for BenchmarkConstants {
    fn default() -> Self {
        Self {
            sigma: SIGMA,
            cr_theoretical: cr_theoretical(),
        }
    }
}

fn check_support(x: f64) -> Result<()> {
    if x < 0.0 || x.is_nan() {
        Err(Error::NegativeArgument(x))
    } else {
        Ok(())
    }
}

pub(crate) fn pdf_unchecked(x: f64) -> f64 {
    2.0 * x * (-x * x).exp()
}

pub(crate) fn cdf_unchecked(x: f64) -> f64 {
    -(-x * x).exp_m1()
}

pub fn bd_pdf(x: f64) -> Result<f64> {
    check_support(x)?;
    Ok(pdf_unchecked(x))
}

pub fn bd_cdf(x: f64) -> Result<f64> {
    check_support(x)?;
    Ok(cdf_unchecked(x))
}

/// Benchmark quantile, `sqrt(-ln(1 - p))`.
pub fn bd_quantile(p: f64) -> f64 {
    (-(-p).ln_1p()).sqrt()
}

/// Characteristic function of the benchmark law, by adaptive quadrature of
/// `int_0^inf exp(i t x) 2x exp(-x^2) dx` truncated at [`CF_CUTOFF`].
pub fn bd_cf(t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let re = quad::integrate(|x| (t * x).cos() * pdf_unchecked(x), 0.0, CF_CUTOFF, CF_ABS_TOL, 0.0);
    let im = quad::integrate(|x| (t * x).sin() * pdf_unchecked(x), 0.0, CF_CUTOFF, CF_ABS_TOL, 0.0);
    Complex64::new(re.value, im.value)
}

/// Benchmark characteristic function tabulated once on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CfTable {
    points: Vec<f64>,
    values: Vec<Complex64>,
}

impl CfTable {
    pub fn new(points: &[f64]) -> Self {
        Self {
            points: points.to_vec(),
            values: points.iter().map(|&t| bd_cf(t)).collect(),
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Whether this table was built for exactly these abscissae.
    pub fn matches(&self, points: &[f64]) -> bool {
        self.points == points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let c = BenchmarkConstants::default();
        assert!((c.sigma * c.sigma - 0.5).abs() <= f64::EPSILON);
        assert!((c.cr_theoretical - 0.522723).abs() < 1e-6);
        // CR = sqrt(E[X^2] / E[X]^2 - 1) with E[X^2] = 1, E[X] = sqrt(pi)/2.
        let ex = PI.sqrt() / 2.0;
        assert!((c.cr_theoretical - (1.0 / (ex * ex) - 1.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn pdf_values() {
        assert_eq!(bd_pdf(0.0).unwrap(), 0.0);
        let mode = bd_pdf(FRAC_1_SQRT_2).unwrap();
        assert!((mode - 2f64.sqrt() * (-0.5f64).exp()).abs() < 1e-15);
        assert!((mode - 0.85776).abs() < 1e-5);
        let mass = quad::integrate(pdf_unchecked, 0.0, 10.0, 1e-13, 0.0).value;
        assert!((mass - 1.0).abs() < 1e-8);
        assert!(matches!(bd_pdf(-0.1), Err(Error::NegativeArgument(_))));
    }

    #[test]
    fn cdf_values() {
        assert_eq!(bd_cdf(0.0).unwrap(), 0.0);
        assert!((bd_cdf(2f64.ln().sqrt()).unwrap() - 0.5).abs() < 1e-15);
        assert!((bd_cdf(3.0).unwrap() - (1.0 - (-9.0f64).exp())).abs() < 1e-15);
        assert!(bd_cdf(-1e-9).is_err());
        assert!((bd_quantile(0.5) - 2f64.ln().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cdf_derivative_is_pdf() {
        let h = 1e-6;
        for i in 0..=300 {
            let x = i as f64 * 0.01;
            let lo = (x - h).max(0.0);
            let fd = (cdf_unchecked(x + h) - cdf_unchecked(lo)) / (x + h - lo);
            assert!((fd - pdf_unchecked(x)).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn cf_basics() {
        assert_eq!(bd_cf(0.0), Complex64::new(1.0, 0.0));
        let t = 1e-3;
        let small = bd_cf(t);
        assert!((small.im - t * PI.sqrt() / 2.0).abs() < 1e-6);
        for t in [0.3, 1.0, 4.0, 17.0] {
            let a = bd_cf(t);
            let b = bd_cf(-t);
            assert!((a - b.conj()).norm() < 1e-12);
            assert!(a.norm() <= 1.0);
        }
    }

    #[test]
    fn cf_magnitude_envelope() {
        let mags: Vec<f64> = (0..=400).map(|i| bd_cf(i as f64 * 0.05).norm()).collect();
        for w in mags.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
    }
}
