//! Correlation and regression helpers for relating distances to covariates.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{invalid, Error, Result};

/// Paired observations of equal length (at least three).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedSeries {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PairedSeries {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(invalid("series", format!("lengths differ ({} vs {})", x.len(), y.len())));
        }
        if x.len() < 3 {
            return Err(Error::TooSmall { needed: 3, got: x.len() });
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(invalid("series", "values must be finite"));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

struct Centered {
    sxx: f64,
    syy: f64,
    sxy: f64,
    mx: f64,
    my: f64,
}

fn centered(x: &[f64], y: &[f64]) -> Centered {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    Centered { sxx, syy, sxy, mx, my }
}

fn pearson_raw(x: &[f64], y: &[f64]) -> Result<f64> {
    let c = centered(x, y);
    if !(c.sxx > 0.0 && c.syy > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((c.sxy / (c.sxx.sqrt() * c.syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn pearson_r(series: &PairedSeries) -> Result<f64> {
    pearson_raw(&series.x, &series.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn linear_regression(series: &PairedSeries) -> Result<Regression> {
    let c = centered(&series.x, &series.y);
    if !(c.sxx > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let r = pearson_r(series)?;
    let slope = c.sxy / c.sxx;
    Ok(Regression {
        slope,
        intercept: c.my - slope * c.mx,
        r,
    })
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherComparison {
    pub z: f64,
    pub p_two_sided: f64,
}

/// Fisher z test for the difference of two independent correlations.
pub fn fisher_compare(r1: f64, n1: usize, r2: f64, n2: usize) -> Result<FisherComparison> {
    for (r, n) in [(r1, n1), (r2, n2)] {
        if !(r.abs() < 1.0) {
            return Err(invalid("r", format!("|r| must be below 1, got {r}")));
        }
        if n <= 3 {
            return Err(invalid("n", format!("need more than 3 observations, got {n}")));
        }
    }
    let se = (1.0 / (n1 - 3) as f64 + 1.0 / (n2 - 3) as f64).sqrt();
    let z = (r1.atanh() - r2.atanh()) / se;
    let p = (2.0 * normal_cdf(-z.abs())).min(1.0);
    Ok(FisherComparison { z, p_two_sided: p })
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman_rho(series: &PairedSeries) -> Result<f64> {
    pearson_raw(&average_ranks(&series.x), &average_ranks(&series.y))
}
