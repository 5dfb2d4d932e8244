//! Amplitude distribution families and their log-densities.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::bessel::ln_bessel_k;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Rayleigh,
    Weibull,
    Gamma,
    GeneralizedGamma,
    Nakagami,
    KDist,
    Burr,
}

impl Family {
    /// Every family, in tag order.
    pub const ALL: [Family; 7] = [
        Family::Rayleigh,
        Family::Weibull,
        Family::Gamma,
        Family::GeneralizedGamma,
        Family::Nakagami,
        Family::KDist,
        Family::Burr,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Rayleigh => "rayleigh",
            Family::Weibull => "weibull",
            Family::Gamma => "gamma",
            Family::GeneralizedGamma => "generalized_gamma",
            Family::Nakagami => "nakagami",
            Family::KDist => "k_dist",
            Family::Burr => "burr",
        }
    }

    /// Parameter names in the order used by `params` slices.
    ///
    /// * weibull: scale, shape
    /// * gamma: shape, scale
    /// * generalized_gamma: density proportional to `x^(c d - 1) exp(-(x/a)^c)`
    /// * nakagami: shape `m >= 0.5`, spread `omega`
    /// * k_dist: shape `alpha`, mean square `<A^2>`
    /// * burr: scale `alpha`, shapes `c` and `k`
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Rayleigh => &["sigma"],
            Family::Weibull => &["scale", "shape"],
            Family::Gamma => &["shape", "scale"],
            Family::GeneralizedGamma => &["scale", "power", "shape"],
            Family::Nakagami => &["shape", "spread"],
            Family::KDist => &["alpha", "mean_square"],
            Family::Burr => &["alpha", "c", "k"],
        }
    }

    pub fn n_params(self) -> usize {
        self.param_names().len()
    }

    pub fn validate(self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(invalid(
                "params",
                format!("{} takes {} parameters, got {}", self.tag(), self.n_params(), params.len()),
            ));
        }
        if params.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(invalid("params", format!("{} parameters must be positive", self.tag())));
        }
        if self == Family::Nakagami && params[0] < 0.5 {
            return Err(invalid("params", "nakagami shape must be at least 0.5"));
        }
        Ok(())
    }

    pub fn pdf(self, params: &[f64], x: f64) -> Result<f64> {
        self.validate(params)?;
        if x < 0.0 || x.is_nan() {
            return Err(Error::NegativeArgument(x));
        }
        Ok(self.ln_pdf(params, x, x.ln()).exp())
    }

    /// Log-density at `x >= 0` given `ln x`; parameters are not checked.
    pub(crate) fn ln_pdf(self, p: &[f64], x: f64, lnx: f64) -> f64 {
        match self {
            Family::Rayleigh => {
                let s2 = p[0] * p[0];
                lnx - s2.ln() - x * x / (2.0 * s2)
            }
            Family::Weibull => {
                let (scale, shape) = (p[0], p[1]);
                let t = lnx - scale.ln();
                shape.ln() - scale.ln() + xlog(shape - 1.0, t) - (shape * t).exp()
            }
            Family::Gamma => {
                let (shape, scale) = (p[0], p[1]);
                -ln_gamma(shape) - shape * scale.ln() + xlog(shape - 1.0, lnx) - x / scale
            }
            Family::GeneralizedGamma => {
                let (a, c, d) = (p[0], p[1], p[2]);
                let t = lnx - a.ln();
                c.ln() - ln_gamma(d) - a.ln() + xlog(c * d - 1.0, t) - (c * t).exp()
            }
            Family::Nakagami => {
                let (m, omega) = (p[0], p[1]);
                LN_2 + m * m.ln() - ln_gamma(m) - m * omega.ln() + xlog(2.0 * m - 1.0, lnx)
                    - m * x * x / omega
            }
            Family::KDist => k_ln_pdf(p[0], p[1], x),
            Family::Burr => {
                let (alpha, c, k) = (p[0], p[1], p[2]);
                let t = lnx - alpha.ln();
                k.ln() + c.ln() - alpha.ln() + xlog(c - 1.0, t) - (k + 1.0) * softplus(c * t)
            }
        }
    }
}

/// `coef * ln_value`, taking `0 * -inf` as 0.
fn xlog(coef: f64, ln_value: f64) -> f64 {
    if coef == 0.0 {
        0.0
    } else {
        coef * ln_value
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn k_ln_pdf(alpha: f64, mean_square: f64, x: f64) -> f64 {
    // The density at zero is the limit from the right.
    let x = x.max(1e-300);
    let r = alpha / mean_square;
    let ln_r = r.ln();
    let z = 2.0 * r.sqrt() * x;
    2.0 * LN_2 - ln_gamma(alpha) + 0.5 * ln_r + 0.5 * alpha * (ln_r + 2.0 * x.ln())
        + ln_bessel_k(alpha - 1.0, z)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}
