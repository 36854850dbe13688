//! Moment-matching fits of zero-mean generalized Gaussian densities.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 64;
pub const ALPHA_MIN: f64 = 0.05;
pub const ALPHA_MAX: f64 = 10.0;
/// Floor for AGGD side scales (a side without samples).
pub const SCALE_FLOOR: f64 = 1e-6;
/// Mean square below which samples count as all zero.
const DEGENERATE_ENERGY: f64 = 1e-20;

/// `f(x) = alpha / (2 b Gamma(1/alpha)) exp(-(|x|/b)^alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GgdParams {
    pub alpha: f64,
    pub b: f64,
}

/// Asymmetric variant with separate left/right scales.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggdParams {
    pub alpha: f64,
    pub b_left: f64,
    pub b_right: f64,
}

impl GgdParams {
    /// Stand-in for a degenerate fit.
    pub fn degenerate(scale: f64) -> Self {
        Self {
            alpha: 2.0,
            b: scale,
        }
    }
}

impl AggdParams {
    pub fn degenerate(scale: f64) -> Self {
        Self {
            alpha: 2.0,
            b_left: scale,
            b_right: scale,
        }
    }

    /// Component-wise mean.
    pub fn average(params: &[AggdParams]) -> Self {
        let n = params.len() as f64;
        Self {
            alpha: params.iter().map(|p| p.alpha).sum::<f64>() / n,
            b_left: params.iter().map(|p| p.b_left).sum::<f64>() / n,
            b_right: params.iter().map(|p| p.b_right).sum::<f64>() / n,
        }
    }
}

/// `Gamma(1/a) Gamma(3/a) / Gamma(2/a)^2`, strictly decreasing in `a`.
pub fn ggd_ratio(alpha: f64) -> f64 {
    (ln_gamma(1.0 / alpha) + ln_gamma(3.0 / alpha) - 2.0 * ln_gamma(2.0 / alpha)).exp()
}

/// Inverts [`ggd_ratio`] by bisection in `ln alpha`, clamped to
/// `[ALPHA_MIN, ALPHA_MAX]`.
pub fn invert_ratio(r: f64) -> f64 {
    if r >= ggd_ratio(ALPHA_MIN) {
        return ALPHA_MIN;
    }
    if r <= ggd_ratio(ALPHA_MAX) {
        return ALPHA_MAX;
    }
    let (mut lo, mut hi) = (ALPHA_MIN.ln(), ALPHA_MAX.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ggd_ratio(mid.exp()) > r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// `sqrt(Gamma(1/a) / Gamma(3/a))`, converting an RMS value to a scale.
fn rms_to_scale(alpha: f64) -> f64 {
    (0.5 * (ln_gamma(1.0 / alpha) - ln_gamma(3.0 / alpha))).exp()
}

fn check(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::DegenerateFit(format!(
            "{} samples, need {MIN_SAMPLES}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let abs_mean = samples.iter().map(|v| v.abs()).sum::<f64>() / n;
    let sq_mean = samples.iter().map(|v| v * v).sum::<f64>() / n;
    if !(sq_mean.is_finite()) || sq_mean < DEGENERATE_ENERGY || abs_mean <= 0.0 {
        return Err(Error::DegenerateFit(
            "samples are all zero or non-finite".into(),
        ));
    }
    Ok((abs_mean, sq_mean))
}

/// Matches `E[x^2] / E[|x|]^2` to the GGD ratio; `b` from the second moment.
pub fn fit_ggd(samples: &[f64]) -> Result<GgdParams> {
    let (abs_mean, sq_mean) = check(samples)?;
    let alpha = invert_ratio(sq_mean / (abs_mean * abs_mean));
    Ok(GgdParams {
        alpha,
        b: sq_mean.sqrt() * rms_to_scale(alpha),
    })
}

/// Asymmetric moment matching: left/right RMS about zero set the scales,
/// the generalized ratio (corrected for the left/right imbalance) sets
/// the shape.
pub fn fit_aggd(samples: &[f64]) -> Result<AggdParams> {
    let (abs_mean, sq_mean) = check(samples)?;
    let (mut l2, mut nl, mut r2, mut nr) = (0.0, 0usize, 0.0, 0usize);
    for &v in samples {
        if v < 0.0 {
            l2 += v * v;
            nl += 1;
        } else if v > 0.0 {
            r2 += v * v;
            nr += 1;
        }
    }
    let sl = if nl > 0 { (l2 / nl as f64).sqrt() } else { 0.0 };
    let sr = if nr > 0 { (r2 / nr as f64).sqrt() } else { 0.0 };
    // The correction is symmetric under g -> 1/g, so use the ratio <= 1.
    let g = sl.min(sr) / sl.max(sr);
    let correction = (g.powi(3) + 1.0) * (g + 1.0) / (g * g + 1.0).powi(2);
    let r_hat = abs_mean * abs_mean / sq_mean * correction;
    let alpha = invert_ratio(1.0 / r_hat);
    let k = rms_to_scale(alpha);
    Ok(AggdParams {
        alpha,
        b_left: (sl * k).max(SCALE_FLOOR),
        b_right: (sr * k).max(SCALE_FLOOR),
    })
}
