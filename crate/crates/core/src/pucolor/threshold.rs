//! Detection-threshold models. A model supplies an opponent transform and
//! three base sensitivities `s(rho, y)`; the threshold for a chromatic
//! direction `u` at LMS `x` is the smallest, over the spatial-frequency
//! grid, reciprocal norm of `(s(rho, y) / y) * (m_arb u)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::video_io::{mul3, Mat3};

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn default_rho() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sensitivity {
    /// `s_c = gain_c * y`: thresholds independent of luminance.
    Constant { gain: [f64; 3] },
    /// `s_c = gain_c`: thresholds proportional to luminance.
    Weber { gain: [f64; 3] },
    /// `s_c = peak_c * (1 + (knee_c / y)^exponent_c)^(-power_c)`: Weber
    /// behavior above the knee, square-root (DeVries-Rose) like below it.
    Saturating {
        peak: [f64; 3],
        knee: [f64; 3],
        exponent: [f64; 3],
        power: [f64; 3],
    },
    /// Sensitivities sampled on `rho x log10(y)`; `values[i][j]` holds the
    /// three channels at `rho[i]`, `log10_y[j]`. Linear in `log10 y`,
    /// clamped at the table ends.
    Tabulated {
        log10_y: Vec<f64>,
        values: Vec<Vec<[f64; 3]>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdModel {
    pub m_arb: Mat3,
    #[serde(default = "default_rho")]
    pub rho: Vec<f64>,
    pub sensitivity: Sensitivity,
}

impl ThresholdModel {
    /// Oracle with `t(x, e_i) = k` everywhere.
    pub fn constant(k: f64) -> Self {
        Self {
            m_arb: IDENTITY,
            rho: vec![1.0],
            sensitivity: Sensitivity::Constant { gain: [1.0 / k; 3] },
        }
    }

    /// Oracle with `t(x, e_i) = k * y`.
    pub fn weber(k: f64) -> Self {
        Self {
            m_arb: IDENTITY,
            rho: vec![1.0],
            sensitivity: Sensitivity::Weber { gain: [1.0 / k; 3] },
        }
    }

    /// Built-in stand-in used when no measured contrast-sensitivity
    /// parameters are supplied. With `m_arb` equal to the opponent transform
    /// each chromatic direction excites exactly one mechanism.
    pub fn stand_in(m_dkl: Mat3) -> Self {
        Self {
            m_arb: m_dkl,
            rho: vec![1.0],
            sensitivity: Sensitivity::Saturating {
                peak: [100.0, 250.0, 25.0],
                knee: [20.0, 40.0, 80.0],
                exponent: [1.0; 3],
                power: [0.5; 3],
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho.is_empty() {
            return Err(Error::Config(
                "threshold model needs a non-empty rho grid".into(),
            ));
        }
        if let Sensitivity::Tabulated { log10_y, values } = &self.sensitivity {
            if log10_y.len() < 2
                || values.len() != self.rho.len()
                || values.iter().any(|r| r.len() != log10_y.len())
            {
                return Err(Error::Config(
                    "tabulated sensitivity shape does not match rho x log10_y".into(),
                ));
            }
            if log10_y.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config(
                    "tabulated log10_y must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }

    /// Base sensitivities at spatial-frequency index `rho_index`.
    pub fn sensitivities(&self, rho_index: usize, y: f64) -> [f64; 3] {
        match &self.sensitivity {
            Sensitivity::Constant { gain } => gain.map(|g| g * y),
            Sensitivity::Weber { gain } => *gain,
            Sensitivity::Saturating {
                peak,
                knee,
                exponent,
                power,
            } => std::array::from_fn(|c| {
                peak[c] * (1.0 + (knee[c] / y).powf(exponent[c])).powf(-power[c])
            }),
            Sensitivity::Tabulated { log10_y, values } => {
                let row = &values[rho_index];
                let ly = y.log10();
                let n = log10_y.len();
                if ly <= log10_y[0] {
                    return row[0];
                }
                if ly >= log10_y[n - 1] {
                    return row[n - 1];
                }
                let j = log10_y.partition_point(|&v| v <= ly) - 1;
                let f = (ly - log10_y[j]) / (log10_y[j + 1] - log10_y[j]);
                std::array::from_fn(|c| row[j][c] * (1.0 - f) + row[j + 1][c] * f)
            }
        }
    }

    /// Detection threshold along direction `u` at cone response `x`.
    /// Depends on `x` only through `y = x_L + x_M`.
    pub fn threshold(&self, x: [f64; 3], u: [f64; 3]) -> Result<f64> {
        self.threshold_at_luminance(x[0] + x[1], u)
    }

    pub fn threshold_at_luminance(&self, y: f64, u: [f64; 3]) -> Result<f64> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::Domain(y));
        }
        let excitation = mul3(&self.m_arb, u);
        let mut best = 0.0f64;
        for i in 0..self.rho.len() {
            let s = self.sensitivities(i, y);
            let norm = (0..3)
                .map(|c| (s[c] / y * excitation[c]).powi(2))
                .sum::<f64>()
                .sqrt();
            best = best.max(norm);
        }
        if best > 0.0 && best.is_finite() {
            Ok(1.0 / best)
        } else {
            Err(Error::Domain(y))
        }
    }
}
