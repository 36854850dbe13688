//! Perceptually uniform color encoding.
//!
//! The encoder is `x -> (h(y)/y) ⊙ (M_dkl x)` with `y = x_L + x_M`, where
//! each channel of `h` is a fitted five-parameter curve approximating the
//! line integral of the inverse detection threshold along a DKL direction.
//! Offline: [`integrate_pu`] + [`fit::fit_nonlinearity`] produce a
//! [`PuCalibration`]. Runtime: [`PuEncoder`] evaluates `h/y` from a
//! log-luminance lookup table.

pub mod fit;
pub mod threshold;

use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::quadrature::{integrate, QuadError};
use crate::scalar::Scalar;
use crate::video_io::{invert3, matmul3, mul3, ColorConfig, LinearFrame, Mat3};

pub use fit::{fit_nonlinearity, NonlinearityFit};
pub use threshold::{Sensitivity, ThresholdModel};

/// Lower integration limit replacing `lambda = 0`. For every supported
/// threshold model `lambda / t(lambda x)` stays bounded (or grows no faster
/// than `lambda^-1/2`) near zero, so the dropped piece is at most
/// `O(sqrt(1e-8))` of the integrand scale; the Weber form is the exception
/// and is defined with this limit.
pub const LOWER_LIMIT: f64 = 1e-8;
pub const QUAD_REL_TOL: f64 = 1e-7;
pub const DEFAULT_Y_MIN: f64 = 1e-4;
pub const DEFAULT_Y_MAX: f64 = 1e4;
pub const GRID_POINTS: usize = 200;
pub const LUT_SIZE: usize = 4096;

const BUILTIN: &str = include_str!("../../data/pucolor_default.json");

/// DKL opponent transform and its inverse, whose columns are the
/// chromatic directions along which the encoding is uniform.
#[derive(Clone, Debug, PartialEq)]
pub struct ChromaticBasis {
    pub m_dkl: Mat3,
    pub u: Mat3,
}

impl ChromaticBasis {
    /// Opponent axes relative to the adapting white `white` (LMS):
    /// luminance `L + M`, red-green `L - (Lw/Mw) M`, blue-yellow
    /// `S (Lw + Mw)/Sw - (L + M)`. The chromatic axes vanish on the white.
    pub fn from_white(white: [f64; 3]) -> Result<Self> {
        let [lw, mw, sw] = white;
        let m_dkl = [
            [1.0, 1.0, 0.0],
            [1.0, -lw / mw, 0.0],
            [-1.0, -1.0, (lw + mw) / sw],
        ];
        Self::from_matrix(m_dkl)
    }

    pub fn from_matrix(m_dkl: Mat3) -> Result<Self> {
        let u = invert3(&m_dkl)?;
        Ok(Self { m_dkl, u })
    }

    pub fn direction(&self, i: usize) -> [f64; 3] {
        [self.u[0][i], self.u[1][i], self.u[2][i]]
    }

    /// Max deviation of `U M_dkl` from the identity.
    pub fn inverse_residual(&self) -> f64 {
        let p = matmul3(&self.u, &self.m_dkl);
        let mut worst = 0.0f64;
        for (i, row) in p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

/// `I(y) = ∫ dλ / t(λ y, u)` over `[LOWER_LIMIT, 1]`, evaluated in
/// `s = ln λ` where the integrand `e^s / t(e^s y)` is smooth.
pub fn line_integral(
    model: &ThresholdModel,
    u: [f64; 3],
    y: f64,
) -> std::result::Result<f64, String> {
    let q = integrate(
        |s: f64| {
            let lambda = s.exp();
            model
                .threshold_at_luminance(lambda * y, u)
                .map_or(f64::NAN, |t| lambda / t)
        },
        LOWER_LIMIT.ln(),
        0.0,
        QUAD_REL_TOL,
        0.0,
        2000,
    );
    match q {
        Ok(q) => Ok(q.value),
        Err(QuadError::NotConverged(q)) => Err(format!(
            "quadrature did not converge (estimate {}, error {})",
            q.value, q.error
        )),
        Err(QuadError::NonFinite { at }) => {
            Err(format!("threshold undefined at lambda = {}", at.exp()))
        }
    }
}

/// Integral tables `I_i(y)` for the three chromatic directions.
pub fn integrate_pu(
    model: &ThresholdModel,
    basis: &ChromaticBasis,
    y_grid: &[f64],
) -> Result<[Vec<f64>; 3]> {
    model.validate()?;
    let mut out: [Vec<f64>; 3] = Default::default();
    for (channel, table) in out.iter_mut().enumerate() {
        let u = basis.direction(channel);
        *table = y_grid
            .par_iter()
            .map(|&y| {
                line_integral(model, u, y).map_err(|reason| Error::Calibration {
                    channel,
                    y,
                    reason,
                })
            })
            .collect::<Result<Vec<f64>>>()?;
    }
    Ok(out)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Everything the runtime encoder needs; serialized as the calibration
/// JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuCalibration {
    #[serde(default)]
    pub color: ColorConfig,
    pub m_dkl: Mat3,
    /// `(p1..p5)` for the achromatic, red-green and blue-yellow channels.
    pub params: [[f64; 5]; 3],
    pub r_squared: [f64; 3],
    /// Shared gain; the achromatic offset maps `y_min` to 0.
    pub gain: f64,
    pub offset: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// The threshold model the curves were fitted to, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_model: Option<ThresholdModel>,
}

impl PuCalibration {
    /// The calibration shipped with the crate (fitted to the built-in
    /// stand-in threshold model).
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("embedded calibration is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y_min > 0.0 && self.y_max > self.y_min && self.y_max.is_finite()) {
            return Err(Error::Config(
                "calibration luminance domain must satisfy 0 < y_min < y_max".into(),
            ));
        }
        if !(self.gain > 0.0 && self.gain.is_finite() && self.offset.is_finite()) {
            return Err(Error::Config(
                "calibration gain must be positive and finite".into(),
            ));
        }
        if self.params.iter().flatten().any(|p| !p.is_finite()) {
            return Err(Error::Config(
                "calibration parameters must be finite".into(),
            ));
        }
        if let Some(c) = self
            .r_squared
            .iter()
            .position(|&r| !(r > fit::MIN_R_SQUARED))
        {
            return Err(Error::Config(format!(
                "calibration channel {c} has r^2 <= {}",
                fit::MIN_R_SQUARED
            )));
        }
        invert3(&self.m_dkl)?;
        Ok(())
    }

    pub fn basis(&self) -> ChromaticBasis {
        ChromaticBasis::from_matrix(self.m_dkl).expect("validated calibration has invertible M_dkl")
    }

    /// `h_i(y)/y` straight from the fitted curves, `y` clamped to the
    /// calibrated domain.
    pub fn weight(&self, channel: usize, y: f64) -> f64 {
        fit::weight(y.clamp(self.y_min, self.y_max), &self.params[channel])
    }

    /// Unscaled encoding of an LMS triple with the fitted curves; `0` maps
    /// to `0`. No clamping: `y` must lie in the calibrated domain or be 0.
    pub fn encode_unscaled(&self, x: [f64; 3]) -> [f64; 3] {
        let y = x[0] + x[1];
        if y == 0.0 {
            return [0.0; 3];
        }
        let v = mul3(&self.m_dkl, x);
        std::array::from_fn(|c| fit::weight(y, &self.params[c]) * v[c])
    }
}

/// Runs the full offline calibration for `model`: integrals on a 200-point
/// log grid over `[y_min, y_max]`, one fit per channel, shared scaling.
pub fn calibrate(
    model: &ThresholdModel,
    color: &ColorConfig,
    y_min: f64,
    y_max: f64,
) -> Result<PuCalibration> {
    let basis = ChromaticBasis::from_white(color.white_lms())?;
    let grid = log_grid(y_min, y_max, GRID_POINTS);
    let tables = integrate_pu(model, &basis, &grid)?;
    let mut params = [[0.0; 5]; 3];
    let mut r_squared = [0.0; 3];
    for (channel, table) in tables.iter().enumerate() {
        let fit = fit_nonlinearity(&grid, table).map_err(|e| match e {
            Error::FitQuality {
                r_squared, params, ..
            } => Error::FitQuality {
                channel,
                r_squared,
                params,
            },
            other => other,
        })?;
        params[channel] = fit.params;
        r_squared[channel] = fit.r_squared;
    }
    let h_lo = fit::h(y_min, &params[0]);
    let h_hi = fit::h(y_max, &params[0]);
    if !(h_hi > h_lo) {
        return Err(Error::Calibration {
            channel: 0,
            y: y_max,
            reason: "achromatic curve is not increasing".into(),
        });
    }
    if let Some(w) = grid
        .windows(2)
        .find(|w| fit::h(w[1], &params[0]) < fit::h(w[0], &params[0]))
    {
        return Err(Error::Calibration {
            channel: 0,
            y: w[1],
            reason: "achromatic curve decreases".into(),
        });
    }
    let gain = 1.0 / (h_hi - h_lo);
    let calib = PuCalibration {
        color: color.clone(),
        m_dkl: basis.m_dkl,
        params,
        r_squared,
        gain,
        offset: -gain * h_lo,
        y_min,
        y_max,
        threshold_model: Some(model.clone()),
    };
    calib.validate()?;
    Ok(calib)
}

/// Encoded frame: achromatic plane `l` and chroma `c = a + jb`.
#[derive(Clone, Debug, PartialEq)]
pub struct PuFrame<T> {
    pub l: Plane<T>,
    pub c: Plane<Complex<T>>,
}

impl<T: Scalar> PuFrame<T> {
    pub fn width(&self) -> usize {
        self.l.width()
    }

    pub fn height(&self) -> usize {
        self.l.height()
    }

    pub fn hue(&self) -> Plane<T> {
        self.c.map(|z| z.arg())
    }

    pub fn chromaticity(&self) -> Plane<T> {
        self.c.map(|z| z.norm())
    }
}

/// Runtime encoder: `ln(h_i/y)` tabulated on 4096 points over `ln y`.
#[derive(Clone, Debug)]
pub struct PuEncoder {
    calib: PuCalibration,
    lut: Vec<[f64; 3]>,
    ln_y_min: f64,
    step: f64,
    white: [f64; 3],
}

impl PuEncoder {
    pub fn new(calib: PuCalibration) -> Self {
        let ln_y_min = calib.y_min.ln();
        let step = (calib.y_max.ln() - ln_y_min) / (LUT_SIZE - 1) as f64;
        let lut = (0..LUT_SIZE)
            .map(|i| {
                let y = (ln_y_min + step * i as f64)
                    .exp()
                    .clamp(calib.y_min, calib.y_max);
                std::array::from_fn(|c| fit::weight(y, &calib.params[c]).ln())
            })
            .collect();
        let white = calib.color.white_lms();
        Self {
            calib,
            lut,
            ln_y_min,
            step,
            white,
        }
    }

    pub fn calibration(&self) -> &PuCalibration {
        &self.calib
    }

    /// Interpolated `h_i(y)/y`; `y` is clamped to the calibrated domain.
    pub fn weights(&self, y: f64) -> [f64; 3] {
        let pos = ((y.ln() - self.ln_y_min) / self.step).clamp(0.0, (LUT_SIZE - 1) as f64);
        let i = (pos as usize).min(LUT_SIZE - 2);
        let f = pos - i as f64;
        let (a, b) = (self.lut[i], self.lut[i + 1]);
        std::array::from_fn(|c| (a[c] + (b[c] - a[c]) * f).exp())
    }

    /// Scaled `(L, a, b)` for one LMS triple. Pixels darker than `y_min` are
    /// moved along their ray to `y_min` (black becomes the white point).
    pub fn encode_pixel(&self, x: [f64; 3]) -> [f64; 3] {
        let y = x[0] + x[1];
        let x = if !(y >= self.calib.y_min) || !y.is_finite() {
            if y > 0.0 && y.is_finite() {
                x.map(|v| v * self.calib.y_min / y)
            } else if y.is_finite() {
                self.white.map(|v| v * self.calib.y_min)
            } else {
                x
            }
        } else {
            x
        };
        let y = x[0] + x[1];
        let w = self.weights(y);
        let v = mul3(&self.calib.m_dkl, x);
        let g = self.calib.gain;
        [
            g * w[0] * v[0] + self.calib.offset,
            g * w[1] * v[1],
            g * w[2] * v[2],
        ]
    }

    pub fn encode<T: Scalar>(&self, frame: &LinearFrame<T>) -> PuFrame<T> {
        let (w, h) = (frame.width(), frame.height());
        let pixels: Vec<(T, Complex<T>)> = (0..w * h)
            .into_par_iter()
            .with_min_len(4096)
            .map(|i| {
                let x = [
                    frame.l.data()[i].as_f64(),
                    frame.m.data()[i].as_f64(),
                    frame.s.data()[i].as_f64(),
                ];
                let e = self.encode_pixel(x);
                (T::cast(e[0]), Complex::new(T::cast(e[1]), T::cast(e[2])))
            })
            .collect();
        let (l, c): (Vec<T>, Vec<Complex<T>>) = pixels.into_iter().unzip();
        PuFrame {
            l: Plane::from_vec(w, h, l),
            c: Plane::from_vec(w, h, c),
        }
    }
}
