//! Viewing-distance rescaling ahead of wavelet analysis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::resize_bilinear;
use crate::pucolor::PuFrame;
use crate::scalar::Scalar;

/// The downscale factor is `constant / (height * viewing_distance)`,
/// clamped to `(0, 1]`. The default constant gives exactly 1/2 for 1080
/// lines viewed at three display heights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SastConfig {
    /// Viewing distance in display heights.
    pub viewing_distance: f64,
    pub constant: f64,
}

impl Default for SastConfig {
    fn default() -> Self {
        Self {
            viewing_distance: 3.0,
            constant: 1620.0,
        }
    }
}

impl SastConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.viewing_distance > 0.0 && self.constant > 0.0) {
            return Err(Error::Config(
                "SAST viewing distance and constant must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn factor(&self, height: usize) -> f64 {
        (self.constant / (height as f64 * self.viewing_distance)).min(1.0)
    }

    pub fn output_dims(&self, width: usize, height: usize) -> (usize, usize) {
        let f = self.factor(height);
        if f >= 1.0 {
            return (width, height);
        }
        (
            ((width as f64 * f).round() as usize).max(1),
            ((height as f64 * f).round() as usize).max(1),
        )
    }
}

pub fn sast_rescale<T: Scalar>(frame: &PuFrame<T>, cfg: &SastConfig) -> PuFrame<T> {
    let (w, h) = cfg.output_dims(frame.width(), frame.height());
    PuFrame {
        l: resize_bilinear(&frame.l, w, h),
        c: resize_bilinear(&frame.c, w, h),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::Plane;
    use num_complex::Complex;

    #[test]
    fn full_hd_at_three_heights_halves() {
        let cfg = SastConfig::default();
        assert_eq!(cfg.factor(1080), 0.5);
        assert_eq!(cfg.output_dims(1920, 1080), (960, 540));
    }

    #[test]
    fn unit_factor_passes_through() {
        let cfg = SastConfig::default();
        let f = PuFrame {
            l: Plane::from_fn(9, 7, |x, y| (x * y) as f64),
            c: Plane::new(9, 7, Complex::new(0.1, 0.2)),
        };
        assert_eq!(sast_rescale(&f, &cfg), f);
    }

    #[test]
    fn constant_stays_constant() {
        let cfg = SastConfig {
            viewing_distance: 6.0,
            ..Default::default()
        };
        let f = PuFrame {
            l: Plane::new(64, 540, 0.4f64),
            c: Plane::new(64, 540, Complex::new(-0.1, 0.3)),
        };
        let out = sast_rescale(&f, &cfg);
        assert_eq!(out.height(), 270);
        assert!(out.l.data().iter().all(|&v| (v - 0.4).abs() < 1e-15));
        assert!(out
            .c
            .data()
            .iter()
            .all(|v| (v - Complex::new(-0.1, 0.3)).norm() < 1e-15));
    }
}
