//! Subband contrast-sensitivity weights (Watson's wavelet threshold model).

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::wavelet::haar::{Subbands, WaveletPyramid};

const BUILTIN: &str = include_str!("../../data/watson_csf.json");

/// Orientation order inside each per-level entry.
pub const A: usize = 0;
pub const H: usize = 1;
pub const V: usize = 2;
pub const D: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelClass {
    Achromatic,
    RedGreen,
    BlueYellow,
}

/// Per-level `[A, H, V, D]` multipliers for each channel class;
/// `achromatic[k]` is level `k + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsfWeights {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixels_per_degree: Option<f64>,
    pub achromatic: Vec<[f64; 4]>,
    pub red_green: Vec<[f64; 4]>,
    pub blue_yellow: Vec<[f64; 4]>,
}

/// Watson et al. model constants `(a, k, f0, [g_LL, g_LH/HL, g_HH])`.
const WATSON: [(f64, f64, f64, [f64; 3]); 3] = [
    (0.495, 0.466, 0.401, [1.501, 1.0, 0.534]),
    (1.633, 0.353, 0.209, [1.520, 1.0, 0.502]),
    (0.944, 0.521, 0.404, [1.868, 1.0, 0.516]),
];

impl CsfWeights {
    pub fn unit(levels: usize) -> Self {
        Self {
            pixels_per_degree: None,
            achromatic: vec![[1.0; 4]; levels],
            red_green: vec![[1.0; 4]; levels],
            blue_yellow: vec![[1.0; 4]; levels],
        }
    }

    /// Shipped weights: 6 levels at the resolution of a 1080-line display
    /// viewed from three heights after the default rescaling.
    pub fn builtin() -> Self {
        serde_json::from_str(BUILTIN).expect("embedded CSF weights are valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Detail weights are the reciprocal visibility thresholds
    /// `a 10^(k log10(f / (g f0))^2)`, `f = r 2^-level`, normalized by the
    /// smallest threshold over all detail bands and channels. The
    /// approximation band keeps weight 1 so local means stay in encoded
    /// units.
    pub fn watson(pixels_per_degree: f64, levels: usize) -> Self {
        let threshold = |c: usize, level: usize, band: usize| {
            let (a, k, f0, g) = WATSON[c];
            let f = pixels_per_degree * 0.5f64.powi(level as i32);
            a * 10f64.powf(k * (f / (g[band] * f0)).log10().powi(2))
        };
        let mut min = f64::INFINITY;
        for c in 0..3 {
            for level in 1..=levels {
                for band in 1..3 {
                    min = min.min(threshold(c, level, band));
                }
            }
        }
        let table = |c: usize| -> Vec<[f64; 4]> {
            (1..=levels)
                .map(|l| {
                    [
                        1.0,
                        min / threshold(c, l, 1),
                        min / threshold(c, l, 1),
                        min / threshold(c, l, 2),
                    ]
                })
                .collect()
        };
        Self {
            pixels_per_degree: Some(pixels_per_degree),
            achromatic: table(0),
            red_green: table(1),
            blue_yellow: table(2),
        }
    }

    pub fn table(&self, class: ChannelClass) -> &[[f64; 4]] {
        match class {
            ChannelClass::Achromatic => &self.achromatic,
            ChannelClass::RedGreen => &self.red_green,
            ChannelClass::BlueYellow => &self.blue_yellow,
        }
    }

    pub fn weight(&self, class: ChannelClass, level: usize, band: usize) -> Result<f64> {
        self.table(class)
            .get(level.wrapping_sub(1))
            .map(|w| w[band])
            .ok_or_else(|| Error::Config(format!("no CSF weight for {class:?} level {level}")))
    }

    pub fn validate(&self, levels: usize) -> Result<()> {
        for class in [
            ChannelClass::Achromatic,
            ChannelClass::RedGreen,
            ChannelClass::BlueYellow,
        ] {
            let t = self.table(class);
            if t.len() < levels {
                return Err(Error::Config(format!(
                    "CSF weights for {class:?} cover {} of {levels} levels",
                    t.len()
                )));
            }
            if t.iter().flatten().any(|w| !(*w > 0.0 && w.is_finite())) {
                return Err(Error::Config(format!(
                    "CSF weights for {class:?} must be positive"
                )));
            }
        }
        Ok(())
    }
}

fn scale_bands<T: Scalar>(bands: &mut Subbands<T>, w: [f64; 4]) {
    for (plane, wt) in [
        (&mut bands.a, w[A]),
        (&mut bands.h, w[H]),
        (&mut bands.v, w[V]),
        (&mut bands.d, w[D]),
    ] {
        let wt = T::cast(wt);
        plane.data_mut().iter_mut().for_each(|v| *v *= wt);
    }
}

pub fn apply_csf_luma<T: Scalar>(pyr: &mut WaveletPyramid<T>, weights: &CsfWeights) -> Result<()> {
    weights.validate(pyr.depth())?;
    for (bands, w) in pyr.levels.iter_mut().zip(&weights.achromatic) {
        scale_bands(bands, *w);
    }
    Ok(())
}

/// Real parts take the red-green weights, imaginary parts the blue-yellow
/// weights.
pub fn apply_csf_chroma<T: Scalar>(
    pyr: &mut WaveletPyramid<Complex<T>>,
    weights: &CsfWeights,
) -> Result<()> {
    weights.validate(pyr.depth())?;
    for (k, bands) in pyr.levels.iter_mut().enumerate() {
        let (rg, by) = (weights.red_green[k], weights.blue_yellow[k]);
        for (plane, band) in [
            (&mut bands.a, A),
            (&mut bands.h, H),
            (&mut bands.v, V),
            (&mut bands.d, D),
        ] {
            let (wr, wi) = (T::cast(rg[band]), T::cast(by[band]));
            plane
                .data_mut()
                .iter_mut()
                .for_each(|z| *z = Complex::new(z.re * wr, z.im * wi));
        }
    }
    Ok(())
}
