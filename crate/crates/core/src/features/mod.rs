//! Local quality maps at the four analysis scales, computed from one shared
//! set of CSF-weighted pyramids and the moments derived from them.

pub mod dlm;
pub mod rred;
pub mod ssim;
pub mod vif;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::scalar::Scalar;
use crate::wavelet::{
    build_moments, pyramid_difference, scale_level, MomentPyramid, WaveletPyramid, SCALES,
};

pub use dlm::dlm_map;
pub use rred::{rred_chroma, rred_luma};
pub use ssim::{ssim_chroma, ssim_luma};
pub use vif::{vif_chroma, vif_luma};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub ssim_c1: f64,
    pub ssim_c2: f64,
    /// Channel noise variance shared by VIF and the RRED entropy floor.
    pub noise_variance: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            ssim_c1: 1e-4,
            ssim_c2: 9e-4,
            noise_variance: 0.1,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_variance > 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::Config("noise variance must be positive".into()));
        }
        if !(self.ssim_c1 >= 0.0 && self.ssim_c2 >= 0.0) {
            return Err(Error::Config("SSIM constants must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    /// Higher is better; the worst bin is the minimum.
    #[serde(rename = "quality")]
    Quality,
    /// Higher is worse; the worst bin is the maximum.
    #[serde(rename = "distortion")]
    Distortion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pooling {
    #[serde(rename = "weighted-mean")]
    Mean,
    #[serde(rename = "weighted-minkowski-3")]
    Minkowski3,
}

/// Every local (per-cut) map type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MapKind {
    LSsimMu,
    LSsimSigma,
    CSsimMu,
    CSsimSigma,
    LVif,
    CVif,
    LTvif,
    CTvif,
    LSrred,
    LTrred,
    CSrred,
    CTrred,
    Dlm,
    Fosd,
    Sosd,
}

impl MapKind {
    pub const ALL: [MapKind; 15] = [
        MapKind::LSsimMu,
        MapKind::LSsimSigma,
        MapKind::CSsimMu,
        MapKind::CSsimSigma,
        MapKind::LVif,
        MapKind::CVif,
        MapKind::LTvif,
        MapKind::CTvif,
        MapKind::LSrred,
        MapKind::LTrred,
        MapKind::CSrred,
        MapKind::CTrred,
        MapKind::Dlm,
        MapKind::Fosd,
        MapKind::Sosd,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            MapKind::LSsimMu => "L-SSIM_mu",
            MapKind::LSsimSigma => "L-SSIM_sigma",
            MapKind::CSsimMu => "C-SSIM_mu",
            MapKind::CSsimSigma => "C-SSIM_sigma",
            MapKind::LVif => "L-VIF",
            MapKind::CVif => "C-VIF",
            MapKind::LTvif => "L-TVIF",
            MapKind::CTvif => "C-TVIF",
            MapKind::LSrred => "L-SRRED",
            MapKind::LTrred => "L-TRRED",
            MapKind::CSrred => "C-SRRED",
            MapKind::CTrred => "C-TRRED",
            MapKind::Dlm => "DLM",
            MapKind::Fosd => "FOSD",
            MapKind::Sosd => "SOSD",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn polarity(self) -> Polarity {
        match self {
            MapKind::LSrred
            | MapKind::LTrred
            | MapKind::CSrred
            | MapKind::CTrred
            | MapKind::Fosd
            | MapKind::Sosd => Polarity::Distortion,
            _ => Polarity::Quality,
        }
    }

    pub fn pooling(self) -> Pooling {
        match self {
            MapKind::LSsimMu | MapKind::LSsimSigma | MapKind::CSsimMu | MapKind::CSsimSigma => {
                Pooling::Minkowski3
            }
            _ => Pooling::Mean,
        }
    }

    /// Needs the previous frame; absent at the first frame.
    pub fn temporal(self) -> bool {
        matches!(
            self,
            MapKind::LTvif | MapKind::CTvif | MapKind::LTrred | MapKind::CTrred
        )
    }
}

/// Maps of one scale, indexed by [`MapKind::index`]; `None` when absent.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleMaps<T> {
    maps: Vec<Option<Plane<T>>>,
}

impl<T: Copy> Default for ScaleMaps<T> {
    fn default() -> Self {
        Self {
            maps: vec![None; MapKind::ALL.len()],
        }
    }
}

impl<T: Copy> ScaleMaps<T> {
    pub fn get(&self, kind: MapKind) -> Option<&Plane<T>> {
        self.maps[kind.index()].as_ref()
    }

    pub fn insert(&mut self, kind: MapKind, map: Plane<T>) {
        self.maps[kind.index()] = Some(map);
    }
}

/// `scales[s - 1]` holds the maps of scale `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityMapSet<T> {
    pub scales: Vec<ScaleMaps<T>>,
}

impl<T: Copy> Default for QualityMapSet<T> {
    fn default() -> Self {
        Self {
            scales: (0..SCALES).map(|_| ScaleMaps::default()).collect(),
        }
    }
}

/// CSF-weighted pyramids of one reference/test frame pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PyramidSet<T> {
    pub ref_luma: WaveletPyramid<T>,
    pub test_luma: WaveletPyramid<T>,
    pub ref_chroma: WaveletPyramid<Complex<T>>,
    pub test_chroma: WaveletPyramid<Complex<T>>,
}

/// Output of [`wavelet_maps`]; the reference luma moments also drive the
/// luminance and spatial bin measures.
pub struct WaveletFeatures<T> {
    pub maps: QualityMapSet<T>,
    pub luma_moments: MomentPyramid<T, T>,
}

/// All wavelet-domain maps of one frame pair. Temporal maps use the
/// pyramid differences against `prev` and are absent without it.
pub fn wavelet_maps<T: Scalar>(
    cur: &PyramidSet<T>,
    prev: Option<&PyramidSet<T>>,
    cfg: &FeatureConfig,
) -> WaveletFeatures<T> {
    let luma = build_moments(&cur.ref_luma, &cur.test_luma);
    let chroma = build_moments(&cur.ref_chroma, &cur.test_chroma);
    let temporal = prev.map(|p| {
        let rl = pyramid_difference(&cur.ref_luma, &p.ref_luma);
        let tl = pyramid_difference(&cur.test_luma, &p.test_luma);
        let rc = pyramid_difference(&cur.ref_chroma, &p.ref_chroma);
        let tc = pyramid_difference(&cur.test_chroma, &p.test_chroma);
        (
            build_moments::<T, T>(&rl, &tl),
            build_moments::<T, Complex<T>>(&rc, &tc),
        )
    });
    let noise = cfg.noise_variance;
    let mut set = QualityMapSet::default();
    for (k, maps) in set.scales.iter_mut().enumerate() {
        let s = k + 1;
        let (lm, cm) = (&luma.scales[k], &chroma.scales[k]);
        let (mu, sigma) = ssim_luma(lm, cfg.ssim_c1, cfg.ssim_c2);
        maps.insert(MapKind::LSsimMu, mu);
        maps.insert(MapKind::LSsimSigma, sigma);
        let (mu, sigma) = ssim_chroma(cm, cfg.ssim_c1, cfg.ssim_c2);
        maps.insert(MapKind::CSsimMu, mu);
        maps.insert(MapKind::CSsimSigma, sigma);
        maps.insert(MapKind::LVif, vif_luma(lm, noise));
        maps.insert(MapKind::CVif, vif_chroma(cm, noise));
        maps.insert(MapKind::LSrred, rred_luma(&lm.var_x, &lm.var_y, noise));
        maps.insert(MapKind::CSrred, rred_chroma(&cm.var_x, &cm.var_y, noise));
        if let Some((tl, tc)) = &temporal {
            let (tl, tc) = (&tl.scales[k], &tc.scales[k]);
            maps.insert(MapKind::LTvif, vif_luma(tl, noise));
            maps.insert(MapKind::CTvif, vif_chroma(tc, noise));
            maps.insert(MapKind::LTrred, rred_luma(&tl.var_x, &tl.var_y, noise));
            maps.insert(MapKind::CTrred, rred_chroma(&tc.var_x, &tc.var_y, noise));
        }
        // DLM runs on level-s coefficients, pooled over the cut of scale s.
        let cut = 1usize << (scale_level(s) - s);
        maps.insert(
            MapKind::Dlm,
            dlm_map(
                cur.ref_luma.level(s),
                cur.test_luma.level(s),
                cut,
                lm.mu_x.dims(),
            ),
        );
    }
    WaveletFeatures {
        maps: set,
        luma_moments: luma,
    }
}
