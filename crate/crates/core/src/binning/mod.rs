//! Soft classification of cuts into luminance, spatial-complexity and
//! temporal-complexity bins, and pooling of local maps into per-frame
//! features.

pub mod manifest;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Polarity, Pooling};
use crate::plane::Plane;
use crate::scalar::Scalar;
use crate::wavelet::{cut_size, padded_dims_for_cuts, ScaleMoments};

pub use manifest::{
    assemble_frame, pool_video, Aggregation, FeatureDescriptor, FrameInputs, Manifest, Variant,
};

pub const BINS: usize = 4;
/// Total membership below which a bin holds no cuts.
pub const EMPTY_BIN_WEIGHT: f64 = 1e-6;
/// Floor for the means divided by in the coefficient-of-variation measures.
pub const MEAN_FLOOR: f64 = 1e-6;
/// Fusion weights of the four finest MS-SSIM scales.
pub const MS_SSIM_WEIGHTS: [f64; 4] = [0.0448, 0.2856, 0.3001, 0.2363];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinDomain {
    pub lo: f64,
    pub hi: f64,
}

impl BinDomain {
    pub const UNIT: BinDomain = BinDomain { lo: 0.0, hi: 1.0 };

    /// `lo + (2b + 1)(hi - lo)/8`.
    pub fn centers(&self) -> [f64; BINS] {
        std::array::from_fn(|b| self.lo + (2 * b + 1) as f64 * (self.hi - self.lo) / 8.0)
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / BINS as f64
    }

    /// `exp(-(m - c_b)^2 / (2 (w/2)^2))` with `m` clamped to the domain.
    pub fn memberships(&self, m: f64) -> [f64; BINS] {
        let m = m.clamp(self.lo, self.hi);
        let half = self.width() / 2.0;
        self.centers()
            .map(|c| (-(m - c) * (m - c) / (2.0 * half * half)).exp())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BinConfig {
    pub luminance: BinDomain,
    pub spatial: BinDomain,
    pub temporal: BinDomain,
}

impl Default for BinConfig {
    fn default() -> Self {
        Self {
            luminance: BinDomain::UNIT,
            spatial: BinDomain::UNIT,
            temporal: BinDomain::UNIT,
        }
    }
}

impl BinConfig {
    pub fn validate(&self) -> Result<()> {
        for d in [self.luminance, self.spatial, self.temporal] {
            if !(d.hi > d.lo && d.lo.is_finite() && d.hi.is_finite()) {
                return Err(Error::Config(format!(
                    "bin domain [{}, {}] is empty",
                    d.lo, d.hi
                )));
            }
        }
        Ok(())
    }
}

/// Per-cut luminance `L`, spatial coefficient of variation `S` and
/// temporal coefficient of variation `T` of one scale.
#[derive(Clone, Debug, PartialEq)]
pub struct CutMeasures<T> {
    pub l: Plane<T>,
    pub s: Plane<T>,
    pub t: Plane<T>,
}

/// Per-pixel population mean and standard deviation over the buffered
/// frames (oldest first, current last). `None` with fewer than two frames.
pub fn temporal_stats<T: Scalar>(history: &[&Plane<T>]) -> Option<(Plane<T>, Plane<T>)> {
    if history.len() < 2 {
        return None;
    }
    let n = T::cast(history.len() as f64);
    let (w, h) = history[0].dims();
    let mean = Plane::from_fn(w, h, |x, y| {
        history.iter().map(|p| p.get(x, y)).sum::<T>() / n
    });
    let std = Plane::from_fn(w, h, |x, y| {
        let m = mean.get(x, y);
        (history.iter().map(|p| (p.get(x, y) - m).powi(2)).sum::<T>() / n).sqrt()
    });
    Some((mean, std))
}

/// Means over the cuts of size `n` of a mirror-padded plane, cropped to
/// `ceil(size / n)`.
pub fn cut_means<T: Scalar>(plane: &Plane<T>, n: usize) -> Plane<T> {
    let (w, h) = plane.dims();
    let (pw, ph) = padded_dims_for_cuts(w, h);
    let p = plane.mirror_pad(pw, ph);
    let inv = T::cast(1.0 / (n * n) as f64);
    Plane::from_fn(w.div_ceil(n), h.div_ceil(n), |ci, cj| {
        let mut acc = T::zero();
        for y in cj * n..(cj + 1) * n {
            acc += p.row(y)[ci * n..(ci + 1) * n].iter().copied().sum::<T>();
        }
        acc * inv
    })
}

/// `L` and `S` from the reference luma moments of scale `s`; `T` from the
/// temporal statistics (zero without them).
pub fn cut_measures<T: Scalar>(
    moments: &ScaleMoments<T, T>,
    temporal: Option<&(Plane<T>, Plane<T>)>,
    s: usize,
) -> CutMeasures<T> {
    let floor = T::cast(MEAN_FLOOR);
    let l = moments.mu_x.clone();
    let s_map = moments
        .var_x
        .zip_map(&moments.mu_x, |v, m| v.sqrt() / m.max(floor));
    let t = match temporal {
        Some((mean, std)) => {
            let n = cut_size(s);
            cut_means(std, n).zip_map(&cut_means(mean, n), |a, b| a / b.max(floor))
        }
        None => Plane::new(l.width(), l.height(), T::zero()),
    };
    CutMeasures { l, s: s_map, t }
}

/// Membership weights of every cut: `weights[kind][bin][cut]` with kinds
/// ordered `L, S, T`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinWeights {
    pub weights: [[Vec<f64>; BINS]; 3],
}

impl BinWeights {
    pub fn from_measures<T: Scalar>(m: &CutMeasures<T>, cfg: &BinConfig) -> Self {
        let one = |plane: &Plane<T>, d: &BinDomain| -> [Vec<f64>; BINS] {
            let per_cut: Vec<[f64; BINS]> = plane
                .data()
                .iter()
                .map(|v| d.memberships(v.as_f64()))
                .collect();
            std::array::from_fn(|b| per_cut.iter().map(|w| w[b]).collect())
        };
        Self {
            weights: [
                one(&m.l, &cfg.luminance),
                one(&m.s, &cfg.spatial),
                one(&m.t, &cfg.temporal),
            ],
        }
    }
}

/// Weighted pooling of a map; `None` when the total weight is below
/// [`EMPTY_BIN_WEIGHT`]. Minkowski pooling is `1 - (sum w (1-s)^3 / sum w)^(1/3)`.
pub fn aggregate<T: Scalar>(map: &Plane<T>, weights: &[f64], pooling: Pooling) -> Option<f64> {
    assert_eq!(
        map.data().len(),
        weights.len(),
        "map and weights cover different cut grids"
    );
    let total: f64 = weights.iter().sum();
    if total < EMPTY_BIN_WEIGHT {
        return None;
    }
    let values = map.data().iter().map(|v| v.as_f64());
    Some(match pooling {
        Pooling::Mean => values.zip(weights).map(|(v, w)| w * v).sum::<f64>() / total,
        Pooling::Minkowski3 => {
            let m = values
                .zip(weights)
                .map(|(v, w)| w * (1.0 - v).powi(3))
                .sum::<f64>()
                / total;
            1.0 - m.cbrt()
        }
    })
}

/// Unweighted pooling (uniform weights) with the map's pooling rule.
pub fn unweighted<T: Scalar>(map: &Plane<T>, pooling: Pooling) -> Option<f64> {
    aggregate(map, &vec![1.0; map.data().len()], pooling)
}

/// Lowest-quality non-empty bin: the minimum for quality features, the
/// maximum for distortion features. `None` when every bin is empty.
pub fn worst_bin(values: &[Option<f64>], polarity: Polarity) -> Option<f64> {
    let present = values.iter().flatten().copied();
    match polarity {
        Polarity::Quality => present.reduce(f64::min),
        Polarity::Distortion => present.reduce(f64::max),
    }
}

/// `sum w_s Q_s / sum w_s` over the scales that are present.
pub fn fuse_scales(values: &[Option<f64>], weights: &[f64]) -> Option<f64> {
    let (num, den) = values
        .iter()
        .zip(weights)
        .filter_map(|(v, w)| v.map(|v| (w * v, *w)))
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    (den > 0.0).then(|| num / den)
}
