//! The ordered feature list and per-frame / per-video assembly.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{aggregate, fuse_scales, unweighted, worst_bin, BinWeights, BINS, MS_SSIM_WEIGHTS};
use crate::error::{Error, Result};
use crate::features::{MapKind, Polarity, QualityMapSet};
use crate::nss::GLOBAL_NAMES;
use crate::scalar::Scalar;

const SHIPPED: &str = include_str!("../../data/feature_manifest.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Hdrmax,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Plain, Variant::Hdrmax];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Hdrmax => "hdrmax",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Aggregation {
    #[serde(rename = "unweighted-mean")]
    UnweightedMean,
    #[serde(rename = "worst-L")]
    WorstL,
    #[serde(rename = "worst-S")]
    WorstS,
    #[serde(rename = "worst-T")]
    WorstT,
    /// Frame-level no-reference statistic; no cut pooling.
    #[serde(rename = "global")]
    Global,
}

impl Aggregation {
    pub const POOLED: [Aggregation; 4] = [
        Aggregation::UnweightedMean,
        Aggregation::WorstL,
        Aggregation::WorstS,
        Aggregation::WorstT,
    ];

    fn label(self) -> &'static str {
        match self {
            Aggregation::UnweightedMean => "mean",
            Aggregation::WorstL => "worst-L",
            Aggregation::WorstS => "worst-S",
            Aggregation::WorstT => "worst-T",
            Aggregation::Global => "global",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub name: String,
    /// A local map name (e.g. `L-VIF`) or `NSS:<parameter>`.
    pub source: String,
    pub variant: Variant,
    pub aggregation: Aggregation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarity: Option<Polarity>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub features: Vec<FeatureDescriptor>,
}

impl Manifest {
    /// Every local map x variant x pooled aggregation, then the global NSS
    /// statistics of each variant.
    pub fn canonical() -> Self {
        let mut features = Vec::new();
        for variant in Variant::ALL {
            for kind in MapKind::ALL {
                for agg in Aggregation::POOLED {
                    features.push(FeatureDescriptor {
                        name: format!("{}/{}/{}", variant.name(), kind.name(), agg.label()),
                        source: kind.name().to_string(),
                        variant,
                        aggregation: agg,
                        polarity: Some(kind.polarity()),
                    });
                }
            }
        }
        for variant in Variant::ALL {
            for param in GLOBAL_NAMES {
                features.push(FeatureDescriptor {
                    name: format!("{}/NSS/{param}", variant.name()),
                    source: format!("NSS:{param}"),
                    variant,
                    aggregation: Aggregation::Global,
                    polarity: None,
                });
            }
        }
        Self {
            version: 1,
            features,
        }
    }

    /// The manifest file shipped in `data/`, identical to [`Self::canonical`].
    pub fn shipped() -> Self {
        serde_json::from_str(SHIPPED).expect("shipped manifest parses")
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Hex SHA-256 of the compact JSON encoding.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("manifest serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }
}

/// Everything one frame contributes: local maps per variant, bin weights
/// per scale (`bins[s - 1]`), and the global NSS statistics per variant.
pub struct FrameInputs<'a, T> {
    pub maps: [&'a QualityMapSet<T>; 2],
    pub bins: &'a [BinWeights],
    pub nss: [[f64; 7]; 2],
}

/// Pooled values of one map `[mean, worst-L, worst-S, worst-T]`, fused
/// across scales; `None` entries mark absent maps.
fn pool_map<T: Scalar>(
    maps: &QualityMapSet<T>,
    bins: &[BinWeights],
    kind: MapKind,
) -> [Option<f64>; 4] {
    let mut per_scale = [[None; 4]; 4];
    for (k, scale) in maps.scales.iter().enumerate() {
        let Some(map) = scale.get(kind) else { continue };
        let pooling = kind.pooling();
        let mean = unweighted(map, pooling);
        per_scale[0][k] = mean;
        for (kind_idx, w) in bins[k].weights.iter().enumerate() {
            let per_bin: [Option<f64>; BINS] =
                std::array::from_fn(|b| aggregate(map, &w[b], pooling));
            per_scale[kind_idx + 1][k] = worst_bin(&per_bin, kind.polarity()).or(mean);
        }
    }
    per_scale.map(|v| fuse_scales(&v, &MS_SSIM_WEIGHTS))
}

/// Feature vector of one frame in manifest order.
pub fn assemble_frame<T: Scalar>(
    manifest: &Manifest,
    inputs: &FrameInputs<'_, T>,
) -> Result<Vec<Option<f64>>> {
    let mut cache: HashMap<(Variant, MapKind), [Option<f64>; 4]> = HashMap::new();
    manifest
        .features
        .iter()
        .map(|f| {
            if let Some(param) = f.source.strip_prefix("NSS:") {
                let i = GLOBAL_NAMES
                    .iter()
                    .position(|p| *p == param)
                    .ok_or_else(|| {
                        Error::Assembly(format!("unknown NSS statistic for feature '{}'", f.name))
                    })?;
                return Ok(Some(inputs.nss[f.variant.index()][i]));
            }
            let kind = MapKind::from_name(&f.source).ok_or_else(|| {
                Error::Assembly(format!("no map '{}' for feature '{}'", f.source, f.name))
            })?;
            let slot = match f.aggregation {
                Aggregation::UnweightedMean => 0,
                Aggregation::WorstL => 1,
                Aggregation::WorstS => 2,
                Aggregation::WorstT => 3,
                Aggregation::Global => {
                    return Err(Error::Assembly(format!(
                        "feature '{}' pools a local map globally",
                        f.name
                    )))
                }
            };
            let pooled = *cache
                .entry((f.variant, kind))
                .or_insert_with(|| pool_map(inputs.maps[f.variant.index()], inputs.bins, kind));
            match pooled[slot] {
                None if !kind.temporal() => {
                    Err(Error::Assembly(format!("feature '{}' has no map", f.name)))
                }
                v => Ok(v),
            }
        })
        .collect()
}

/// Per-video vector: mean over the frames where each feature is present,
/// summed in frame order.
pub fn pool_video(frames: &[Vec<Option<f64>>], len: usize) -> Vec<Option<f64>> {
    (0..len)
        .map(|i| {
            let (sum, n) = frames
                .iter()
                .filter_map(|f| f[i])
                .fold((0.0, 0usize), |a, v| (a.0 + v, a.1 + 1));
            (n > 0).then(|| sum / n as f64)
        })
        .collect()
}
