//! Serialized regressors mapping a per-video feature vector to a score.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::binning::Manifest;
use crate::error::{Error, Result};

/// Per-feature standardization `(x - mean) / scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

/// Flat binary tree; node 0 is the root. A split sends `x[feature] <=
/// threshold` left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let mut i = 0;
        for _ in 0..=self.nodes.len() {
            match self.nodes.get(i) {
                Some(TreeNode::Leaf { value }) => return Ok(*value),
                Some(TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                }) => {
                    let v = x.get(*feature).ok_or_else(|| {
                        Error::Model(format!("split on missing feature {feature}"))
                    })?;
                    i = if v <= threshold { *left } else { *right };
                }
                None => return Err(Error::Model(format!("tree references missing node {i}"))),
            }
        }
        Err(Error::Model("tree contains a cycle".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model_type", rename_all = "kebab-case")]
pub enum Regressor {
    LinearSvr {
        weights: Vec<f64>,
        bias: f64,
    },
    GaussianSvr {
        support_vectors: Vec<Vec<f64>>,
        dual_coef: Vec<f64>,
        gamma: f64,
        bias: f64,
    },
    RandomForest {
        trees: Vec<Tree>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityModel {
    #[serde(flatten)]
    pub regressor: Regressor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
    pub manifest_hash: String,
}

impl QualityModel {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks the manifest hash and that every parameter shape matches the
    /// manifest length.
    pub fn validate(&self, manifest: &Manifest) -> Result<()> {
        let hash = manifest.hash();
        if self.manifest_hash != hash {
            return Err(Error::Model(format!(
                "model was trained for feature manifest {} but this build uses {hash}",
                self.manifest_hash
            )));
        }
        let n = manifest.len();
        if let Some(norm) = &self.normalization {
            if norm.mean.len() != n || norm.scale.len() != n {
                return Err(Error::Model(format!(
                    "normalization covers {} of {n} features",
                    norm.mean.len()
                )));
            }
            if norm.scale.iter().any(|s| !(s.is_finite() && *s != 0.0)) {
                return Err(Error::Model(
                    "normalization scales must be finite and non-zero".into(),
                ));
            }
        }
        match &self.regressor {
            Regressor::LinearSvr { weights, .. } if weights.len() != n => {
                Err(Error::Model(format!(
                    "linear model has {} weights for {n} features",
                    weights.len()
                )))
            }
            Regressor::GaussianSvr {
                support_vectors,
                dual_coef,
                ..
            } => {
                if support_vectors.len() != dual_coef.len() {
                    return Err(Error::Model(
                        "support vector and coefficient counts differ".into(),
                    ));
                }
                match support_vectors.iter().find(|v| v.len() != n) {
                    Some(v) => Err(Error::Model(format!(
                        "support vector of length {} for {n} features",
                        v.len()
                    ))),
                    None => Ok(()),
                }
            }
            Regressor::RandomForest { trees } if trees.is_empty() => {
                Err(Error::Model("forest has no trees".into()))
            }
            Regressor::RandomForest { trees } => {
                for t in trees {
                    for node in &t.nodes {
                        if let TreeNode::Split { feature, .. } = node {
                            if *feature >= n {
                                return Err(Error::Model(format!(
                                    "split on feature {feature} of {n}"
                                )));
                            }
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Score of one feature vector; absent or non-finite entries are an
    /// error naming the feature.
    pub fn predict(&self, manifest: &Manifest, features: &[Option<f64>]) -> Result<f64> {
        self.validate(manifest)?;
        if features.len() != manifest.len() {
            return Err(Error::Model(format!(
                "{} features for a manifest of {}",
                features.len(),
                manifest.len()
            )));
        }
        let mut x = Vec::with_capacity(features.len());
        for (v, d) in features.iter().zip(&manifest.features) {
            match v {
                Some(v) if v.is_finite() => x.push(*v),
                _ => return Err(Error::NonFiniteFeature(d.name.clone())),
            }
        }
        if let Some(norm) = &self.normalization {
            for ((v, m), s) in x.iter_mut().zip(&norm.mean).zip(&norm.scale) {
                *v = (*v - m) / s;
            }
        }
        let score = match &self.regressor {
            Regressor::LinearSvr { weights, bias } => {
                weights.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() + bias
            }
            Regressor::GaussianSvr {
                support_vectors,
                dual_coef,
                gamma,
                bias,
            } => {
                support_vectors
                    .iter()
                    .zip(dual_coef)
                    .map(|(sv, a)| {
                        let d2: f64 = sv.iter().zip(&x).map(|(s, v)| (s - v) * (s - v)).sum();
                        a * (-gamma * d2).exp()
                    })
                    .sum::<f64>()
                    + bias
            }
            Regressor::RandomForest { trees } => {
                let mut sum = 0.0;
                for t in trees {
                    sum += t.predict(&x)?;
                }
                sum / trees.len() as f64
            }
        };
        Ok(score)
    }
}

/// Hex SHA-256 of a model file's bytes, for run reports.
pub fn file_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
