//! Natural-scene-statistics features: global no-reference fits on the test
//! frame and local statistical dissimilarity (KL between fitted densities)
//! between reference and test cuts.

pub mod fit;
pub mod kl;
pub mod mscn;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::plane::Plane;
use crate::scalar::Scalar;
use crate::wavelet::{cut_size, padded_dims_for_cuts};

pub use fit::{fit_aggd, fit_ggd, AggdParams, GgdParams};
pub use kl::{fosd, sosd};
pub use mscn::{mscn, paired_products, MscnConfig, MscnPlanes};

pub const GLOBAL_NAMES: [&str; 7] = [
    "mscn_alpha",
    "mscn_b",
    "sigma_mscn_alpha",
    "sigma_mscn_b",
    "pair_alpha",
    "pair_b_left",
    "pair_b_right",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NssConfig {
    pub mscn: MscnConfig,
    /// Scale substituted for a degenerate fit.
    pub degenerate_scale: f64,
    /// Scales up to this one pool the four product directions into one
    /// AGGD fit; coarser scales average per-direction fits.
    pub pooled_product_scales: usize,
}

impl Default for NssConfig {
    fn default() -> Self {
        Self {
            mscn: MscnConfig::default(),
            degenerate_scale: 1e-3,
            pooled_product_scales: 2,
        }
    }
}

fn to_f64<T: Scalar>(p: &Plane<T>) -> Vec<f64> {
    p.data().iter().map(|v| v.as_f64()).collect()
}

fn ggd_or(samples: &[f64], cfg: &NssConfig) -> GgdParams {
    fit_ggd(samples).unwrap_or_else(|_| GgdParams::degenerate(cfg.degenerate_scale))
}

/// Direction-averaged AGGD parameters; directions that cannot be fitted
/// are skipped. `None` when none can.
fn aggd_averaged(directions: &[Vec<f64>]) -> Option<AggdParams> {
    let fits: Vec<AggdParams> = directions.iter().filter_map(|d| fit_aggd(d).ok()).collect();
    (!fits.is_empty()).then(|| AggdParams::average(&fits))
}

/// Seven no-reference features of one luma plane: GGD of MSCN, GGD of
/// sigma-MSCN, and direction-averaged AGGD of the paired products.
pub fn global_nss<T: Scalar>(luma: &Plane<T>, cfg: &NssConfig) -> [f64; 7] {
    global_nss_from(&mscn(luma, &cfg.mscn), cfg)
}

/// [`global_nss`] from already computed MSCN planes.
pub fn global_nss_from<T: Scalar>(m: &MscnPlanes<T>, cfg: &NssConfig) -> [f64; 7] {
    let g = ggd_or(&to_f64(&m.mscn), cfg);
    let s = ggd_or(&to_f64(&m.sigma_mscn), cfg);
    let dirs: Vec<Vec<f64>> = m.products.iter().map(to_f64).collect();
    let a = aggd_averaged(&dirs).unwrap_or_else(|| AggdParams::degenerate(cfg.degenerate_scale));
    [g.alpha, g.b, s.alpha, s.b, a.alpha, a.b_left, a.b_right]
}

/// Samples of one cut: MSCN values and the four product sets restricted
/// to pairs inside the cut.
fn cut_samples<T: Scalar>(
    p: &Plane<T>,
    x0: usize,
    y0: usize,
    n: usize,
) -> (Vec<f64>, [Vec<f64>; 4]) {
    let at = |x: usize, y: usize| p.get(x0 + x, y0 + y).as_f64();
    let mut values = Vec::with_capacity(n * n);
    let mut dirs: [Vec<f64>; 4] = Default::default();
    for y in 0..n {
        for x in 0..n {
            values.push(at(x, y));
            if x + 1 < n {
                dirs[0].push(at(x, y) * at(x + 1, y));
            }
            if y + 1 < n {
                dirs[1].push(at(x, y) * at(x, y + 1));
            }
            if x + 1 < n && y + 1 < n {
                dirs[2].push(at(x, y) * at(x + 1, y + 1));
                dirs[3].push(at(x + 1, y) * at(x, y + 1));
            }
        }
    }
    (values, dirs)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutFits {
    /// `None` when the cut's samples are degenerate.
    pub ggd: Option<GgdParams>,
    pub aggd: Option<AggdParams>,
}

pub fn fit_cut(values: &[f64], dirs: &[Vec<f64>; 4], pooled: bool) -> CutFits {
    let aggd = if pooled {
        fit_aggd(&dirs.concat()).ok()
    } else {
        aggd_averaged(dirs)
    };
    CutFits {
        ggd: fit_ggd(values).ok(),
        aggd,
    }
}

/// KL between reference and test fits of one cut; 0 when both sides are
/// degenerate, the degenerate stand-in when only one is.
pub fn cut_dissimilarity(r: &CutFits, t: &CutFits, degenerate_scale: f64) -> (f64, f64) {
    let f = match (r.ggd, t.ggd) {
        (None, None) => 0.0,
        (a, b) => {
            let d = GgdParams::degenerate(degenerate_scale);
            fosd(&a.unwrap_or(d), &b.unwrap_or(d))
        }
    };
    let s = match (r.aggd, t.aggd) {
        (None, None) => 0.0,
        (a, b) => {
            let d = AggdParams::degenerate(degenerate_scale);
            sosd(&a.unwrap_or(d), &b.unwrap_or(d))
        }
    };
    (f, s)
}

/// FOSD and SOSD maps over the cuts of scale `s` from full-frame MSCN
/// planes. The planes are mirror-padded so every cut has a full set of
/// samples; maps are cropped to `ceil(size / cut)`.
pub fn local_stsim<T: Scalar>(
    ref_mscn: &Plane<T>,
    test_mscn: &Plane<T>,
    s: usize,
    cfg: &NssConfig,
) -> (Plane<T>, Plane<T>) {
    let n = cut_size(s);
    let (w, h) = ref_mscn.dims();
    let (pw, ph) = padded_dims_for_cuts(w, h);
    let (rp, tp) = (ref_mscn.mirror_pad(pw, ph), test_mscn.mirror_pad(pw, ph));
    let (gw, gh) = (w.div_ceil(n), h.div_ceil(n));
    let pooled = s <= cfg.pooled_product_scales;
    let values: Vec<(f64, f64)> = (0..gw * gh)
        .into_par_iter()
        .map(|c| {
            let (x0, y0) = ((c % gw) * n, (c / gw) * n);
            let (rv, rd) = cut_samples(&rp, x0, y0, n);
            let (tv, td) = cut_samples(&tp, x0, y0, n);
            cut_dissimilarity(
                &fit_cut(&rv, &rd, pooled),
                &fit_cut(&tv, &td, pooled),
                cfg.degenerate_scale,
            )
        })
        .collect();
    (
        Plane::from_vec(gw, gh, values.iter().map(|v| T::cast(v.0)).collect()),
        Plane::from_vec(gw, gh, values.iter().map(|v| T::cast(v.1)).collect()),
    )
}
