//! Mean-subtracted contrast-normalized coefficients and their
//! neighbor products.

use serde::{Deserialize, Serialize};

use crate::plane::Plane;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MscnConfig {
    /// Half-width of the Gaussian window (3 gives 7x7).
    pub radius: usize,
    pub sigma: f64,
    /// Stabilizer as a fraction of the plane's value range.
    pub epsilon_fraction: f64,
}

impl Default for MscnConfig {
    fn default() -> Self {
        Self {
            radius: 3,
            sigma: 7.0 / 6.0,
            epsilon_fraction: 1e-3,
        }
    }
}

impl MscnConfig {
    /// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
    pub fn kernel(&self) -> Vec<f64> {
        let r = self.radius as isize;
        let taps: Vec<f64> = (-r..=r)
            .map(|i| (-((i * i) as f64) / (2.0 * self.sigma * self.sigma)).exp())
            .collect();
        let sum: f64 = taps.iter().sum();
        taps.into_iter().map(|t| t / sum).collect()
    }
}

/// Separable filtering with mirrored borders.
pub fn gaussian_filter<T: Scalar>(plane: &Plane<T>, kernel: &[f64]) -> Plane<T> {
    let r = (kernel.len() / 2) as isize;
    let k: Vec<T> = kernel.iter().map(|&v| T::cast(v)).collect();
    let (w, h) = plane.dims();
    let rows = Plane::from_fn(w, h, |x, y| {
        k.iter()
            .enumerate()
            .map(|(t, &kt)| kt * plane.get_mirrored(x as isize + t as isize - r, y as isize))
            .sum()
    });
    Plane::from_fn(w, h, |x, y| {
        k.iter()
            .enumerate()
            .map(|(t, &kt)| kt * rows.get_mirrored(x as isize, y as isize + t as isize - r))
            .sum()
    })
}

/// Local Gaussian-weighted mean and standard deviation.
pub fn local_stats<T: Scalar>(plane: &Plane<T>, cfg: &MscnConfig) -> (Plane<T>, Plane<T>) {
    let k = cfg.kernel();
    let mu = gaussian_filter(plane, &k);
    let second = gaussian_filter(&plane.map(|v| v * v), &k);
    let sigma = second.zip_map(&mu, |s, m| (s - m * m).max(T::zero()).sqrt());
    (mu, sigma)
}

/// `(I - mu) / (sigma + eps)` and the `sigma` field it was normalized by.
pub fn mscn_transform<T: Scalar>(plane: &Plane<T>, cfg: &MscnConfig) -> (Plane<T>, Plane<T>) {
    let (lo, hi) = plane.min_max();
    let eps = (T::cast(cfg.epsilon_fraction) * (hi - lo)).max(T::min_positive_value());
    let (mu, sigma) = local_stats(plane, cfg);
    if hi == lo {
        // Filtering rounding would otherwise leave a residue of ~1e-16.
        return (plane.map(|_| T::zero()), sigma.map(|_| T::zero()));
    }
    let centred = plane.zip_map(&mu, |v, m| v - m);
    (centred.zip_map(&sigma, |c, s| c / (s + eps)), sigma)
}

/// Products of horizontally, vertically and diagonally adjacent samples.
/// `D1` pairs `(x, y)` with `(x+1, y+1)`, `D2` pairs `(x+1, y)` with
/// `(x, y+1)`.
pub fn paired_products<T: Scalar>(p: &Plane<T>) -> [Plane<T>; 4] {
    let (w, h) = p.dims();
    let (w1, h1) = (w.saturating_sub(1), h.saturating_sub(1));
    [
        Plane::from_fn(w1, h, |x, y| p.get(x, y) * p.get(x + 1, y)),
        Plane::from_fn(w, h1, |x, y| p.get(x, y) * p.get(x, y + 1)),
        Plane::from_fn(w1, h1, |x, y| p.get(x, y) * p.get(x + 1, y + 1)),
        Plane::from_fn(w1, h1, |x, y| p.get(x + 1, y) * p.get(x, y + 1)),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct MscnPlanes<T> {
    pub mscn: Plane<T>,
    pub sigma: Plane<T>,
    pub sigma_mscn: Plane<T>,
    /// `H, V, D1, D2` products of the MSCN plane.
    pub products: [Plane<T>; 4],
}

pub fn mscn<T: Scalar>(plane: &Plane<T>, cfg: &MscnConfig) -> MscnPlanes<T> {
    let (m, sigma) = mscn_transform(plane, cfg);
    let (sigma_mscn, _) = mscn_transform(&sigma, cfg);
    let products = paired_products(&m);
    MscnPlanes {
        mscn: m,
        sigma,
        sigma_mscn,
        products,
    }
}
