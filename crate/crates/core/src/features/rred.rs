//! Entropic differences between reference and test local variances.

use std::f64::consts::{E, PI};

use crate::plane::Plane;
use crate::scalar::Scalar;

/// Scaled entropy `ln(1 + var) * ln(k (var + noise))` with `k = 2 pi e`
/// for a real Gaussian.
#[inline]
pub fn scaled_entropy<T: Scalar>(var: T, noise: T, k: T) -> T {
    var.ln_1p() * (k * (var + noise)).ln()
}

fn rred_map<T: Scalar>(var_x: &Plane<T>, var_y: &Plane<T>, noise: f64, k: f64) -> Plane<T> {
    let (noise, k) = (T::cast(noise), T::cast(k));
    var_x.zip_map(var_y, |a, b| {
        (scaled_entropy(a, noise, k) - scaled_entropy(b, noise, k)).abs()
    })
}

pub fn rred_luma<T: Scalar>(var_x: &Plane<T>, var_y: &Plane<T>, noise: f64) -> Plane<T> {
    rred_map(var_x, var_y, noise, 2.0 * PI * E)
}

/// A circular complex Gaussian of variance `s` has entropy `ln(pi e s)`,
/// the entropy of the two-dimensional real Gaussian of its parts.
pub fn rred_chroma<T: Scalar>(var_x: &Plane<T>, var_y: &Plane<T>, noise: f64) -> Plane<T> {
    rred_map(var_x, var_y, noise, PI * E)
}
