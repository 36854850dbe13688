//! Shared wavelet front end: viewing-distance rescale, Haar analysis,
//! contrast-sensitivity weighting and the local-moment pyramid.
//!
//! The pyramid has six levels. Analysis scale `s` (1..=4) uses level
//! `s + 2`, i.e. moment windows and cuts of 8, 16, 32 and 64 pixels.

pub mod csf;
pub mod haar;
pub mod moments;
pub mod sast;

pub use csf::{apply_csf_chroma, apply_csf_luma, ChannelClass, CsfWeights};
pub use haar::{
    haar_analyze, haar_step, padded_dims, pyramid_difference, Subbands, WaveletPyramid,
};
pub use moments::{build_moments_at, MomentPyramid, ScaleMoments};
pub use sast::{sast_rescale, SastConfig};

use num_complex::Complex;

use crate::error::Result;
use crate::plane::Plane;
use crate::scalar::{Coefficient, Scalar};

pub const LEVELS: usize = 6;
pub const SCALES: usize = 4;

/// Wavelet level whose windows are the cuts of scale `s`.
pub const fn scale_level(s: usize) -> usize {
    s + 2
}

/// Cut edge in pixels for scale `s` (8, 16, 32, 64).
pub const fn cut_size(s: usize) -> usize {
    1 << scale_level(s)
}

/// Frame size after mirror padding to whole cuts of every scale.
pub fn padded_dims_for_cuts(width: usize, height: usize) -> (usize, usize) {
    padded_dims(width, height, LEVELS)
}

pub const MOMENT_LEVELS: [usize; SCALES] = [
    scale_level(1),
    scale_level(2),
    scale_level(3),
    scale_level(4),
];

pub fn analyze_luma<T: Scalar>(plane: &Plane<T>, csf: &CsfWeights) -> Result<WaveletPyramid<T>> {
    let mut p = haar_analyze(plane, LEVELS);
    apply_csf_luma(&mut p, csf)?;
    Ok(p)
}

pub fn analyze_chroma<T: Scalar>(
    plane: &Plane<Complex<T>>,
    csf: &CsfWeights,
) -> Result<WaveletPyramid<Complex<T>>> {
    let mut p = haar_analyze(plane, LEVELS);
    apply_csf_chroma(&mut p, csf)?;
    Ok(p)
}

/// Moments at the four analysis scales.
pub fn build_moments<T: Scalar, E: Coefficient<T> + Default>(
    x: &WaveletPyramid<E>,
    y: &WaveletPyramid<E>,
) -> MomentPyramid<T, E> {
    build_moments_at(x, y, &MOMENT_LEVELS)
}
