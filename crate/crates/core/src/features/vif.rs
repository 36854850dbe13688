//! Visual information fidelity under a Gaussian (luma) or circular complex
//! Gaussian (chroma) gain-plus-noise channel.

use num_complex::Complex;

use crate::plane::Plane;
use crate::scalar::Scalar;
use crate::wavelet::ScaleMoments;

/// Reference variance below which a window carries no information and
/// scores 1.
pub const GAIN_GUARD: f64 = 1e-12;

/// `MI-Test / MI-Ref` from the reference variance, the squared channel
/// gain magnitude and the residual variance. A window with no reference
/// information (`MI-Ref = 0`) has nothing to lose and scores 1.
#[inline]
pub fn vif_ratio<T: Scalar>(var_x: T, gain_sq: T, var_v: T, noise: T) -> T {
    let mi_ref = (var_x / noise).ln_1p();
    if mi_ref <= T::zero() {
        return T::one();
    }
    let mi_test = (gain_sq * var_x / (var_v + noise)).ln_1p();
    mi_test / mi_ref
}

pub fn vif_luma<T: Scalar>(m: &ScaleMoments<T, T>, noise: f64) -> Plane<T> {
    let (noise, guard) = (T::cast(noise), T::cast(GAIN_GUARD));
    Plane::from_fn(m.var_x.width(), m.var_x.height(), |i, j| {
        let (vx, vy, c) = (m.var_x.get(i, j), m.var_y.get(i, j), m.cov.get(i, j));
        if vx < guard {
            return T::one();
        }
        let g = c / vx;
        let vv = (vy - g * c).max(T::zero());
        vif_ratio(vx, g * g, vv, noise)
    })
}

/// `cov = E[x y*]`, so the gain of `y = g x + n` is `conj(cov) / var_x`.
pub fn vif_chroma<T: Scalar>(m: &ScaleMoments<T, Complex<T>>, noise: f64) -> Plane<T> {
    let (noise, guard) = (T::cast(noise), T::cast(GAIN_GUARD));
    Plane::from_fn(m.var_x.width(), m.var_x.height(), |i, j| {
        let (vx, vy, c) = (m.var_x.get(i, j), m.var_y.get(i, j), m.cov.get(i, j));
        if vx < guard {
            return T::one();
        }
        let g = c.conj() / vx;
        let vv = (vy - (g * c).re).max(T::zero());
        vif_ratio(vx, g.norm_sqr(), vv, noise)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments<E: Copy>(var_x: f64, var_y: f64, cov: E, zero: E) -> ScaleMoments<f64, E> {
        let p = |v| Plane::new(1, 1, v);
        let q = |v| Plane::new(1, 1, v);
        ScaleMoments {
            level: 1,
            mu_x: p(zero),
            mu_y: p(zero),
            var_x: q(var_x),
            var_y: q(var_y),
            cov: p(cov),
        }
    }

    #[test]
    fn identity_is_one() {
        assert_eq!(vif_luma(&moments(0.3, 0.3, 0.3, 0.0), 0.1).get(0, 0), 1.0);
        let z = Complex::new(0.0, 0.0);
        assert_eq!(
            vif_chroma(&moments(0.3, 0.3, Complex::new(0.3, 0.0), z), 0.1).get(0, 0),
            1.0
        );
    }

    #[test]
    fn uncorrelated_test_is_zero() {
        assert_eq!(vif_luma(&moments(0.3, 0.5, 0.0, 0.0), 0.1).get(0, 0), 0.0);
    }

    #[test]
    fn flat_reference_scores_one() {
        assert_eq!(
            vif_luma(&moments(1e-14, 0.5, 1e-9, 0.0), 0.1).get(0, 0),
            1.0
        );
    }

    #[test]
    fn pure_gain_channel() {
        // y = 0.5 x: g = 0.5, no residual.
        let v = vif_luma(&moments(0.2, 0.05, 0.1, 0.0), 0.1).get(0, 0);
        let want = (1.0 + 0.25 * 0.2 / 0.1f64).ln() / (1.0 + 0.2 / 0.1f64).ln();
        assert!((v - want).abs() < 1e-15);
    }

    #[test]
    fn chroma_phase_rotation_is_lossless() {
        // y = e^{i phi} x: |g| = 1 and no residual, whatever the phase.
        let z = Complex::new(0.0, 0.0);
        let rot = Complex::from_polar(1.0, 0.7);
        let cov = Complex::new(0.3, 0.0) * rot.conj();
        assert!((vif_chroma(&moments(0.3, 0.3, cov, z), 0.1).get(0, 0) - 1.0).abs() < 1e-14);
    }
}
