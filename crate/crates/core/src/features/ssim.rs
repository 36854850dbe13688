//! Luminance and contrast-structure similarity from shared local moments.

use num_complex::Complex;

use crate::plane::Plane;
use crate::scalar::Scalar;
use crate::wavelet::ScaleMoments;

/// `(SSIM_mu, SSIM_sigma)` for a real channel.
pub fn ssim_luma<T: Scalar>(m: &ScaleMoments<T, T>, c1: f64, c2: f64) -> (Plane<T>, Plane<T>) {
    let (c1, c2, two) = (T::cast(c1), T::cast(c2), T::cast(2.0));
    let mu = m
        .mu_x
        .zip_map(&m.mu_y, |a, b| (two * a * b + c1) / (a * a + b * b + c1));
    let var_sum = m.var_x.zip_map(&m.var_y, |a, b| a + b);
    let sigma = m.cov.zip_map(&var_sum, |c, v| (two * c + c2) / (v + c2));
    (mu, sigma)
}

/// Complex chroma: magnitudes of the mean product and of the conjugate
/// covariance.
pub fn ssim_chroma<T: Scalar>(
    m: &ScaleMoments<T, Complex<T>>,
    c1: f64,
    c2: f64,
) -> (Plane<T>, Plane<T>) {
    let (c1, c2, two) = (T::cast(c1), T::cast(c2), T::cast(2.0));
    let mu = m.mu_x.zip_map(&m.mu_y, |a, b| {
        (two * (a * b).norm() + c1) / ((a * a).norm() + (b * b).norm() + c1)
    });
    let var_sum = m.var_x.zip_map(&m.var_y, |a, b| a + b);
    let sigma = m
        .cov
        .zip_map(&var_sum, |c, v| (two * c.norm() + c2) / (v + c2));
    (mu, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments<E: Copy>(mu_x: E, mu_y: E, var_x: f64, var_y: f64, cov: E) -> ScaleMoments<f64, E> {
        let p = |v| Plane::new(2, 1, v);
        let q = |v| Plane::new(2, 1, v);
        ScaleMoments {
            level: 1,
            mu_x: p(mu_x),
            mu_y: p(mu_y),
            var_x: q(var_x),
            var_y: q(var_y),
            cov: p(cov),
        }
    }

    #[test]
    fn identical_windows_score_one() {
        let (mu, sigma) = ssim_luma(&moments(0.3, 0.3, 0.02, 0.02, 0.02), 1e-4, 9e-4);
        assert_eq!(mu.get(0, 0), 1.0);
        assert_eq!(sigma.get(1, 0), 1.0);
    }

    #[test]
    fn zero_test_drives_luminance_term_to_zero() {
        let (mu, _) = ssim_luma(&moments(0.5, 0.0, 0.01, 0.0, 0.0), 1e-12, 1e-12);
        assert!(mu.get(0, 0) < 1e-10);
    }

    #[test]
    fn real_chroma_matches_luma_for_positive_means() {
        let m = moments(0.4, 0.25, 0.03, 0.01, -0.012);
        let c = moments(
            Complex::new(0.4, 0.0),
            Complex::new(0.25, 0.0),
            0.03,
            0.01,
            Complex::new(-0.012, 0.0),
        );
        let (lm, ls) = ssim_luma(&m, 1e-4, 9e-4);
        let (cm, cs) = ssim_chroma(&c, 1e-4, 9e-4);
        assert!((lm.get(0, 0) - cm.get(0, 0)).abs() < 1e-15);
        // The chroma structure term uses |cov|.
        let want = (2.0 * 0.012 + 9e-4) / (0.04 + 9e-4);
        assert!((cs.get(0, 0) - want).abs() < 1e-15 && ls.get(0, 0) < 0.0);
    }
}
