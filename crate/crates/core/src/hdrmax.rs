//! Local min-max normalization followed by a double-exponential expansion,
//! which stretches the extremes of every neighborhood before feature
//! extraction.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::pucolor::PuFrame;
use crate::scalar::Scalar;
use crate::sliding::window_min_max;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HdrmaxConfig {
    pub window: usize,
    pub gain: f64,
}

impl Default for HdrmaxConfig {
    fn default() -> Self {
        Self {
            window: 17,
            gain: 4.0,
        }
    }
}

impl HdrmaxConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "hdrmax window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(Error::Config("hdrmax gain must be positive".into()));
        }
        Ok(())
    }
}

/// `2 (I - min) / (max - min) - 1` over the window; flat windows give 0.
pub fn minmax_normalize<T: Scalar>(plane: &Plane<T>, cfg: &HdrmaxConfig) -> Plane<T> {
    let (lo, hi) = window_min_max(plane, cfg.window / 2);
    let (one, two) = (T::one(), T::cast(2.0));
    let data = plane
        .data()
        .iter()
        .zip(lo.data().iter().zip(hi.data()))
        .map(|(&v, (&a, &b))| {
            if b > a {
                (two * (v - a) / (b - a) - one).max(-one).min(one)
            } else {
                T::zero()
            }
        })
        .collect();
    Plane::from_vec(plane.width(), plane.height(), data)
}

/// `sgn(x) (e^{gain |x|} - 1)`.
#[inline]
pub fn expand<T: Scalar>(x: T, gain: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x.signum() * (gain * x.abs()).exp_m1()
    }
}

pub fn hdrmax_plane<T: Scalar>(plane: &Plane<T>, cfg: &HdrmaxConfig) -> Plane<T> {
    let g = T::cast(cfg.gain);
    minmax_normalize(plane, cfg).map(|v| expand(v, g))
}

/// Applies the transform to `l` and to the real and imaginary chroma parts
/// independently.
pub fn hdrmax_frame<T: Scalar>(frame: &PuFrame<T>, cfg: &HdrmaxConfig) -> PuFrame<T> {
    let l = hdrmax_plane(&frame.l, cfg);
    let re = hdrmax_plane(&frame.c.re(), cfg);
    let im = hdrmax_plane(&frame.c.im(), cfg);
    PuFrame {
        l,
        c: re.zip_map(&im, Complex::new),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> HdrmaxConfig {
        HdrmaxConfig::default()
    }

    #[test]
    fn expand_values() {
        assert_eq!(expand(0.0f64, 4.0), 0.0);
        assert!((expand(1.0f64, 4.0) - 53.598150033144236).abs() < 1e-12);
        assert!((expand(-0.5f64, 4.0) + 6.38905609893065).abs() < 1e-12);
    }

    #[test]
    fn constant_plane_is_zero() {
        let p = Plane::new(23, 19, 0.37f64);
        assert!(hdrmax_plane(&p, &cfg()).data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ramp_center_is_zero() {
        let p = Plane::from_fn(41, 41, |x, _| x as f64 * 0.1);
        let n = minmax_normalize(&p, &cfg());
        assert!(n.get(20, 20).abs() < 1e-12);
    }

    #[test]
    fn bright_pixel_is_window_max() {
        let mut p = Plane::new(33, 33, 0.01f64);
        p.set(16, 16, 0.9);
        let out = hdrmax_plane(&p, &cfg());
        assert!((out.get(16, 16) - (4.0f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_even_window() {
        assert!(HdrmaxConfig {
            window: 16,
            gain: 4.0
        }
        .validate()
        .is_err());
    }

    fn plane_from(seed: u64, w: usize, h: usize) -> Plane<f64> {
        let mut s = seed | 1;
        Plane::from_fn(w, h, |_, _| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s % 10_000) as f64 / 10_000.0
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn normalized_in_unit_range_and_expand_monotone(seed in any::<u64>(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let n = minmax_normalize(&plane_from(seed, 24, 20), &cfg());
            prop_assert!(n.data().iter().all(|v| (-1.0..=1.0).contains(v)));
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if lo < hi {
                prop_assert!(expand(lo, 4.0) < expand(hi, 4.0));
            }
            prop_assert_eq!(expand(-a, 4.0), -expand(a, 4.0));
        }

        #[test]
        fn affine_invariance(seed in any::<u64>(), gain in 0.01f64..100.0, offset in -10.0f64..10.0) {
            let p = plane_from(seed, 30, 21);
            let q = p.map(|v| gain * v + offset);
            let (x, y) = (hdrmax_plane(&p, &cfg()), hdrmax_plane(&q, &cfg()));
            for (u, v) in x.data().iter().zip(y.data()) {
                prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0));
            }
        }

        #[test]
        fn negation_negates(seed in any::<u64>()) {
            let p = plane_from(seed, 25, 25);
            let x = hdrmax_plane(&p, &cfg());
            let y = hdrmax_plane(&p.map(|v| -v), &cfg());
            for (u, v) in x.data().iter().zip(y.data()) {
                prop_assert!((u + v).abs() <= 1e-12 * u.abs().max(1.0));
            }
        }
    }
}
