//! Orthonormal 2-D Haar analysis.

use crate::plane::Plane;
use crate::scalar::{Sample, Scalar};

/// One analysis level. For a 2x2 block `[[x00, x01], [x10, x11]]` (rows
/// first): `A = (x00+x01+x10+x11)/2`, `H = (x00+x01-x10-x11)/2`,
/// `V = (x00-x01+x10-x11)/2`, `D = (x00-x01-x10+x11)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subbands<E> {
    pub a: Plane<E>,
    pub h: Plane<E>,
    pub v: Plane<E>,
    pub d: Plane<E>,
}

impl<E: Copy> Subbands<E> {
    pub fn details(&self) -> [&Plane<E>; 3] {
        [&self.h, &self.v, &self.d]
    }

    pub fn dims(&self) -> (usize, usize) {
        self.a.dims()
    }
}

/// Single analysis step; `plane` must have even dimensions.
pub fn haar_step<T: Scalar, E: Sample<T>>(plane: &Plane<E>) -> Subbands<E> {
    let (w, h) = plane.dims();
    assert!(
        w % 2 == 0 && h % 2 == 0,
        "haar_step needs even dimensions, got {w}x{h}"
    );
    let (hw, hh) = (w / 2, h / 2);
    let half = T::cast(0.5);
    let n = hw * hh;
    let (mut a, mut hb, mut vb, mut db) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for y in 0..hh {
        let top = plane.row(2 * y);
        let bottom = plane.row(2 * y + 1);
        for x in 0..hw {
            let (x00, x01, x10, x11) =
                (top[2 * x], top[2 * x + 1], bottom[2 * x], bottom[2 * x + 1]);
            let (s0, d0, s1, d1) = (x00 + x01, x00 - x01, x10 + x11, x10 - x11);
            a.push((s0 + s1) * half);
            hb.push((s0 - s1) * half);
            vb.push((d0 + d1) * half);
            db.push((d0 - d1) * half);
        }
    }
    Subbands {
        a: Plane::from_vec(hw, hh, a),
        h: Plane::from_vec(hw, hh, hb),
        v: Plane::from_vec(hw, hh, vb),
        d: Plane::from_vec(hw, hh, db),
    }
}

/// Multi-level decomposition of one channel. The input is mirror-padded
/// to a multiple of `2^levels`; `width`/`height` keep the unpadded size.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletPyramid<E> {
    pub width: usize,
    pub height: usize,
    /// `levels[k]` is level `k + 1`.
    pub levels: Vec<Subbands<E>>,
}

impl<E: Copy> WaveletPyramid<E> {
    pub fn level(&self, level: usize) -> &Subbands<E> {
        &self.levels[level - 1]
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

pub fn padded_dims(width: usize, height: usize, levels: usize) -> (usize, usize) {
    let m = 1usize << levels;
    (width.div_ceil(m) * m, height.div_ceil(m) * m)
}

pub fn haar_analyze<T: Scalar, E: Sample<T>>(plane: &Plane<E>, levels: usize) -> WaveletPyramid<E> {
    let (pw, ph) = padded_dims(plane.width(), plane.height(), levels);
    let mut current = plane.mirror_pad(pw, ph);
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        let bands = haar_step(&current);
        current = bands.a.clone();
        out.push(bands);
    }
    WaveletPyramid {
        width: plane.width(),
        height: plane.height(),
        levels: out,
    }
}

/// Elementwise difference of two pyramids of equal shape (the transform
/// is linear, so this is the pyramid of the frame difference).
pub fn pyramid_difference<T: Scalar, E: Sample<T>>(
    a: &WaveletPyramid<E>,
    b: &WaveletPyramid<E>,
) -> WaveletPyramid<E> {
    let diff = |p: &Plane<E>, q: &Plane<E>| p.zip_map(q, |x, y| x - y);
    WaveletPyramid {
        width: a.width,
        height: a.height,
        levels: a
            .levels
            .iter()
            .zip(&b.levels)
            .map(|(s, t)| Subbands {
                a: diff(&s.a, &t.a),
                h: diff(&s.h, &t.h),
                v: diff(&s.v, &t.v),
                d: diff(&s.d, &t.d),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use proptest::prelude::*;

    #[test]
    fn constant_plane() {
        let s = haar_step::<f64, f64>(&Plane::new(4, 4, 1.5));
        assert!(s.a.data().iter().all(|&v| v == 3.0));
        assert!(s
            .details()
            .iter()
            .all(|b| b.data().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn sign_conventions() {
        let p = Plane::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let s = haar_step::<f64, f64>(&p);
        assert_eq!(s.a.get(0, 0), 5.0);
        assert_eq!(s.h.get(0, 0), -2.0);
        assert_eq!(s.v.get(0, 0), -1.0);
        assert_eq!(s.d.get(0, 0), 0.0);
    }

    #[test]
    fn complex_is_componentwise() {
        let re = Plane::from_fn(8, 8, |x, y| (x * 3 + y) as f64);
        let im = Plane::from_fn(8, 8, |x, y| (x as f64 - y as f64 * 0.5).sin());
        let c = haar_analyze::<f64, Complex<f64>>(&Plane::from_parts(&re, &im), 3);
        let r = haar_analyze::<f64, f64>(&re, 3);
        let i = haar_analyze::<f64, f64>(&im, 3);
        for l in 1..=3 {
            assert_eq!(c.level(l).d.re(), r.level(l).d);
            assert_eq!(c.level(l).h.im(), i.level(l).h);
        }
    }

    #[test]
    fn padding_to_level_multiple() {
        let p = haar_analyze::<f64, f64>(&Plane::new(70, 33, 1.0), 6);
        assert_eq!(p.level(1).dims(), (64, 32));
        assert_eq!(p.level(6).dims(), (2, 1));
    }

    proptest! {
        #[test]
        fn energy_preserved(vals in prop::collection::vec(-10.0f64..10.0, 256)) {
            let p = Plane::from_vec(16, 16, vals);
            let s = haar_step::<f64, f64>(&p);
            let e_in: f64 = p.data().iter().map(|v| v * v).sum();
            let e_out: f64 = [&s.a, &s.h, &s.v, &s.d].iter().flat_map(|b| b.data()).map(|v| v * v).sum();
            prop_assert!((e_in - e_out).abs() <= 1e-9 * e_in.max(1.0));
        }

        #[test]
        fn approximation_is_scaled_block_mean(vals in prop::collection::vec(-5.0f64..5.0, 1024), level in 1usize..=5) {
            let p = Plane::from_vec(32, 32, vals);
            let pyr = haar_analyze::<f64, f64>(&p, 5);
            let n = 1usize << level;
            let a = &pyr.level(level).a;
            for by in 0..32 / n {
                for bx in 0..32 / n {
                    let mut sum = 0.0;
                    for y in by * n..(by + 1) * n {
                        for x in bx * n..(bx + 1) * n {
                            sum += p.get(x, y);
                        }
                    }
                    let mean = sum / (n * n) as f64;
                    prop_assert!((a.get(bx, by) / n as f64 - mean).abs() < 1e-9);
                }
            }
        }
    }
}
