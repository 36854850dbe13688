//! Local moments on non-overlapping `2^level` windows, computed from the
//! Haar pyramid: means from the approximation band, (co)variances from the
//! detail energy accumulated recursively across levels.

use crate::plane::Plane;
use crate::scalar::{Coefficient, Scalar};
use crate::wavelet::haar::{Subbands, WaveletPyramid};

/// Moments of one window size. Luma uses `E = T`; chroma uses
/// `E = Complex<T>` with `cov = E[x y*]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleMoments<T, E> {
    pub level: usize,
    pub mu_x: Plane<E>,
    pub mu_y: Plane<E>,
    pub var_x: Plane<T>,
    pub var_y: Plane<T>,
    pub cov: Plane<E>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentPyramid<T, E> {
    /// One entry per requested level, in the requested order.
    pub scales: Vec<ScaleMoments<T, E>>,
}

/// Per-position detail energy `sum_theta f(X, Y)` over `H, V, D`.
fn detail_energy<T: Scalar, E: Coefficient<T>, R: Copy + Default + std::ops::Add<Output = R>>(
    x: &Subbands<E>,
    y: &Subbands<E>,
    f: impl Fn(E, E) -> R,
) -> Vec<R> {
    let n = x.h.data().len();
    let mut out = vec![R::default(); n];
    for (bx, by) in x.details().into_iter().zip(y.details()) {
        for (o, (&a, &b)) in out.iter_mut().zip(bx.data().iter().zip(by.data())) {
            *o = *o + f(a, b);
        }
    }
    out
}

/// `child` is the accumulated map at level `l` (dims `2w x 2h`); returns
/// `1/4 * (sum of each 2x2 child block) + 4^-(l+1) * energy`.
fn recurse<V: Copy + std::ops::Add<Output = V> + std::ops::Mul<T, Output = V>, T: Scalar>(
    child: &[V],
    child_width: usize,
    energy: &[V],
    width: usize,
    scale: T,
) -> Vec<V> {
    let quarter = T::cast(0.25);
    let mut out = Vec::with_capacity(energy.len());
    for j in 0..energy.len() / width {
        for i in 0..width {
            let c = |dx: usize, dy: usize| child[(2 * j + dy) * child_width + 2 * i + dx];
            let sum = c(0, 0) + c(1, 0) + c(0, 1) + c(1, 1);
            out.push(sum * quarter + energy[j * width + i] * scale);
        }
    }
    out
}

fn crop_to<E: Copy>(data: Vec<E>, width: usize, height: usize, w: usize, h: usize) -> Plane<E> {
    Plane::from_vec(width, height, data).crop(w, h)
}

/// Moments of reference `x` and test `y` at each level in `levels`
/// (window `2^level`). Maps are cropped to `ceil(size / 2^level)`.
pub fn build_moments_at<T: Scalar, E: Coefficient<T> + Default>(
    x: &WaveletPyramid<E>,
    y: &WaveletPyramid<E>,
    levels: &[usize],
) -> MomentPyramid<T, E> {
    assert_eq!(x.depth(), y.depth(), "pyramids must have equal depth");
    let deepest = levels.iter().copied().max().unwrap_or(0);
    assert!(
        deepest <= x.depth(),
        "requested level {deepest} exceeds pyramid depth {}",
        x.depth()
    );
    let mut scales: Vec<Option<ScaleMoments<T, E>>> = vec![None; levels.len()];
    let (mut vx, mut vy, mut cv): (Vec<T>, Vec<T>, Vec<E>) = (Vec::new(), Vec::new(), Vec::new());
    let mut prev_width = 0;
    for level in 1..=deepest {
        let (bx, by) = (x.level(level), y.level(level));
        let (w, h) = bx.dims();
        let ex = detail_energy(bx, bx, |a: E, _| a.norm_sqr());
        let ey = detail_energy(by, by, |a: E, _| a.norm_sqr());
        let exy = detail_energy(bx, by, |a: E, b: E| a.conj_mul(b));
        let scale = T::cast(0.25f64.powi(level as i32));
        if level == 1 {
            vx = ex.into_iter().map(|e| e * scale).collect();
            vy = ey.into_iter().map(|e| e * scale).collect();
            cv = exy.into_iter().map(|e| e * scale).collect();
        } else {
            vx = recurse(&vx, prev_width, &ex, w, scale);
            vy = recurse(&vy, prev_width, &ey, w, scale);
            cv = recurse(&cv, prev_width, &exy, w, scale);
        }
        prev_width = w;
        for (slot, _) in levels.iter().enumerate().filter(|(_, &l)| l == level) {
            let n = 1usize << level;
            let (cw, ch) = (x.width.div_ceil(n), x.height.div_ceil(n));
            let inv = T::cast(1.0 / n as f64);
            scales[slot] = Some(ScaleMoments {
                level,
                mu_x: bx.a.map(|a| a * inv).crop(cw, ch),
                mu_y: by.a.map(|a| a * inv).crop(cw, ch),
                var_x: crop_to(vx.iter().map(|&v| v.max(T::zero())).collect(), w, h, cw, ch),
                var_y: crop_to(vy.iter().map(|&v| v.max(T::zero())).collect(), w, h, cw, ch),
                cov: crop_to(cv.clone(), w, h, cw, ch),
            });
        }
    }
    MomentPyramid {
        scales: scales
            .into_iter()
            .map(|s| s.expect("every requested level visited"))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::haar::haar_analyze;
    use num_complex::Complex;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (*seed >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn identical_inputs_have_equal_moments() {
        let mut s = 3;
        let p = Plane::from_fn(40, 24, |_, _| lcg(&mut s));
        let pyr = haar_analyze::<f64, f64>(&p, 4);
        let m = build_moments_at(&pyr, &pyr, &[1, 2, 3, 4]);
        for sc in &m.scales {
            assert_eq!(sc.var_x, sc.var_y);
            assert_eq!(sc.var_x, sc.cov);
            assert_eq!(sc.mu_x, sc.mu_y);
            assert_eq!(
                sc.mu_x.dims(),
                (
                    40usize.div_ceil(1 << sc.level),
                    24usize.div_ceil(1 << sc.level)
                )
            );
        }
    }

    #[test]
    fn block_statistics_match_pixel_domain() {
        let mut s = 11;
        let x = Plane::from_fn(32, 32, |_, _| lcg(&mut s));
        let y = Plane::from_fn(32, 32, |_, _| lcg(&mut s));
        let (px, py) = (
            haar_analyze::<f64, f64>(&x, 5),
            haar_analyze::<f64, f64>(&y, 5),
        );
        let m = build_moments_at(&px, &py, &[2, 3, 5]);
        for sc in &m.scales {
            let n = 1usize << sc.level;
            for by in 0..32 / n {
                for bx in 0..32 / n {
                    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
                    for j in by * n..(by + 1) * n {
                        for i in bx * n..(bx + 1) * n {
                            let (a, b) = (x.get(i, j), y.get(i, j));
                            sx += a;
                            sy += b;
                            sxx += a * a;
                            syy += b * b;
                            sxy += a * b;
                        }
                    }
                    let k = (n * n) as f64;
                    let (mx, my) = (sx / k, sy / k);
                    assert!((sc.mu_x.get(bx, by) - mx).abs() < 1e-12);
                    assert!((sc.var_x.get(bx, by) - (sxx / k - mx * mx)).abs() < 1e-12);
                    assert!((sc.var_y.get(bx, by) - (syy / k - my * my)).abs() < 1e-12);
                    assert!((sc.cov.get(bx, by) - (sxy / k - mx * my)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn self_covariance_is_real() {
        let mut s = 5;
        let z = Plane::from_fn(16, 16, |_, _| {
            Complex::new(lcg(&mut s) - 0.5, lcg(&mut s) - 0.5)
        });
        let zc = z.map(|v| v.conj());
        // Self-covariance E[z z*] is real. Against the conjugate frame the
        // covariance is E[z z], which is complex in general.
        let (pz, pc) = (
            haar_analyze::<f64, Complex<f64>>(&z, 3),
            haar_analyze::<f64, Complex<f64>>(&zc, 3),
        );
        let m = build_moments_at(&pz, &pz, &[1, 2, 3]);
        for sc in &m.scales {
            assert!(sc.cov.data().iter().all(|c| c.im == 0.0));
        }
        let mc = build_moments_at(&pz, &pc, &[3]);
        assert!(mc.scales[0].cov.data().iter().any(|c| c.im.abs() > 1e-6));
    }

    #[test]
    fn cauchy_schwarz() {
        let mut s = 17;
        let x = Plane::from_fn(64, 48, |_, _| Complex::new(lcg(&mut s), lcg(&mut s)));
        let y = Plane::from_fn(64, 48, |_, _| Complex::new(lcg(&mut s), -lcg(&mut s)));
        let m = build_moments_at(
            &haar_analyze::<f64, _>(&x, 4),
            &haar_analyze::<f64, _>(&y, 4),
            &[1, 2, 3, 4],
        );
        for sc in &m.scales {
            for ((c, a), b) in sc
                .cov
                .data()
                .iter()
                .zip(sc.var_x.data())
                .zip(sc.var_y.data())
            {
                assert!(c.norm() <= (a * b).sqrt() + 1e-9);
            }
        }
    }
}
