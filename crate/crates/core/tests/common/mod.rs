//! Synthetic fixtures shared by the integration tests.
#![allow(dead_code)]

use cutfunque::video_io::transfer::{pq_eotf, pq_inverse_eotf};
use cutfunque::video_io::{ColorConfig, Gamut, LinearFrame};
use cutfunque::Plane;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(seed)
}

/// Deterministic HDR-like scene: a luminance ramp spanning several
/// decades, colored bars, fine texture and a bright square moving right by
/// three pixels per frame. Values are linear nits in BT.2020.
pub fn synthetic_video(
    width: usize,
    height: usize,
    frames: usize,
    seed: u64,
) -> Vec<LinearFrame<f64>> {
    let mut r = rng(seed);
    let texture: Vec<f64> = (0..width * height)
        .map(|_| r.random_range(0.85..1.15))
        .collect();
    let color = ColorConfig::default();
    (0..frames)
        .map(|f| {
            let base = |x: usize, y: usize| {
                let ramp = 0.05 * 10f64.powf(4.0 * x as f64 / width as f64);
                let wave = 1.0 + 0.3 * ((y as f64) * 0.35).sin() * ((x as f64) * 0.21).cos();
                let sx = (f * 3 + width / 4) % width;
                let inside =
                    x >= sx && x < sx + width / 6 && y >= height / 3 && y < height / 3 + height / 6;
                let boost = if inside { 40.0 } else { 1.0 };
                ramp * wave * boost * texture[y * width + x]
            };
            let red = Plane::from_fn(width, height, |x, y| {
                base(x, y) * if (y / 16) % 3 == 0 { 1.4 } else { 0.9 }
            });
            let green = Plane::from_fn(width, height, &base);
            let blue = Plane::from_fn(width, height, |x, y| {
                base(x, y) * if (x / 24) % 2 == 0 { 1.3 } else { 0.7 }
            });
            LinearFrame::from_rgb(&red, &green, &blue, Gamut::Bt2020, &color)
        })
        .collect()
}

/// Additive Gaussian noise of standard deviation `sigma` on the PQ-coded
/// signal (code values in [0, 1]), decoded back to linear light. One noise
/// field per plane and frame, reproducible from `seed`.
pub fn with_noise(frames: &[LinearFrame<f64>], sigma: f64, seed: u64) -> Vec<LinearFrame<f64>> {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).unwrap();
    frames
        .iter()
        .map(|f| {
            let mut add = |p: &Plane<f64>| {
                let data = p
                    .data()
                    .iter()
                    .map(|&v| {
                        let noisy = pq_inverse_eotf(v)
                            + if sigma > 0.0 {
                                normal.sample(&mut r)
                            } else {
                                0.0
                            };
                        pq_eotf(noisy.clamp(0.0, 1.0))
                    })
                    .collect();
                Plane::from_vec(p.width(), p.height(), data)
            };
            LinearFrame {
                l: add(&f.l),
                m: add(&f.m),
                s: add(&f.s),
            }
        })
        .collect()
}

pub fn pairs(
    a: &[LinearFrame<f64>],
    b: &[LinearFrame<f64>],
) -> Vec<(LinearFrame<f64>, LinearFrame<f64>)> {
    a.iter().cloned().zip(b.iter().cloned()).collect()
}

pub fn random_plane(r: &mut impl Rng, w: usize, h: usize) -> Plane<f64> {
    Plane::from_fn(w, h, |_, _| r.random_range(0.0..1.0))
}

/// Natural-image stand-in: octaves of bilinearly interpolated random grids
/// with equal energy per octave (a `1/f` amplitude spectrum), offset to stay
/// positive.
pub fn fractal_plane(seed: u64, w: usize, h: usize) -> Plane<f64> {
    let mut r = rng(seed);
    let mut out = Plane::new(w, h, 2.0);
    let mut cell = w.max(h) as f64 / 2.0;
    let mut amp = 1.0;
    while cell >= 1.0 {
        let (gw, gh) = (
            (w as f64 / cell).ceil() as usize + 2,
            (h as f64 / cell).ceil() as usize + 2,
        );
        let grid: Vec<f64> = (0..gw * gh).map(|_| r.random_range(-1.0..1.0)).collect();
        for y in 0..h {
            for x in 0..w {
                let (fx, fy) = (x as f64 / cell, y as f64 / cell);
                let (i, j) = (fx as usize, fy as usize);
                let (tx, ty) = (fx - i as f64, fy - j as f64);
                let g = |a: usize, b: usize| grid[b * gw + a];
                let v = (1.0 - ty) * ((1.0 - tx) * g(i, j) + tx * g(i + 1, j))
                    + ty * ((1.0 - tx) * g(i, j + 1) + tx * g(i + 1, j + 1));
                out.set(x, y, out.get(x, y) + amp * v);
            }
        }
        cell /= 2.0;
        amp *= 1.0;
    }
    out
}
