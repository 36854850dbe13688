//! Separable sliding-window extrema (monotonic deque, O(n) per line) with
//! reflect-101 borders.

use std::collections::VecDeque;

use crate::plane::{mirror, Plane};
use crate::scalar::Scalar;

/// Window extremum of `line` for every position; `better(a, b)` is true
/// when `a` should replace `b` (e.g. `a <= b` for the minimum).
fn sliding_1d<T: Copy>(line: &[T], radius: usize, better: impl Fn(T, T) -> bool, out: &mut [T]) {
    let n = line.len();
    let at = |i: isize| line[mirror(i, n)];
    let r = radius as isize;
    let mut dq: VecDeque<(isize, T)> = VecDeque::with_capacity(2 * radius + 1);
    // Window for output `i` spans `[i - r, i + r]`.
    for j in -r..(n as isize + r) {
        let v = at(j);
        while dq.back().is_some_and(|&(_, b)| better(v, b)) {
            dq.pop_back();
        }
        dq.push_back((j, v));
        let i = j - r;
        if i >= 0 {
            while dq.front().is_some_and(|&(k, _)| k < i - r) {
                dq.pop_front();
            }
            out[i as usize] = dq.front().expect("window is non-empty").1;
        }
    }
}

fn separable<T: Scalar>(
    plane: &Plane<T>,
    radius: usize,
    better: impl Fn(T, T) -> bool + Copy,
) -> Plane<T> {
    let (w, h) = plane.dims();
    let mut rows = vec![T::zero(); w * h];
    for y in 0..h {
        sliding_1d(plane.row(y), radius, better, &mut rows[y * w..(y + 1) * w]);
    }
    let mut out = vec![T::zero(); w * h];
    let mut col = vec![T::zero(); h];
    let mut res = vec![T::zero(); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = rows[y * w + x];
        }
        sliding_1d(&col, radius, better, &mut res);
        for y in 0..h {
            out[y * w + x] = res[y];
        }
    }
    Plane::from_vec(w, h, out)
}

/// Min and max over the `(2 radius + 1)^2` window around every pixel.
pub fn window_min_max<T: Scalar>(plane: &Plane<T>, radius: usize) -> (Plane<T>, Plane<T>) {
    (
        separable(plane, radius, |a, b| a <= b),
        separable(plane, radius, |a, b| a >= b),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(p: &Plane<f64>, r: usize) -> (Plane<f64>, Plane<f64>) {
        let r = r as isize;
        let (w, h) = p.dims();
        let mut lo = Plane::new(w, h, 0.0);
        let mut hi = Plane::new(w, h, 0.0);
        for y in 0..h {
            for x in 0..w {
                let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
                for dy in -r..=r {
                    for dx in -r..=r {
                        let v = p.get_mirrored(x as isize + dx, y as isize + dy);
                        a = a.min(v);
                        b = b.max(v);
                    }
                }
                lo.set(x, y, a);
                hi.set(x, y, b);
            }
        }
        (lo, hi)
    }

    proptest! {
        #[test]
        fn matches_brute_force(w in 1usize..20, h in 1usize..20, r in 0usize..9, seed in any::<u64>()) {
            let mut s = seed;
            let p = Plane::from_fn(w, h, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) % 17) as f64
            });
            let (lo, hi) = window_min_max(&p, r);
            let (blo, bhi) = brute(&p, r);
            prop_assert_eq!(lo, blo);
            prop_assert_eq!(hi, bhi);
        }
    }
}
