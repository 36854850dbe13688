//! Detail loss: decouple test detail coefficients into a restored part
//! (gain-scaled reference) and an additive impairment, mask the restored
//! part by nearby impairment energy, and compare per-cut detail energy.

use crate::plane::Plane;
use crate::scalar::Scalar;
use crate::wavelet::Subbands;

/// Orientation agreement (degrees) under which gains above 1 are kept.
pub const ANGLE_TOLERANCE_DEG: f64 = 1.0;

/// `atan(V / H)` in degrees; a zero gradient has angle 0.
#[inline]
fn angle<T: Scalar>(h: T, v: T) -> T {
    let a = (v / h).atan().to_degrees();
    if a.is_nan() {
        T::zero()
    } else {
        a
    }
}

/// Restored coefficients `R = gamma X` and impairments `A = Y - R` for
/// the three detail orientations.
pub fn decouple<T: Scalar>(x: &Subbands<T>, y: &Subbands<T>) -> ([Plane<T>; 3], [Plane<T>; 3]) {
    let tol = T::cast(ANGLE_TOLERANCE_DEG);
    let (w, h) = x.dims();
    let aligned = Plane::from_fn(w, h, |i, j| {
        (angle(x.h.get(i, j), x.v.get(i, j)) - angle(y.h.get(i, j), y.v.get(i, j))).abs() < tol
    });
    let bands = |k: usize| -> (Plane<T>, Plane<T>) {
        let (bx, by) = (x.details()[k], y.details()[k]);
        let r = Plane::from_fn(w, h, |i, j| {
            let (a, b) = (bx.get(i, j), by.get(i, j));
            if a == T::zero() {
                return T::zero();
            }
            let g = b / a;
            let g = if aligned.get(i, j) {
                g
            } else {
                g.max(T::zero()).min(T::one())
            };
            g * a
        });
        let imp = by.zip_map(&r, |b, rr| b - rr);
        (r, imp)
    };
    let (r0, a0) = bands(0);
    let (r1, a1) = bands(1);
    let (r2, a2) = bands(2);
    ([r0, r1, r2], [a0, a1, a2])
}

/// `M(i,j) = sum_theta sum_{3x3} w |A|` with centre weight 2/30 and 1/30
/// elsewhere; mirrored borders.
pub fn masking_threshold<T: Scalar>(impairments: &[Plane<T>; 3]) -> Plane<T> {
    let (w, h) = impairments[0].dims();
    let (centre, side) = (T::cast(2.0 / 30.0), T::cast(1.0 / 30.0));
    Plane::from_fn(w, h, |i, j| {
        let mut acc = T::zero();
        for a in impairments {
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let wt = if dx == 0 && dy == 0 { centre } else { side };
                    acc += wt * a.get_mirrored(i as isize + dx, j as isize + dy).abs();
                }
            }
        }
        acc
    })
}

/// Per-cut DLM over `cut x cut` coefficient blocks of one level:
/// `(sum R~^3)^(1/3) / (sum |X|^3)^(1/3)` with `R~ = max(|R| - M, 0)`.
/// The map is cropped to `grid`; a cut without reference detail scores 1.
pub fn dlm_map<T: Scalar>(
    x: &Subbands<T>,
    y: &Subbands<T>,
    cut: usize,
    grid: (usize, usize),
) -> Plane<T> {
    let (restored, impairments) = decouple(x, y);
    let mask = masking_threshold(&impairments);
    let (w, h) = x.dims();
    Plane::from_fn(grid.0, grid.1, |ci, cj| {
        let (mut num, mut den) = (T::zero(), T::zero());
        for (rk, bx) in restored.iter().zip(x.details()) {
            for j in cj * cut..((cj + 1) * cut).min(h) {
                for i in ci * cut..((ci + 1) * cut).min(w) {
                    let rt = (rk.get(i, j).abs() - mask.get(i, j)).max(T::zero());
                    num += rt * rt * rt;
                    let xa = bx.get(i, j).abs();
                    den += xa * xa * xa;
                }
            }
        }
        if den <= T::zero() {
            T::one()
        } else {
            (num / den).cbrt()
        }
    })
}
