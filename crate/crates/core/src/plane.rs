//! Dense row-major 2-D sample planes and the resampling helpers shared by
//! the decoder and the viewing-distance rescaler.

use num_complex::Complex;

use crate::scalar::{Sample, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Plane<E> {
    width: usize,
    height: usize,
    data: Vec<E>,
}

impl<E: Copy> Plane<E> {
    pub fn new(width: usize, height: usize, fill: E) -> Self {
        Self {
            width,
            height,
            data: vec![fill; width * height],
        }
    }

    /// Wraps row-major data. Panics if `data.len() != width * height`.
    pub fn from_vec(width: usize, height: usize, data: Vec<E>) -> Self {
        assert_eq!(
            data.len(),
            width * height,
            "plane data does not match {width}x{height}"
        );
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[E] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [E] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<E> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> E {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: E) {
        self.data[y * self.width + x] = v;
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[E] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Sample with mirrored (reflect-101) indexing outside the plane.
    #[inline]
    pub fn get_mirrored(&self, x: isize, y: isize) -> E {
        self.get(mirror(x, self.width), mirror(y, self.height))
    }

    pub fn map<F: Copy>(&self, f: impl Fn(E) -> F) -> Plane<F> {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<G: Copy, F: Copy>(&self, other: &Plane<G>, f: impl Fn(E, G) -> F) -> Plane<F> {
        assert_eq!(self.dims(), other.dims(), "plane dimensions differ");
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Extends the plane to `width x height` by mirroring across the right
    /// and bottom edges.
    pub fn mirror_pad(&self, width: usize, height: usize) -> Self {
        if (width, height) == self.dims() {
            return self.clone();
        }
        Self::from_fn(width, height, |x, y| {
            self.get_mirrored(x as isize, y as isize)
        })
    }

    /// Top-left `width x height` window.
    pub fn crop(&self, width: usize, height: usize) -> Self {
        assert!(width <= self.width && height <= self.height);
        if (width, height) == self.dims() {
            return self.clone();
        }
        Self::from_fn(width, height, |x, y| self.get(x, y))
    }
}

/// Reflect-101 index mapping (`-1 -> 1`, `n -> n-2`).
#[inline]
pub fn mirror(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let n = n as isize;
    let period = 2 * (n - 1);
    let mut i = i.rem_euclid(period);
    if i >= n {
        i = period - i;
    }
    i as usize
}

impl<T: Scalar> Plane<T> {
    pub fn mean(&self) -> T {
        let sum: T = self.data.iter().copied().sum();
        sum / T::cast(self.data.len().max(1) as f64)
    }

    pub fn min_max(&self) -> (T, T) {
        self.data
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

impl<T: Scalar> Plane<Complex<T>> {
    pub fn from_parts(re: &Plane<T>, im: &Plane<T>) -> Self {
        re.zip_map(im, Complex::new)
    }

    pub fn re(&self) -> Plane<T> {
        self.map(|c| c.re)
    }

    pub fn im(&self) -> Plane<T> {
        self.map(|c| c.im)
    }
}

/// Bilinear resampling with pixel-center alignment. Edge samples are
/// clamped. Returns a clone when the dimensions already match.
pub fn resize_bilinear<T: Scalar, E: Sample<T>>(
    src: &Plane<E>,
    width: usize,
    height: usize,
) -> Plane<E> {
    if src.dims() == (width, height) {
        return src.clone();
    }
    let sx = src.width() as f64 / width as f64;
    let sy = src.height() as f64 / height as f64;
    let taps = |dst: usize, scale: f64, n: usize| -> (usize, usize, T) {
        let pos = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, (n - 1) as f64);
        let i0 = pos.floor() as usize;
        let i1 = (i0 + 1).min(n - 1);
        (i0, i1, T::cast(pos - i0 as f64))
    };
    let cols: Vec<_> = (0..width).map(|x| taps(x, sx, src.width())).collect();
    let rows: Vec<_> = (0..height).map(|y| taps(y, sy, src.height())).collect();
    let one = T::one();
    Plane::from_fn(width, height, |x, y| {
        let (x0, x1, fx) = cols[x];
        let (y0, y1, fy) = rows[y];
        let top = src.get(x0, y0) * (one - fx) + src.get(x1, y0) * fx;
        let bottom = src.get(x0, y1) * (one - fx) + src.get(x1, y1) * fx;
        top * (one - fy) + bottom * fy
    })
}
