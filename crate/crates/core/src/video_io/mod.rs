//! Decoding of raw reference and test streams into absolute linear-light
//! cone (LMS) frames.

mod color;
mod reader;
pub mod transfer;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use color::{invert3, matmul3, mul3, rgb_to_xyz_from_primaries, ColorConfig, Mat3, D65_XY};

pub use reader::{probe_y4m, read_frame, write_frame, write_y4m_header, FrameReader, Y4mHeader};

use crate::error::{Error, Result};
use crate::plane::{resize_bilinear, Plane};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChromaSubsampling {
    #[serde(rename = "420")]
    Yuv420,
    #[serde(rename = "444")]
    Yuv444,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transfer {
    Pq,
    Hlg,
    Bt1886,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gamut {
    Bt709,
    Bt2020,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeRange {
    Limited,
    Full,
}

/// Layout and colorimetry of a planar YCbCr stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VideoSpec {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    pub chroma_subsampling: ChromaSubsampling,
    pub transfer: Transfer,
    pub gamut: Gamut,
    #[serde(default = "default_range")]
    pub range: CodeRange,
    #[serde(default = "default_fps")]
    pub frame_rate: f64,
    /// Display peak in nits. Ignored for PQ, which is absolute.
    pub peak_luminance: f64,
}

fn default_range() -> CodeRange {
    CodeRange::Limited
}

fn default_fps() -> f64 {
    24.0
}

impl VideoSpec {
    /// 10-bit 4:2:0 PQ / BT.2020, limited range.
    pub fn hdr10(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bit_depth: 10,
            chroma_subsampling: ChromaSubsampling::Yuv420,
            transfer: Transfer::Pq,
            gamut: Gamut::Bt2020,
            range: CodeRange::Limited,
            frame_rate: 24.0,
            peak_luminance: 10_000.0,
        }
    }

    /// 10-bit 4:2:0 HLG / BT.2020 at the customary 1000-nit nominal peak.
    pub fn hlg(width: usize, height: usize) -> Self {
        Self {
            transfer: Transfer::Hlg,
            peak_luminance: 1000.0,
            ..Self::hdr10(width, height)
        }
    }

    /// 8-bit 4:2:0 BT.1886 / BT.709 at a 100-nit peak.
    pub fn sdr(width: usize, height: usize) -> Self {
        Self {
            bit_depth: 8,
            transfer: Transfer::Bt1886,
            gamut: Gamut::Bt709,
            peak_luminance: 100.0,
            ..Self::hdr10(width, height)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config("frame dimensions must be positive".into()));
        }
        if !matches!(self.bit_depth, 8 | 10 | 12) {
            return Err(Error::Config(format!(
                "unsupported bit depth {}",
                self.bit_depth
            )));
        }
        if self.chroma_subsampling == ChromaSubsampling::Yuv420
            && (!self.width.is_multiple_of(2) || !self.height.is_multiple_of(2))
        {
            return Err(Error::Config(format!(
                "4:2:0 requires even dimensions, got {}x{}",
                self.width, self.height
            )));
        }
        if !(self.peak_luminance > 0.0 && self.peak_luminance.is_finite()) {
            return Err(Error::Config("peak luminance must be positive".into()));
        }
        Ok(())
    }

    pub fn chroma_dims(&self) -> (usize, usize) {
        match self.chroma_subsampling {
            ChromaSubsampling::Yuv420 => (self.width / 2, self.height / 2),
            ChromaSubsampling::Yuv444 => (self.width, self.height),
        }
    }

    pub fn bytes_per_sample(&self) -> usize {
        if self.bit_depth > 8 {
            2
        } else {
            1
        }
    }

    pub fn frame_bytes(&self) -> usize {
        let (cw, ch) = self.chroma_dims();
        (self.width * self.height + 2 * cw * ch) * self.bytes_per_sample()
    }
}

/// Integer YCbCr samples with chroma at full resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct RawFrame {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    pub y: Vec<u16>,
    pub cb: Vec<u16>,
    pub cr: Vec<u16>,
}

/// Absolute linear-light cone responses; `l + m` is luminance in nits.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFrame<T> {
    pub l: Plane<T>,
    pub m: Plane<T>,
    pub s: Plane<T>,
}

impl<T: Scalar> LinearFrame<T> {
    pub fn width(&self) -> usize {
        self.l.width()
    }

    pub fn height(&self) -> usize {
        self.l.height()
    }

    /// Builds a frame from linear RGB planes in nits.
    pub fn from_rgb(
        r: &Plane<T>,
        g: &Plane<T>,
        b: &Plane<T>,
        gamut: Gamut,
        color: &ColorConfig,
    ) -> Self {
        let m = color.rgb_to_lms(gamut);
        let n = r.data().len();
        let (mut l, mut mm, mut s) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        for i in 0..n {
            let lms = mul3(
                &m,
                [
                    r.data()[i].as_f64(),
                    g.data()[i].as_f64(),
                    b.data()[i].as_f64(),
                ],
            );
            l.push(T::cast(lms[0].max(0.0)));
            mm.push(T::cast(lms[1].max(0.0)));
            s.push(T::cast(lms[2].max(0.0)));
        }
        let (w, h) = r.dims();
        Self {
            l: Plane::from_vec(w, h, l),
            m: Plane::from_vec(w, h, mm),
            s: Plane::from_vec(w, h, s),
        }
    }

    /// Achromatic frame of luminance `y` nits at D65 chromaticity.
    pub fn from_luminance(y: &Plane<T>, color: &ColorConfig) -> Self {
        let w = color.white_lms();
        Self {
            l: y.map(|v| v * T::cast(w[0])),
            m: y.map(|v| v * T::cast(w[1])),
            s: y.map(|v| v * T::cast(w[2])),
        }
    }

    pub fn luminance(&self) -> Plane<T> {
        self.l.zip_map(&self.m, |a, b| a + b)
    }
}

fn normalized_ycbcr(y: u16, cb: u16, cr: u16, depth: u8, range: CodeRange) -> (f64, f64, f64) {
    let (y, cb, cr) = (y as f64, cb as f64, cr as f64);
    match range {
        CodeRange::Limited => {
            let s = (1u32 << (depth - 8)) as f64;
            (
                (y - 16.0 * s) / (219.0 * s),
                (cb - 128.0 * s) / (224.0 * s),
                (cr - 128.0 * s) / (224.0 * s),
            )
        }
        CodeRange::Full => {
            let max = ((1u32 << depth) - 1) as f64;
            let mid = (1u32 << (depth - 1)) as f64;
            (y / max, (cb - mid) / max, (cr - mid) / max)
        }
    }
}

/// Converts integer YCbCr to absolute linear LMS: YCbCr to R'G'B' with the
/// gamut's luma coefficients, EOTF to nits, then RGB to XYZ to LMS.
pub fn decode_to_linear<T: Scalar>(
    frame: &RawFrame,
    spec: &VideoSpec,
    color: &ColorConfig,
) -> Result<LinearFrame<T>> {
    spec.validate()?;
    if frame.bit_depth != spec.bit_depth || (frame.width, frame.height) != (spec.width, spec.height)
    {
        return Err(Error::Config("raw frame does not match its spec".into()));
    }
    let luma = color.luma(spec.gamut);
    let (kr, kb) = (luma[0], luma[2]);
    let kg = 1.0 - kr - kb;
    let rgb_to_lms = color.rgb_to_lms(spec.gamut);
    let peak = spec.peak_luminance;
    let hlg_gamma = transfer::hlg_gamma(peak);
    let n = frame.width * frame.height;
    let (mut l, mut m, mut s) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for i in 0..n {
        let (yp, cb, cr) = normalized_ycbcr(
            frame.y[i],
            frame.cb[i],
            frame.cr[i],
            spec.bit_depth,
            spec.range,
        );
        let r = (yp + 2.0 * (1.0 - kr) * cr).clamp(0.0, 1.0);
        let b = (yp + 2.0 * (1.0 - kb) * cb).clamp(0.0, 1.0);
        let g = ((yp - kr * r - kb * b) / kg).clamp(0.0, 1.0);
        let rgb = match spec.transfer {
            Transfer::Pq => [
                transfer::pq_eotf(r),
                transfer::pq_eotf(g),
                transfer::pq_eotf(b),
            ],
            Transfer::Bt1886 => [
                transfer::bt1886_eotf(r, peak),
                transfer::bt1886_eotf(g, peak),
                transfer::bt1886_eotf(b, peak),
            ],
            Transfer::Hlg => {
                let scene = [
                    transfer::hlg_inverse_oetf(r),
                    transfer::hlg_inverse_oetf(g),
                    transfer::hlg_inverse_oetf(b),
                ];
                let ys = luma[0] * scene[0] + luma[1] * scene[1] + luma[2] * scene[2];
                let gain = if ys > 0.0 {
                    peak * ys.powf(hlg_gamma - 1.0)
                } else {
                    0.0
                };
                scene.map(|e| gain * e)
            }
        };
        let lms = mul3(&rgb_to_lms, rgb);
        l.push(T::cast(lms[0].max(0.0)));
        m.push(T::cast(lms[1].max(0.0)));
        s.push(T::cast(lms[2].max(0.0)));
    }
    let (w, h) = (frame.width, frame.height);
    Ok(LinearFrame {
        l: Plane::from_vec(w, h, l),
        m: Plane::from_vec(w, h, m),
        s: Plane::from_vec(w, h, s),
    })
}

/// Bilinear rescale of each cone plane to the reference geometry; a clone
/// when the geometry already matches.
pub fn rescale_test_to_reference<T: Scalar>(
    test: &LinearFrame<T>,
    width: usize,
    height: usize,
) -> LinearFrame<T> {
    LinearFrame {
        l: resize_bilinear(&test.l, width, height),
        m: resize_bilinear(&test.m, width, height),
        s: resize_bilinear(&test.s, width, height),
    }
}

/// Ring of the most recent frames, oldest first.
#[derive(Clone, Debug)]
pub struct FrameBuffer<F> {
    frames: VecDeque<F>,
    capacity: usize,
}

impl<F> Default for FrameBuffer<F> {
    fn default() -> Self {
        Self::new(4)
    }
}

impl<F> FrameBuffer<F> {
    pub fn new(capacity: usize) -> Self {
        Self {
            frames: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn push(&mut self, frame: F) {
        if self.frames.len() == self.capacity {
            self.frames.pop_front();
        }
        self.frames.push_back(frame);
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn newest(&self) -> Option<&F> {
        self.frames.back()
    }

    pub fn iter(&self) -> impl Iterator<Item = &F> {
        self.frames.iter()
    }
}
