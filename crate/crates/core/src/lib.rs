//! Full-reference quality engine for compressed, tone-mapped HDR video.
//!
//! Reference (HDR) and test (SDR) frames are decoded to absolute linear
//! cone responses, encoded into a shared perceptually uniform color domain,
//! optionally passed through a local min-max expansion, decomposed once
//! with an orthonormal Haar transform, and scored with wavelet-domain and
//! natural-scene-statistics features pooled over luminance, spatial and
//! temporal bins. A serialized regressor maps the pooled feature vector to
//! a quality score.
//!
//! The image-domain math is generic over the scalar type ([`Scalar`]);
//! `f64` aliases are exported for the common case.

// `!(a > b)` is used deliberately so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binning;
pub mod error;
pub mod features;
pub mod hdrmax;
pub mod model;
pub mod nss;
pub mod pipeline;
pub mod plane;
pub mod pucolor;
pub mod quadrature;
pub mod scalar;
pub mod sliding;
pub mod video_io;
pub mod wavelet;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use plane::Plane;
pub use scalar::{Coefficient, Sample, Scalar};

pub type Plane64 = Plane<f64>;
pub type Plane32 = Plane<f32>;
pub type ComplexPlane64 = Plane<Complex<f64>>;
pub type LinearFrame64 = video_io::LinearFrame<f64>;
pub type PuFrame64 = pucolor::PuFrame<f64>;
pub type PuFrame32 = pucolor::PuFrame<f32>;
pub type Engine64 = pipeline::Engine<f64>;
pub type Engine32 = pipeline::Engine<f32>;
