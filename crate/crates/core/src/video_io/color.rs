//! Color matrices: RGB primaries to XYZ, and XYZ to cone (LMS) space.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::Gamut;
use crate::error::{Error, Result};

pub type Mat3 = [[f64; 3]; 3];

pub(crate) fn to_na(m: &Mat3) -> Matrix3<f64> {
    Matrix3::from_fn(|r, c| m[r][c])
}

pub(crate) fn from_na(m: &Matrix3<f64>) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m[(r, c)];
        }
    }
    out
}

#[inline]
pub fn mul3(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn matmul3(a: &Mat3, b: &Mat3) -> Mat3 {
    from_na(&(to_na(a) * to_na(b)))
}

pub fn invert3(m: &Mat3) -> Result<Mat3> {
    to_na(m)
        .try_inverse()
        .map(|inv| from_na(&inv))
        .ok_or_else(|| Error::Config("singular 3x3 color matrix".into()))
}

/// D65 white chromaticity.
pub const D65_XY: (f64, f64) = (0.3127, 0.3290);

const BT709_PRIMARIES: [(f64, f64); 3] = [(0.640, 0.330), (0.300, 0.600), (0.150, 0.060)];
const BT2020_PRIMARIES: [(f64, f64); 3] = [(0.708, 0.292), (0.170, 0.797), (0.131, 0.046)];

/// Smith-Pokorny cone fundamentals with the L and M rows rescaled so that
/// `L + M` reproduces the photopic luminance `Y` exactly.
const SMITH_POKORNY: Mat3 = [
    [0.15514 / 0.99996, 0.54312 / 0.99996, -0.03286 / 0.99996],
    [-0.15514 / 0.99996, 0.45684 / 0.99996, 0.03286 / 0.99996],
    [0.0, 0.0, 0.00801],
];

fn xy_to_xyz((x, y): (f64, f64)) -> Vector3<f64> {
    Vector3::new(x / y, 1.0, (1.0 - x - y) / y)
}

/// Normalized primary matrix: linear RGB to XYZ with `Y(white) = 1`.
pub fn rgb_to_xyz_from_primaries(primaries: [(f64, f64); 3], white: (f64, f64)) -> Mat3 {
    let p = Matrix3::from_columns(&[
        xy_to_xyz(primaries[0]),
        xy_to_xyz(primaries[1]),
        xy_to_xyz(primaries[2]),
    ]);
    let s = p.try_inverse().expect("primaries are linearly independent") * xy_to_xyz(white);
    from_na(&(p * Matrix3::from_diagonal(&s)))
}

/// Color matrices carried in the calibration file. Linear RGB in nits maps
/// to LMS through `xyz_to_lms * rgb_to_xyz[gamut]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorConfig {
    pub rgb_to_xyz_bt709: Mat3,
    pub rgb_to_xyz_bt2020: Mat3,
    pub xyz_to_lms: Mat3,
    /// Luminance-weighted RGB coefficients used by the HLG OOTF.
    pub luma_bt709: [f64; 3],
    pub luma_bt2020: [f64; 3],
}

impl Default for ColorConfig {
    fn default() -> Self {
        let m709 = rgb_to_xyz_from_primaries(BT709_PRIMARIES, D65_XY);
        let m2020 = rgb_to_xyz_from_primaries(BT2020_PRIMARIES, D65_XY);
        Self {
            luma_bt709: m709[1],
            luma_bt2020: m2020[1],
            rgb_to_xyz_bt709: m709,
            rgb_to_xyz_bt2020: m2020,
            xyz_to_lms: SMITH_POKORNY,
        }
    }
}

impl ColorConfig {
    pub fn rgb_to_xyz(&self, gamut: Gamut) -> &Mat3 {
        match gamut {
            Gamut::Bt709 => &self.rgb_to_xyz_bt709,
            Gamut::Bt2020 => &self.rgb_to_xyz_bt2020,
        }
    }

    pub fn luma(&self, gamut: Gamut) -> [f64; 3] {
        match gamut {
            Gamut::Bt709 => self.luma_bt709,
            Gamut::Bt2020 => self.luma_bt2020,
        }
    }

    pub fn rgb_to_lms(&self, gamut: Gamut) -> Mat3 {
        matmul3(&self.xyz_to_lms, self.rgb_to_xyz(gamut))
    }

    /// LMS of the D65 white at unit luminance.
    pub fn white_lms(&self) -> [f64; 3] {
        let w = xy_to_xyz(D65_XY);
        mul3(&self.xyz_to_lms, [w.x, w.y, w.z])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_maps_to_unit_luminance() {
        let cfg = ColorConfig::default();
        for gamut in [Gamut::Bt709, Gamut::Bt2020] {
            let lms = mul3(&cfg.rgb_to_lms(gamut), [1.0, 1.0, 1.0]);
            assert!((lms[0] + lms[1] - 1.0).abs() < 1e-12);
        }
        let l = cfg.luma_bt709;
        assert!((l[0] - 0.2126).abs() < 1e-3 && (l[2] - 0.0722).abs() < 1e-3);
    }

    #[test]
    fn l_plus_m_is_luminance_for_any_stimulus() {
        let m = SMITH_POKORNY;
        for (c, (l, m)) in m[0].iter().zip(&m[1]).enumerate() {
            let expected = if c == 1 { 1.0 } else { 0.0 };
            assert!((l + m - expected).abs() < 1e-12);
        }
    }
}
