use cutfunque::pucolor::{self, PuCalibration, PuEncoder, PuFrame, ThresholdModel};
use cutfunque::video_io::ColorConfig;
use cutfunque::{Complex, Plane};
use proptest::prelude::*;

fn calibrations() -> Vec<PuCalibration> {
    let color = ColorConfig::default();
    let (lo, hi) = (pucolor::DEFAULT_Y_MIN, pucolor::DEFAULT_Y_MAX);
    vec![
        PuCalibration::builtin(),
        pucolor::calibrate(&ThresholdModel::constant(0.02), &color, lo, hi).unwrap(),
    ]
}

#[test]
fn achromatic_channel_is_monotone_in_luminance() {
    for calib in calibrations() {
        let white = calib.color.white_lms();
        let enc = PuEncoder::new(calib.clone());
        let grid = pucolor::log_grid(calib.y_min, calib.y_max, 400);
        let l: Vec<f64> = grid
            .iter()
            .map(|&y| enc.encode_pixel(white.map(|w| w * y))[0])
            .collect();
        assert!(
            l.windows(2).all(|p| p[1] >= p[0]),
            "non-monotone achromatic channel"
        );
        let tinted: Vec<f64> = grid
            .iter()
            .map(|&y| enc.encode_pixel([0.8 * y, 0.3 * y, 0.4 * y])[0])
            .collect();
        assert!(tinted.windows(2).all(|p| p[1] >= p[0]));
    }
}

#[test]
fn oracle_calibrations_track_quadrature_within_one_percent() {
    let color = ColorConfig::default();
    let basis = pucolor::ChromaticBasis::from_white(color.white_lms()).unwrap();
    let model = ThresholdModel::constant(0.02);
    {
        let calib = pucolor::calibrate(
            &model,
            &color,
            pucolor::DEFAULT_Y_MIN,
            pucolor::DEFAULT_Y_MAX,
        )
        .unwrap();
        let grid = pucolor::log_grid(calib.y_min, calib.y_max, 97);
        let tables = pucolor::integrate_pu(&model, &basis, &grid).unwrap();
        let enc = PuEncoder::new(calib);
        for (k, &y) in grid.iter().enumerate() {
            let w = enc.weights(y);
            for c in 0..3 {
                assert!(
                    (w[c] / tables[c][k] - 1.0).abs() < 0.01,
                    "channel {c} at {y}"
                );
            }
        }
    }
}

#[test]
fn fitted_weber_weights_track_quadrature_within_one_percent() {
    // A Weber threshold leaves the achromatic curve flat (calibration rejects
    // it), so the fit is checked on its own.
    let basis = pucolor::ChromaticBasis::from_matrix(pucolor::threshold::IDENTITY).unwrap();
    let grid = pucolor::log_grid(1e-4, 1e4, 97);
    let tables = pucolor::integrate_pu(&ThresholdModel::weber(0.01), &basis, &grid).unwrap();
    let color = ColorConfig::default();
    assert!(pucolor::calibrate(&ThresholdModel::weber(0.01), &color, 1e-4, 1e4).is_err());
    for table in &tables {
        let fit = pucolor::fit_nonlinearity(&grid, table).unwrap();
        for (y, t) in grid.iter().zip(table) {
            assert!((pucolor::fit::weight(*y, &fit.params) / t - 1.0).abs() < 0.01);
        }
    }
}

proptest! {
    #[test]
    fn hue_and_chromaticity_reconstruct_chroma(re in prop::collection::vec(-2.0f64..2.0, 16), im in prop::collection::vec(-2.0f64..2.0, 16)) {
        let c = Plane::from_parts(&Plane::from_vec(4, 4, re), &Plane::from_vec(4, 4, im));
        let f = PuFrame { l: Plane::new(4, 4, 0.5), c };
        let (hue, chroma) = (f.hue(), f.chromaticity());
        for ((z, h), r) in f.c.data().iter().zip(hue.data()).zip(chroma.data()) {
            let back = Complex::from_polar(*r, *h);
            prop_assert!((back - z).norm() < 1e-12);
        }
    }
}
