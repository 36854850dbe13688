//! Regenerates `data/pucolor_default.json` from the stand-in threshold model
//! and reports how closely the fitted curves follow the integrals.

use cutfunque::pucolor::{self, ChromaticBasis, ThresholdModel};
use cutfunque::video_io::ColorConfig;

fn main() -> cutfunque::Result<()> {
    let color = ColorConfig::default();
    let basis = ChromaticBasis::from_white(color.white_lms())?;
    let model = ThresholdModel::stand_in(basis.m_dkl);
    let calib = pucolor::calibrate(
        &model,
        &color,
        pucolor::DEFAULT_Y_MIN,
        pucolor::DEFAULT_Y_MAX,
    )?;
    eprintln!("r^2 = {:?}", calib.r_squared);
    let grid = pucolor::log_grid(calib.y_min, calib.y_max, 97);
    let tables = pucolor::integrate_pu(&model, &basis, &grid)?;
    for (c, table) in tables.iter().enumerate() {
        let worst = grid
            .iter()
            .zip(table)
            .map(|(&y, &t)| (calib.weight(c, y) / t - 1.0).abs())
            .fold(0.0, f64::max);
        eprintln!("channel {c}: max relative deviation {worst:.4}");
    }
    match std::env::args().nth(1) {
        Some(path) => calib.save(path.as_ref())?,
        None => println!("{}", calib.to_json()),
    }
    Ok(())
}
