use thiserror::Error;

/// Errors surfaced by the quality engine. Each variant names the stage it
/// originated from so command-line reports can point at the failing module.
#[derive(Debug, Error)]
pub enum Error {
    #[error("video_io: truncated stream at byte offset {offset} (needed {needed} more bytes for frame {frame})")]
    Truncated {
        offset: u64,
        needed: u64,
        frame: usize,
    },

    #[error("video_io: {0}")]
    Decode(String),

    #[error("config: {0}")]
    Config(String),

    #[error("pucolor: threshold undefined for luminance {0} (must be positive and finite)")]
    Domain(f64),

    #[error("pucolor: calibration failed for channel {channel} at y = {y}: {reason}")]
    Calibration {
        channel: usize,
        y: f64,
        reason: String,
    },

    #[error("pucolor: nonlinearity fit for channel {channel} reached r^2 = {r_squared:.6} (<= 0.999), best p = {params:?}")]
    FitQuality {
        channel: usize,
        r_squared: f64,
        params: [f64; 5],
    },

    #[error("nss: degenerate samples ({0})")]
    DegenerateFit(String),

    #[error("binning: {0}")]
    Assembly(String),

    #[error("model: {0}")]
    Model(String),

    #[error("model: non-finite value for feature '{0}'")]
    NonFiniteFeature(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
