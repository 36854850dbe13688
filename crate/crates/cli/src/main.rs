//! Command-line front end: feature extraction, score prediction and
//! offline PUColor calibration.

mod spec;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cutfunque::model::{file_hash, QualityModel};
use cutfunque::pipeline::{EngineConfig, Timings, VideoFeatures, VideoPair};
use cutfunque::pucolor::{self, ChromaticBasis, PuCalibration, ThresholdModel};
use cutfunque::video_io::{probe_y4m, ColorConfig, FrameReader};
use cutfunque::{Engine32, Engine64};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "cutfunque",
    version,
    about = "Full-reference quality of HDR and tone-mapped video"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract per-frame and per-video features to CSV.
    Features {
        #[command(flatten)]
        run: RunArgs,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict a per-video quality score with a trained model.
    Predict {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        model: PathBuf,
        /// JSON report path; the score is always printed.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the feature CSV here.
        #[arg(long)]
        features_out: Option<PathBuf>,
    },
    /// Fit the PUColor nonlinearities to a threshold model and write a
    /// calibration file.
    Calibrate {
        /// Threshold model JSON; the built-in stand-in when omitted.
        #[arg(long)]
        threshold: Option<PathBuf>,
        #[arg(long, default_value_t = pucolor::DEFAULT_Y_MIN)]
        y_min: f64,
        #[arg(long, default_value_t = pucolor::DEFAULT_Y_MAX)]
        y_max: f64,
        /// Output calibration JSON; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Precision {
    F32,
    F64,
}

#[derive(Args)]
struct RunArgs {
    /// Reference video (raw planar YCbCr or y4m).
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Test video (raw planar YCbCr or y4m); resampled to the reference size.
    #[arg(long)]
    test: PathBuf,
    /// Reference layout: a JSON file or `key=value,...` (see README).
    #[arg(long)]
    ref_spec: Option<String>,
    /// Test layout; defaults to the reference layout.
    #[arg(long)]
    test_spec: Option<String>,
    /// PUColor calibration JSON; the built-in calibration when omitted.
    #[arg(long)]
    calib: Option<PathBuf>,
    /// Engine configuration JSON (feature constants, bins, CSF).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Half-open frame range `A:B`; either end may be omitted.
    #[arg(long, value_parser = parse_range)]
    frames: Option<(Option<usize>, Option<usize>)>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    precision: Precision,
}

fn parse_range(s: &str) -> std::result::Result<(Option<usize>, Option<usize>), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected A:B, got '{s}'"))?;
    let num = |t: &str| -> std::result::Result<Option<usize>, String> {
        if t.is_empty() {
            Ok(None)
        } else {
            t.parse()
                .map(Some)
                .map_err(|_| format!("bad frame index '{t}'"))
        }
    };
    Ok((num(a)?, num(b)?))
}

#[derive(Serialize)]
struct Report<'a> {
    score: f64,
    frame_count: usize,
    model_hash: String,
    manifest_hash: String,
    precision: &'a str,
    timings: Timings,
}

/// y4m streams take their geometry from the header and the rest of the
/// layout from `spec`; raw streams need a complete layout.
fn open_reader(path: &Path, spec: Option<&str>) -> Result<FrameReader<BufReader<File>>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut stream = BufReader::new(file);
    let base = spec::parse(spec.unwrap_or(""))?;
    let reader = if probe_y4m(&mut stream)?.is_some() {
        FrameReader::from_y4m(stream, base)
    } else if spec.is_some() {
        FrameReader::new(stream, base)
    } else {
        bail!(
            "{} is not y4m; pass its layout with --ref-spec/--test-spec",
            path.display()
        )
    };
    reader.with_context(|| format!("cannot read {}", path.display()))
}

fn extract(run: &RunArgs) -> Result<VideoFeatures> {
    let calib = match &run.calib {
        Some(p) => {
            PuCalibration::load(p).with_context(|| format!("calibration {}", p.display()))?
        }
        None => PuCalibration::builtin(),
    };
    let mut cfg: EngineConfig = match &run.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)
            .with_context(|| format!("config {}", p.display()))?,
        None => EngineConfig::default(),
    };
    cfg.workers = run.workers;
    let reference = open_reader(&run.reference, run.ref_spec.as_deref())?;
    let test = open_reader(
        &run.test,
        run.test_spec.as_deref().or(run.ref_spec.as_deref()),
    )?;
    let color: ColorConfig = calib.color.clone();
    let mut pair = VideoPair::new(reference, test, color)?;
    let n = <VideoPair<_> as cutfunque::pipeline::FramePairs<f64>>::len(&pair);
    let range = run.frames.map(|(a, b)| (a.unwrap_or(0), b.unwrap_or(n)));
    Ok(match run.precision {
        Precision::F64 => Engine64::new(calib, cfg)?.run(&mut pair, range)?,
        Precision::F32 => Engine32::new(calib, cfg)?.run(&mut pair, range)?,
    })
}

fn write_to(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut out = BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            );
            write(&mut out)?;
            out.flush()?;
        }
        None => write(&mut std::io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Features { run, out } => {
            let features = extract(&run)?;
            write_to(out.as_deref(), |w| Ok(features.write_csv(w)?))
        }
        Command::Predict {
            run,
            model,
            out,
            features_out,
        } => {
            let bytes = std::fs::read(&model)
                .with_context(|| format!("cannot read model {}", model.display()))?;
            let qm = QualityModel::from_json(
                std::str::from_utf8(&bytes).context("model file is not UTF-8")?,
            )?;
            qm.validate(&cutfunque::binning::Manifest::shipped())?;
            let features = extract(&run)?;
            if let Some(p) = &features_out {
                write_to(Some(p), |w| Ok(features.write_csv(w)?))?;
            }
            let score = qm.predict(&features.manifest, &features.video)?;
            println!("{score}");
            if let Some(p) = &out {
                let report = Report {
                    score,
                    frame_count: features.frames.len(),
                    model_hash: file_hash(&bytes),
                    manifest_hash: features.manifest.hash(),
                    precision: match run.precision {
                        Precision::F32 => "f32",
                        Precision::F64 => "f64",
                    },
                    timings: features.timings,
                };
                write_to(Some(p), |w| {
                    serde_json::to_writer_pretty(&mut *w, &report)?;
                    Ok(writeln!(w)?)
                })?;
            }
            Ok(())
        }
        Command::Calibrate {
            threshold,
            y_min,
            y_max,
            out,
        } => {
            let color = ColorConfig::default();
            let model = match &threshold {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)
                    .with_context(|| format!("threshold model {}", p.display()))?,
                None => {
                    ThresholdModel::stand_in(ChromaticBasis::from_white(color.white_lms())?.m_dkl)
                }
            };
            let calib = pucolor::calibrate(&model, &color, y_min, y_max)?;
            eprintln!("r^2 = {:?}", calib.r_squared);
            write_to(out.as_deref(), |w| Ok(writeln!(w, "{}", calib.to_json())?))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
