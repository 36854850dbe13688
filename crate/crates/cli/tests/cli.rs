use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cutfunque::binning::{Aggregation, Manifest};
use cutfunque::features::Polarity;
use cutfunque::model::{QualityModel, Regressor};
use cutfunque::pipeline::FeatureTable;
use cutfunque::pucolor::ThresholdModel;
use cutfunque::video_io::{write_frame, write_y4m_header, RawFrame, VideoSpec};

const W: usize = 64;
const H: usize = 48;

/// Deterministic 10-bit limited-range frames with a moving gradient and
/// coarse chroma bars.
fn frames(n: usize, noise: u16) -> Vec<RawFrame> {
    let mut s: u32 = 12345;
    (0..n)
        .map(|f| {
            let mut grain = || {
                s = s.wrapping_mul(1_103_515_245).wrapping_add(12345);
                ((s >> 16) % (2 * noise as u32 + 1)) as i32 - noise as i32
            };
            let mut y = Vec::with_capacity(W * H);
            for j in 0..H {
                for i in 0..W {
                    let base = 100 + ((i + 2 * f) * 11 + j * 5) % 700;
                    y.push((base as i32 + grain()).clamp(64, 940) as u16);
                }
            }
            let cb = (0..W * H)
                .map(|k| {
                    if ((k % W) / 16).is_multiple_of(2) {
                        480
                    } else {
                        560
                    }
                })
                .collect();
            let cr = (0..W * H)
                .map(|k| {
                    if ((k / W) / 12).is_multiple_of(2) {
                        500
                    } else {
                        530
                    }
                })
                .collect();
            RawFrame {
                width: W,
                height: H,
                bit_depth: 10,
                y,
                cb,
                cr,
            }
        })
        .collect()
}

fn write_video(path: &Path, frames: &[RawFrame], y4m: bool) {
    let spec = VideoSpec::hdr10(W, H);
    let mut out = BufWriter::new(File::create(path).unwrap());
    if y4m {
        write_y4m_header(&mut out, &spec).unwrap();
    }
    for f in frames {
        write_frame(&mut out, f, &spec, y4m).unwrap();
    }
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        write_video(&dir.path().join("ref.y4m"), &frames(8, 0), true);
        write_video(&dir.path().join("test.y4m"), &frames(8, 12), true);
        write_video(&dir.path().join("ref.yuv"), &frames(8, 0), false);
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_cutfunque"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }
}

fn table(path: &Path) -> FeatureTable {
    FeatureTable::read_csv(std::io::BufReader::new(File::open(path).unwrap())).unwrap()
}

#[test]
fn identical_videos_give_perfect_features() {
    let fx = Fixture::new();
    fx.ok(&[
        "features",
        "--ref",
        "ref.y4m",
        "--test",
        "ref.y4m",
        "--out",
        "f.csv",
        "--workers",
        "2",
    ]);
    let t = table(&fx.path("f.csv"));
    assert_eq!(t.rows.len(), 9);
    let m = Manifest::canonical();
    let video = t.video_row(&m).unwrap();
    for (d, v) in m.features.iter().zip(video) {
        let v = v.unwrap_or_else(|| panic!("{} missing", d.name));
        match (d.aggregation, d.polarity) {
            (Aggregation::Global, _) => assert!(v.is_finite()),
            (_, Some(Polarity::Quality)) => assert!((v - 1.0).abs() < 1e-9, "{} = {v}", d.name),
            (_, Some(Polarity::Distortion)) => assert!(v.abs() < 1e-9, "{} = {v}", d.name),
            _ => unreachable!(),
        }
    }
}

#[test]
fn raw_input_with_layout_matches_y4m() {
    let fx = Fixture::new();
    let y4m = fx.ok(&["features", "--ref", "ref.y4m", "--test", "test.y4m"]);
    let raw = fx.ok(&[
        "features",
        "--ref",
        "ref.yuv",
        "--ref-spec",
        "size=64x48",
        "--test",
        "test.y4m",
        "--test-spec",
        "",
    ]);
    assert_eq!(y4m, raw);
    let out = fx.run(&["features", "--ref", "ref.yuv", "--test", "test.y4m"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not y4m"));
}

#[test]
fn frame_range_selects_rows_and_is_worker_independent() {
    let fx = Fixture::new();
    let a = fx.ok(&[
        "features",
        "--ref",
        "ref.y4m",
        "--test",
        "test.y4m",
        "--frames",
        "2:5",
        "--workers",
        "1",
    ]);
    let b = fx.ok(&[
        "features",
        "--ref",
        "ref.y4m",
        "--test",
        "test.y4m",
        "--frames",
        "2:5",
        "--workers",
        "4",
    ]);
    assert_eq!(a, b);
    let t = FeatureTable::read_csv(a.as_bytes()).unwrap();
    let keys: Vec<&str> = t.rows.iter().map(|(k, _)| k.as_str()).collect();
    assert_eq!(keys, ["2", "3", "4", "video"]);
    assert!(!fx
        .run(&["features", "--ref", "ref.y4m", "--test", "test.y4m", "--frames", "6:9"])
        .status
        .success());
}

fn write_model(fx: &Fixture, hash: String) -> PathBuf {
    let m = Manifest::canonical();
    let model = QualityModel {
        regressor: Regressor::LinearSvr {
            weights: vec![0.0; m.len()],
            bias: 42.0,
        },
        normalization: None,
        manifest_hash: hash,
    };
    let path = fx.path("model.json");
    std::fs::write(&path, serde_json::to_string(&model).unwrap()).unwrap();
    path
}

#[test]
fn zero_weight_linear_model_predicts_its_bias() {
    let fx = Fixture::new();
    write_model(&fx, Manifest::canonical().hash());
    let stdout = fx.ok(&[
        "predict",
        "--ref",
        "ref.y4m",
        "--test",
        "test.y4m",
        "--model",
        "model.json",
        "--out",
        "r.json",
    ]);
    assert_eq!(stdout.trim().parse::<f64>().unwrap(), 42.0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fx.path("r.json")).unwrap()).unwrap();
    assert_eq!(report["score"], 42.0);
    assert_eq!(report["frame_count"], 8);
    assert_eq!(report["manifest_hash"], Manifest::canonical().hash());
    assert_eq!(report["model_hash"].as_str().unwrap().len(), 64);
    assert!(report["timings"]["total_seconds"].as_f64().unwrap() > 0.0);
}

#[test]
fn model_for_another_manifest_is_refused() {
    let fx = Fixture::new();
    write_model(&fx, "0".repeat(64));
    let out = fx.run(&[
        "predict",
        "--ref",
        "ref.y4m",
        "--test",
        "test.y4m",
        "--model",
        "model.json",
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("model:") && err.contains("manifest"), "{err}");
}

#[test]
fn calibrate_writes_a_loadable_calibration() {
    let fx = Fixture::new();
    std::fs::write(
        fx.path("t.json"),
        serde_json::to_string(&ThresholdModel::constant(0.02)).unwrap(),
    )
    .unwrap();
    fx.ok(&["calibrate", "--threshold", "t.json", "--out", "c.json"]);
    let calib = cutfunque::pucolor::PuCalibration::load(&fx.path("c.json")).unwrap();
    assert!(calib.r_squared.iter().all(|r| *r > 0.999));
    fx.ok(&[
        "features", "--ref", "ref.y4m", "--test", "test.y4m", "--calib", "c.json", "--frames",
        "0:2",
    ]);
}

#[test]
fn partial_engine_config_overrides_only_its_fields() {
    let fx = Fixture::new();
    std::fs::write(fx.path("e.json"), r#"{"hdrmax": {"window": 9}}"#).unwrap();
    let base = fx.ok(&[
        "features", "--ref", "ref.y4m", "--test", "test.y4m", "--frames", "0:2",
    ]);
    let tuned = fx.ok(&[
        "features", "--ref", "ref.y4m", "--test", "test.y4m", "--frames", "0:2", "--config",
        "e.json",
    ]);
    let (a, b) = (
        FeatureTable::read_csv(base.as_bytes()).unwrap(),
        FeatureTable::read_csv(tuned.as_bytes()).unwrap(),
    );
    let m = Manifest::canonical();
    let changed: Vec<&str> = m
        .features
        .iter()
        .zip(
            a.video_row(&m)
                .unwrap()
                .iter()
                .zip(b.video_row(&m).unwrap()),
        )
        .filter(|(_, (x, y))| x != y)
        .map(|(d, _)| d.name.as_str())
        .collect();
    assert!(!changed.is_empty());
    assert!(
        changed.iter().all(|n| n.starts_with("hdrmax/")),
        "{changed:?}"
    );
}
