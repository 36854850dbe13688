//! Video layouts from `--ref-spec`/`--test-spec`: a JSON file holding a
//! full layout, or comma-separated `key=value` overrides of a preset.

use std::path::Path;

use anyhow::{bail, Context, Result};
use cutfunque::video_io::{ChromaSubsampling, CodeRange, Gamut, Transfer, VideoSpec};

pub const KEYS: &str =
    "preset, width, height, bit_depth, chroma, transfer, gamut, range, fps, peak";

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| anyhow::anyhow!("invalid value '{v}' for '{key}'"))
}

/// Presets: `hdr10` (default), `hlg`, `sdr`. A missing width/height stays 0,
/// which only y4m input (whose header supplies it) accepts.
pub fn parse(text: &str) -> Result<VideoSpec> {
    let text = text.trim();
    if !text.contains('=') && !text.is_empty() {
        let path = Path::new(text);
        let json = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read layout {}", path.display()))?;
        return serde_json::from_str(&json).with_context(|| format!("layout {}", path.display()));
    }
    let pairs: Vec<(&str, &str)> = text
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .context(format!("expected key=value, got '{p}'"))
        })
        .collect::<Result<_>>()?;
    let mut spec = match pairs.iter().find(|(k, _)| *k == "preset").map(|(_, v)| *v) {
        None | Some("hdr10") => VideoSpec::hdr10(0, 0),
        Some("hlg") => VideoSpec::hlg(0, 0),
        Some("sdr") => VideoSpec::sdr(0, 0),
        Some(other) => bail!("unknown preset '{other}' (hdr10, hlg, sdr)"),
    };
    for (k, v) in pairs {
        match k {
            "preset" => {}
            "width" => spec.width = parse_num(k, v)?,
            "height" => spec.height = parse_num(k, v)?,
            "size" => {
                let (w, h) = v.split_once('x').context("size must be WxH")?;
                spec.width = parse_num(k, w)?;
                spec.height = parse_num(k, h)?;
            }
            "bit_depth" | "bits" => spec.bit_depth = parse_num(k, v)?,
            "chroma" => {
                spec.chroma_subsampling = match v {
                    "420" => ChromaSubsampling::Yuv420,
                    "444" => ChromaSubsampling::Yuv444,
                    _ => bail!("chroma must be 420 or 444"),
                }
            }
            "transfer" => {
                spec.transfer = match v {
                    "pq" => Transfer::Pq,
                    "hlg" => Transfer::Hlg,
                    "bt1886" => Transfer::Bt1886,
                    _ => bail!("transfer must be pq, hlg or bt1886"),
                }
            }
            "gamut" => {
                spec.gamut = match v {
                    "bt709" => Gamut::Bt709,
                    "bt2020" => Gamut::Bt2020,
                    _ => bail!("gamut must be bt709 or bt2020"),
                }
            }
            "range" => {
                spec.range = match v {
                    "limited" => CodeRange::Limited,
                    "full" => CodeRange::Full,
                    _ => bail!("range must be limited or full"),
                }
            }
            "fps" => spec.frame_rate = parse_num(k, v)?,
            "peak" => spec.peak_luminance = parse_num(k, v)?,
            _ => bail!("unknown layout key '{k}' (expected one of: {KEYS})"),
        }
    }
    Ok(spec)
}
