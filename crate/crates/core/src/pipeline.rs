//! Frame-parallel feature extraction.
//!
//! Stage A (independent per frame): PU encoding, the plain and HDRMAX
//! variants, viewing-distance rescale, CSF-weighted pyramids, MSCN, global
//! NSS and local statistical dissimilarity. Stage B needs the previous
//! frame's pyramids and the last four reference luma planes: wavelet maps,
//! bin weights and the feature vector. Both stages run in parallel over a
//! batch of frames; results are kept in frame order so output does not
//! depend on the worker count.

use std::borrow::Cow;
use std::io::{BufRead, Read, Seek, Write};
use std::marker::PhantomData;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::{
    assemble_frame, cut_measures, pool_video, temporal_stats, BinConfig, BinWeights, FrameInputs,
    Manifest,
};
use crate::error::{Error, Result};
use crate::features::{wavelet_maps, FeatureConfig, MapKind, PyramidSet, QualityMapSet};
use crate::hdrmax::{hdrmax_frame, HdrmaxConfig};
use crate::nss::{global_nss_from, local_stsim, mscn, NssConfig};
use crate::plane::Plane;
use crate::pucolor::{PuCalibration, PuEncoder, PuFrame};
use crate::scalar::Scalar;
use crate::video_io::{
    decode_to_linear, rescale_test_to_reference, ColorConfig, FrameReader, LinearFrame,
};
use crate::wavelet::{
    analyze_chroma, analyze_luma, sast_rescale, CsfWeights, SastConfig, LEVELS, SCALES,
};

/// Frames held for the temporal-complexity measure, current included.
pub const HISTORY: usize = 4;

/// Missing fields in a JSON config take their defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub hdrmax: HdrmaxConfig,
    pub sast: SastConfig,
    pub features: FeatureConfig,
    pub nss: NssConfig,
    pub bins: BinConfig,
    /// Fixed CSF weights; by default derived from the rescaled frame
    /// height and the viewing distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csf: Option<CsfWeights>,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    /// Frames per parallel batch; 0 picks twice the worker count.
    pub batch: usize,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        self.hdrmax.validate()?;
        self.sast.validate()?;
        self.features.validate()?;
        self.bins.validate()?;
        if let Some(csf) = &self.csf {
            csf.validate(LEVELS)?;
        }
        Ok(())
    }
}

/// Stage-A products of one variant (plain or HDRMAX).
pub struct VariantAnalysis<T> {
    pub pyramids: PyramidSet<T>,
    /// `(FOSD, SOSD)` maps per scale.
    pub stsim: Vec<(Plane<T>, Plane<T>)>,
    pub nss: [f64; 7],
}

pub struct FrameAnalysis<T> {
    pub variants: [VariantAnalysis<T>; 2],
    /// Rescaled plain reference luma, for the temporal measure.
    pub ref_luma: Plane<T>,
}

/// Random access to decoded, geometry-matched reference/test frame pairs.
pub trait FramePairs<T> {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&mut self, index: usize) -> Result<(LinearFrame<T>, LinearFrame<T>)>;
}

impl<T: Scalar> FramePairs<T> for Vec<(LinearFrame<T>, LinearFrame<T>)> {
    fn len(&self) -> usize {
        self.as_slice().len()
    }

    fn get(&mut self, index: usize) -> Result<(LinearFrame<T>, LinearFrame<T>)> {
        self.as_slice()
            .get(index)
            .cloned()
            .ok_or_else(|| Error::Config(format!("no frame {index}")))
    }
}

/// Two raw/Y4M streams decoded on demand; the test frame is resampled to
/// the reference geometry.
pub struct VideoPair<R> {
    reference: FrameReader<R>,
    test: FrameReader<R>,
    color: ColorConfig,
    frames: usize,
}

impl<R: Read + Seek> VideoPair<R> {
    pub fn new(
        mut reference: FrameReader<R>,
        mut test: FrameReader<R>,
        color: ColorConfig,
    ) -> Result<Self> {
        let (a, b) = (reference.frame_count()?, test.frame_count()?);
        if a != b {
            return Err(Error::Config(format!(
                "reference has {a} frames but test has {b}"
            )));
        }
        Ok(Self {
            reference,
            test,
            color,
            frames: a,
        })
    }
}

impl<T: Scalar, R: Read + Seek> FramePairs<T> for VideoPair<R> {
    fn len(&self) -> usize {
        self.frames
    }

    fn get(&mut self, index: usize) -> Result<(LinearFrame<T>, LinearFrame<T>)> {
        let r: LinearFrame<T> = decode_to_linear(
            &self.reference.read(index)?,
            self.reference.spec(),
            &self.color,
        )?;
        let t: LinearFrame<T> =
            decode_to_linear(&self.test.read(index)?, self.test.spec(), &self.color)?;
        let t = if (t.width(), t.height()) == (r.width(), r.height()) {
            t
        } else {
            rescale_test_to_reference(&t, r.width(), r.height())
        };
        Ok((r, t))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub decode_seconds: f64,
    pub analysis_seconds: f64,
    pub features_seconds: f64,
    pub total_seconds: f64,
}

/// Per-frame vectors (with their frame indices) and the per-video vector.
#[derive(Clone, Debug, PartialEq)]
pub struct VideoFeatures {
    pub manifest: Manifest,
    pub frames: Vec<(usize, Vec<Option<f64>>)>,
    pub video: Vec<Option<f64>>,
    pub timings: Timings,
}

fn cell(v: &Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl VideoFeatures {
    /// Header `frame,<feature names>`, one row per frame and a final
    /// `video` row; absent values are empty cells. Floats use the shortest
    /// representation that round-trips.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<&str> = std::iter::once("frame")
            .chain(self.manifest.names())
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (i, row) in &self.frames {
            let cells: Vec<String> = row.iter().map(cell).collect();
            writeln!(out, "{i},{}", cells.join(","))?;
        }
        let cells: Vec<String> = self.video.iter().map(cell).collect();
        writeln!(out, "video,{}", cells.join(","))?;
        Ok(())
    }
}

/// A parsed feature CSV: column names and rows keyed by their first cell.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

impl FeatureTable {
    pub fn read_csv<B: BufRead>(input: B) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Assembly("empty feature CSV".into()))??;
        let names: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut cells = line.split(',');
            let key = cells.next().unwrap_or_default().to_string();
            let values = cells
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>()
                            .map(Some)
                            .map_err(|e| Error::Assembly(format!("bad CSV cell '{c}': {e}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != names.len() {
                return Err(Error::Assembly(format!(
                    "row '{key}' has {} of {} cells",
                    values.len(),
                    names.len()
                )));
            }
            rows.push((key, values));
        }
        Ok(Self { names, rows })
    }

    /// The `video` row, checked against `manifest`'s column order.
    pub fn video_row(&self, manifest: &Manifest) -> Result<&[Option<f64>]> {
        if !self.names.iter().map(String::as_str).eq(manifest.names()) {
            return Err(Error::Assembly(
                "CSV columns do not match the feature manifest".into(),
            ));
        }
        self.rows
            .iter()
            .find(|(k, _)| k == "video")
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::Assembly("CSV has no video row".into()))
    }
}

pub struct Engine<T> {
    encoder: PuEncoder,
    cfg: EngineConfig,
    manifest: Manifest,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> Engine<T> {
    pub fn new(calibration: PuCalibration, cfg: EngineConfig) -> Result<Self> {
        calibration.validate()?;
        cfg.validate()?;
        Ok(Self {
            encoder: PuEncoder::new(calibration),
            cfg,
            manifest: Manifest::canonical(),
            _scalar: PhantomData,
        })
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    /// Color configuration the decoder must use to match the calibration.
    pub fn color(&self) -> &ColorConfig {
        &self.encoder.calibration().color
    }

    /// CSF weights for frames `height` pixels tall after rescaling.
    pub fn csf_for(&self, height: usize) -> Cow<'_, CsfWeights> {
        match &self.cfg.csf {
            Some(c) => Cow::Borrowed(c),
            None => {
                let half_angle = (0.5 / self.cfg.sast.viewing_distance).atan().to_degrees();
                Cow::Owned(CsfWeights::watson(
                    height as f64 / (2.0 * half_angle),
                    LEVELS,
                ))
            }
        }
    }

    fn analyze_variant(&self, r: &PuFrame<T>, t: &PuFrame<T>) -> Result<VariantAnalysis<T>> {
        let (r, t) = (
            sast_rescale(r, &self.cfg.sast),
            sast_rescale(t, &self.cfg.sast),
        );
        let csf = self.csf_for(r.height());
        let pyramids = PyramidSet {
            ref_luma: analyze_luma(&r.l, &csf)?,
            test_luma: analyze_luma(&t.l, &csf)?,
            ref_chroma: analyze_chroma(&r.c, &csf)?,
            test_chroma: analyze_chroma(&t.c, &csf)?,
        };
        let (mr, mt) = (
            mscn(&r.l, &self.cfg.nss.mscn),
            mscn(&t.l, &self.cfg.nss.mscn),
        );
        let stsim = (1..=SCALES)
            .map(|s| local_stsim(&mr.mscn, &mt.mscn, s, &self.cfg.nss))
            .collect();
        Ok(VariantAnalysis {
            pyramids,
            stsim,
            nss: global_nss_from(&mt, &self.cfg.nss),
        })
    }

    /// Stage A for one frame pair of equal geometry.
    pub fn analyze(
        &self,
        reference: &LinearFrame<T>,
        test: &LinearFrame<T>,
    ) -> Result<FrameAnalysis<T>> {
        if (reference.width(), reference.height()) != (test.width(), test.height()) {
            return Err(Error::Config(
                "reference and test frames differ in size".into(),
            ));
        }
        let (pr, pt) = (self.encoder.encode(reference), self.encoder.encode(test));
        let (hr, ht) = (
            hdrmax_frame(&pr, &self.cfg.hdrmax),
            hdrmax_frame(&pt, &self.cfg.hdrmax),
        );
        let plain = self.analyze_variant(&pr, &pt)?;
        let hdr = self.analyze_variant(&hr, &ht)?;
        let ref_luma = sast_rescale(&pr, &self.cfg.sast).l;
        Ok(FrameAnalysis {
            variants: [plain, hdr],
            ref_luma,
        })
    }

    fn maps(
        &self,
        cur: &VariantAnalysis<T>,
        prev: Option<&VariantAnalysis<T>>,
    ) -> (QualityMapSet<T>, crate::wavelet::MomentPyramid<T, T>) {
        let wf = wavelet_maps(&cur.pyramids, prev.map(|p| &p.pyramids), &self.cfg.features);
        let mut maps = wf.maps;
        for (scale, (f, s)) in maps.scales.iter_mut().zip(&cur.stsim) {
            scale.insert(MapKind::Fosd, f.clone());
            scale.insert(MapKind::Sosd, s.clone());
        }
        (maps, wf.luma_moments)
    }

    /// Per-scale quality maps of both variants (plain, then HDRMAX).
    pub fn quality_maps(
        &self,
        cur: &FrameAnalysis<T>,
        prev: Option<&FrameAnalysis<T>>,
    ) -> [QualityMapSet<T>; 2] {
        let (plain, _) = self.maps(&cur.variants[0], prev.map(|p| &p.variants[0]));
        let (hdr, _) = self.maps(&cur.variants[1], prev.map(|p| &p.variants[1]));
        [plain, hdr]
    }

    /// Stage B: the feature vector of `cur`. `history` holds the rescaled
    /// plain reference luma of up to the last four frames, `cur` last.
    pub fn frame_features(
        &self,
        cur: &FrameAnalysis<T>,
        prev: Option<&FrameAnalysis<T>>,
        history: &[&Plane<T>],
    ) -> Result<Vec<Option<f64>>> {
        let (plain, moments) = self.maps(&cur.variants[0], prev.map(|p| &p.variants[0]));
        let (hdr, _) = self.maps(&cur.variants[1], prev.map(|p| &p.variants[1]));
        let temporal = temporal_stats(history);
        let bins: Vec<BinWeights> = (1..=SCALES)
            .map(|s| {
                BinWeights::from_measures(
                    &cut_measures(&moments.scales[s - 1], temporal.as_ref(), s),
                    &self.cfg.bins,
                )
            })
            .collect();
        let inputs = FrameInputs {
            maps: [&plain, &hdr],
            bins: &bins,
            nss: [cur.variants[0].nss, cur.variants[1].nss],
        };
        assemble_frame(&self.manifest, &inputs)
    }

    /// Features of frames `range` (half-open; `None` = all). Up to three
    /// frames before the range are analyzed to prime the temporal state.
    pub fn run<S: FramePairs<T>>(
        &self,
        source: &mut S,
        range: Option<(usize, usize)>,
    ) -> Result<VideoFeatures> {
        let total = Instant::now();
        let n = source.len();
        let (start, end) = range.unwrap_or((0, n));
        if start >= end || end > n {
            return Err(Error::Config(format!(
                "frame range {start}:{end} is outside 0:{n}"
            )));
        }
        let mut pool = rayon::ThreadPoolBuilder::new();
        if self.cfg.workers > 0 {
            pool = pool.num_threads(self.cfg.workers);
        }
        let pool = pool
            .build()
            .map_err(|e| Error::Config(format!("cannot start workers: {e}")))?;
        let batch = if self.cfg.batch > 0 {
            self.cfg.batch
        } else {
            2 * pool.current_num_threads()
        }
        .max(1);
        let mut timings = Timings::default();
        let mut rows = Vec::with_capacity(end - start);
        let mut prev: Option<FrameAnalysis<T>> = None;
        let mut history: Vec<Plane<T>> = Vec::new();
        let warm = start.saturating_sub(HISTORY - 1);
        let mut first = warm;
        while first < end {
            let last = (first + batch).min(end);
            let t0 = Instant::now();
            let pairs = (first..last)
                .map(|i| source.get(i))
                .collect::<Result<Vec<_>>>()?;
            timings.decode_seconds += t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let analyses: Vec<FrameAnalysis<T>> = pool.install(|| {
                pairs
                    .par_iter()
                    .map(|(r, t)| self.analyze(r, t))
                    .collect::<Result<_>>()
            })?;
            drop(pairs);
            timings.analysis_seconds += t1.elapsed().as_secs_f64();
            let t2 = Instant::now();
            let batch_rows: Vec<Vec<Option<f64>>> = pool.install(|| {
                (0..analyses.len())
                    .into_par_iter()
                    .map(|j| {
                        let p = if j == 0 {
                            prev.as_ref()
                        } else {
                            Some(&analyses[j - 1])
                        };
                        let planes: Vec<&Plane<T>> = history
                            .iter()
                            .chain(analyses[..=j].iter().map(|a| &a.ref_luma))
                            .collect();
                        let h = &planes[planes.len().saturating_sub(HISTORY)..];
                        self.frame_features(&analyses[j], p, h)
                    })
                    .collect::<Result<_>>()
            })?;
            timings.features_seconds += t2.elapsed().as_secs_f64();
            for (j, row) in batch_rows.into_iter().enumerate() {
                if first + j >= start {
                    rows.push((first + j, row));
                }
            }
            history.extend(analyses.iter().map(|a| a.ref_luma.clone()));
            let keep = history.len().saturating_sub(HISTORY - 1);
            history.drain(..keep);
            prev = analyses.into_iter().last();
            first = last;
        }
        let per_frame: Vec<Vec<Option<f64>>> = rows.iter().map(|(_, r)| r.clone()).collect();
        let video = pool_video(&per_frame, self.manifest.len());
        timings.total_seconds = total.elapsed().as_secs_f64();
        Ok(VideoFeatures {
            manifest: self.manifest.clone(),
            frames: rows,
            video,
            timings,
        })
    }
}
