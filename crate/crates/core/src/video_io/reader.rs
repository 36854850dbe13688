//! Planar YCbCr readers and writers for raw `.yuv` and YUV4MPEG2 (`.y4m`)
//! streams.

use std::io::{Read, Seek, SeekFrom, Write};

use super::{ChromaSubsampling, RawFrame, VideoSpec};
use crate::error::{Error, Result};

const Y4M_MAGIC: &[u8] = b"YUV4MPEG2";
const MAX_HEADER: usize = 4096;

/// Geometry and sample format declared by a YUV4MPEG2 stream header.
#[derive(Clone, Debug, PartialEq)]
pub struct Y4mHeader {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    pub chroma: ChromaSubsampling,
    pub frame_rate: Option<f64>,
    /// Byte length of the header line including the trailing newline.
    pub len: u64,
}

impl Y4mHeader {
    pub fn parse(line: &str) -> Result<Self> {
        let mut tokens = line.split_ascii_whitespace();
        if tokens.next() != Some("YUV4MPEG2") {
            return Err(Error::Decode("missing YUV4MPEG2 magic".into()));
        }
        let (mut width, mut height, mut frame_rate) = (None, None, None);
        let (mut bit_depth, mut chroma) = (8, ChromaSubsampling::Yuv420);
        for tok in tokens {
            let (tag, val) = tok.split_at(1);
            match tag {
                "W" => width = val.parse().ok(),
                "H" => height = val.parse().ok(),
                "F" => {
                    if let Some((n, d)) = val.split_once(':') {
                        if let (Ok(n), Ok(d)) = (n.parse::<f64>(), d.parse::<f64>()) {
                            if d > 0.0 {
                                frame_rate = Some(n / d);
                            }
                        }
                    }
                }
                "C" => {
                    (chroma, bit_depth) = match val {
                        "420" | "420jpeg" | "420paldv" | "420mpeg2" => {
                            (ChromaSubsampling::Yuv420, 8)
                        }
                        "420p10" => (ChromaSubsampling::Yuv420, 10),
                        "420p12" => (ChromaSubsampling::Yuv420, 12),
                        "444" => (ChromaSubsampling::Yuv444, 8),
                        "444p10" => (ChromaSubsampling::Yuv444, 10),
                        "444p12" => (ChromaSubsampling::Yuv444, 12),
                        other => {
                            return Err(Error::Config(format!(
                                "unsupported y4m colorspace C{other}"
                            )))
                        }
                    }
                }
                _ => {}
            }
        }
        match (width, height) {
            (Some(width), Some(height)) => Ok(Self {
                width,
                height,
                bit_depth,
                chroma,
                frame_rate,
                len: line.len() as u64 + 1,
            }),
            _ => Err(Error::Decode("y4m header lacks W/H".into())),
        }
    }

    fn tag(&self) -> String {
        let base = match self.chroma {
            ChromaSubsampling::Yuv420 => "420",
            ChromaSubsampling::Yuv444 => "444",
        };
        match (self.bit_depth, self.chroma) {
            (8, ChromaSubsampling::Yuv420) => "420jpeg".to_string(),
            (8, _) => base.to_string(),
            (d, _) => format!("{base}p{d}"),
        }
    }

    /// Copies geometry and sample format into `spec`.
    pub fn apply_to(&self, spec: &mut VideoSpec) {
        spec.width = self.width;
        spec.height = self.height;
        spec.bit_depth = self.bit_depth;
        spec.chroma_subsampling = self.chroma;
        if let Some(fps) = self.frame_rate {
            spec.frame_rate = fps;
        }
    }

    /// Errors when the header disagrees with a declared spec.
    pub fn check_against(&self, spec: &VideoSpec) -> Result<()> {
        let mismatch = |what: &str, header: String, declared: String| {
            Err(Error::Config(format!(
                "y4m header {what} {header} conflicts with declared {declared}"
            )))
        };
        if (self.width, self.height) != (spec.width, spec.height) {
            return mismatch(
                "size",
                format!("{}x{}", self.width, self.height),
                format!("{}x{}", spec.width, spec.height),
            );
        }
        if self.bit_depth != spec.bit_depth {
            return mismatch("C", self.tag(), format!("bit depth {}", spec.bit_depth));
        }
        if self.chroma != spec.chroma_subsampling {
            return mismatch("C", self.tag(), format!("{:?}", spec.chroma_subsampling));
        }
        Ok(())
    }
}

/// Reads the y4m header if the stream starts with one; rewinds otherwise.
pub fn probe_y4m<R: Read + Seek>(stream: &mut R) -> Result<Option<Y4mHeader>> {
    stream.seek(SeekFrom::Start(0))?;
    let mut magic = [0u8; 9];
    let n = read_up_to(stream, &mut magic)?;
    stream.seek(SeekFrom::Start(0))?;
    if n < magic.len() || magic != Y4M_MAGIC {
        return Ok(None);
    }
    let line = read_line(stream, 0)?;
    Y4mHeader::parse(&line).map(Some)
}

fn read_up_to<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..])? {
            0 => break,
            n => filled += n,
        }
    }
    Ok(filled)
}

fn read_line<R: Read + Seek>(r: &mut R, at: u64) -> Result<String> {
    r.seek(SeekFrom::Start(at))?;
    let mut out = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        if r.read(&mut byte)? == 0 {
            return Err(Error::Truncated {
                offset: at + out.len() as u64,
                needed: 1,
                frame: 0,
            });
        }
        if byte[0] == b'\n' {
            break;
        }
        out.push(byte[0]);
        if out.len() > MAX_HEADER {
            return Err(Error::Decode(format!(
                "unterminated y4m header line at byte {at}"
            )));
        }
    }
    String::from_utf8(out).map_err(|_| Error::Decode(format!("non-ASCII y4m header at byte {at}")))
}

/// Random-access frame reader over a raw or y4m planar stream.
pub struct FrameReader<R> {
    inner: R,
    spec: VideoSpec,
    y4m: Option<Y4mHeader>,
    /// Payload offsets of the y4m frames discovered so far.
    payloads: Vec<u64>,
}

impl<R: Read + Seek> FrameReader<R> {
    /// Opens a stream laid out per `spec`. A y4m header, when present, must
    /// agree with the declared geometry and sample format.
    pub fn new(mut inner: R, spec: VideoSpec) -> Result<Self> {
        spec.validate()?;
        let y4m = probe_y4m(&mut inner)?;
        if let Some(h) = &y4m {
            h.check_against(&spec)?;
        }
        Ok(Self {
            inner,
            spec,
            y4m,
            payloads: Vec::new(),
        })
    }

    /// Opens a y4m stream, taking geometry from its header and the
    /// remaining fields (transfer, gamut, range, peak) from `base`.
    pub fn from_y4m(mut inner: R, mut base: VideoSpec) -> Result<Self> {
        let header = probe_y4m(&mut inner)?
            .ok_or_else(|| Error::Decode("stream has no y4m header".into()))?;
        header.apply_to(&mut base);
        Self::new(inner, base)
    }

    pub fn spec(&self) -> &VideoSpec {
        &self.spec
    }

    fn payload_offset(&mut self, index: usize) -> Result<u64> {
        let frame_bytes = self.spec.frame_bytes() as u64;
        let Some(header) = &self.y4m else {
            return Ok(index as u64 * frame_bytes);
        };
        let mut next = match self.payloads.last() {
            Some(&p) => p + frame_bytes,
            None => header.len,
        };
        while self.payloads.len() <= index {
            let frame = self.payloads.len();
            let line = read_line(&mut self.inner, next).map_err(|e| match e {
                Error::Truncated { offset, needed, .. } => Error::Truncated {
                    offset,
                    needed,
                    frame,
                },
                other => other,
            })?;
            if !line.starts_with("FRAME") {
                return Err(Error::Decode(format!(
                    "expected FRAME marker at byte {next}"
                )));
            }
            let payload = next + line.len() as u64 + 1;
            self.payloads.push(payload);
            next = payload + frame_bytes;
        }
        Ok(self.payloads[index])
    }

    /// Reads frame `index` and upsamples 4:2:0 chroma to full resolution by
    /// nearest-neighbor replication.
    pub fn read(&mut self, index: usize) -> Result<RawFrame> {
        let offset = self.payload_offset(index)?;
        let frame_bytes = self.spec.frame_bytes();
        self.inner.seek(SeekFrom::Start(offset))?;
        let mut buf = vec![0u8; frame_bytes];
        let got = read_up_to(&mut self.inner, &mut buf)?;
        if got < frame_bytes {
            return Err(Error::Truncated {
                offset: offset + got as u64,
                needed: (frame_bytes - got) as u64,
                frame: index,
            });
        }
        Ok(unpack(&buf, &self.spec))
    }

    /// Number of complete frames in the stream.
    pub fn frame_count(&mut self) -> Result<usize> {
        let end = self.inner.seek(SeekFrom::End(0))?;
        let frame_bytes = self.spec.frame_bytes() as u64;
        if self.y4m.is_none() {
            return Ok((end / frame_bytes) as usize);
        }
        let mut n = self.payloads.len();
        loop {
            match self.payload_offset(n) {
                Ok(p) if p + frame_bytes <= end => n += 1,
                Ok(_) | Err(Error::Truncated { .. }) => return Ok(n),
                Err(e) => return Err(e),
            }
        }
    }
}

/// Reads a single frame from `stream` laid out per `spec`.
pub fn read_frame<R: Read + Seek>(
    stream: &mut R,
    spec: &VideoSpec,
    index: usize,
) -> Result<RawFrame> {
    FrameReader::new(stream, spec.clone())?.read(index)
}

fn unpack(buf: &[u8], spec: &VideoSpec) -> RawFrame {
    let (w, h) = (spec.width, spec.height);
    let (cw, ch) = spec.chroma_dims();
    let wide = spec.bit_depth > 8;
    let sample = |i: usize| -> u16 {
        if wide {
            u16::from_le_bytes([buf[2 * i], buf[2 * i + 1]])
        } else {
            buf[i] as u16
        }
    };
    let luma: Vec<u16> = (0..w * h).map(sample).collect();
    let chroma = |plane: usize| -> Vec<u16> {
        let base = w * h + plane * cw * ch;
        let mut out = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let (sx, sy) = match spec.chroma_subsampling {
                    ChromaSubsampling::Yuv420 => (x / 2, y / 2),
                    ChromaSubsampling::Yuv444 => (x, y),
                };
                out.push(sample(base + sy * cw + sx));
            }
        }
        out
    };
    RawFrame {
        width: w,
        height: h,
        bit_depth: spec.bit_depth,
        y: luma,
        cb: chroma(0),
        cr: chroma(1),
    }
}

pub fn write_y4m_header<W: Write>(out: &mut W, spec: &VideoSpec) -> Result<()> {
    let header = Y4mHeader {
        width: spec.width,
        height: spec.height,
        bit_depth: spec.bit_depth,
        chroma: spec.chroma_subsampling,
        frame_rate: None,
        len: 0,
    };
    let fps = (spec.frame_rate * 1000.0).round() as u64;
    writeln!(
        out,
        "YUV4MPEG2 W{} H{} F{}:1000 Ip A1:1 C{}",
        spec.width,
        spec.height,
        fps,
        header.tag()
    )?;
    Ok(())
}

/// Writes one full-resolution frame. 4:2:0 chroma keeps the top-left sample
/// of each 2x2 block, the inverse of the reader's replication.
pub fn write_frame<W: Write>(
    out: &mut W,
    frame: &RawFrame,
    spec: &VideoSpec,
    y4m: bool,
) -> Result<()> {
    if (frame.width, frame.height) != (spec.width, spec.height) {
        return Err(Error::Config("frame size does not match spec".into()));
    }
    if y4m {
        out.write_all(b"FRAME\n")?;
    }
    let (cw, ch) = spec.chroma_dims();
    let mut bytes = Vec::with_capacity(spec.frame_bytes());
    let mut push = |v: u16| {
        if spec.bit_depth > 8 {
            bytes.extend_from_slice(&v.to_le_bytes());
        } else {
            bytes.push(v as u8);
        }
    };
    frame.y.iter().for_each(|&v| push(v));
    for plane in [&frame.cb, &frame.cr] {
        for y in 0..ch {
            for x in 0..cw {
                let (sx, sy) = match spec.chroma_subsampling {
                    ChromaSubsampling::Yuv420 => (2 * x, 2 * y),
                    ChromaSubsampling::Yuv444 => (x, y),
                };
                push(plane[sy * spec.width + sx]);
            }
        }
    }
    out.write_all(&bytes)?;
    Ok(())
}
