use cutfunque::video_io::ColorConfig;
use cutfunque::video_io::{
    decode_to_linear, ChromaSubsampling, CodeRange, RawFrame, Transfer, VideoSpec,
};
use proptest::prelude::*;

/// Inverse PQ EOTF written from the ST 2084 constants.
fn pq_signal(nits: f64) -> f64 {
    let (m1, m2) = (0.1593017578125, 78.84375);
    let (c1, c2, c3) = (0.8359375, 18.8515625, 18.6875);
    let y = (nits / 10_000.0).powf(m1);
    ((c1 + c2 * y) / (1.0 + c3 * y)).powf(m2)
}

fn spec(transfer: Transfer, bit_depth: u8) -> VideoSpec {
    VideoSpec {
        chroma_subsampling: ChromaSubsampling::Yuv444,
        range: CodeRange::Full,
        bit_depth,
        transfer,
        ..VideoSpec::hdr10(2, 2)
    }
}

fn neutral(y: u16, depth: u8) -> RawFrame {
    let mid = 1u16 << (depth - 1);
    RawFrame {
        width: 2,
        height: 2,
        bit_depth: depth,
        y: vec![y; 4],
        cb: vec![mid; 4],
        cr: vec![mid; 4],
    }
}

fn luminance(frame: &RawFrame, spec: &VideoSpec) -> f64 {
    let f = decode_to_linear::<f64>(frame, spec, &ColorConfig::default()).unwrap();
    f.l.get(0, 0) + f.m.get(0, 0)
}

/// Decoding inverts the oracle exactly in the signal domain; in luminance
/// the 12-bit code step itself exceeds 1% below about 0.05 nits, so the
/// 0.5% bound is checked against the quantization error there.
#[test]
fn pq_round_trip_within_half_percent() {
    let s = spec(Transfer::Pq, 12);
    let max = 4095.0;
    for k in 0..=60 {
        let nits = 0.01 * 10f64.powf(6.0 * k as f64 / 60.0);
        let code = (pq_signal(nits) * max).round() as u16;
        let got = luminance(&neutral(code, 12), &s);
        assert!(
            (pq_signal(got) - code as f64 / max).abs() < 1e-9,
            "{nits}: signal mismatch"
        );
        let step = |c: f64| {
            let (a, b) = (
                luminance(&neutral(c as u16, 12), &s),
                luminance(&neutral(c as u16 + 1, 12), &s),
            );
            (b / a - 1.0) / 2.0
        };
        let bound = 5e-3f64.max(step(code as f64));
        assert!(
            (got / nits - 1.0).abs() <= bound,
            "{nits}: {got} (bound {bound})"
        );
    }
}

#[test]
fn bt1886_round_trip_within_half_percent() {
    let s = VideoSpec {
        peak_luminance: 100.0,
        ..spec(Transfer::Bt1886, 12)
    };
    for k in 0..=40 {
        let nits = 0.5 * 10f64.powf(2.3 * k as f64 / 40.0);
        let code = ((nits / 100.0).powf(1.0 / 2.4) * 4095.0).round() as u16;
        let got = luminance(&neutral(code, 12), &s);
        assert!((got / nits - 1.0).abs() < 5e-3, "{nits}: {got}");
    }
}

proptest! {
    #[test]
    fn decode_is_monotone_in_luma(a in 0u16..1024, b in 0u16..1024, cb in 0u16..1024, cr in 0u16..1024, t in 0usize..3) {
        let transfer = [Transfer::Pq, Transfer::Hlg, Transfer::Bt1886][t];
        let s = VideoSpec { range: CodeRange::Limited, ..spec(transfer, 10) };
        let (lo, hi) = (a.min(b), a.max(b));
        let frame = |y| RawFrame { width: 2, height: 2, bit_depth: 10, y: vec![y; 4], cb: vec![cb; 4], cr: vec![cr; 4] };
        prop_assert!(luminance(&frame(lo), &s) <= luminance(&frame(hi), &s) + 1e-9);
    }
}
