//! Electro-optical transfer functions. All functions map a normalized
//! non-linear signal in `[0, 1]` to linear light.

/// SMPTE ST 2084 constants.
const PQ_M1: f64 = 2610.0 / 16384.0;
const PQ_M2: f64 = 2523.0 / 4096.0 * 128.0;
const PQ_C1: f64 = 3424.0 / 4096.0;
const PQ_C2: f64 = 2413.0 / 4096.0 * 32.0;
const PQ_C3: f64 = 2392.0 / 4096.0 * 32.0;

/// Absolute peak of the PQ signal range, in nits.
pub const PQ_PEAK_NITS: f64 = 10_000.0;

/// BT.2100 HLG constants.
const HLG_A: f64 = 0.178_832_77;
const HLG_B: f64 = 0.284_668_92;
const HLG_C: f64 = 0.559_910_73;

/// PQ EOTF: signal to absolute luminance in nits.
#[inline]
pub fn pq_eotf(e: f64) -> f64 {
    let e = e.clamp(0.0, 1.0);
    let p = e.powf(1.0 / PQ_M2);
    let num = (p - PQ_C1).max(0.0);
    let den = PQ_C2 - PQ_C3 * p;
    PQ_PEAK_NITS * (num / den).powf(1.0 / PQ_M1)
}

/// Inverse PQ EOTF: absolute nits to signal.
#[inline]
pub fn pq_inverse_eotf(nits: f64) -> f64 {
    let y = (nits / PQ_PEAK_NITS).clamp(0.0, 1.0);
    let p = y.powf(PQ_M1);
    ((PQ_C1 + PQ_C2 * p) / (1.0 + PQ_C3 * p)).powf(PQ_M2)
}

/// HLG inverse OETF: signal to normalized scene light in `[0, 1]`.
#[inline]
pub fn hlg_inverse_oetf(e: f64) -> f64 {
    let e = e.clamp(0.0, 1.0);
    if e <= 0.5 {
        e * e / 3.0
    } else {
        (((e - HLG_C) / HLG_A).exp() + HLG_B) / 12.0
    }
}

/// HLG system gamma for a display of nominal peak `peak` nits.
#[inline]
pub fn hlg_gamma(peak: f64) -> f64 {
    1.2 + 0.42 * (peak / 1000.0).log10()
}

/// BT.1886 EOTF with zero black level: signal to nits.
#[inline]
pub fn bt1886_eotf(e: f64, peak: f64) -> f64 {
    peak * e.clamp(0.0, 1.0).powf(2.4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pq_roundtrip_and_anchors() {
        assert_eq!(pq_eotf(0.0), 0.0);
        assert!((pq_eotf(1.0) - 10_000.0).abs() < 1e-6);
        // 100 nits sits at code ~520/1023 in full-range 10-bit.
        let e = pq_inverse_eotf(100.0);
        assert!((e * 1023.0 - 520.0).abs() < 0.5, "{}", e * 1023.0);
        for nits in [0.01, 1.0, 203.0, 1000.0, 4000.0] {
            assert!((pq_eotf(pq_inverse_eotf(nits)) / nits - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hlg_is_continuous_at_knee() {
        let lo = hlg_inverse_oetf(0.5);
        let hi = hlg_inverse_oetf(0.5 + 1e-9);
        assert!((lo - 1.0 / 12.0).abs() < 1e-12);
        assert!((hi - lo).abs() < 1e-6);
        assert!((hlg_inverse_oetf(1.0) - 1.0).abs() < 1e-6);
        assert!((hlg_gamma(1000.0) - 1.2).abs() < 1e-12);
    }
}
