//! Closed-form KL divergences between fitted densities, evaluated through
//! log-gamma to stay finite over the whole clamped parameter box.

use statrs::function::gamma::ln_gamma;

use super::fit::{AggdParams, GgdParams};

/// First-order statistical dissimilarity `KL(p1 || p2)` between GGDs.
pub fn fosd(p1: &GgdParams, p2: &GgdParams) -> f64 {
    if p1 == p2 {
        return 0.0;
    }
    let (a1, b1, a2, b2) = (p1.alpha, p1.b, p2.alpha, p2.b);
    let lg1 = ln_gamma(1.0 / a1);
    let moment = (ln_gamma((a2 + 1.0) / a1) - lg1 + a2 * (b1 / b2).ln()).exp();
    let log_norm = a1.ln() + b2.ln() + ln_gamma(1.0 / a2) - a2.ln() - b1.ln() - lg1;
    (moment - 1.0 / a1 + log_norm).max(0.0)
}

/// Second-order statistical dissimilarity `KL(p1 || p2)` between AGGDs.
pub fn sosd(p1: &AggdParams, p2: &AggdParams) -> f64 {
    if p1 == p2 {
        return 0.0;
    }
    let (a1, l1, r1) = (p1.alpha, p1.b_left, p1.b_right);
    let (a2, l2, r2) = (p2.alpha, p2.b_left, p2.b_right);
    let lg1 = ln_gamma(1.0 / a1);
    let base = ln_gamma((a2 + 1.0) / a1) - lg1 - (l1 + r1).ln();
    let side = |b1: f64, b2: f64| (base + (a2 + 1.0) * b1.ln() - a2 * b2.ln()).exp();
    let log_norm = a1.ln() + (l2 + r2).ln() + ln_gamma(1.0 / a2) - a2.ln() - (l1 + r1).ln() - lg1;
    (side(l1, l2) + side(r1, r2) - 1.0 / a1 + log_norm).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_params_have_zero_divergence() {
        let g = GgdParams { alpha: 0.8, b: 1.7 };
        assert!(fosd(&g, &g).abs() < 1e-12);
        let a = AggdParams {
            alpha: 1.3,
            b_left: 0.4,
            b_right: 2.0,
        };
        assert!(sosd(&a, &a).abs() < 1e-12);
    }

    #[test]
    fn gaussian_reduction() {
        for (b1, b2) in [(1.0f64, 2.0f64), (0.3, 0.25), (5.0, 0.7)] {
            let (s1, s2) = (b1 / 2f64.sqrt(), b2 / 2f64.sqrt());
            let kl = s1 * s1 / (2.0 * s2 * s2) - 0.5 + (s2 / s1).ln();
            let got = fosd(
                &GgdParams { alpha: 2.0, b: b1 },
                &GgdParams { alpha: 2.0, b: b2 },
            );
            assert!((got - kl).abs() < 1e-12, "{got} vs {kl}");
        }
    }

    #[test]
    fn symmetric_aggd_matches_ggd() {
        let (p, q) = (
            GgdParams { alpha: 1.4, b: 0.9 },
            GgdParams { alpha: 0.6, b: 2.2 },
        );
        let sym = |g: &GgdParams| AggdParams {
            alpha: g.alpha,
            b_left: g.b,
            b_right: g.b,
        };
        assert!((sosd(&sym(&p), &sym(&q)) - fosd(&p, &q)).abs() < 1e-12);
    }
}
