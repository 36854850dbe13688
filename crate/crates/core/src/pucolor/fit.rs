//! Five-parameter nonlinearity `h(y; p) = ((p1 + p2 y^p4) / (1 + p3 y^p4))^p5`
//! fitted so that `h(y)/y` approximates tabulated line integrals.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 50;
pub const MIN_R_SQUARED: f64 = 0.999;

/// `ln h(y; p)`; `None` outside the parameter domain (non-positive base).
fn ln_h(y: f64, p: &[f64; 5]) -> Option<f64> {
    let u = y.powf(p[3]);
    let n = p[0] + p[1] * u;
    let d = 1.0 + p[2] * u;
    (n > 0.0 && d > 0.0).then(|| p[4] * (n.ln() - d.ln()))
}

pub fn h(y: f64, p: &[f64; 5]) -> f64 {
    ln_h(y, p).map_or(f64::NAN, f64::exp)
}

/// `h(y)/y`, the per-channel PUColor weight.
pub fn weight(y: f64, p: &[f64; 5]) -> f64 {
    ln_h(y, p).map_or(f64::NAN, |v| (v - y.ln()).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityFit {
    pub params: [f64; 5],
    pub r_squared: f64,
}

/// Internal parameterization `q = (p1, ln p2, ln p3, ln p4, ln p5)` keeps
/// the positive parameters positive without constraints.
fn to_params(q: &[f64; 5]) -> [f64; 5] {
    [q[0], q[1].exp(), q[2].exp(), q[3].exp(), q[4].exp()]
}

struct Problem<'a> {
    ln_y: &'a [f64],
    y: &'a [f64],
    ln_target: &'a [f64],
}

impl Problem<'_> {
    fn residuals(&self, q: &[f64; 5]) -> Option<Vec<f64>> {
        let p = to_params(q);
        self.y
            .iter()
            .zip(self.ln_y)
            .zip(self.ln_target)
            .map(|((&y, &ly), &lt)| ln_h(y, &p).map(|v| v - ly - lt))
            .collect()
    }

    fn cost(&self, q: &[f64; 5]) -> f64 {
        self.residuals(q).map_or(f64::INFINITY, |r| {
            let c: f64 = r.iter().map(|v| v * v).sum();
            if c.is_finite() {
                c
            } else {
                f64::INFINITY
            }
        })
    }

    fn jacobian(&self, q: &[f64; 5]) -> DMatrix<f64> {
        let p = to_params(q);
        DMatrix::from_fn(self.y.len(), 5, |k, j| {
            let (y, ly) = (self.y[k], self.ln_y[k]);
            let u = y.powf(p[3]);
            let n = p[0] + p[1] * u;
            let d = 1.0 + p[2] * u;
            match j {
                0 => p[4] / n,
                1 => p[4] * p[1] * u / n,
                2 => -p[4] * p[2] * u / d,
                3 => p[4] * p[3] * ly * (p[1] * u / n - p[2] * u / d),
                _ => p[4] * (n.ln() - d.ln()),
            }
        })
    }

    fn levenberg_marquardt(&self, mut q: [f64; 5]) -> ([f64; 5], f64) {
        let mut cost = self.cost(&q);
        if !cost.is_finite() {
            return (q, cost);
        }
        let mut mu = 1e-3;
        for _ in 0..400 {
            let r = DVector::from_vec(self.residuals(&q).expect("finite cost implies residuals"));
            let jac = self.jacobian(&q);
            let jt = jac.transpose();
            let a = &jt * &jac;
            let g = &jt * r;
            let mut improved = false;
            while mu < 1e14 {
                let mut m = a.clone();
                for i in 0..5 {
                    m[(i, i)] += mu * (a[(i, i)] + 1e-12);
                }
                let Some(step) = m.lu().solve(&(-&g)) else {
                    mu *= 4.0;
                    continue;
                };
                let cand: [f64; 5] = std::array::from_fn(|i| q[i] + step[i]);
                let c = self.cost(&cand);
                if c < cost {
                    let rel = (cost - c) / cost.max(f64::MIN_POSITIVE);
                    q = cand;
                    cost = c;
                    mu = (mu / 3.0).max(1e-12);
                    improved = rel > 1e-14;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (q, cost)
    }
}

/// Coefficient of determination of `ln(h/y)` against `ln I`. A constant
/// target has no variance to explain; it scores 1 when the RMS log
/// residual is below 1e-4 (0.01%) and 0 otherwise.
fn r_squared(ss_res: f64, ln_target: &[f64]) -> f64 {
    let n = ln_target.len() as f64;
    let mean = ln_target.iter().sum::<f64>() / n;
    let ss_tot: f64 = ln_target.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot <= 1e-12 * n {
        if (ss_res / n).sqrt() <= 1e-4 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Least-squares fit of `h(y; p)/y` to `table` in the log domain. Errors
/// with the best parameters found when `r^2 <= 0.999`.
pub fn fit_nonlinearity(y: &[f64], table: &[f64]) -> Result<NonlinearityFit> {
    if y.len() != table.len() || y.len() < MIN_SAMPLES {
        return Err(Error::Config(format!(
            "nonlinearity fit needs at least {MIN_SAMPLES} paired samples"
        )));
    }
    if y.iter().chain(table).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Config(
            "nonlinearity fit samples must be positive and finite".into(),
        ));
    }
    let ln_y: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let ln_target: Vec<f64> = table.iter().map(|v| v.ln()).collect();
    let problem = Problem {
        ln_y: &ln_y,
        y,
        ln_target: &ln_target,
    };

    let mut best = ([0.0; 5], f64::INFINITY);
    for p4 in [0.05f64, 0.1, 0.2, 0.4, 0.8, 1.5] {
        for p5 in [0.3f64, 0.7, 1.5, 3.0, 6.0] {
            for p3 in [1e-8f64, 1e-3, 1.0] {
                // With p1 = 0 and p3 small, ln h ~ p5 (ln p2 + p4 ln y):
                // choose ln p2 to match the mean level.
                let ln_p2 = ln_y
                    .iter()
                    .zip(&ln_target)
                    .map(|(ly, lt)| (ly + lt) / p5 - p4 * ly)
                    .sum::<f64>()
                    / ln_y.len() as f64;
                let start = [0.0, ln_p2.clamp(-300.0, 300.0), p3.ln(), p4.ln(), p5.ln()];
                let (q, c) = problem.levenberg_marquardt(start);
                if c < best.1 {
                    best = (q, c);
                }
            }
        }
    }
    let params = to_params(&best.0);
    let r2 = if best.1.is_finite() {
        r_squared(best.1, &ln_target)
    } else {
        f64::NEG_INFINITY
    };
    if r2 > MIN_R_SQUARED {
        Ok(NonlinearityFit {
            params,
            r_squared: r2,
        })
    } else {
        Err(Error::FitQuality {
            channel: 0,
            r_squared: r2,
            params,
        })
    }
}
