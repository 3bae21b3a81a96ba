//! Airy function of the first kind for complex argument.
//!
//! Three regimes:
//!
//! * `|z| <= 5`: Maclaurin series `Ai = c1 f(z) - c2 g(z)`.
//! * `Re z >= 0`, `|z| > 5`: decaying asymptotic expansion in `ζ = (2/3) z^{3/2}`.
//! * `Re z < 0`: series up to `|z| = 9`, oscillatory expansion of `Ai(-w)` beyond.
//!
//! Relative accuracy is about 1e-9 except right at the `|z| = 5` seam of the
//! decaying sector where the asymptotic tail limits it to roughly 1e-6.
//!
//! [`airy_ai_times_exp`] folds an external exponential into the asymptotic
//! branches so that `Ai(z) e^{w}` stays finite when each factor alone would
//! overflow or underflow.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use std::f64::consts::PI;

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = 0.258_819_403_792_806_8;

const SERIES_RADIUS: f64 = 5.0;
const SERIES_RADIUS_LEFT: f64 = 9.0;
const MAX_TERMS: usize = 200;

/// Location of the first (global) maximum of Ai on the negative real axis.
pub const AI_FIRST_MAXIMUM: f64 = -1.018_792_971_647_471;

/// Ai(z).
pub fn airy_ai(z: Complex64) -> Complex64 {
    airy_ai_times_exp(z, Complex64::new(0.0, 0.0))
}

/// Ai(z) for real argument.
pub fn airy_ai_real(x: f64) -> f64 {
    airy_ai(Complex64::new(x, 0.0)).re
}

/// Ai(z)·exp(w), evaluated without forming either factor separately in the
/// asymptotic regions. Returns zero when the product underflows.
pub fn airy_ai_times_exp(z: Complex64, w: Complex64) -> Complex64 {
    let r = z.norm();
    if r <= SERIES_RADIUS || (z.re < 0.0 && r <= SERIES_RADIUS_LEFT) {
        return maclaurin(z) * safe_exp(w);
    }
    if z.re >= 0.0 {
        decaying(z, w)
    } else {
        oscillatory(-z, w)
    }
}

fn safe_exp(w: Complex64) -> Complex64 {
    if w.re < -745.0 {
        Complex64::new(0.0, 0.0)
    } else {
        w.exp()
    }
}

fn maclaurin(z: Complex64) -> Complex64 {
    let z3 = z * z * z;
    let mut f = Complex64::new(1.0, 0.0);
    let mut g = z;
    let mut tf = f;
    let mut tg = g;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        tf = tf * z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg = tg * z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        f += tf;
        g += tg;
        if tf.norm() <= 1e-18 * f.norm().max(1e-300) && tg.norm() <= 1e-18 * g.norm().max(1e-300) {
            break;
        }
    }
    f * AI0 - g * AIP0
}

/// Coefficients u_k of the Airy asymptotic expansions (DLMF 9.7.2).
fn u_coefficients(n: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(n);
    u.push(1.0);
    for k in 1..n {
        let kf = k as f64;
        let prev = u[k - 1];
        u.push(
            prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf),
        );
    }
    u
}

/// Sums Σ s_k u_k ζ^{-k} with optimal truncation; `sign_pattern` gives s_k.
fn asymptotic_sum(zeta: Complex64, take: impl Fn(usize) -> Option<f64>) -> Complex64 {
    let u = u_coefficients(64);
    let inv = zeta.inv();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for (k, uk) in u.iter().enumerate() {
        if k > 0 {
            power *= inv;
        }
        if let Some(sign) = take(k) {
            let term = power * (sign * uk);
            let m = term.norm();
            if m > last {
                break;
            }
            sum += term;
            last = m;
            if m <= 1e-17 * sum.norm() {
                break;
            }
        }
    }
    sum
}

fn decaying(z: Complex64, w: Complex64) -> Complex64 {
    let sqrt_z = z.sqrt();
    let zeta = z * sqrt_z * (2.0 / 3.0);
    let series = asymptotic_sum(zeta, |k| Some(if k % 2 == 0 { 1.0 } else { -1.0 }));
    let pref = 1.0 / (2.0 * PI.sqrt()) / sqrt_z.sqrt();
    safe_exp(w - zeta) * pref * series
}

fn oscillatory(v: Complex64, w: Complex64) -> Complex64 {
    // Ai(-v) ~ [cos(ζ - π/4) P(ζ) + sin(ζ - π/4) Q(ζ)] / (√π v^{1/4})
    let sqrt_v = v.sqrt();
    let zeta = v * sqrt_v * (2.0 / 3.0);
    let p = asymptotic_sum(zeta, |k| {
        (k % 2 == 0).then(|| if (k / 2) % 2 == 0 { 1.0 } else { -1.0 })
    });
    let q = asymptotic_sum(zeta, |k| {
        (k % 2 == 1).then(|| if (k / 2) % 2 == 0 { 1.0 } else { -1.0 })
    });
    let theta = zeta - PI / 4.0;
    let i = Complex64::i();
    // cos θ = (e^{iθ} + e^{-iθ})/2, sin θ = (e^{iθ} - e^{-iθ})/(2i)
    let plus = safe_exp(w + i * theta);
    let minus = safe_exp(w - i * theta);
    let cos_part = (plus + minus) * 0.5;
    let sin_part = (plus - minus) / (2.0 * i);
    (cos_part * p + sin_part * q) / (PI.sqrt() * sqrt_v.sqrt())
}
