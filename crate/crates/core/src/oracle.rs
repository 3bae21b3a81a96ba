//! Closed-form Airy beam, its mirror-symmetric autofocusing pair and its
//! spectrum. Used as ground truth for the propagation engine.
//!
//! The paraxial solution with `Ai(Sx) e^{ax}` at `z = 0` and the
//! `e^{+jkz}` carrier is
//!
//! ```text
//! E = E0 Ai(S(x − βz² + j a z/k))
//!       · exp( j[2βkz(x − (2/3)βz²) + a²z/(2k)] + a(x − 2βz²) ),   S = (4βk²)^{1/3}
//! ```
//!
//! evaluated at `(x − x0, z − z0)`. Every phase term carries a factor of z,
//! so the field reduces to `E0 Ai(S(x−x0)) e^{a(x−x0)}` on the plane `z = z0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Medium;
use crate::special::airy_ai_times_exp;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryParams {
    pub beta_per_m: f64,
    #[serde(default)]
    pub alpha_per_m: f64,
    #[serde(default)]
    pub x0_m: f64,
    #[serde(default)]
    pub z0_m: f64,
    #[serde(default = "unit")]
    pub e0: Complex64,
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl AiryParams {
    pub fn new(beta_per_m: f64, alpha_per_m: f64, x0_m: f64, z0_m: f64) -> Result<Self> {
        let p = AiryParams {
            beta_per_m,
            alpha_per_m,
            x0_m,
            z0_m,
            e0: unit(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_amplitude(mut self, e0: Complex64) -> Self {
        self.e0 = e0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_per_m.is_finite() && self.beta_per_m > 0.0) {
            return Err(Error::domain(format!("β must be positive, got {}", self.beta_per_m)));
        }
        if !(self.alpha_per_m.is_finite() && self.alpha_per_m >= 0.0) {
            return Err(Error::domain(format!("α must be non-negative, got {}", self.alpha_per_m)));
        }
        if !(self.x0_m.is_finite() && self.z0_m.is_finite()) {
            return Err(Error::domain("vertex coordinates must be finite"));
        }
        Ok(())
    }

    /// `S = (4βk²)^{1/3}`, the inverse Airy length scale.
    pub fn scale(&self, medium: &Medium) -> f64 {
        (4.0 * self.beta_per_m * medium.k() * medium.k()).cbrt()
    }
}

/// Field value with a flag raised when `Ai · exp` underflowed to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub saturated: bool,
}

/// Airy field at `(x, z)`.
pub fn airy_field(params: &AiryParams, x: f64, z: f64, medium: &Medium) -> Complex64 {
    airy_field_flagged(params, x, z, medium).value
}

pub fn airy_field_flagged(params: &AiryParams, x: f64, z: f64, medium: &Medium) -> OracleValue {
    let k = medium.k();
    let b = params.beta_per_m;
    let a = params.alpha_per_m;
    let s = params.scale(medium);
    let xs = x - params.x0_m;
    let zs = z - params.z0_m;
    let arg = Complex64::new(s * (xs - b * zs * zs), s * a * zs / k);
    let phase = 2.0 * b * k * zs * (xs - (2.0 / 3.0) * b * zs * zs) + a * a * zs / (2.0 * k);
    let w = Complex64::new(a * (xs - 2.0 * b * zs * zs), phase);
    let v = airy_ai_times_exp(arg, w);
    OracleValue {
        value: params.e0 * v,
        saturated: v == Complex64::new(0.0, 0.0),
    }
}

/// Mirror-symmetric pair `E(x − x0, z − z0) + E(−x − x0, z − z0)`.
pub fn aaf_field(params: &AiryParams, x: f64, z: f64, medium: &Medium) -> Complex64 {
    airy_field(params, x, z, medium) + airy_field(params, -x, z, medium)
}

/// Spectrum of the `z = z0` slice,
/// `Ẽ(k_x) = E0 e^{−j k_x x0} / (2S) · exp(j(k_x + ja)³ / (12βk²))`.
///
/// This equals one half of `∫ E(x) e^{−j k_x x} dx`.
pub fn airy_spectrum(params: &AiryParams, k_x: f64, medium: &Medium) -> Result<Complex64> {
    if !(params.alpha_per_m > 0.0) {
        return Err(Error::domain("Airy spectrum needs α > 0 (α = 0 carries infinite power)"));
    }
    let k = medium.k();
    let s = params.scale(medium);
    let j = Complex64::i();
    let q = Complex64::new(k_x, params.alpha_per_m);
    let expo = j * q * q * q / (12.0 * params.beta_per_m * k * k) - j * k_x * params.x0_m;
    Ok(params.e0 * expo.exp() / (2.0 * s))
}

/// Width at half maximum of `|Ẽ(k_x)|²`: `2k√(2β ln2 / α)`.
pub fn airy_spectrum_fwhm(params: &AiryParams, medium: &Medium) -> Result<f64> {
    if !(params.alpha_per_m > 0.0) {
        return Err(Error::domain("spectral width needs α > 0"));
    }
    Ok(2.0 * medium.k() * (2.0 * params.beta_per_m * std::f64::consts::LN_2 / params.alpha_per_m).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::AI_FIRST_MAXIMUM;
    use crate::trajectory::{airy_fwhm, airy_peak_offset};
    use approx::assert_relative_eq;

    fn m150() -> Medium {
        Medium::new(150e9).unwrap()
    }

    #[test]
    fn reduces_to_tapered_airy_at_vertex_plane() {
        let m = m150();
        let p = AiryParams::new(0.002, 4.0, 0.1, 3.0).unwrap();
        let s = p.scale(&m);
        for &x in &[-0.3, -0.05, 0.1, 0.12] {
            let got = airy_field(&p, x, 3.0, &m);
            let want = crate::special::airy_ai_real(s * (x - 0.1)) * (4.0 * (x - 0.1)).exp();
            assert!((got - want).norm() <= 1e-12 * want.abs().max(1e-30), "{got} vs {want}");
        }
    }

    #[test]
    fn peak_sits_at_first_airy_maximum() {
        let m = m150();
        let p = AiryParams::new(0.002, 0.0, 0.0, 0.0).unwrap();
        let s = p.scale(&m);
        let h = 1e-6;
        let xs: Vec<f64> = (0..60000).map(|i| -0.06 + i as f64 * h).collect();
        let best = xs
            .iter()
            .copied()
            .max_by(|a, b| airy_field(&p, *a, 0.0, &m).norm().total_cmp(&airy_field(&p, *b, 0.0, &m).norm()))
            .unwrap();
        assert!((best - AI_FIRST_MAXIMUM / s).abs() < 2.0 * h);
        assert!((best - airy_peak_offset(0.002, &m)).abs() < 0.01 * airy_fwhm(0.002, &m));
    }

    // the width law refers to |E|, not |E|²
    #[test]
    fn main_lobe_width_matches_fwhm_law() {
        let m = m150();
        let p = AiryParams::new(0.002, 0.0, 0.0, 0.0).unwrap();
        let s = p.scale(&m);
        let peak = airy_field(&p, AI_FIRST_MAXIMUM / s, 0.0, &m).norm();
        let half = |x: f64| airy_field(&p, x, 0.0, &m).norm() - 0.5 * peak;
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if half(lo).signum() == half(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let x_peak = AI_FIRST_MAXIMUM / s;
        let right = bisect(x_peak, x_peak + 2.0 / s);
        let left = bisect(x_peak - 1.3 / s, x_peak);
        assert_relative_eq!(right - left, airy_fwhm(0.002, &m), max_relative = 0.02);
    }

    #[test]
    fn satisfies_paraxial_equation() {
        // 2jk ∂E/∂z + ∂²E/∂x² = 0 for the e^{+jkz} carrier
        let m = m150();
        let k = m.k();
        let p = AiryParams::new(0.002, 4.0, -0.1, 2.0).unwrap();
        let (hx, hz) = (2e-5, 2e-3);
        for &(x, z) in &[(0.0, 5.0), (-0.2, 8.0), (0.05, 1.0)] {
            let e = |x: f64, z: f64| airy_field(&p, x, z, &m);
            let ez = (e(x, z + hz) - e(x, z - hz)) / (2.0 * hz);
            let exx = (e(x + hx, z) - 2.0 * e(x, z) + e(x - hx, z)) / (hx * hx);
            let residual = (Complex64::i() * 2.0 * k * ez + exx).norm();
            assert!(residual <= 1e-4 * exx.norm(), "({x},{z}): {residual} vs {}", exx.norm());
        }
    }

    #[test]
    fn main_lobe_is_quasi_invariant_along_parabola() {
        let m = m150();
        let peak_at = |alpha: f64, z: f64| {
            let p = AiryParams::new(0.002, alpha, 0.0, 0.0).unwrap();
            let s = p.scale(&m);
            (0..4000)
                .map(|i| 0.002 * z * z + AI_FIRST_MAXIMUM / s - 0.01 + i as f64 * 5e-6)
                .map(|x| airy_field(&p, x, z, &m).norm())
                .fold(0.0, f64::max)
        };
        let weak = peak_at(0.4, 5.0) / peak_at(0.4, 0.0);
        assert!((weak - 1.0).abs() < 0.05, "{weak}");
        // the taper costs roughly e^{-αβz²} of amplitude along the caustic
        let strong = peak_at(4.0, 5.0) / peak_at(4.0, 0.0);
        assert!((strong - 0.85).abs() < 0.05, "{strong}");
    }

    #[test]
    fn amplitude_is_linear() {
        let m = m150();
        let p = AiryParams::new(0.002, 4.0, 0.0, 0.0).unwrap();
        let q = p.with_amplitude(Complex64::new(2.0, 0.0));
        for &(x, z) in &[(0.0, 0.0), (0.03, 4.0), (-0.4, 9.0)] {
            assert_eq!(airy_field(&q, x, z, &m), airy_field(&p, x, z, &m) * 2.0);
        }
    }

    #[test]
    fn aaf_is_even() {
        let m = m150();
        let p = AiryParams::new(0.002, 0.0, -0.25, 5.0).unwrap();
        for &(x, z) in &[(0.1, 3.0), (0.37, 12.0), (0.01, 16.0)] {
            assert_eq!(aaf_field(&p, x, z, &m), aaf_field(&p, -x, z, &m));
        }
        assert_eq!(aaf_field(&p, 0.0, 7.0, &m), airy_field(&p, 0.0, 7.0, &m) * 2.0);
    }

    #[test]
    fn saturation_is_flagged() {
        let m = m150();
        let p = AiryParams::new(0.002, 0.0, 0.0, 0.0).unwrap();
        let v = airy_field_flagged(&p, 50.0, 0.0, &m);
        assert!(v.saturated && v.value == Complex64::new(0.0, 0.0));
        assert!(!airy_field_flagged(&p, 0.0, 0.0, &m).saturated);
    }

    #[test]
    fn spectrum_at_zero_wavenumber() {
        let m = m150();
        let p = AiryParams::new(0.002, 4.0, 0.0, 0.0).unwrap();
        let s = p.scale(&m);
        let k = m.k();
        let got = airy_spectrum(&p, 0.0, &m).unwrap().norm();
        let want = (64.0 / (12.0 * 0.002 * k * k)).exp() / (2.0 * s);
        assert_relative_eq!(got, want, max_relative = 1e-12);
        assert!(airy_spectrum(&AiryParams::new(0.002, 0.0, 0.0, 0.0).unwrap(), 0.0, &m).is_err());
    }

    #[test]
    fn spectrum_is_gaussian_with_stated_width() {
        let m = m150();
        let p = AiryParams::new(0.002, 4.0, 0.0, 0.0).unwrap();
        let w = airy_spectrum_fwhm(&p, &m).unwrap();
        let p0 = airy_spectrum(&p, 0.0, &m).unwrap().norm_sqr();
        let ph = airy_spectrum(&p, 0.5 * w, &m).unwrap().norm_sqr();
        assert_relative_eq!(ph / p0, 0.5, max_relative = 1e-12);
        assert_relative_eq!(w / m.k(), 0.0527, max_relative = 2e-3);
    }

    #[test]
    fn spectrum_matches_discrete_transform() {
        let m = m150();
        let p = AiryParams::new(0.002, 4.0, 0.02, 0.0).unwrap();
        let dx = m.lambda() / 4.0;
        let xs: Vec<f64> = (0..8000).map(|i| -3.5 + i as f64 * dx).collect();
        let field: Vec<Complex64> = xs.iter().map(|&x| airy_field(&p, x, 0.0, &m)).collect();
        let bw = airy_spectrum_fwhm(&p, &m).unwrap();
        let mut err = 0.0;
        let mut norm = 0.0;
        for i in -40..=40 {
            let kx = i as f64 * bw / 20.0;
            let num: Complex64 = xs
                .iter()
                .zip(&field)
                .map(|(&x, &e)| e * Complex64::from_polar(1.0, -kx * x))
                .sum::<Complex64>()
                * (0.5 * dx);
            let ana = airy_spectrum(&p, kx, &m).unwrap();
            err += (num - ana).norm_sqr();
            norm += ana.norm_sqr();
        }
        let rel = (err / norm).sqrt();
        assert!(rel < 0.01, "relative L2 {rel}");
    }
}
