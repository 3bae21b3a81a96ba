//! Discrete arrays: sampled phases, codewords, quantization, sub-array masks
//! and the zero-order-hold aperture field of a codeword.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::footprint::AmplitudeWindow;
use crate::grid::{FieldSlice, Grid, Medium};
use crate::trajectory::PhaseProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitDepth {
    Continuous,
    Bits(u32),
}

/// Uniform linear array along x with elements at `x = n·d`,
/// `n = −N_x+1, …, 0`. A planar array repeats every column `N_y` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub spacing_m: f64,
    pub nx: usize,
    #[serde(default = "one")]
    pub ny: usize,
    pub bit_depth: BitDepth,
    /// One flag per column; a masked column is off along all of y.
    pub active: Vec<bool>,
    /// Width of each element's patch; `None` means `min(d, λ/2)`.
    #[serde(default)]
    pub element_width_m: Option<f64>,
}

fn one() -> usize {
    1
}

impl ArrayConfig {
    pub fn new(spacing_m: f64, nx: usize) -> Result<Self> {
        let cfg = ArrayConfig {
            spacing_m,
            nx,
            ny: 1,
            bit_depth: BitDepth::Continuous,
            active: vec![true; nx],
            element_width_m: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Array filling `[−Lx, 0]`: `N_x = floor(Lx/d) + 1`.
    pub fn spanning(aperture_lx_m: f64, spacing_m: f64) -> Result<Self> {
        if !(spacing_m > 0.0 && aperture_lx_m > 0.0) {
            return Err(Error::domain("aperture length and spacing must be positive"));
        }
        let nx = (aperture_lx_m / spacing_m * (1.0 + 1e-12)).floor() as usize + 1;
        ArrayConfig::new(spacing_m, nx)
    }

    pub fn with_bits(mut self, bit_depth: BitDepth) -> Self {
        self.bit_depth = bit_depth;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spacing_m.is_finite() && self.spacing_m > 0.0) {
            return Err(Error::domain(format!("element spacing must be positive, got {}", self.spacing_m)));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::domain("array needs at least one element per axis"));
        }
        if self.active.len() != self.nx {
            return Err(Error::domain(format!(
                "active mask has {} entries for {} columns",
                self.active.len(),
                self.nx
            )));
        }
        if !self.active.iter().any(|&a| a) {
            return Err(Error::domain("at least one element must be active"));
        }
        if let BitDepth::Bits(0) = self.bit_depth {
            return Err(Error::domain("bit depth must be at least 1"));
        }
        if let Some(w) = self.element_width_m {
            if !(w > 0.0 && w <= self.spacing_m * (1.0 + 1e-12)) {
                return Err(Error::domain(format!("element width {w} must lie in (0, d]")));
            }
        }
        Ok(())
    }

    /// x position of column `i` (`i = 0` is the leftmost element).
    #[inline]
    pub fn position(&self, i: usize) -> f64 {
        (i as f64 - (self.nx as f64 - 1.0)) * self.spacing_m
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.position(i)).collect()
    }

    /// y position of row `j`, centred on y = 0.
    #[inline]
    pub fn y_position(&self, j: usize) -> f64 {
        (j as f64 - 0.5 * (self.ny as f64 - 1.0)) * self.spacing_m
    }

    pub fn element_width(&self, medium: &Medium) -> f64 {
        self.element_width_m
            .unwrap_or_else(|| self.spacing_m.min(0.5 * medium.lambda()))
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Leftmost `x` spanned by the elements.
    pub fn lx(&self) -> f64 {
        (self.nx as f64 - 1.0) * self.spacing_m
    }
}

/// Per-column complex weights, `e^{jφ̂}/√N_x` on active columns and 0 elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    pub weights: Vec<Complex64>,
    pub phases_rad: Vec<f64>,
    pub config: ArrayConfig,
}

impl Codeword {
    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `φ̂(n) = φ(n·d)` at every column.
pub fn sample_phase(profile: &PhaseProfile, cfg: &ArrayConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    profile.eval_many(&cfg.positions())
}

/// Wraps each phase to `[0, 2π)` and rounds to the nearest level `2πm/2ⁿ`,
/// ties going to the lower level.
pub fn quantize_phases(phases: &[f64], bits: u32) -> Result<Vec<f64>> {
    if bits == 0 {
        return Err(Error::domain("bit depth must be at least 1"));
    }
    if bits > 52 {
        return Err(Error::domain("bit depth above 52 exceeds double precision"));
    }
    let levels = (1u64 << bits) as f64;
    let step = 2.0 * PI / levels;
    Ok(phases
        .iter()
        .map(|&p| {
            let w = p.rem_euclid(2.0 * PI);
            let m = (w / step - 0.5).ceil();
            m.rem_euclid(levels) * step + 0.0
        })
        .collect())
}

/// Phase difference folded into `(−π, π]`.
pub fn wrapped_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

pub fn make_codeword(phases: &[f64], cfg: &ArrayConfig) -> Result<Codeword> {
    cfg.validate()?;
    if phases.len() != cfg.nx {
        return Err(Error::domain(format!(
            "{} phases for {} columns",
            phases.len(),
            cfg.nx
        )));
    }
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain("phases must be finite"));
    }
    let applied = match cfg.bit_depth {
        BitDepth::Continuous => phases.to_vec(),
        BitDepth::Bits(n) => quantize_phases(phases, n)?,
    };
    let scale = 1.0 / (cfg.nx as f64).sqrt();
    let weights = applied
        .iter()
        .zip(&cfg.active)
        .map(|(&p, &on)| if on { Complex64::from_polar(scale, p) } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(Codeword {
        weights,
        phases_rad: applied,
        config: cfg.clone(),
    })
}

/// Exactly `round(f·N_x)` active columns chosen by a ChaCha8 stream seeded with `seed`.
pub fn random_subarray_mask(cfg: &ArrayConfig, fraction_active: f64, seed: u64) -> Result<Vec<bool>> {
    if !(fraction_active > 0.0 && fraction_active <= 1.0) {
        return Err(Error::domain(format!("active fraction must lie in (0, 1], got {fraction_active}")));
    }
    let count = (fraction_active * cfg.nx as f64).round() as usize;
    if count == 0 {
        return Err(Error::domain("mask would leave no active element"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask = vec![false; cfg.nx];
    for i in sample(&mut rng, cfg.nx, count) {
        mask[i] = true;
    }
    Ok(mask)
}

/// Every `period`-th column active, starting from the rightmost one.
pub fn periodic_mask(cfg: &ArrayConfig, period: usize) -> Result<Vec<bool>> {
    if period == 0 {
        return Err(Error::domain("mask period must be positive"));
    }
    Ok((0..cfg.nx).map(|i| (cfg.nx - 1 - i).is_multiple_of(period)).collect())
}

/// One propagating diffraction order of a periodic array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GratingOrder {
    pub order: i32,
    pub angle_rad: f64,
}

/// Orders `m ≠ 0` with `|mλ/d| < 1`, at angles `asin(mλ/d)`.
pub fn grating_orders(spacing_m: f64, medium: &Medium) -> Result<Vec<GratingOrder>> {
    if !(spacing_m.is_finite() && spacing_m > 0.0) {
        return Err(Error::domain("element spacing must be positive"));
    }
    let r = medium.lambda() / spacing_m;
    let mmax = (1.0 / r).ceil() as i32;
    let mut out = Vec::new();
    for m in -mmax..=mmax {
        let s = m as f64 * r;
        if m != 0 && s.abs() < 1.0 - 1e-12 {
            out.push(GratingOrder {
                order: m,
                angle_rad: s.asin(),
            });
        }
    }
    Ok(out)
}

/// Zero-order-hold aperture field of a codeword: each active element fills a
/// patch of its element width with `√N_x · w_n · A(x_n)`, so a uniform
/// full-array codeword reproduces the continuous footprint amplitude.
pub fn element_field(code: &Codeword, grid: &Grid, window: &AmplitudeWindow, medium: &Medium) -> Result<FieldSlice> {
    let cfg = &code.config;
    cfg.validate()?;
    if code.weights.len() != cfg.nx {
        return Err(Error::domain("codeword length does not match the array"));
    }
    let xg = *grid.x_axis();
    if xg.step_m > 0.5 * cfg.spacing_m * (1.0 + 1e-9) {
        return Err(Error::domain(format!(
            "grid step {} m is coarser than half the element spacing {} m",
            xg.step_m, cfg.spacing_m
        )));
    }
    let width = cfg.element_width(medium);
    let half = 0.5 * width;
    let scale = (cfg.nx as f64).sqrt();
    let mut column = vec![Complex64::new(0.0, 0.0); xg.count];
    for (i, w) in code.weights.iter().enumerate() {
        if *w == Complex64::new(0.0, 0.0) {
            continue;
        }
        let xc = cfg.position(i);
        let amp = window.along_x(xc);
        if amp == 0.0 {
            continue;
        }
        let v = w * scale * amp;
        // nodes whose cells lie in [xc − w/2, xc + w/2); half-open so that
        // adjacent full-fill patches never overlap
        let lo = ((xc - half - xg.start_m) / xg.step_m - 1e-9).ceil().max(0.0) as usize;
        let hi = ((xc + half - xg.start_m) / xg.step_m - 1e-9).ceil().max(0.0) as usize;
        for c in column.iter_mut().take(hi.min(xg.count)).skip(lo) {
            *c = v;
        }
    }
    let mut out = FieldSlice::zeros(*grid, 0.0);
    match grid {
        Grid::Line(_) => out.values = column,
        Grid::Plane(g) => {
            for iy in 0..g.y.count {
                if !window.aperture.contains_y(g.y.coordinate(iy)) {
                    continue;
                }
                let row = &mut out.values[iy * g.x.count..(iy + 1) * g.x.count];
                row.copy_from_slice(&column);
            }
        }
    }
    Ok(out)
}

/// CSV with columns `index,x_m,amplitude,phase_rad,active`.
pub fn write_codeword_csv<W: Write>(code: &Codeword, mut out: W) -> Result<()> {
    writeln!(out, "index,x_m,amplitude,phase_rad,active")?;
    let cfg = &code.config;
    for (i, w) in code.weights.iter().enumerate() {
        let n = i as i64 - (cfg.nx as i64 - 1);
        writeln!(
            out,
            "{},{:.9e},{:.9e},{:.12e},{}",
            n,
            cfg.position(i),
            w.norm(),
            code.phases_rad[i],
            u8::from(cfg.active[i])
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::footprint::Aperture;
    use crate::grid::Grid1D;
    use crate::trajectory::{parabolic_phase_paraxial, Parabola, PhaseLaw};

    fn m150() -> Medium {
        Medium::new(150e9).unwrap()
    }

    #[test]
    fn quantizer_examples() {
        assert_eq!(quantize_phases(&[0.9 * PI], 2).unwrap(), vec![PI]);
        assert_eq!(quantize_phases(&[PI / 2.0], 1).unwrap(), vec![0.0]);
        assert_eq!(quantize_phases(&[3.0 * PI / 2.0], 1).unwrap(), vec![PI]);
        // just below 2π rounds up to the wrapped level 0
        assert_eq!(quantize_phases(&[2.0 * PI - 1e-3], 3).unwrap(), vec![0.0]);
        assert_eq!(quantize_phases(&[-PI / 2.0], 2).unwrap(), vec![1.5 * PI]);
        assert!(quantize_phases(&[0.0], 0).is_err());
    }

    #[test]
    fn quantizer_error_bound() {
        let ph: Vec<f64> = (0..5000).map(|i| -40.0 + i as f64 * 0.0173).collect();
        for n in 1..=8 {
            let q = quantize_phases(&ph, n).unwrap();
            let bound = PI / (1u64 << n) as f64;
            for (a, b) in ph.iter().zip(&q) {
                assert!(wrapped_difference(*b, *a).abs() <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn sampled_phase_matches_closed_form() {
        let m = m150();
        let d = m.lambda() / 2.0;
        let cfg = ArrayConfig::spanning(1.0, d).unwrap();
        assert_eq!(cfg.nx, 1001);
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        let prof = parabolic_phase_paraxial(&p, &m, &Grid1D::new(-1.0, 1e-3, 1001).unwrap()).unwrap();
        let ph = sample_phase(&prof, &cfg).unwrap();
        assert_eq!(ph[cfg.nx - 1], 0.0);
        let i = cfg.nx - 1 - 500;
        let x = cfg.position(i);
        assert!((x + 0.4997).abs() < 1e-4);
        let want = PhaseLaw::ParabolicParaxial { parabola: p, k: m.k() }.eval(x).unwrap();
        assert!((ph[i] - want).abs() <= 1e-12 * want.abs());
    }

    #[test]
    fn element_outside_support_is_rejected() {
        let m = m150();
        let cfg = ArrayConfig::spanning(1.0, 0.01).unwrap();
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        let prof = parabolic_phase_paraxial(&p, &m, &Grid1D::new(-0.5, 1e-3, 501).unwrap()).unwrap();
        assert!(sample_phase(&prof, &cfg).is_err());
    }

    #[test]
    fn codeword_norms() {
        let mut cfg = ArrayConfig::new(1e-3, 100).unwrap();
        let c = make_codeword(&[0.0; 100], &cfg).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-14);
        assert!(c.weights.iter().all(|w| (w.re - 0.1).abs() < 1e-15 && w.im == 0.0));
        cfg.active = (0..100).map(|i| i % 2 == 0).collect();
        let c = make_codeword(&[0.3; 100], &cfg).unwrap();
        assert!((c.norm().powi(2) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn masks() {
        let cfg = ArrayConfig::new(1e-3, 1000).unwrap();
        assert!(random_subarray_mask(&cfg, 1.0, 7).unwrap().iter().all(|&a| a));
        let a = random_subarray_mask(&cfg, 0.5, 7).unwrap();
        let b = random_subarray_mask(&cfg, 0.5, 7).unwrap();
        let c = random_subarray_mask(&cfg, 0.5, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.iter().filter(|&&x| x).count(), 500);
        assert_eq!(c.iter().filter(|&&x| x).count(), 500);
        assert!(random_subarray_mask(&cfg, 0.0001, 1).is_err());
        assert!(random_subarray_mask(&cfg, 0.0, 1).is_err());
        let p = periodic_mask(&cfg, 2).unwrap();
        assert_eq!(p.iter().filter(|&&x| x).count(), 500);
        assert!(p[999]);
    }

    #[test]
    fn grating_order_examples() {
        let m = m150();
        let l = m.lambda();
        assert!(grating_orders(l / 2.0, &m).unwrap().is_empty());
        let o = grating_orders(2.0 * l, &m).unwrap();
        assert_eq!(o.len(), 2);
        for g in &o {
            assert!((g.angle_rad.abs().to_degrees() - 30.0).abs() < 1e-9);
        }
        assert_eq!(grating_orders(4.0 * l, &m).unwrap().len(), 6);
    }

    #[test]
    fn element_field_round_trip() {
        let m = m150();
        let d = 4e-3;
        let cfg = ArrayConfig::new(d, 50).unwrap();
        let phases: Vec<f64> = (0..50).map(|i| 0.37 * i as f64).collect();
        let code = make_codeword(&phases, &cfg).unwrap();
        let win = AmplitudeWindow::uniform(Aperture::line(1.0).unwrap());
        let g = Grid1D::new(-0.3, 5e-4, 700).unwrap();
        let f = element_field(&code, &Grid::Line(g), &win, &m).unwrap();
        for i in 0..50 {
            let v = f.values[g.nearest_index(cfg.position(i))];
            assert!((v.norm() - 1.0).abs() < 1e-12);
            assert!(wrapped_difference(v.arg(), code.phases_rad[i]).abs() < 1e-12);
        }
        // capped patch width: λ/2 at this spacing, i.e. two or three nodes each
        let lit = f.values.iter().filter(|v| v.norm() > 0.0).count();
        let per = m.lambda() / 2.0 / 5e-4;
        assert!((lit as f64 - 50.0 * per).abs() <= 50.0, "{lit}");
    }

    #[test]
    fn single_element_is_one_patch() {
        let m = m150();
        let mut cfg = ArrayConfig::new(2e-3, 40).unwrap();
        cfg.element_width_m = Some(2e-3);
        cfg.active = (0..40).map(|i| i == 17).collect();
        let code = make_codeword(&[0.0; 40], &cfg).unwrap();
        let win = AmplitudeWindow::uniform(Aperture::line(1.0).unwrap());
        let g = Grid1D::new(-0.1, 2.5e-4, 400).unwrap();
        let f = element_field(&code, &Grid::Line(g), &win, &m).unwrap();
        let lit: Vec<usize> = (0..g.count).filter(|&i| f.values[i].norm() > 0.0).collect();
        assert_eq!(lit.len(), 8);
        assert!(lit.windows(2).all(|w| w[1] == w[0] + 1));
    }

    #[test]
    fn one_bit_field_takes_two_values() {
        let m = m150();
        let cfg = ArrayConfig::new(1e-3, 200).unwrap().with_bits(BitDepth::Bits(1));
        let phases: Vec<f64> = (0..200).map(|i| 0.05 * (i * i) as f64).collect();
        let code = make_codeword(&phases, &cfg).unwrap();
        let win = AmplitudeWindow::uniform(Aperture::line(1.0).unwrap());
        let g = Grid1D::new(-0.25, 2.5e-4, 1100).unwrap();
        let f = element_field(&code, &Grid::Line(g), &win, &m).unwrap();
        let mut seen: Vec<f64> = f.values.iter().filter(|v| v.norm() > 0.0).map(|v| v.re).collect();
        seen.sort_by(f64::total_cmp);
        seen.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn disjoint_masks_add() {
        let m = m150();
        let cfg = ArrayConfig::new(1e-3, 300).unwrap();
        let phases: Vec<f64> = (0..300).map(|i| (i as f64).sqrt()).collect();
        let a = random_subarray_mask(&cfg, 0.3, 4).unwrap();
        let b: Vec<bool> = a.iter().map(|x| !x).collect();
        let win = AmplitudeWindow::uniform(Aperture::line(1.0).unwrap());
        let g = Grid::Line(Grid1D::new(-0.35, 2.5e-4, 1500).unwrap());
        let render = |mask: Vec<bool>| {
            let mut c = cfg.clone();
            c.active = mask;
            element_field(&make_codeword(&phases, &c).unwrap(), &g, &win, &m).unwrap()
        };
        let fa = render(a);
        let fb = render(b);
        let fu = render(vec![true; 300]);
        for i in 0..g.len() {
            assert!((fa.values[i] + fb.values[i] - fu.values[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let m = m150();
        let cfg = ArrayConfig::new(1e-3, 10).unwrap();
        let code = make_codeword(&[0.0; 10], &cfg).unwrap();
        let win = AmplitudeWindow::uniform(Aperture::line(1.0).unwrap());
        let g = Grid::Line(Grid1D::new(-0.1, 1e-3, 100).unwrap());
        assert!(element_field(&code, &g, &win, &m).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let cfg = ArrayConfig::new(1e-3, 3).unwrap();
        let code = make_codeword(&[0.0, 1.0, 2.0], &cfg).unwrap();
        let mut buf = Vec::new();
        write_codeword_csv(&code, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "index,x_m,amplitude,phase_rad,active");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("0,"));
        assert!(lines[1].starts_with("-2,"));
    }
}
