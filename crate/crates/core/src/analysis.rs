//! Measurements on propagated fields: main-lobe tracking, beam-tube and
//! probe powers, array efficiencies, k-content and frequency sweeps.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{periodic_mask, random_subarray_mask};
use crate::design::BeamDesign;
use crate::error::{Error, Result};
use crate::grid::{window_power, FieldSlice, Grid, Medium, Window};
use crate::propagation::{
    auto_domain, from_spectrum_with, propagate_scan, to_spectrum, Blocker, DomainRequest, Mode, PropagationOptions,
};
use crate::trajectory::{airy_fwhm, airy_peak_offset, z_max, Parabola};

/// Default search half-width of the lobe tracker, in units of `x_FWHM`.
pub const TRACK_WINDOW_FWHM: f64 = 3.0;
/// Default beam-tube half-width, in units of `x_FWHM`.
pub const TUBE_HALFWIDTH_FWHM: f64 = 1.5;
/// Default receiver probe side.
pub const PROBE_SIDE_M: f64 = 0.1;

/// Options for the analysis drivers: band-limited propagation without the
/// border guard, since the band limit already rules out wrap-around.
pub fn analysis_options() -> PropagationOptions {
    PropagationOptions {
        border_threshold: None,
        ..PropagationOptions::default()
    }
}

/// Predicted main-lobe position `x_c(z) + δx_m`.
pub fn predicted_lobe_x(traj: &Parabola, medium: &Medium, z_m: f64) -> f64 {
    traj.x_at(z_m) + airy_peak_offset(traj.beta_per_m, medium)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeSample {
    pub z_m: f64,
    pub x_peak_m: f64,
    /// Interpolated peak `|E|²` in V²/m².
    pub peak_intensity: f64,
    /// Full width at half maximum of `|E|` around the peak.
    pub fwhm_m: Option<f64>,
    pub predicted_x_m: f64,
    pub deviation_m: f64,
    /// The maximum sits on the search window's edge.
    pub lost: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeTrack {
    pub samples: Vec<LobeSample>,
    pub x_fwhm_m: f64,
    pub search_halfwidth_m: f64,
}

impl LobeTrack {
    /// Largest `|deviation|` over samples with `z ∈ [z_lo, z_hi]`; a lost lobe counts as infinite.
    pub fn max_deviation(&self, z_lo: f64, z_hi: f64) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.z_m >= z_lo && s.z_m <= z_hi)
            .map(|s| if s.lost { f64::INFINITY } else { s.deviation_m.abs() })
            .fold(0.0, f64::max)
    }

    /// Peak intensities divided by their maximum.
    pub fn normalized_peak_power(&self) -> Vec<f64> {
        let m = self.samples.iter().map(|s| s.peak_intensity).fold(0.0, f64::max);
        self.samples
            .iter()
            .map(|s| if m > 0.0 { s.peak_intensity / m } else { 0.0 })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "z_m,x_peak_m,peak_intensity_v2_per_m2,fwhm_m,predicted_x_m,deviation_m,lost"
        )?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                num(s.z_m),
                num(s.x_peak_m),
                num(s.peak_intensity),
                s.fwhm_m.map(num).unwrap_or_default(),
                num(s.predicted_x_m),
                num(s.deviation_m),
                u8::from(s.lost)
            )?;
        }
        Ok(())
    }
}

pub(crate) fn num(v: f64) -> String {
    format!("{v:.9e}")
}

pub fn track_main_lobe(slices: &[FieldSlice], traj: &Parabola, medium: &Medium) -> Result<LobeTrack> {
    track_main_lobe_with(slices, traj, medium, TRACK_WINDOW_FWHM, 0.0)
}

/// Tracks the intensity maximum within `±window_fwhm·x_FWHM` of the
/// predicted lobe; plane slices are cut at `y_cut_m`.
pub fn track_main_lobe_with(
    slices: &[FieldSlice],
    traj: &Parabola,
    medium: &Medium,
    window_fwhm: f64,
    y_cut_m: f64,
) -> Result<LobeTrack> {
    if !(window_fwhm > 0.0) {
        return Err(Error::domain("search window must be positive"));
    }
    let fwhm = airy_fwhm(traj.beta_per_m, medium);
    let half = window_fwhm * fwhm;
    let samples = slices
        .iter()
        .map(|s| track_one(s, traj, medium, half, y_cut_m))
        .collect::<Result<Vec<_>>>()?;
    Ok(LobeTrack {
        samples,
        x_fwhm_m: fwhm,
        search_halfwidth_m: half,
    })
}

fn track_one(slice: &FieldSlice, traj: &Parabola, medium: &Medium, half: f64, y_cut: f64) -> Result<LobeSample> {
    let g = *slice.grid.x_axis();
    let predicted = predicted_lobe_x(traj, medium, slice.z_m);
    let profile = slice.x_cut(y_cut);
    let lo_x = predicted - half;
    let hi_x = predicted + half;
    if hi_x < g.start_m || lo_x > g.end_m() {
        return Ok(LobeSample {
            z_m: slice.z_m,
            x_peak_m: f64::NAN,
            peak_intensity: 0.0,
            fwhm_m: None,
            predicted_x_m: predicted,
            deviation_m: f64::NAN,
            lost: true,
        });
    }
    let lo = ((lo_x - g.start_m) / g.step_m).ceil().max(0.0) as usize;
    let hi = (((hi_x - g.start_m) / g.step_m).floor() as usize).min(g.count - 1);
    if hi < lo + 2 {
        return Err(Error::domain("search window spans fewer than three grid nodes"));
    }
    let mut im = lo;
    for i in lo..=hi {
        if profile[i] > profile[im] {
            im = i;
        }
    }
    let lost = im == lo || im == hi;
    let (x_peak, peak) = if lost {
        (g.coordinate(im), profile[im])
    } else {
        let (a, b, c) = (profile[im - 1], profile[im], profile[im + 1]);
        let den = a - 2.0 * b + c;
        let d = if den < 0.0 { 0.5 * (a - c) / den } else { 0.0 };
        (g.coordinate(im) + d * g.step_m, b - 0.25 * (a - c) * d)
    };
    Ok(LobeSample {
        z_m: slice.z_m,
        x_peak_m: x_peak,
        peak_intensity: peak,
        fwhm_m: amplitude_fwhm(&profile, im, g.step_m),
        predicted_x_m: predicted,
        deviation_m: x_peak - predicted,
        lost,
    })
}

/// Width where `|E| = |E_peak|/2` on either side of node `im`.
fn amplitude_fwhm(intensity: &[f64], im: usize, step: f64) -> Option<f64> {
    let amp = |i: usize| intensity[i].sqrt();
    let level = 0.5 * amp(im);
    if level <= 0.0 {
        return None;
    }
    let mut l = im;
    while l > 0 && amp(l - 1) >= level {
        l -= 1;
    }
    if l == 0 {
        return None;
    }
    let mut r = im;
    while r + 1 < intensity.len() && amp(r + 1) >= level {
        r += 1;
    }
    if r + 1 == intensity.len() {
        return None;
    }
    let cross = |inside: usize, outside: usize| {
        let (a, b) = (amp(inside), amp(outside));
        (a - level) / (a - b)
    };
    let left = l as f64 - cross(l, l - 1);
    let right = r as f64 + cross(r, r + 1);
    Some((right - left) * step)
}

/// Power inside `x_c(z) + δx_m ± half_width` (full y extent), with the
/// half-width defaulting to `1.5·x_FWHM`.
pub fn beam_tube_power(slice: &FieldSlice, traj: &Parabola, medium: &Medium, half_width_m: Option<f64>) -> Result<f64> {
    let hw = half_width_m.unwrap_or(TUBE_HALFWIDTH_FWHM * airy_fwhm(traj.beta_per_m, medium));
    if !(hw > 0.0 && hw.is_finite()) {
        return Err(Error::domain("beam tube half-width must be positive"));
    }
    let c = predicted_lobe_x(traj, medium, slice.z_m);
    let g = slice.grid.x_axis();
    let (glo, ghi) = (g.start_m - 0.5 * g.step_m, g.end_m() + 0.5 * g.step_m);
    if c - hw < glo || c + hw > ghi {
        return Err(Error::domain(format!(
            "beam tube [{}, {}] m at z = {} m leaves the grid [{glo}, {ghi}] m",
            c - hw,
            c + hw,
            slice.z_m
        )));
    }
    window_power(slice, &Window::x(c, 2.0 * hw))
}

/// `P_with / P_without` inside `probe`.
pub fn power_ratio(with: &FieldSlice, without: &FieldSlice, probe: &Window) -> Result<f64> {
    let den = window_power(without, probe)?;
    if !(den > 0.0) {
        return Err(Error::Numerical(
            "undefined ratio: the unblocked power at the probe is zero".into(),
        ));
    }
    Ok(window_power(with, probe)? / den)
}

/// Received power at the probe plane `z_rx_m` with the blockers in place,
/// relative to the unobstructed run.
pub fn blockage_ratio(
    source: &FieldSlice,
    medium: &Medium,
    z_rx_m: f64,
    blockers: &[Blocker],
    probe: &Window,
    opts: &PropagationOptions,
) -> Result<f64> {
    let without = propagate_scan(source, medium, &[z_rx_m], &[], opts)?;
    let with = propagate_scan(source, medium, &[z_rx_m], blockers, opts)?;
    power_ratio(&with[0], &without[0], probe)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficiencyKind {
    Quantization,
    Subarray,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub kind: EfficiencyKind,
    pub value: f64,
    pub realizations: usize,
    pub mean: f64,
    pub std: f64,
    pub samples: Vec<f64>,
}

impl EfficiencyReport {
    fn from_samples(kind: EfficiencyKind, samples: Vec<f64>) -> Self {
        let n = samples.len() as f64;
        let uniform = samples.windows(2).all(|w| w[0] == w[1]);
        let mean = if uniform { samples[0] } else { samples.iter().sum::<f64>() / n };
        let std = if !uniform {
            (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        EfficiencyReport {
            kind,
            value: mean,
            realizations: samples.len(),
            mean,
            std,
            samples,
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "realization,efficiency")?;
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(out, "{i},{}", num(*s))?;
        }
        Ok(())
    }
}

/// Everything an efficiency measurement needs besides the array settings.
#[derive(Debug, Clone)]
pub struct EfficiencySetup {
    pub design: BeamDesign,
    pub medium: Medium,
    pub grid: Grid,
    pub z_ref_m: f64,
    pub tube_half_width_m: Option<f64>,
    pub options: PropagationOptions,
}

impl EfficiencySetup {
    /// Line-mode setup with the reference plane at `z_max/2`.
    pub fn new(design: BeamDesign, medium: Medium) -> Result<Self> {
        let p = reference_parabola(&design)?;
        let zm = z_max(design.window.aperture.lx_m, &p)?;
        let dom = auto_domain(
            &DomainRequest {
                mode: Mode::Line,
                ..DomainRequest::new(design.window.aperture, design.parabolas(), zm)
            },
            &medium,
        )?;
        Ok(EfficiencySetup {
            design,
            medium,
            grid: dom.grid,
            z_ref_m: 0.5 * zm,
            tube_half_width_m: None,
            options: analysis_options(),
        })
    }

    /// Tube power at the reference plane and radiated source power.
    fn measure(&self, design: &BeamDesign, mask: Option<&[bool]>) -> Result<(f64, f64)> {
        let p = reference_parabola(design)?;
        let src = design.source(&self.medium, &self.grid, mask)?;
        let spec = to_spectrum(&src, &self.medium);
        let radiated = spec.propagating_power();
        let field = from_spectrum_with(&spec, self.z_ref_m, &self.options);
        let tube = beam_tube_power(&field, &p, &self.medium, self.tube_half_width_m)?;
        Ok((tube, radiated))
    }
}

fn reference_parabola(design: &BeamDesign) -> Result<Parabola> {
    design
        .parabola()
        .ok_or_else(|| Error::domain("efficiency metrics need a parabolic reference trajectory"))
}

/// Tube power with `bit_depth` phases over tube power with continuous phases.
pub fn quantization_efficiency(setup: &EfficiencySetup, bit_depth: crate::array::BitDepth) -> Result<EfficiencyReport> {
    let spec = setup
        .design
        .array
        .clone()
        .ok_or_else(|| Error::domain("quantization efficiency needs an array realisation"))?;
    let d = spec.spacing(&setup.medium);
    let half = 0.5 * setup.medium.lambda();
    if (d - half).abs() > 1e-9 * half {
        return Err(Error::domain(format!(
            "quantization efficiency is defined at λ/2 spacing ({half} m), got {d} m"
        )));
    }
    let with_bits = |b| {
        let mut dz = setup.design.clone();
        dz.array.as_mut().unwrap().bit_depth = b;
        dz
    };
    let (reference, _) = setup.measure(&with_bits(crate::array::BitDepth::Continuous), None)?;
    if !(reference > 0.0) {
        return Err(Error::Numerical("continuous-phase tube power is zero".into()));
    }
    let (quantized, _) = setup.measure(&with_bits(bit_depth), None)?;
    Ok(EfficiencyReport::from_samples(
        EfficiencyKind::Quantization,
        vec![quantized / reference],
    ))
}

/// Mean and spread of tube power over radiated power across random masks
/// with seeds `seed, seed + 1, …`.
pub fn subarray_efficiency(
    setup: &EfficiencySetup,
    fraction_active: f64,
    n_realizations: usize,
    seed: u64,
) -> Result<EfficiencyReport> {
    if n_realizations == 0 {
        return Err(Error::domain("at least one realization is required"));
    }
    let cfg = setup
        .design
        .array_config(&setup.medium)?
        .ok_or_else(|| Error::domain("sub-array efficiency needs an array realisation"))?;
    let samples = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mask = random_subarray_mask(&cfg, fraction_active, seed.wrapping_add(i))?;
            let (tube, radiated) = setup.measure(&setup.design, Some(&mask))?;
            Ok(tube / radiated)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EfficiencyReport::from_samples(EfficiencyKind::Subarray, samples))
}

/// Efficiency of the regular mask keeping every `period`-th element.
pub fn periodic_efficiency(setup: &EfficiencySetup, period: usize) -> Result<EfficiencyReport> {
    let cfg = setup
        .design
        .array_config(&setup.medium)?
        .ok_or_else(|| Error::domain("periodic efficiency needs an array realisation"))?;
    let mask = periodic_mask(&cfg, period)?;
    let (tube, radiated) = setup.measure(&setup.design, Some(&mask))?;
    Ok(EfficiencyReport::from_samples(EfficiencyKind::Periodic, vec![tube / radiated]))
}

/// Angular power spectrum along `k_x`, ascending and normalized to unit peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KContent {
    pub kx_rad_per_m: Vec<f64>,
    pub power: Vec<f64>,
    pub peak_kx_rad_per_m: f64,
    /// FWHM of the peak containing the maximum, if both half-power crossings exist.
    pub fwhm_rad_per_m: Option<f64>,
    /// Normalization divisor (V²·m²/rad-style units of the raw spectrum).
    pub peak_raw: f64,
    pub k_rad_per_m: f64,
}

impl KContent {
    /// Share of the propagating power held by each order `m`, binning
    /// every `|k_x| < k` to the nearest multiple of `2π/d`.
    pub fn order_shares(&self, spacing_m: f64) -> Vec<(i32, f64)> {
        let kg = 2.0 * std::f64::consts::PI / spacing_m;
        let mut bins: Vec<(i32, f64)> = Vec::new();
        let mut total = 0.0;
        for (&kx, &p) in self.kx_rad_per_m.iter().zip(&self.power) {
            if kx.abs() >= self.k_rad_per_m {
                continue;
            }
            let m = (kx / kg).round() as i32;
            total += p;
            match bins.iter_mut().find(|(o, _)| *o == m) {
                Some(b) => b.1 += p,
                None => bins.push((m, p)),
            }
        }
        bins.sort_by_key(|b| b.0);
        if total > 0.0 {
            for b in &mut bins {
                b.1 /= total;
            }
        }
        bins
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "kx_rad_per_m,normalized_power")?;
        for (k, p) in self.kx_rad_per_m.iter().zip(&self.power) {
            writeln!(out, "{},{}", num(*k), num(*p))?;
        }
        Ok(())
    }
}

pub fn k_content(slice: &FieldSlice, medium: &Medium) -> KContent {
    let spec = to_spectrum(slice, medium);
    let kx = spec.kx();
    let nx = kx.len();
    let mut raw = vec![0.0; nx];
    match &spec.grid {
        Grid::Line(_) => {
            for (r, v) in raw.iter_mut().zip(&spec.values) {
                *r = v.norm_sqr();
            }
        }
        Grid::Plane(g) => {
            let dky = g.y.wavenumber_step();
            for row in spec.values.chunks(nx) {
                for (r, v) in raw.iter_mut().zip(row) {
                    *r += v.norm_sqr() * dky;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..nx).collect();
    order.sort_by(|&a, &b| kx[a].total_cmp(&kx[b]));
    let kx_sorted: Vec<f64> = order.iter().map(|&i| kx[i]).collect();
    let raw_sorted: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let (im, peak) = raw_sorted
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
    let power: Vec<f64> = if peak > 0.0 {
        raw_sorted.iter().map(|p| p / peak).collect()
    } else {
        raw_sorted.clone()
    };
    let fwhm = if peak > 0.0 { half_power_width(&power, im) } else { None };
    let dk = slice.grid.x_axis().wavenumber_step();
    KContent {
        peak_kx_rad_per_m: kx_sorted[im],
        kx_rad_per_m: kx_sorted,
        power,
        fwhm_rad_per_m: fwhm.map(|w| w * dk),
        peak_raw: peak,
        k_rad_per_m: medium.k(),
    }
}

/// Width in samples between the half-power crossings around `im`.
fn half_power_width(p: &[f64], im: usize) -> Option<f64> {
    let level = 0.5 * p[im];
    let mut l = im;
    while l > 0 && p[l - 1] >= level {
        l -= 1;
    }
    let mut r = im;
    while r + 1 < p.len() && p[r + 1] >= level {
        r += 1;
    }
    if l == 0 || r + 1 == p.len() {
        return None;
    }
    let left = l as f64 - (p[l] - level) / (p[l] - p[l - 1]);
    let right = r as f64 + (p[r] - level) / (p[r] - p[r + 1]);
    Some(right - left)
}

/// Intensity profile along x at one plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub z_m: f64,
    pub x_m: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl CrossSection {
    pub fn from_slice(slice: &FieldSlice) -> Self {
        CrossSection {
            z_m: slice.z_m,
            x_m: slice.grid.x_axis().coordinates(),
            intensity: slice.x_cut(0.0),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x_m,intensity_v2_per_m2")?;
        for (x, i) in self.x_m.iter().zip(&self.intensity) {
            writeln!(out, "{},{}", num(*x), num(*i))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub mode: Mode,
    /// Planes to track; `None` means `[z_max]` at each frequency.
    pub z_track_m: Option<Vec<f64>>,
    /// Cross-section plane; `None` means `z_max`.
    pub cross_section_z_m: Option<f64>,
    /// Transverse step in wavelengths of each frequency.
    pub step_wavelengths: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            mode: Mode::Line,
            z_track_m: None,
            cross_section_z_m: None,
            step_wavelengths: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub frequency_hz: f64,
    pub fraunhofer_m: f64,
    pub z_max_m: f64,
    pub x_fwhm_m: f64,
    pub track: LobeTrack,
    /// Tracked deviation at the last tracked plane.
    pub deviation_at_end_m: f64,
    pub lost_at_end: bool,
    pub cross_section: CrossSection,
    /// Tracked peak at the cross-section plane.
    pub cross_section_peak_x_m: f64,
}

/// Rebuilds the design at every frequency and tracks its main lobe.
pub fn frequency_sweep(design: &BeamDesign, frequencies_hz: &[f64], opts: &SweepOptions) -> Result<Vec<SweepPoint>> {
    if frequencies_hz.is_empty() {
        return Err(Error::domain("frequency list is empty"));
    }
    let p = reference_parabola(design)?;
    let lx = design.window.aperture.lx_m;
    let zm = z_max(lx, &p)?;
    frequencies_hz
        .par_iter()
        .map(|&f| {
            let medium = Medium::new(f)?;
            let mut z_track = opts.z_track_m.clone().unwrap_or_else(|| vec![zm]);
            let z_cs = opts.cross_section_z_m.unwrap_or(zm);
            z_track.push(z_cs);
            z_track.sort_by(f64::total_cmp);
            z_track.dedup();
            let z_far = *z_track.last().unwrap();
            let dom = auto_domain(
                &DomainRequest {
                    mode: opts.mode,
                    step_m: Some(opts.step_wavelengths * medium.lambda()),
                    slices: z_track.len(),
                    ..DomainRequest::new(design.window.aperture, design.parabolas(), z_far)
                },
                &medium,
            )?;
            let src = design.source(&medium, &dom.grid, None)?;
            let slices = propagate_scan(&src, &medium, &z_track, &[], &analysis_options())?;
            let track = track_main_lobe(&slices, &p, &medium)?;
            let ics = z_track.iter().position(|z| *z == z_cs).unwrap();
            let requested = opts.z_track_m.clone().unwrap_or_else(|| vec![zm]);
            let z_end = requested.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let end = track.samples.iter().find(|s| s.z_m == z_end).unwrap();
            Ok(SweepPoint {
                frequency_hz: f,
                fraunhofer_m: medium.fraunhofer_distance(lx),
                z_max_m: zm,
                x_fwhm_m: track.x_fwhm_m,
                deviation_at_end_m: end.deviation_m,
                lost_at_end: end.lost,
                cross_section_peak_x_m: track.samples[ics].x_peak_m,
                cross_section: CrossSection::from_slice(&slices[ics]),
                track,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], mut out: W) -> Result<()> {
    writeln!(
        out,
        "frequency_hz,fraunhofer_m,z_max_m,x_fwhm_m,deviation_at_end_m,lost_at_end,cross_section_z_m,cross_section_peak_x_m"
    )?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(p.frequency_hz),
            num(p.fraunhofer_m),
            num(p.z_max_m),
            num(p.x_fwhm_m),
            num(p.deviation_at_end_m),
            u8::from(p.lost_at_end),
            num(p.cross_section.z_m),
            num(p.cross_section_peak_x_m)
        )?;
    }
    Ok(())
}
