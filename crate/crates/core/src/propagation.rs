//! Angular-spectrum propagation: `E(z+δz) = FT⁻¹{ FT[E(z)] e^{j k_z δz} }`
//! with `k_z = √(k² − k_x² − k_y²)`. Evanescent components decay as
//! `e^{−|k_z| |δz|}`.
//!
//! Spectra use the unitary convention
//! `Ẽ(k_x) = Δx/√(2π) Σ E(x_n) e^{−j k_x x_n}`, so that
//! `Σ|Ẽ|² Δk = Σ|E|² Δx` holds to rounding.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::footprint::Aperture;
use crate::grid::{total_power, FieldSlice, Grid, Grid1D, Grid2D, Medium};
use crate::trajectory::{airy_fwhm, Parabola};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Default memory cap for a propagation run, 4 GiB.
pub const DEFAULT_MEMORY_CAP_BYTES: u64 = 4 << 30;

#[derive(Clone)]
struct Plans {
    fx: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    fy: Option<Arc<dyn Fft<f64>>>,
    iy: Option<Arc<dyn Fft<f64>>>,
}

impl Plans {
    fn new(grid: &Grid) -> Self {
        let mut p = FftPlanner::new();
        let nx = grid.x_axis().count;
        let (fy, iy) = match grid {
            Grid::Line(_) => (None, None),
            Grid::Plane(g) => (
                Some(p.plan_fft_forward(g.y.count)),
                Some(p.plan_fft_inverse(g.y.count)),
            ),
        };
        Plans {
            fx: p.plan_fft_forward(nx),
            ix: p.plan_fft_inverse(nx),
            fy,
            iy,
        }
    }

    /// Unnormalised transform of a line or row-major plane, in place.
    fn run(&self, grid: &Grid, data: &mut [Complex64], forward: bool) {
        let (px, py) = if forward { (&self.fx, &self.fy) } else { (&self.ix, &self.iy) };
        match grid {
            Grid::Line(_) => px.process(data),
            Grid::Plane(g) => {
                let nx = g.x.count;
                let ny = g.y.count;
                data.par_chunks_mut(nx).for_each(|row| px.process(row));
                let py = py.as_ref().expect("plane plan");
                let mut cols = vec![Complex64::new(0.0, 0.0); nx * ny];
                transpose(data, &mut cols, nx, ny);
                cols.par_chunks_mut(ny).for_each(|c| py.process(c));
                transpose(&cols, data, ny, nx);
            }
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], w: usize, h: usize) {
    // src is h rows of width w; dst becomes w rows of width h
    dst.par_chunks_mut(h).enumerate().for_each(|(c, out)| {
        for (r, o) in out.iter_mut().enumerate() {
            *o = src[r * w + c];
        }
    });
}

/// Angular spectrum of a slice, stored in FFT order.
#[derive(Clone)]
pub struct Spectrum {
    pub grid: Grid,
    pub z_m: f64,
    pub medium: Medium,
    pub values: Vec<Complex64>,
    plans: Plans,
}

impl std::fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectrum")
            .field("grid", &self.grid)
            .field("z_m", &self.z_m)
            .field("medium", &self.medium)
            .field("len", &self.values.len())
            .finish()
    }
}

impl Spectrum {
    pub fn kx(&self) -> Vec<f64> {
        self.grid.x_axis().wavenumbers()
    }

    pub fn ky(&self) -> Option<Vec<f64>> {
        match &self.grid {
            Grid::Line(_) => None,
            Grid::Plane(g) => Some(g.y.wavenumbers()),
        }
    }

    /// `Δk_x` (line) or `Δk_x Δk_y` (plane).
    pub fn cell_measure(&self) -> f64 {
        match &self.grid {
            Grid::Line(g) => g.wavenumber_step(),
            Grid::Plane(g) => g.x.wavenumber_step() * g.y.wavenumber_step(),
        }
    }

    /// `Σ|Ẽ|² Δk`.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_measure()
    }

    /// Squared transverse wavenumber of every stored component.
    pub fn transverse_k2(&self) -> Vec<f64> {
        let kx = self.kx();
        match self.ky() {
            None => kx.iter().map(|k| k * k).collect(),
            Some(ky) => {
                let mut out = Vec::with_capacity(kx.len() * ky.len());
                for b in &ky {
                    for a in &kx {
                        out.push(a * a + b * b);
                    }
                }
                out
            }
        }
    }

    /// True where `k_x² + k_y² ≥ k²`.
    pub fn evanescent_mask(&self) -> Vec<bool> {
        let k2 = self.medium.k() * self.medium.k();
        self.transverse_k2().into_iter().map(|t| t >= k2).collect()
    }

    pub fn propagating_power(&self) -> f64 {
        let k2 = self.medium.k() * self.medium.k();
        self.values
            .iter()
            .zip(self.transverse_k2())
            .filter(|(_, t)| *t < k2)
            .map(|(v, _)| v.norm_sqr())
            .sum::<f64>()
            * self.cell_measure()
    }
}

fn start_phase(grid: &Grid) -> Vec<Complex64> {
    // e^{−j k_x x_0} (· e^{−j k_y y_0}) in FFT order
    let gx = grid.x_axis();
    let px: Vec<Complex64> = gx
        .wavenumbers()
        .iter()
        .map(|k| Complex64::from_polar(1.0, -k * gx.start_m))
        .collect();
    match grid {
        Grid::Line(_) => px,
        Grid::Plane(g) => {
            let mut out = Vec::with_capacity(g.len());
            for ky in g.y.wavenumbers() {
                let py = Complex64::from_polar(1.0, -ky * g.y.start_m);
                out.extend(px.iter().map(|p| p * py));
            }
            out
        }
    }
}

fn forward_scale(grid: &Grid) -> f64 {
    match grid {
        Grid::Line(g) => g.step_m / TWO_PI.sqrt(),
        Grid::Plane(g) => g.x.step_m * g.y.step_m / TWO_PI,
    }
}

pub fn to_spectrum(slice: &FieldSlice, medium: &Medium) -> Spectrum {
    let plans = Plans::new(&slice.grid);
    spectrum_with(slice, medium, plans)
}

fn spectrum_with(slice: &FieldSlice, medium: &Medium, plans: Plans) -> Spectrum {
    let mut data = slice.values.clone();
    plans.run(&slice.grid, &mut data, true);
    let s = forward_scale(&slice.grid);
    for (v, p) in data.iter_mut().zip(start_phase(&slice.grid)) {
        *v *= p * s;
    }
    Spectrum {
        grid: slice.grid,
        z_m: slice.z_m,
        medium: *medium,
        values: data,
        plans,
    }
}

/// Options controlling how a spectrum is carried to another plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationOptions {
    /// Drop components whose lateral walk-off `δz·|k_t|/k_z` exceeds half
    /// the window; on a periodic grid they would re-enter from the far side.
    #[serde(default = "yes")]
    pub band_limit: bool,
    /// Reject an output slice whose outer cells carry more than this share
    /// of the source power. `None` disables the check. Hard aperture edges
    /// alone put a few 1e-4 there at tens of metres, hence the 1e-3 default.
    #[serde(default = "default_border_threshold")]
    pub border_threshold: Option<f64>,
    /// Share of cells per side counted as border.
    #[serde(default = "default_border_fraction")]
    pub border_fraction: f64,
}

fn yes() -> bool {
    true
}

fn default_border_threshold() -> Option<f64> {
    Some(1e-3)
}

fn default_border_fraction() -> f64 {
    0.05
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions {
            band_limit: true,
            border_threshold: default_border_threshold(),
            border_fraction: default_border_fraction(),
        }
    }
}

impl PropagationOptions {
    /// Plain transform with no band limit and no border check.
    pub fn exact() -> Self {
        PropagationOptions {
            band_limit: false,
            border_threshold: None,
            border_fraction: default_border_fraction(),
        }
    }

    pub fn with_border_check(mut self) -> Self {
        self.border_threshold = default_border_threshold();
        self
    }
}

fn transfer(spec: &Spectrum, dz: f64, band_limit: bool) -> Vec<Complex64> {
    let k = spec.medium.k();
    let k2 = k * k;
    let (half_x, half_y) = match &spec.grid {
        Grid::Line(g) => (0.5 * g.count as f64 * g.step_m, f64::INFINITY),
        Grid::Plane(g) => (
            0.5 * g.x.count as f64 * g.x.step_m,
            0.5 * g.y.count as f64 * g.y.step_m,
        ),
    };
    let kx = spec.kx();
    let ky = spec.ky().unwrap_or_else(|| vec![0.0]);
    let adz = dz.abs();
    let mut out = Vec::with_capacity(kx.len() * ky.len());
    for b in &ky {
        for a in &kx {
            let t = a * a + b * b;
            let h = if t < k2 {
                let kz = (k2 - t).sqrt();
                if band_limit && (adz * a.abs() > half_x * kz || adz * b.abs() > half_y * kz) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, kz * dz)
                }
            } else {
                Complex64::new((-(t - k2).sqrt() * adz).exp(), 0.0)
            };
            out.push(h);
        }
    }
    out
}

fn field_from(spec: &Spectrum, z_m: f64, band_limit: bool) -> FieldSlice {
    let dz = z_m - spec.z_m;
    let h = transfer(spec, dz, band_limit);
    let n = spec.values.len() as f64;
    let inv = 1.0 / (forward_scale(&spec.grid) * n);
    let mut data: Vec<Complex64> = spec
        .values
        .iter()
        .zip(&h)
        .zip(start_phase(&spec.grid))
        .map(|((v, h), p)| v * h * p.conj() * inv)
        .collect();
    spec.plans.run(&spec.grid, &mut data, false);
    FieldSlice {
        grid: spec.grid,
        z_m,
        values: data,
    }
}

/// Field on the plane `z_m` (absolute), without band limiting.
pub fn from_spectrum(spec: &Spectrum, z_m: f64) -> FieldSlice {
    field_from(spec, z_m, false)
}

/// Field on the plane `z_m` with the given options' band limit.
pub fn from_spectrum_with(spec: &Spectrum, z_m: f64, opts: &PropagationOptions) -> FieldSlice {
    field_from(spec, z_m, opts.band_limit)
}

/// Opaque screen at a z-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blocker {
    pub z_m: f64,
    pub shape: BlockerShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BlockerShape {
    /// Infinite in y; the line-mode stand-in for a disk.
    Strip { center_x_m: f64, width_m: f64 },
    Disk { center_x_m: f64, center_y_m: f64, diameter_m: f64 },
}

impl Blocker {
    pub fn strip(z_m: f64, center_x_m: f64, width_m: f64) -> Self {
        Blocker {
            z_m,
            shape: BlockerShape::Strip { center_x_m, width_m },
        }
    }

    pub fn disk(z_m: f64, center_x_m: f64, center_y_m: f64, diameter_m: f64) -> Self {
        Blocker {
            z_m,
            shape: BlockerShape::Disk {
                center_x_m,
                center_y_m,
                diameter_m,
            },
        }
    }

    fn blocks(&self, x: f64, y: f64) -> bool {
        match self.shape {
            BlockerShape::Strip { center_x_m, width_m } => (x - center_x_m).abs() < 0.5 * width_m,
            BlockerShape::Disk {
                center_x_m,
                center_y_m,
                diameter_m,
            } => (x - center_x_m).hypot(y - center_y_m) < 0.5 * diameter_m,
        }
    }

    /// Zeroes every node covered by the screen.
    pub fn apply(&self, slice: &mut FieldSlice) -> Result<()> {
        match (&slice.grid, &self.shape) {
            (Grid::Line(_), BlockerShape::Disk { .. }) => {
                return Err(Error::domain("disk blockers need a plane grid; use a strip in line mode"))
            }
            (Grid::Line(g), _) => {
                for (i, v) in slice.values.iter_mut().enumerate() {
                    if self.blocks(g.coordinate(i), 0.0) {
                        *v = Complex64::new(0.0, 0.0);
                    }
                }
            }
            (Grid::Plane(g), _) => {
                for iy in 0..g.y.count {
                    let y = g.y.coordinate(iy);
                    for ix in 0..g.x.count {
                        if self.blocks(g.x.coordinate(ix), y) {
                            slice.values[g.index(ix, iy)] = Complex64::new(0.0, 0.0);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Share of the reference power found in the outer cells of `slice`.
pub fn border_share(slice: &FieldSlice, fraction: f64, reference_power: f64) -> f64 {
    if reference_power <= 0.0 {
        return 0.0;
    }
    let cells = |n: usize| ((fraction * n as f64).ceil() as usize).clamp(1, n / 2);
    let p: f64 = match &slice.grid {
        Grid::Line(g) => {
            let b = cells(g.count);
            slice.values[..b]
                .iter()
                .chain(&slice.values[g.count - b..])
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                * g.step_m
        }
        Grid::Plane(g) => {
            let bx = cells(g.x.count);
            let by = cells(g.y.count);
            let mut acc = 0.0;
            for iy in 0..g.y.count {
                let edge_row = iy < by || iy >= g.y.count - by;
                for ix in 0..g.x.count {
                    if edge_row || ix < bx || ix >= g.x.count - bx {
                        acc += slice.values[g.index(ix, iy)].norm_sqr();
                    }
                }
            }
            acc * g.x.step_m * g.y.step_m
        }
    };
    p / reference_power
}

fn check_border(slice: &FieldSlice, opts: &PropagationOptions, reference: f64) -> Result<()> {
    if let Some(th) = opts.border_threshold {
        let share = border_share(slice, opts.border_fraction, reference);
        if share > th {
            return Err(Error::Numerical(format!(
                "border cells hold {share:.3e} of the source power at z = {} m (limit {th:.1e}); \
                 the transverse window is too small and the periodic transform would wrap power around",
                slice.z_m
            )));
        }
    }
    Ok(())
}

/// Propagates `source` to every plane in `z_list` (absolute, ascending),
/// inserting the blockers on the way.
///
/// Without blockers every output comes straight from the source spectrum,
/// so results are identical to [`from_spectrum`] on the same plane.
pub fn propagate_scan(
    source: &FieldSlice,
    medium: &Medium,
    z_list: &[f64],
    blockers: &[Blocker],
    opts: &PropagationOptions,
) -> Result<Vec<FieldSlice>> {
    if z_list.is_empty() {
        return Err(Error::domain("z-list is empty"));
    }
    if z_list.iter().any(|z| !z.is_finite()) {
        return Err(Error::domain("z-list contains non-finite values"));
    }
    if z_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("z-list must be ascending"));
    }
    let z_end = *z_list.last().unwrap();
    for b in blockers {
        if !(b.z_m > source.z_m && b.z_m < z_end) {
            return Err(Error::domain(format!(
                "blocker at z = {} m lies outside the propagation range ({}, {}) m",
                b.z_m, source.z_m, z_end
            )));
        }
        if matches!(source.grid, Grid::Line(_)) && matches!(b.shape, BlockerShape::Disk { .. }) {
            return Err(Error::domain("disk blockers need a plane grid; use a strip in line mode"));
        }
    }
    if blockers.windows(2).any(|w| w[1].z_m < w[0].z_m) {
        return Err(Error::domain("blockers must be sorted by z"));
    }
    let reference = total_power(source);
    let plans = Plans::new(&source.grid);
    let mut spec = spectrum_with(source, medium, plans.clone());

    if blockers.is_empty() {
        let out: Vec<FieldSlice> = z_list
            .par_iter()
            .map(|&z| field_from(&spec, z, opts.band_limit))
            .collect();
        for s in &out {
            check_border(s, opts, reference)?;
        }
        return Ok(out);
    }

    let mut out = Vec::with_capacity(z_list.len());
    let mut next = 0;
    for &z in z_list {
        while next < blockers.len() && blockers[next].z_m <= z {
            let b = &blockers[next];
            let mut screen = field_from(&spec, b.z_m, opts.band_limit);
            check_border(&screen, opts, reference)?;
            b.apply(&mut screen)?;
            spec = spectrum_with(&screen, medium, plans.clone());
            next += 1;
        }
        let s = field_from(&spec, z, opts.band_limit);
        check_border(&s, opts, reference)?;
        out.push(s);
    }
    Ok(out)
}

/// Propagates a slice to a single plane.
pub fn propagate_to(source: &FieldSlice, medium: &Medium, z_m: f64, opts: &PropagationOptions) -> Result<FieldSlice> {
    Ok(propagate_scan(source, medium, &[z_m], &[], opts)?.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One-dimensional footprint, fields invariant in y.
    Line,
    /// Two-dimensional footprint.
    Plane,
}

/// What the transverse window has to hold.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainRequest {
    pub aperture: Aperture,
    pub trajectories: Vec<Parabola>,
    pub z_max_m: f64,
    pub mode: Mode,
    /// Grid step; `None` means λ/4. Steps up to λ/2 (the propagating-wave
    /// Nyquist limit) are accepted for reduced-resolution runs.
    pub step_m: Option<f64>,
    /// Margin beyond the occupied region; `None` means 10·x_FWHM of the
    /// widest lobe, or Lx/4 when no trajectory is given.
    pub margin_m: Option<f64>,
    /// Padded length over occupied length, at least 2.
    pub pad_factor: f64,
    /// Extra room beyond the aperture in x, e.g. for steered or mirrored beams.
    pub extra_x_m: (f64, f64),
    /// Slices kept in memory at once, used for the memory estimate.
    pub slices: usize,
    pub memory_cap_bytes: u64,
}

impl DomainRequest {
    pub fn new(aperture: Aperture, trajectories: Vec<Parabola>, z_max_m: f64) -> Self {
        DomainRequest {
            aperture,
            trajectories,
            z_max_m,
            mode: Mode::Line,
            step_m: None,
            margin_m: None,
            pad_factor: 2.0,
            extra_x_m: (0.0, 0.0),
            slices: 1,
            memory_cap_bytes: DEFAULT_MEMORY_CAP_BYTES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub grid: Grid,
    /// Region `[lo, hi]` in x that must stay free of wraparound.
    pub occupied_x: (f64, f64),
    pub margin_m: f64,
    pub estimated_bytes: u64,
}

/// Smallest `2^a 3^b 5^c 7^d` not below `n`.
pub fn fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

fn axis(lo: f64, hi: f64, step: f64, pad: f64) -> Result<Grid1D> {
    let occupied = ((hi - lo) / step).ceil() as usize + 1;
    let n = fast_len((pad * occupied as f64).ceil() as usize);
    let center = 0.5 * (lo + hi);
    // align nodes to integer multiples of the step so x = 0 is sampled
    let start = ((center - 0.5 * n as f64 * step) / step).round() * step;
    Grid1D::new(start, step, n)
}

/// Sizes a padded transverse grid for a propagation run.
pub fn auto_domain(req: &DomainRequest, medium: &Medium) -> Result<Domain> {
    if !(req.z_max_m.is_finite() && req.z_max_m > 0.0) {
        return Err(Error::domain("requested z range must be positive"));
    }
    if !(req.pad_factor >= 2.0) {
        return Err(Error::domain("padding factor must be at least 2"));
    }
    let step = req.step_m.unwrap_or(medium.lambda() / 4.0);
    if !(step > 0.0 && step <= medium.lambda() / 2.0 * (1.0 + 1e-12)) {
        return Err(Error::domain(format!("grid step {step} m must be positive and at most λ/2")));
    }
    let lx = req.aperture.lx_m;
    let mut lo = req.aperture.x_left();
    let mut hi = req.aperture.x_right_m;
    let mut fwhm: f64 = 0.0;
    for p in &req.trajectories {
        // extremes of x_c over [0, z_max]: ends and possibly the vertex
        let mut cands = vec![p.x_at(0.0), p.x_at(req.z_max_m)];
        if p.z0_m > 0.0 && p.z0_m < req.z_max_m {
            cands.push(p.x0_m);
        }
        for c in cands {
            lo = lo.min(c);
            hi = hi.max(c);
        }
        fwhm = fwhm.max(airy_fwhm(p.beta_per_m, medium));
    }
    lo -= req.extra_x_m.0;
    hi += req.extra_x_m.1;
    let margin = req
        .margin_m
        .unwrap_or(if req.trajectories.is_empty() { 0.25 * lx } else { 10.0 * fwhm });
    let (lo, hi) = (lo - margin, hi + margin);
    let gx = axis(lo, hi, step, req.pad_factor)?;
    let grid = match req.mode {
        Mode::Line => Grid::Line(gx),
        Mode::Plane => {
            let ly = req.aperture.ly_m;
            if !ly.is_finite() {
                return Err(Error::domain("plane mode needs a finite aperture height Ly"));
            }
            let m_y = req.margin_m.unwrap_or(0.25 * ly);
            let gy = axis(-0.5 * ly - m_y, 0.5 * ly + m_y, step, req.pad_factor)?;
            Grid::Plane(Grid2D::new(gx, gy))
        }
    };
    let per_slice = grid.len() as u64 * 16;
    let estimated = per_slice * (3 + req.slices.max(1) as u64);
    if estimated > req.memory_cap_bytes {
        return Err(Error::Resource {
            required_bytes: estimated,
            cap_bytes: req.memory_cap_bytes,
            detail: format!(
                "{} transverse nodes × {} resident slices at 16 bytes each",
                grid.len(),
                3 + req.slices.max(1)
            ),
        });
    }
    Ok(Domain {
        grid,
        occupied_x: (lo, hi),
        margin_m: margin,
        estimated_bytes: estimated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::footprint::{render_footprint, AmplitudeWindow, Footprint, Taper};
    use crate::oracle::{airy_field, AiryParams};
    use crate::trajectory::{linear_phase, parabolic_phase_paraxial};

    fn m150() -> Medium {
        Medium::new(150e9).unwrap()
    }

    fn gaussian(g: Grid1D, w: f64, tilt: f64) -> FieldSlice {
        FieldSlice::from_fn_1d(g, 0.0, |x| {
            Complex64::from_polar((-(x / w).powi(2)).exp(), tilt * x)
        })
        .unwrap()
    }

    #[test]
    fn parseval_line_and_plane() {
        let m = m150();
        let g = Grid1D::new(-0.3, 5e-4, 1200).unwrap();
        let s = gaussian(g, 0.05, 300.0);
        let sp = to_spectrum(&s, &m);
        assert!((sp.power() - total_power(&s)).abs() <= 1e-10 * total_power(&s));

        let gy = Grid1D::new(-0.05, 1e-3, 90).unwrap();
        let gx = Grid1D::new(-0.1, 1e-3, 210).unwrap();
        let grid = Grid::Plane(Grid2D::new(gx, gy));
        let mut vals = Vec::new();
        for iy in 0..gy.count {
            for ix in 0..gx.count {
                let (x, y) = (gx.coordinate(ix), gy.coordinate(iy));
                vals.push(Complex64::from_polar((-(x / 0.02).powi(2) - (y / 0.01).powi(2)).exp(), 50.0 * y));
            }
        }
        let s = FieldSlice::new(grid, 0.0, vals).unwrap();
        let sp = to_spectrum(&s, &m);
        assert!((sp.power() - total_power(&s)).abs() <= 1e-10 * total_power(&s));
    }

    #[test]
    fn round_trip_forward_then_back() {
        let m = m150();
        let g = Grid1D::new(-0.5, 5e-4, 2000).unwrap();
        let s = gaussian(g, 0.03, 200.0);
        let fwd = from_spectrum(&to_spectrum(&s, &m), 3.0);
        let back = from_spectrum(&to_spectrum(&fwd, &m), 0.0);
        let err: f64 = back.values.iter().zip(&s.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let norm: f64 = s.values.iter().map(|v| v.norm_sqr()).sum();
        assert!((err / norm).sqrt() < 1e-6);
        assert_eq!(back.z_m, 0.0);
    }

    #[test]
    fn plane_wave_only_picks_up_phase() {
        let m = m150();
        let n = 64;
        let g = Grid1D::new(0.0, 5e-4, n).unwrap();
        let kx = 2.0 * TWO_PI / (n as f64 * 5e-4);
        let s = FieldSlice::from_fn_1d(g, 0.0, |x| Complex64::from_polar(1.0, kx * x)).unwrap();
        let z = 1.7;
        let out = from_spectrum(&to_spectrum(&s, &m), z);
        let kz = (m.k().powi(2) - kx * kx).sqrt();
        for (o, i) in out.values.iter().zip(&s.values) {
            assert!((o - i * Complex64::from_polar(1.0, kz * z)).norm() < 1e-9);
        }
    }

    #[test]
    fn evanescent_components_decay() {
        let m = m150();
        let n = 64;
        let step = m.lambda() / 4.0;
        let g = Grid1D::new(0.0, step, n).unwrap();
        let kx = 24.0 * TWO_PI / (n as f64 * step);
        assert!(kx > m.k());
        let s = FieldSlice::from_fn_1d(g, 0.0, |x| Complex64::from_polar(1.0, kx * x)).unwrap();
        let sp = to_spectrum(&s, &m);
        assert!(sp.evanescent_mask().iter().filter(|&&e| e).count() > 0);
        assert!(sp.propagating_power() < 1e-20 * sp.power());
        let z = 1e-3;
        let out = from_spectrum(&sp, z);
        let want = (-(kx * kx - m.k().powi(2)).sqrt() * z).exp();
        assert!((out.values[5].norm() - want).abs() < 1e-9);
    }

    #[test]
    fn scan_without_blockers_is_single_shot() {
        let m = m150();
        let g = Grid1D::new(-1.0, 5e-4, 4000).unwrap();
        let s = gaussian(g, 0.05, 0.0);
        let opts = PropagationOptions::default();
        let scan = propagate_scan(&s, &m, &[1.0, 2.0], &[], &opts).unwrap();
        let single = from_spectrum_with(&to_spectrum(&s, &m), 2.0, &opts);
        assert_eq!(scan[1].values, single.values);
        let zero = propagate_scan(&s, &m, &[1.0, 2.0], &[Blocker::strip(0.5, 0.0, 0.0)], &opts).unwrap();
        for (a, b) in zero[1].values.iter().zip(&scan[1].values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn scan_validation() {
        let m = m150();
        let g = Grid1D::new(-1.0, 5e-4, 400).unwrap();
        let s = gaussian(g, 0.05, 0.0);
        let o = PropagationOptions::exact();
        assert!(propagate_scan(&s, &m, &[], &[], &o).is_err());
        assert!(propagate_scan(&s, &m, &[2.0, 1.0], &[], &o).is_err());
        assert!(propagate_scan(&s, &m, &[1.0], &[Blocker::strip(3.0, 0.0, 0.1)], &o).is_err());
        assert!(propagate_scan(&s, &m, &[2.0], &[Blocker::disk(1.0, 0.0, 0.0, 0.1)], &o).is_err());
    }

    #[test]
    fn blocked_power_does_not_grow() {
        let m = m150();
        let g = Grid1D::new(-1.0, 5e-4, 4000).unwrap();
        let s = gaussian(g, 0.1, 0.0);
        let o = PropagationOptions::default();
        let free = propagate_scan(&s, &m, &[1.0], &[], &o).unwrap();
        let blocked = propagate_scan(&s, &m, &[1.0], &[Blocker::strip(1.0 - 1e-9, 0.02, 0.05)], &o).unwrap();
        assert!(total_power(&blocked[0]) <= total_power(&free[0]));
        let full = propagate_scan(&s, &m, &[2.0], &[Blocker::strip(0.1, 0.0, 10.0)], &o).unwrap();
        assert!(total_power(&full[0]) < 1e-20);
    }

    #[test]
    fn energy_is_conserved() {
        let m = m150();
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        let ap = Aperture::line(1.0).unwrap();
        let dom = auto_domain(&DomainRequest::new(ap, vec![p], 16.0), &m).unwrap();
        let gx = *dom.grid.x_axis();
        let phase = parabolic_phase_paraxial(&p, &m, &ap.phase_axis(gx.step_m).unwrap()).unwrap();
        let win = AmplitudeWindow::new(Taper::Exponential { alpha_per_m: 4.0 }, 1.0, ap).unwrap();
        let src = render_footprint(&Footprint::single(win, phase), &dom.grid, &m).unwrap();
        let out = propagate_scan(&src, &m, &[5.0, 10.0, 15.0], &[], &PropagationOptions::default()).unwrap();
        let p0 = total_power(&src);
        for s in &out {
            assert!((total_power(s) / p0 - 1.0).abs() < 0.005);
        }
    }

    #[test]
    fn wraparound_is_reported() {
        let m = m150();
        let g = Grid1D::new(-0.05, m.lambda() / 4.0, 512).unwrap();
        let s = gaussian(g, 0.005, 0.0);
        let err = propagate_scan(&s, &m, &[5.0], &[], &PropagationOptions::exact().with_border_check())
            .unwrap_err();
        assert!(matches!(err, Error::Numerical(_)), "{err}");
    }

    #[test]
    fn airy_oracle_short_range() {
        let m = m150();
        let p = AiryParams::new(0.002, 4.0, 0.0, 0.0).unwrap();
        let g = Grid1D::new(-2.0, m.lambda() / 4.0, 8192).unwrap();
        let s = FieldSlice::from_fn_1d(g, 0.0, |x| airy_field(&p, x, 0.0, &m)).unwrap();
        let out = from_spectrum(&to_spectrum(&s, &m), 2.0);
        let xc = 0.002 * 4.0;
        let w = 5.0 * airy_fwhm(0.002, &m);
        let (mut e, mut n) = (0.0, 0.0);
        for (i, v) in out.values.iter().enumerate() {
            let x = g.coordinate(i);
            if (x - xc).abs() <= w {
                let want = airy_field(&p, x, 2.0, &m) * Complex64::from_polar(1.0, m.k() * 2.0);
                e += (v - want).norm_sqr();
                n += want.norm_sqr();
            }
        }
        assert!((e / n).sqrt() < 0.01, "{}", (e / n).sqrt());
    }

    #[test]
    fn linear_phase_steers_spectrum_peak() {
        let m = m150();
        let g = Grid1D::new(-1.5, m.lambda() / 4.0, 8192).unwrap();
        let ap = Aperture::line(1.0).unwrap();
        let theta: f64 = 0.2;
        let phase = linear_phase(theta, 0.0, &m, &Grid1D::new(-1.0, 1e-3, 1001).unwrap()).unwrap();
        let s = render_footprint(&Footprint::single(AmplitudeWindow::uniform(ap), phase), &Grid::Line(g), &m).unwrap();
        let sp = to_spectrum(&s, &m);
        let kx = sp.kx();
        let (imax, _) = sp
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        assert!((kx[imax] - m.k() * theta.sin()).abs() <= g.wavenumber_step());
    }

    #[test]
    fn domain_sizing() {
        let m = m150();
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        let ap = Aperture::line(1.0).unwrap();
        let d = auto_domain(&DomainRequest::new(ap, vec![p], 30.0), &m).unwrap();
        let margin = 10.0 * airy_fwhm(0.002, &m);
        assert!((d.occupied_x.0 - (-1.0 - margin)).abs() < 1e-12);
        assert!((d.occupied_x.1 - (1.8 + margin)).abs() < 1e-12);
        let g = d.grid.x_axis();
        assert!(g.start_m <= d.occupied_x.0 && g.end_m() >= d.occupied_x.1);
        assert!(g.span_m() >= 2.0 * (d.occupied_x.1 - d.occupied_x.0) - 2.0 * g.step_m);
        assert!((g.step_m - 0.5e-3).abs() < 1e-6);
        assert_eq!(fast_len(g.count), g.count);
        let flat = auto_domain(&DomainRequest::new(ap, vec![], 30.0), &m).unwrap();
        assert!((flat.occupied_x.0 + 1.25).abs() < 1e-12 && (flat.occupied_x.1 - 0.25).abs() < 1e-12);
        let mut big = DomainRequest::new(Aperture::new(1.0, 1.0).unwrap(), vec![p], 30.0);
        big.mode = Mode::Plane;
        big.memory_cap_bytes = 1 << 20;
        assert!(matches!(auto_domain(&big, &m), Err(Error::Resource { .. })));
    }

    #[test]
    fn fast_lengths() {
        assert_eq!(fast_len(1), 1);
        assert_eq!(fast_len(11), 12);
        assert_eq!(fast_len(1025), 1029);
        assert_eq!(fast_len(4096), 4096);
    }
}
