//! Units, sampled grids and the complex field container.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Homogeneous free-space medium at a single operating frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub frequency_hz: f64,
    pub wavelength_m: f64,
    pub wavenumber_rad_per_m: f64,
}

impl Medium {
    pub fn new(frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return Err(Error::domain(format!(
                "frequency must be positive and finite, got {frequency_hz}"
            )));
        }
        let wavelength_m = SPEED_OF_LIGHT / frequency_hz;
        Ok(Medium {
            frequency_hz,
            wavelength_m,
            wavenumber_rad_per_m: 2.0 * PI / wavelength_m,
        })
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.wavenumber_rad_per_m
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.wavelength_m
    }

    /// Fraunhofer distance 2D²/λ of an aperture of size `d_m`.
    pub fn fraunhofer_distance(&self, d_m: f64) -> f64 {
        2.0 * d_m * d_m / self.wavelength_m
    }
}

/// `make_medium`: the free-function spelling used by the scenario layer.
pub fn make_medium(frequency_hz: f64) -> Result<Medium> {
    Medium::new(frequency_hz)
}

/// Uniformly sampled axis: `coordinate(i) = start + i * step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub start_m: f64,
    pub step_m: f64,
    pub count: usize,
}

impl Grid1D {
    pub fn new(start_m: f64, step_m: f64, count: usize) -> Result<Self> {
        if !(step_m.is_finite() && step_m > 0.0) {
            return Err(Error::domain(format!("grid step must be positive, got {step_m}")));
        }
        if !start_m.is_finite() {
            return Err(Error::domain("grid start must be finite"));
        }
        if count < 2 {
            return Err(Error::domain(format!("grid needs at least 2 nodes, got {count}")));
        }
        Ok(Grid1D {
            start_m,
            step_m,
            count,
        })
    }

    /// Grid whose nodes are the midpoints of `count` cells tiling `[lo, hi]`.
    pub fn cell_centered(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::domain(format!("empty interval [{lo}, {hi}]")));
        }
        let step = (hi - lo) / count as f64;
        Grid1D::new(lo + 0.5 * step, step, count)
    }

    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        self.start_m + i as f64 * self.step_m
    }

    pub fn end_m(&self) -> f64 {
        self.coordinate(self.count - 1)
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.coordinate(i)).collect()
    }

    /// Total length covered by the cells (count * step).
    pub fn span_m(&self) -> f64 {
        self.count as f64 * self.step_m
    }

    /// Angular wavenumbers of the discrete transform, in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.count;
        let dk = 2.0 * PI / (n as f64 * self.step_m);
        (0..n)
            .map(|j| {
                let m = if j <= (n - 1) / 2 { j as isize } else { j as isize - n as isize };
                m as f64 * dk
            })
            .collect()
    }

    pub fn wavenumber_step(&self) -> f64 {
        2.0 * PI / (self.count as f64 * self.step_m)
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let f = ((x - self.start_m) / self.step_m).round();
        f.clamp(0.0, (self.count - 1) as f64) as usize
    }

    /// Fraction of node `i`'s cell that falls inside `[lo, hi]`.
    fn cell_overlap(&self, i: usize, lo: f64, hi: f64) -> f64 {
        let c = self.coordinate(i);
        let a = (c - 0.5 * self.step_m).max(lo);
        let b = (c + 0.5 * self.step_m).min(hi);
        ((b - a) / self.step_m).clamp(0.0, 1.0)
    }

    /// Index range of nodes whose cells touch `[lo, hi]`.
    fn touching(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let h = self.step_m;
        let first = ((lo - self.start_m) / h - 0.5).floor().max(0.0) as usize;
        let last = (((hi - self.start_m) / h + 1.5).ceil().max(0.0) as usize).min(self.count);
        first.min(self.count)..last
    }
}

/// Tensor-product transverse grid; values are stored row-major with x fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Grid2D { x, y }
    }

    pub fn len(&self) -> usize {
        self.x.count * self.y.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.x.count + ix
    }
}

/// Transverse sampling of a slice: a line (fields invariant in y) or a plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grid {
    Line(Grid1D),
    Plane(Grid2D),
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Line(g) => g.count,
            Grid::Plane(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Measure of one cell: length in 1D, area in 2D.
    pub fn cell_measure(&self) -> f64 {
        match self {
            Grid::Line(g) => g.step_m,
            Grid::Plane(g) => g.x.step_m * g.y.step_m,
        }
    }

    pub fn x_axis(&self) -> &Grid1D {
        match self {
            Grid::Line(g) => g,
            Grid::Plane(g) => &g.x,
        }
    }
}

/// Axis-aligned measurement window. `y` is ignored for line slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_center_m: f64,
    pub x_width_m: f64,
    #[serde(default)]
    pub y_center_m: f64,
    #[serde(default = "Window::unbounded")]
    pub y_width_m: f64,
}

impl Window {
    fn unbounded() -> f64 {
        f64::INFINITY
    }

    pub fn x(center: f64, width: f64) -> Self {
        Window {
            x_center_m: center,
            x_width_m: width,
            y_center_m: 0.0,
            y_width_m: f64::INFINITY,
        }
    }

    pub fn xy(cx: f64, cy: f64, wx: f64, wy: f64) -> Self {
        Window {
            x_center_m: cx,
            x_width_m: wx,
            y_center_m: cy,
            y_width_m: wy,
        }
    }

    /// Square window of side `side` (the default receiver probe shape).
    pub fn square(cx: f64, cy: f64, side: f64) -> Self {
        Window::xy(cx, cy, side, side)
    }

    fn x_range(&self) -> (f64, f64) {
        (
            self.x_center_m - 0.5 * self.x_width_m,
            self.x_center_m + 0.5 * self.x_width_m,
        )
    }

    fn y_range(&self) -> (f64, f64) {
        (
            self.y_center_m - 0.5 * self.y_width_m,
            self.y_center_m + 0.5 * self.y_width_m,
        )
    }
}

/// Complex scalar field (V/m) on a transverse grid at one z-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSlice {
    pub grid: Grid,
    pub z_m: f64,
    pub values: Vec<Complex64>,
}

impl FieldSlice {
    pub fn new(grid: Grid, z_m: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "field has {} values but grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Numerical(format!("non-finite field value at node {i}")));
        }
        Ok(FieldSlice { grid, z_m, values })
    }

    pub fn zeros(grid: Grid, z_m: f64) -> Self {
        FieldSlice {
            grid,
            z_m,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Line slice sampled from a closure of x.
    pub fn from_fn_1d(grid: Grid1D, z_m: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.coordinates().into_iter().map(f).collect();
        FieldSlice::new(Grid::Line(grid), z_m, values)
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        FieldSlice {
            grid: self.grid,
            z_m: self.z_m,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Intensity integrated over y, giving a profile along x.
    pub fn x_profile(&self) -> Vec<f64> {
        match &self.grid {
            Grid::Line(_) => self.intensity(),
            Grid::Plane(g) => {
                let mut out = vec![0.0; g.x.count];
                for iy in 0..g.y.count {
                    for (ix, o) in out.iter_mut().enumerate() {
                        *o += self.values[g.index(ix, iy)].norm_sqr() * g.y.step_m;
                    }
                }
                out
            }
        }
    }

    /// Intensity along x at the y node nearest to `y`, or the line itself.
    pub fn x_cut(&self, y: f64) -> Vec<f64> {
        match &self.grid {
            Grid::Line(_) => self.intensity(),
            Grid::Plane(g) => {
                let iy = g.y.nearest_index(y);
                (0..g.x.count)
                    .map(|ix| self.values[g.index(ix, iy)].norm_sqr())
                    .collect()
            }
        }
    }
}

/// Midpoint-rule integral of |E|² over the whole slice.
pub fn total_power(slice: &FieldSlice) -> f64 {
    slice.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * slice.grid.cell_measure()
}

/// Integral of |E|² over the part of each cell lying inside `window`.
pub fn window_power(slice: &FieldSlice, window: &Window) -> Result<f64> {
    let (xl, xh) = window.x_range();
    if !(window.x_width_m >= 0.0) || !(window.y_width_m >= 0.0) {
        return Err(Error::domain("window extent must be non-negative"));
    }
    let xg = slice.grid.x_axis();
    let grid_lo = xg.start_m - 0.5 * xg.step_m;
    let grid_hi = xg.end_m() + 0.5 * xg.step_m;
    if xh < grid_lo || xl > grid_hi {
        return Err(Error::domain(format!(
            "window x-range [{xl}, {xh}] does not intersect grid [{grid_lo}, {grid_hi}]"
        )));
    }
    match &slice.grid {
        Grid::Line(g) => {
            let mut acc = 0.0;
            for i in g.touching(xl, xh) {
                let w = g.cell_overlap(i, xl, xh);
                if w > 0.0 {
                    acc += w * slice.values[i].norm_sqr();
                }
            }
            Ok(acc * g.step_m)
        }
        Grid::Plane(g) => {
            let (yl, yh) = window.y_range();
            let ylo = g.y.start_m - 0.5 * g.y.step_m;
            let yhi = g.y.end_m() + 0.5 * g.y.step_m;
            if yh < ylo || yl > yhi {
                return Err(Error::domain(format!(
                    "window y-range [{yl}, {yh}] does not intersect grid [{ylo}, {yhi}]"
                )));
            }
            let xs: Vec<(usize, f64)> = g
                .x
                .touching(xl, xh)
                .map(|i| (i, g.x.cell_overlap(i, xl, xh)))
                .filter(|(_, w)| *w > 0.0)
                .collect();
            let mut acc = 0.0;
            for iy in g.y.touching(yl, yh) {
                let wy = g.y.cell_overlap(iy, yl, yh);
                if wy <= 0.0 {
                    continue;
                }
                for &(ix, wx) in &xs {
                    acc += wx * wy * slice.values[g.index(ix, iy)].norm_sqr();
                }
            }
            Ok(acc * g.x.step_m * g.y.step_m)
        }
    }
}
