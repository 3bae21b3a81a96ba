//! Input-plane field `E(x,y,0) = Σ w_n A(x,y) e^{j(φ_n(x) + k sinθ_n y)}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FieldSlice, Grid, Grid1D, Medium};
use crate::trajectory::PhaseProfile;

/// Rectangular aperture `x ∈ [x_r − Lx, x_r]`, `y ∈ [−Ly/2, Ly/2]`, with
/// the right edge `x_r` at 0 unless shifted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aperture {
    pub lx_m: f64,
    #[serde(default = "default_ly", skip_serializing_if = "is_unbounded")]
    pub ly_m: f64,
    #[serde(default)]
    pub x_right_m: f64,
}

fn default_ly() -> f64 {
    f64::INFINITY
}

fn is_unbounded(v: &f64) -> bool {
    v.is_infinite()
}

impl Aperture {
    pub fn new(lx_m: f64, ly_m: f64) -> Result<Self> {
        if !(lx_m.is_finite() && lx_m > 0.0) {
            return Err(Error::domain(format!("aperture length Lx must be positive, got {lx_m}")));
        }
        if !(ly_m > 0.0) {
            return Err(Error::domain(format!("aperture height Ly must be positive, got {ly_m}")));
        }
        Ok(Aperture {
            lx_m,
            ly_m,
            x_right_m: 0.0,
        })
    }

    /// Same aperture centred on `x = 0`.
    pub fn centered(self) -> Self {
        Aperture {
            x_right_m: 0.5 * self.lx_m,
            ..self
        }
    }

    #[inline]
    pub fn x_left(&self) -> f64 {
        self.x_right_m - self.lx_m
    }

    /// Aperture unbounded in y, for line (2D-space) simulations.
    pub fn line(lx_m: f64) -> Result<Self> {
        Aperture::new(lx_m, f64::INFINITY)
    }

    /// Uniform axis over the aperture's x-range with a step no larger than
    /// `max_step_m`, suitable as the support of a phase profile.
    pub fn phase_axis(&self, max_step_m: f64) -> Result<Grid1D> {
        let n = (self.lx_m / max_step_m).ceil().max(3.0) as usize + 1;
        Grid1D::new(self.x_left(), self.lx_m / (n - 1) as f64, n)
    }

    #[inline]
    pub fn contains_x(&self, x: f64) -> bool {
        x >= self.x_left() && x <= self.x_right_m
    }

    #[inline]
    pub fn contains_y(&self, y: f64) -> bool {
        y.abs() <= 0.5 * self.ly_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Taper {
    Uniform,
    Exponential { alpha_per_m: f64 },
    Gaussian { sigma_m: f64, x_center_m: f64 },
}

/// `e^{αx}`; equals 1 at the aperture's right edge.
pub fn exponential_taper(alpha_per_m: f64, x: f64) -> f64 {
    (alpha_per_m * x).exp()
}

/// `exp(−((x − x_m)/σ)²)`.
pub fn gaussian_taper(sigma_m: f64, x_center_m: f64, x: f64) -> f64 {
    let u = (x - x_center_m) / sigma_m;
    (-u * u).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeWindow {
    pub taper: Taper,
    #[serde(default = "unit_level")]
    pub level_v_per_m: f64,
    pub aperture: Aperture,
}

fn unit_level() -> f64 {
    1.0
}

impl AmplitudeWindow {
    pub fn new(taper: Taper, level_v_per_m: f64, aperture: Aperture) -> Result<Self> {
        let w = AmplitudeWindow {
            taper,
            level_v_per_m,
            aperture,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn uniform(aperture: Aperture) -> Self {
        AmplitudeWindow {
            taper: Taper::Uniform,
            level_v_per_m: 1.0,
            aperture,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.level_v_per_m.is_finite() && self.level_v_per_m > 0.0) {
            return Err(Error::domain("amplitude level must be positive"));
        }
        match self.taper {
            Taper::Uniform => {}
            Taper::Exponential { alpha_per_m } => {
                if !alpha_per_m.is_finite() {
                    return Err(Error::domain("taper α must be finite"));
                }
            }
            Taper::Gaussian { sigma_m, x_center_m } => {
                if !(sigma_m.is_finite() && sigma_m > 0.0 && x_center_m.is_finite()) {
                    return Err(Error::domain("Gaussian taper needs σ > 0 and a finite centre"));
                }
            }
        }
        Ok(())
    }

    /// Taper along x inside the aperture; zero outside.
    pub fn along_x(&self, x: f64) -> f64 {
        if !self.aperture.contains_x(x) {
            return 0.0;
        }
        self.level_v_per_m
            * match self.taper {
                Taper::Uniform => 1.0,
                Taper::Exponential { alpha_per_m } => exponential_taper(alpha_per_m, x),
                Taper::Gaussian { sigma_m, x_center_m } => gaussian_taper(sigma_m, x_center_m, x),
            }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        if self.aperture.contains_y(y) {
            self.along_x(x)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct Beam {
    pub weight: Complex64,
    pub phase: PhaseProfile,
    pub steer_angle_rad: f64,
}

impl Beam {
    pub fn new(phase: PhaseProfile) -> Self {
        Beam {
            weight: Complex64::new(1.0, 0.0),
            phase,
            steer_angle_rad: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Footprint {
    pub window: AmplitudeWindow,
    pub beams: Vec<Beam>,
    /// Whether weights were set to `1/√N`.
    pub equal_power: bool,
}

impl Footprint {
    pub fn single(window: AmplitudeWindow, phase: PhaseProfile) -> Self {
        Footprint {
            window,
            beams: vec![Beam::new(phase)],
            equal_power: false,
        }
    }

    /// Superposition with default weights `1/√N`.
    pub fn superposition(window: AmplitudeWindow, phases: Vec<PhaseProfile>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::domain("footprint needs at least one beam"));
        }
        let w = Complex64::new(1.0 / (phases.len() as f64).sqrt(), 0.0);
        Ok(Footprint {
            window,
            beams: phases
                .into_iter()
                .map(|phase| Beam {
                    weight: w,
                    phase,
                    steer_angle_rad: 0.0,
                })
                .collect(),
            equal_power: true,
        })
    }

    pub fn with_beams(window: AmplitudeWindow, beams: Vec<Beam>) -> Result<Self> {
        if beams.is_empty() {
            return Err(Error::domain("footprint needs at least one beam"));
        }
        Ok(Footprint {
            window,
            beams,
            equal_power: false,
        })
    }

    /// Σ |w_n|², recorded so that power normalisation can be reported.
    pub fn weight_power(&self) -> f64 {
        self.beams.iter().map(|b| b.weight.norm_sqr()).sum()
    }
}

fn aperture_nodes(x: &Grid1D, aperture: &Aperture) -> Vec<usize> {
    (0..x.count).filter(|&i| aperture.contains_x(x.coordinate(i))).collect()
}

/// Complex x-column `w A(x) e^{jφ(x)}` of one beam at the given nodes.
fn beam_column(beam: &Beam, window: &AmplitudeWindow, xs: &[f64]) -> Result<Vec<Complex64>> {
    let (lo, hi) = beam.phase.support();
    let tol = 1e-9 * (1.0 + window.aperture.lx_m);
    let a_lo = window.aperture.x_left();
    let a_hi = window.aperture.x_right_m;
    if let (Some(&first), Some(&last)) = (xs.first(), xs.last()) {
        if lo > first.max(a_lo) + tol || hi < last.min(a_hi) - tol {
            return Err(Error::domain(format!(
                "phase support [{lo}, {hi}] is narrower than the sampled aperture [{first}, {last}]"
            )));
        }
    }
    let phases = beam.phase.eval_many(xs)?;
    Ok(xs
        .iter()
        .zip(phases)
        .map(|(&x, p)| beam.weight * window.along_x(x) * Complex64::from_polar(1.0, p))
        .collect())
}

/// Samples the footprint on `grid` at `z = 0`. In line mode the field is
/// taken invariant in y and steering angles have no effect.
pub fn render_footprint(fp: &Footprint, grid: &Grid, medium: &Medium) -> Result<FieldSlice> {
    if fp.beams.is_empty() {
        return Err(Error::domain("footprint needs at least one beam"));
    }
    fp.window.validate()?;
    let xg = grid.x_axis();
    let idx = aperture_nodes(xg, &fp.window.aperture);
    let mut out = FieldSlice::zeros(*grid, 0.0);
    if idx.is_empty() {
        return Err(Error::domain("grid does not sample the aperture"));
    }
    let xs: Vec<f64> = idx.iter().map(|&i| xg.coordinate(i)).collect();
    let columns = fp
        .beams
        .iter()
        .map(|b| beam_column(b, &fp.window, &xs))
        .collect::<Result<Vec<_>>>()?;
    match grid {
        Grid::Line(_) => {
            for col in &columns {
                for (&i, v) in idx.iter().zip(col) {
                    out.values[i] += v;
                }
            }
        }
        Grid::Plane(g) => {
            let k = medium.k();
            for iy in 0..g.y.count {
                let y = g.y.coordinate(iy);
                if !fp.window.aperture.contains_y(y) {
                    continue;
                }
                for (beam, col) in fp.beams.iter().zip(&columns) {
                    let ph = Complex64::from_polar(1.0, k * beam.steer_angle_rad.sin() * y);
                    for (&i, v) in idx.iter().zip(col) {
                        out.values[g.index(i, iy)] += v * ph;
                    }
                }
            }
        }
    }
    Ok(out)
}
