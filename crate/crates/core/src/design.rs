//! A complete beam design: aperture window, phase law and optional array
//! realisation, rebuilt on demand for any frequency and grid.

use serde::{Deserialize, Serialize};

use crate::array::{element_field, make_codeword, sample_phase, ArrayConfig, BitDepth};
use crate::error::{Error, Result};
use crate::footprint::{render_footprint, AmplitudeWindow, Beam, Footprint};
use crate::grid::{FieldSlice, Grid, Medium};
use crate::trajectory::{
    circular_phase, linear_phase, parabolic_phase_extended, parabolic_phase_nonparaxial,
    parabolic_phase_paraxial, phase_from_trajectory_numeric, Circle, Parabola, PhaseProfile, TrajectorySpec,
};

/// How one beam's input phase is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum PhaseSpec {
    /// Caustic `x0 + β(z − z0)²`.
    Parabolic {
        #[serde(flatten)]
        parabola: Parabola,
        #[serde(default)]
        paraxial: bool,
        /// Continue the phase past the caustic's starting point.
        #[serde(default)]
        extend: bool,
    },
    Circular {
        #[serde(flatten)]
        circle: Circle,
        /// Use the conjugate phase, whose caustic lies in front of the aperture.
        #[serde(default)]
        conjugate: bool,
    },
    Numeric { z_m: Vec<f64>, x_m: Vec<f64> },
    /// Conventional beam steered by `angle_rad` (zero: broadside).
    Linear {
        #[serde(default)]
        angle_rad: f64,
    },
    /// Lens focusing at `(x_focus_m, z_focus_m)`, paraxial quadratic phase.
    Focus { x_focus_m: f64, z_focus_m: f64 },
}

impl PhaseSpec {
    pub fn parabola(&self) -> Option<Parabola> {
        match self {
            PhaseSpec::Parabolic { parabola, .. } => Some(*parabola),
            _ => None,
        }
    }

    pub fn profile(&self, medium: &Medium, axis: &crate::grid::Grid1D) -> Result<PhaseProfile> {
        match self {
            PhaseSpec::Parabolic {
                parabola,
                paraxial,
                extend,
            } => {
                if *extend {
                    parabolic_phase_extended(parabola, medium, axis, *paraxial)
                } else if *paraxial {
                    parabolic_phase_paraxial(parabola, medium, axis)
                } else {
                    parabolic_phase_nonparaxial(parabola, medium, axis)
                }
            }
            PhaseSpec::Circular { circle, conjugate } => {
                let p = circular_phase(circle, medium, axis)?;
                Ok(if *conjugate { p.conjugated() } else { p })
            }
            PhaseSpec::Numeric { z_m, x_m } => phase_from_trajectory_numeric(
                &TrajectorySpec::Numeric {
                    z_m: z_m.clone(),
                    x_m: x_m.clone(),
                },
                medium,
                axis,
            ),
            PhaseSpec::Linear { angle_rad } => linear_phase(*angle_rad, axis.end_m(), medium, axis),
            PhaseSpec::Focus { x_focus_m, z_focus_m } => {
                if !(*z_focus_m > 0.0) {
                    return Err(Error::domain("focus distance must be positive"));
                }
                let k = medium.k();
                let xr = axis.end_m();
                let phase_rad = axis
                    .coordinates()
                    .iter()
                    .map(|&x| {
                        let r = |u: f64| ((u - x_focus_m).powi(2) + z_focus_m * z_focus_m).sqrt();
                        -k * (r(x) - r(xr))
                    })
                    .collect();
                Ok(PhaseProfile {
                    grid: *axis,
                    phase_rad,
                    regime: crate::trajectory::Regime::Nonparaxial,
                    law: None,
                })
            }
        }
    }
}

/// Profile of `φ(−x)` sampled on `axis`.
fn mirrored(phase: &PhaseSpec, medium: &Medium, axis: &crate::grid::Grid1D) -> Result<PhaseProfile> {
    let flipped = crate::grid::Grid1D::new(-axis.end_m(), axis.step_m, axis.count)?;
    let p = phase.profile(medium, &flipped)?;
    let mut phase_rad = p.phase_rad;
    phase_rad.reverse();
    Ok(PhaseProfile {
        grid: *axis,
        phase_rad,
        regime: p.regime,
        law: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    pub phase: PhaseSpec,
    /// Use `φ(−x)`, the mirror image about `x = 0`.
    #[serde(default)]
    pub mirror: bool,
    /// Complex weight `(re, im)`; all beams default to `1/√N`.
    #[serde(default)]
    pub weight: Option<(f64, f64)>,
    #[serde(default)]
    pub steer_y_rad: f64,
}

/// Array realisation of a single-beam design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    /// Element spacing; `None` means λ/2 at the design frequency.
    #[serde(default)]
    pub spacing_m: Option<f64>,
    /// Spacing as a multiple of λ; takes precedence over `spacing_m`.
    #[serde(default)]
    pub spacing_wavelengths: Option<f64>,
    #[serde(default = "continuous")]
    pub bit_depth: BitDepth,
    #[serde(default)]
    pub element_width_m: Option<f64>,
}

fn continuous() -> BitDepth {
    BitDepth::Continuous
}

impl Default for ArraySpec {
    fn default() -> Self {
        ArraySpec {
            spacing_m: None,
            spacing_wavelengths: None,
            bit_depth: BitDepth::Continuous,
            element_width_m: None,
        }
    }
}

impl ArraySpec {
    pub fn spacing(&self, medium: &Medium) -> f64 {
        match (self.spacing_wavelengths, self.spacing_m) {
            (Some(w), _) => w * medium.lambda(),
            (None, Some(d)) => d,
            (None, None) => 0.5 * medium.lambda(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamDesign {
    pub window: AmplitudeWindow,
    pub beams: Vec<BeamSpec>,
    #[serde(default)]
    pub array: Option<ArraySpec>,
}

impl BeamDesign {
    pub fn single(window: AmplitudeWindow, phase: PhaseSpec) -> Self {
        BeamDesign {
            window,
            beams: vec![BeamSpec {
                phase,
                mirror: false,
                weight: None,
                steer_y_rad: 0.0,
            }],
            array: None,
        }
    }

    pub fn with_array(mut self, array: ArraySpec) -> Self {
        self.array = Some(array);
        self
    }

    /// The first beam's parabola, used as the reference trajectory.
    pub fn parabola(&self) -> Option<Parabola> {
        self.beams.first().and_then(|b| b.phase.parabola())
    }

    pub fn parabolas(&self) -> Vec<Parabola> {
        self.beams.iter().filter_map(|b| b.phase.parabola()).collect()
    }

    pub fn footprint(&self, medium: &Medium, max_step_m: f64) -> Result<Footprint> {
        if self.beams.is_empty() {
            return Err(Error::domain("design has no beams"));
        }
        let axis = self.window.aperture.phase_axis(max_step_m)?;
        let default_w = 1.0 / (self.beams.len() as f64).sqrt();
        let beams = self
            .beams
            .iter()
            .map(|b| {
                Ok(Beam {
                    weight: b
                        .weight
                        .map(|(re, im)| num_complex::Complex64::new(re, im))
                        .unwrap_or(num_complex::Complex64::new(default_w, 0.0)),
                    phase: if b.mirror {
                        mirrored(&b.phase, medium, &axis)?
                    } else {
                        b.phase.profile(medium, &axis)?
                    },
                    steer_angle_rad: b.steer_y_rad,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut fp = Footprint::with_beams(self.window, beams)?;
        fp.equal_power = self.beams.iter().all(|b| b.weight.is_none()) && self.beams.len() > 1;
        Ok(fp)
    }

    /// Array configuration spanning the aperture, with every element active.
    pub fn array_config(&self, medium: &Medium) -> Result<Option<ArrayConfig>> {
        let Some(spec) = &self.array else { return Ok(None) };
        if self.window.aperture.x_right_m != 0.0 {
            return Err(Error::domain("array realisations need the aperture's right edge at x = 0"));
        }
        let mut cfg = ArrayConfig::spanning(self.window.aperture.lx_m, spec.spacing(medium))?;
        cfg.bit_depth = spec.bit_depth;
        cfg.element_width_m = spec.element_width_m;
        cfg.validate()?;
        Ok(Some(cfg))
    }

    /// Source field at z = 0; `mask` overrides the array's active columns.
    pub fn source(&self, medium: &Medium, grid: &Grid, mask: Option<&[bool]>) -> Result<FieldSlice> {
        let step = grid.x_axis().step_m;
        let fp = self.footprint(medium, step)?;
        match self.array_config(medium)? {
            None => {
                if mask.is_some() {
                    return Err(Error::domain("an element mask needs an array realisation"));
                }
                render_footprint(&fp, grid, medium)
            }
            Some(mut cfg) => {
                if fp.beams.len() != 1 {
                    return Err(Error::domain("array realisation supports a single beam"));
                }
                if let Some(m) = mask {
                    cfg.active = m.to_vec();
                    cfg.validate()?;
                }
                let phases = sample_phase(&fp.beams[0].phase, &cfg)?;
                let code = make_codeword(&phases, &cfg)?;
                let mut s = element_field(&code, grid, &self.window, medium)?;
                let w = fp.beams[0].weight;
                if w != num_complex::Complex64::new(1.0, 0.0) {
                    s = s.scaled(w);
                }
                Ok(s)
            }
        }
    }
}
