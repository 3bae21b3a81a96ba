//! Scenario configuration, validation, execution and the on-disk bundle.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    analysis_options, beam_tube_power, frequency_sweep, k_content, num, periodic_efficiency, power_ratio,
    quantization_efficiency, subarray_efficiency, track_main_lobe, write_sweep_csv, CrossSection, EfficiencySetup,
    SweepOptions, PROBE_SIDE_M,
};
use crate::array::{grating_orders, make_codeword, sample_phase, BitDepth, Codeword};
use crate::design::BeamDesign;
use crate::error::{Error, Result};
use crate::footprint::Aperture;
use crate::grid::{total_power, window_power, FieldSlice, Grid, Medium, Window};
use crate::oracle::{aaf_field, airy_field, AiryParams};
use crate::propagation::{
    auto_domain, from_spectrum_with, propagate_scan, to_spectrum, Blocker, BlockerShape, DomainRequest, Mode,
    PropagationOptions, DEFAULT_MEMORY_CAP_BYTES,
};
use crate::trajectory::{
    airy_fwhm, airy_peak_offset, airy_spatial_bandwidth, focal_distance, z_max, Parabola,
};

pub const UNITS_SENTINEL: &str = "SI";
pub const BUNDLE_FORMAT: u32 = 1;

/// CI mode keeps at most this many planes in any z-list.
const CI_MAX_PLANES: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Must be `"SI"`: every quantity is in metres, hertz, volts per metre.
    pub units: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub frequencies_hz: Vec<f64>,
    #[serde(default = "line_mode")]
    pub mode: Mode,
    pub sources: Vec<NamedSource>,
    /// Planes at which full slices are stored, ascending.
    pub z_list_m: Vec<f64>,
    #[serde(default)]
    pub blockers: Vec<Blocker>,
    #[serde(default)]
    pub probes: Vec<Probe>,
    #[serde(default)]
    pub metrics: Vec<MetricSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default = "yes")]
    pub write_slices: bool,
}

fn line_mode() -> Mode {
    Mode::Line
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSource {
    pub name: String,
    pub source: SourceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    /// Aperture window with synthesized phases, optionally realised by an array.
    Design(BeamDesign),
    /// Closed-form Airy (or mirror-pair) field at z = 0, truncated to `|x| ≤ half_width_m`.
    Airy {
        beta_per_m: f64,
        #[serde(default)]
        alpha_per_m: f64,
        #[serde(default)]
        x0_m: f64,
        #[serde(default)]
        z0_m: f64,
        #[serde(default)]
        aaf: bool,
        half_width_m: f64,
    },
}

impl SourceSpec {
    fn aperture(&self) -> Aperture {
        match self {
            SourceSpec::Design(d) => d.window.aperture,
            SourceSpec::Airy { half_width_m, .. } => Aperture {
                lx_m: 2.0 * half_width_m,
                ly_m: f64::INFINITY,
                x_right_m: *half_width_m,
            },
        }
    }

    /// Designed caustics; mirrored beams are returned with `mirrored = true`.
    fn parabolas(&self) -> Vec<(Parabola, bool)> {
        match self {
            SourceSpec::Design(d) => d
                .beams
                .iter()
                .filter_map(|b| b.phase.parabola().map(|p| (p, b.mirror)))
                .collect(),
            SourceSpec::Airy {
                beta_per_m,
                x0_m,
                z0_m,
                aaf,
                ..
            } => {
                let p = Parabola {
                    beta_per_m: *beta_per_m,
                    x0_m: *x0_m,
                    z0_m: *z0_m,
                };
                if *aaf {
                    vec![(p, false), (p, true)]
                } else {
                    vec![(p, false)]
                }
            }
        }
    }

    fn tracked(&self) -> Vec<Parabola> {
        self.parabolas().into_iter().filter(|(_, m)| !m).map(|(p, _)| p).collect()
    }

    fn array_spacing(&self, medium: &Medium) -> Option<f64> {
        match self {
            SourceSpec::Design(d) => d.array.as_ref().map(|a| a.spacing(medium)),
            SourceSpec::Airy { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    pub name: String,
    pub x_m: f64,
    pub z_m: f64,
    #[serde(default)]
    pub y_m: f64,
    #[serde(default = "probe_side")]
    pub side_m: f64,
}

fn probe_side() -> f64 {
    PROBE_SIDE_M
}

impl Probe {
    pub fn window(&self, mode: Mode) -> Window {
        match mode {
            Mode::Line => Window::x(self.x_m, self.side_m),
            Mode::Plane => Window::square(self.x_m, self.y_m, self.side_m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    /// Main-lobe track of every non-mirrored parabolic beam over `z_list_m`.
    Track,
    /// Beam-tube and total power over `z_list_m`.
    TubePower {
        #[serde(default)]
        half_width_m: Option<f64>,
    },
    /// Free-space `|E|²` at `(x, y = 0)` on a dense z-range.
    OnAxis {
        #[serde(default)]
        x_m: f64,
        z_start_m: f64,
        z_stop_m: f64,
        count: usize,
    },
    /// Power inside every probe window at the probe's plane.
    Probes,
    /// Received-power ratio at `probe` for blockers moved along the line of
    /// sight from `los_from_m` (x, z) to the probe.
    Blockage {
        probe: String,
        #[serde(default)]
        los_from_m: (f64, f64),
        widths_m: Vec<f64>,
        z_positions_m: Vec<f64>,
    },
    KContent {
        #[serde(default)]
        z_m: f64,
    },
    CrossSection {
        z_m: f64,
    },
    Quantization {
        bits: Vec<u32>,
    },
    Subarray {
        fractions: Vec<f64>,
        realizations: usize,
        #[serde(default = "two")]
        periodic_period: usize,
    },
    /// Frequency sweep over all `frequencies_hz`.
    Sweep {
        /// Cross-section plane as a fraction of `z_max`; `None` means 1.
        #[serde(default)]
        z_fraction_of_z_max: Option<f64>,
    },
}

fn two() -> usize {
    2
}

impl MetricSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MetricSpec::Track => "track",
            MetricSpec::TubePower { .. } => "tube_power",
            MetricSpec::OnAxis { .. } => "on_axis",
            MetricSpec::Probes => "probes",
            MetricSpec::Blockage { .. } => "blockage",
            MetricSpec::KContent { .. } => "k_content",
            MetricSpec::CrossSection { .. } => "cross_section",
            MetricSpec::Quantization { .. } => "quantization",
            MetricSpec::Subarray { .. } => "subarray",
            MetricSpec::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub step_m: Option<f64>,
    /// Step in wavelengths when `step_m` is absent.
    #[serde(default = "quarter")]
    pub step_wavelengths: f64,
    #[serde(default)]
    pub margin_m: Option<f64>,
    #[serde(default = "pad")]
    pub pad_factor: f64,
    #[serde(default)]
    pub extra_x_m: (f64, f64),
    #[serde(default = "cap")]
    pub memory_cap_bytes: u64,
    #[serde(default = "yes")]
    pub band_limit: bool,
    #[serde(default)]
    pub border_threshold: Option<f64>,
    /// Set by CI mode: λ/2 steps and capped z-lists.
    #[serde(default)]
    pub reduced: bool,
}

fn quarter() -> f64 {
    0.25
}

fn pad() -> f64 {
    2.0
}

fn cap() -> u64 {
    DEFAULT_MEMORY_CAP_BYTES
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            step_m: None,
            step_wavelengths: quarter(),
            margin_m: None,
            pad_factor: pad(),
            extra_x_m: (0.0, 0.0),
            memory_cap_bytes: cap(),
            band_limit: true,
            border_threshold: None,
            reduced: false,
        }
    }
}

impl GridSpec {
    fn options(&self) -> PropagationOptions {
        PropagationOptions {
            band_limit: self.band_limit,
            border_threshold: self.border_threshold,
            ..analysis_options()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Single,
    Double,
}

/// Parses a scenario and validates it; errors name the offending key.
pub fn parse(text: &str) -> Result<Scenario> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::validation("$", e.to_string()))?;
    match value.get("units") {
        Some(serde_json::Value::String(s)) if s == UNITS_SENTINEL => {}
        Some(other) => {
            return Err(Error::validation(
                "units",
                format!("expected \"{UNITS_SENTINEL}\", got {other}"),
            ))
        }
        None => return Err(Error::validation("units", format!("missing; must be \"{UNITS_SENTINEL}\""))),
    }
    let scn: Scenario = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::validation(if path.is_empty() { "$".into() } else { path }, e.into_inner().to_string())
    })?;
    scn.validate()?;
    Ok(scn)
}

pub fn load(path: &Path) -> Result<Scenario> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse(&text)
}

fn positive(path: String, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(path, format!("must be positive and finite, got {v}")))
    }
}

fn finite(path: String, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(path, format!("must be finite, got {v}")))
    }
}

fn safe_name(path: String, name: &str) -> Result<()> {
    if !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        Ok(())
    } else {
        Err(Error::validation(
            path,
            format!("`{name}` must be non-empty and use only letters, digits, '_' or '-'"),
        ))
    }
}

impl Scenario {
    /// Checks every field; nothing is computed before this passes.
    pub fn validate(&self) -> Result<()> {
        if self.units != UNITS_SENTINEL {
            return Err(Error::validation("units", format!("must be \"{UNITS_SENTINEL}\"")));
        }
        if self.frequencies_hz.is_empty() {
            return Err(Error::validation("frequencies_hz", "at least one frequency is required"));
        }
        for (i, f) in self.frequencies_hz.iter().enumerate() {
            positive(format!("frequencies_hz[{i}]"), *f)?;
        }
        if self.sources.is_empty() {
            return Err(Error::validation("sources", "at least one source is required"));
        }
        for (i, s) in self.sources.iter().enumerate() {
            let at = format!("sources[{i}]");
            safe_name(format!("{at}.name"), &s.name)?;
            if self.sources[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::validation(format!("{at}.name"), format!("duplicate source `{}`", s.name)));
            }
            self.validate_source(&format!("{at}.source"), &s.source)?;
        }
        if self.z_list_m.is_empty() {
            return Err(Error::validation("z_list_m", "z-list is empty"));
        }
        for (i, z) in self.z_list_m.iter().enumerate() {
            if !(z.is_finite() && *z >= 0.0) {
                return Err(Error::validation(format!("z_list_m[{i}]"), format!("must be finite and ≥ 0, got {z}")));
            }
        }
        if self.z_list_m.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::validation("z_list_m", "must be ascending"));
        }
        let z_last = *self.z_list_m.last().unwrap();
        for (i, b) in self.blockers.iter().enumerate() {
            let at = format!("blockers[{i}]");
            positive(format!("{at}.z_m"), b.z_m)?;
            match b.shape {
                BlockerShape::Strip { center_x_m, width_m } => {
                    finite(format!("{at}.shape.center_x_m"), center_x_m)?;
                    if !(width_m >= 0.0 && width_m.is_finite()) {
                        return Err(Error::validation(format!("{at}.shape.width_m"), "must be finite and ≥ 0"));
                    }
                }
                BlockerShape::Disk { diameter_m, .. } => {
                    if self.mode == Mode::Line {
                        return Err(Error::validation(format!("{at}.shape"), "disk blockers need plane mode; use a strip"));
                    }
                    if !(diameter_m >= 0.0 && diameter_m.is_finite()) {
                        return Err(Error::validation(format!("{at}.shape.diameter_m"), "must be finite and ≥ 0"));
                    }
                }
            }
            if b.z_m >= z_last {
                return Err(Error::validation(
                    format!("{at}.z_m"),
                    format!("blocker at {} m must lie before the last plane {z_last} m", b.z_m),
                ));
            }
        }
        if self.blockers.windows(2).any(|w| w[1].z_m < w[0].z_m) {
            return Err(Error::validation("blockers", "must be sorted by z_m"));
        }
        for (i, p) in self.probes.iter().enumerate() {
            let at = format!("probes[{i}]");
            safe_name(format!("{at}.name"), &p.name)?;
            if self.probes[..i].iter().any(|o| o.name == p.name) {
                return Err(Error::validation(format!("{at}.name"), format!("duplicate probe `{}`", p.name)));
            }
            finite(format!("{at}.x_m"), p.x_m)?;
            finite(format!("{at}.y_m"), p.y_m)?;
            positive(format!("{at}.z_m"), p.z_m)?;
            positive(format!("{at}.side_m"), p.side_m)?;
        }
        for (i, m) in self.metrics.iter().enumerate() {
            self.validate_metric(&format!("metrics[{i}]"), m)?;
        }
        let g = &self.grid;
        if let Some(s) = g.step_m {
            positive("grid.step_m".into(), s)?;
            let lmin = self.frequencies_hz.iter().map(|f| crate::grid::SPEED_OF_LIGHT / f).fold(f64::INFINITY, f64::min);
            if s > 0.5 * lmin * (1.0 + 1e-12) {
                return Err(Error::validation("grid.step_m", format!("{s} m exceeds λ/2 = {} m", 0.5 * lmin)));
            }
        }
        if !(g.step_wavelengths > 0.0 && g.step_wavelengths <= 0.5) {
            return Err(Error::validation("grid.step_wavelengths", "must lie in (0, 0.5]"));
        }
        if let Some(m) = g.margin_m {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::validation("grid.margin_m", "must be finite and ≥ 0"));
            }
        }
        if !(g.pad_factor >= 2.0 && g.pad_factor.is_finite()) {
            return Err(Error::validation("grid.pad_factor", "must be at least 2"));
        }
        for (j, e) in [g.extra_x_m.0, g.extra_x_m.1].iter().enumerate() {
            if !(*e >= 0.0 && e.is_finite()) {
                return Err(Error::validation(format!("grid.extra_x_m[{j}]"), "must be finite and ≥ 0"));
            }
        }
        if g.memory_cap_bytes == 0 {
            return Err(Error::validation("grid.memory_cap_bytes", "must be positive"));
        }
        if let Some(t) = g.border_threshold {
            positive("grid.border_threshold".into(), t)?;
        }
        Ok(())
    }

    fn validate_source(&self, at: &str, s: &SourceSpec) -> Result<()> {
        match s {
            SourceSpec::Design(d) => {
                let ap = d.window.aperture;
                positive(format!("{at}.window.aperture.lx_m"), ap.lx_m)?;
                finite(format!("{at}.window.aperture.x_right_m"), ap.x_right_m)?;
                if !(ap.ly_m > 0.0) {
                    return Err(Error::validation(format!("{at}.window.aperture.ly_m"), "must be positive"));
                }
                if self.mode == Mode::Plane && !ap.ly_m.is_finite() {
                    return Err(Error::validation(format!("{at}.window.aperture.ly_m"), "plane mode needs a finite Ly"));
                }
                d.window
                    .validate()
                    .map_err(|e| Error::validation(format!("{at}.window"), e.to_string()))?;
                if d.beams.is_empty() {
                    return Err(Error::validation(format!("{at}.beams"), "at least one beam is required"));
                }
                if d.array.is_some() && d.beams.len() != 1 {
                    return Err(Error::validation(format!("{at}.array"), "array realisation supports a single beam"));
                }
                if d.array.is_some() && ap.x_right_m != 0.0 {
                    return Err(Error::validation(
                        format!("{at}.window.aperture.x_right_m"),
                        "array realisations need the right edge at x = 0",
                    ));
                }
                if let Some(a) = &d.array {
                    if let Some(w) = a.spacing_wavelengths {
                        positive(format!("{at}.array.spacing_wavelengths"), w)?;
                    }
                    if let Some(w) = a.spacing_m {
                        positive(format!("{at}.array.spacing_m"), w)?;
                    }
                    if let BitDepth::Bits(0) = a.bit_depth {
                        return Err(Error::validation(format!("{at}.array.bit_depth"), "bit depth must be at least 1"));
                    }
                }
                for (j, b) in d.beams.iter().enumerate() {
                    if let Some(p) = b.phase.parabola() {
                        positive(format!("{at}.beams[{j}].phase.beta_per_m"), p.beta_per_m)?;
                        finite(format!("{at}.beams[{j}].phase.x0_m"), p.x0_m)?;
                        finite(format!("{at}.beams[{j}].phase.z0_m"), p.z0_m)?;
                    }
                }
            }
            SourceSpec::Airy {
                beta_per_m,
                alpha_per_m,
                x0_m,
                z0_m,
                half_width_m,
                ..
            } => {
                positive(format!("{at}.beta_per_m"), *beta_per_m)?;
                if !(*alpha_per_m >= 0.0 && alpha_per_m.is_finite()) {
                    return Err(Error::validation(format!("{at}.alpha_per_m"), "must be finite and ≥ 0"));
                }
                finite(format!("{at}.x0_m"), *x0_m)?;
                finite(format!("{at}.z0_m"), *z0_m)?;
                positive(format!("{at}.half_width_m"), *half_width_m)?;
                if self.mode == Mode::Plane {
                    return Err(Error::validation(at.to_string(), "closed-form Airy sources are line-mode only"));
                }
            }
        }
        Ok(())
    }

    fn validate_metric(&self, at: &str, m: &MetricSpec) -> Result<()> {
        let needs_parabola = |what: &str| -> Result<()> {
            for (i, s) in self.sources.iter().enumerate() {
                if s.source.tracked().is_empty() {
                    return Err(Error::validation(
                        at.to_string(),
                        format!("{what} needs a parabolic beam, but source `{}` (sources[{i}]) has none", s.name),
                    ));
                }
            }
            Ok(())
        };
        let needs_array = |what: &str| -> Result<()> {
            for (i, s) in self.sources.iter().enumerate() {
                match &s.source {
                    SourceSpec::Design(d) if d.array.is_some() => {}
                    _ => {
                        return Err(Error::validation(
                            at.to_string(),
                            format!("{what} needs an array realisation on every source; sources[{i}] has none"),
                        ))
                    }
                }
            }
            Ok(())
        };
        match m {
            MetricSpec::Track => needs_parabola("track")?,
            MetricSpec::TubePower { half_width_m } => {
                needs_parabola("tube_power")?;
                if let Some(h) = half_width_m {
                    positive(format!("{at}.half_width_m"), *h)?;
                }
            }
            MetricSpec::OnAxis {
                x_m,
                z_start_m,
                z_stop_m,
                count,
            } => {
                finite(format!("{at}.x_m"), *x_m)?;
                positive(format!("{at}.z_start_m"), *z_start_m)?;
                if !(z_stop_m > z_start_m && z_stop_m.is_finite()) {
                    return Err(Error::validation(format!("{at}.z_stop_m"), "must exceed z_start_m"));
                }
                if *count < 2 {
                    return Err(Error::validation(format!("{at}.count"), "at least two planes"));
                }
            }
            MetricSpec::Probes => {
                if self.probes.is_empty() {
                    return Err(Error::validation(at.to_string(), "probes metric needs at least one probe"));
                }
            }
            MetricSpec::Blockage {
                probe,
                los_from_m,
                widths_m,
                z_positions_m,
            } => {
                let Some(p) = self.probes.iter().find(|p| &p.name == probe) else {
                    return Err(Error::validation(format!("{at}.probe"), format!("no probe named `{probe}`")));
                };
                finite(format!("{at}.los_from_m[0]"), los_from_m.0)?;
                finite(format!("{at}.los_from_m[1]"), los_from_m.1)?;
                if widths_m.is_empty() {
                    return Err(Error::validation(format!("{at}.widths_m"), "at least one width"));
                }
                for (j, w) in widths_m.iter().enumerate() {
                    positive(format!("{at}.widths_m[{j}]"), *w)?;
                }
                if z_positions_m.is_empty() {
                    return Err(Error::validation(format!("{at}.z_positions_m"), "at least one position"));
                }
                for (j, z) in z_positions_m.iter().enumerate() {
                    if !(*z > los_from_m.1 && *z > 0.0 && *z < p.z_m) {
                        return Err(Error::validation(
                            format!("{at}.z_positions_m[{j}]"),
                            format!("must lie strictly between the line-of-sight start and the probe plane {} m", p.z_m),
                        ));
                    }
                }
            }
            MetricSpec::KContent { z_m } => {
                if !(*z_m >= 0.0 && z_m.is_finite()) {
                    return Err(Error::validation(format!("{at}.z_m"), "must be finite and ≥ 0"));
                }
            }
            MetricSpec::CrossSection { z_m } => positive(format!("{at}.z_m"), *z_m)?,
            MetricSpec::Quantization { bits } => {
                needs_array("quantization")?;
                needs_parabola("quantization")?;
                if bits.is_empty() {
                    return Err(Error::validation(format!("{at}.bits"), "at least one bit depth"));
                }
                for (j, b) in bits.iter().enumerate() {
                    if *b == 0 || *b > 52 {
                        return Err(Error::validation(format!("{at}.bits[{j}]"), "must lie in 1..=52"));
                    }
                }
            }
            MetricSpec::Subarray {
                fractions,
                realizations,
                periodic_period,
            } => {
                needs_array("subarray")?;
                needs_parabola("subarray")?;
                if fractions.is_empty() {
                    return Err(Error::validation(format!("{at}.fractions"), "at least one fraction"));
                }
                for (j, f) in fractions.iter().enumerate() {
                    if !(*f > 0.0 && *f <= 1.0) {
                        return Err(Error::validation(format!("{at}.fractions[{j}]"), "must lie in (0, 1]"));
                    }
                }
                if *realizations == 0 {
                    return Err(Error::validation(format!("{at}.realizations"), "must be at least 1"));
                }
                if *periodic_period == 0 {
                    return Err(Error::validation(format!("{at}.periodic_period"), "must be at least 1"));
                }
            }
            MetricSpec::Sweep { z_fraction_of_z_max } => {
                needs_parabola("sweep")?;
                for (i, s) in self.sources.iter().enumerate() {
                    if !matches!(s.source, SourceSpec::Design(_)) {
                        return Err(Error::validation(
                            at.to_string(),
                            format!("sweep needs design sources; sources[{i}] is closed-form"),
                        ));
                    }
                }
                if let Some(f) = z_fraction_of_z_max {
                    positive(format!("{at}.z_fraction_of_z_max"), *f)?;
                }
            }
        }
        Ok(())
    }

    /// Reduced-resolution variant: λ/2 steps, at most a few planes and
    /// realizations per metric.
    pub fn reduced_for_ci(&self) -> Scenario {
        let mut s = self.clone();
        s.grid.reduced = true;
        s.grid.step_m = None;
        s.grid.step_wavelengths = 0.5;
        s.z_list_m = thin(&s.z_list_m, CI_MAX_PLANES);
        if s.frequencies_hz.len() > 3 {
            s.frequencies_hz = thin(&s.frequencies_hz, 3);
        }
        for m in &mut s.metrics {
            match m {
                MetricSpec::OnAxis { count, .. } => *count = (*count).min(40),
                MetricSpec::Blockage {
                    widths_m, z_positions_m, ..
                } => {
                    *widths_m = thin(widths_m, 2);
                    *z_positions_m = thin(z_positions_m, 3);
                }
                MetricSpec::Quantization { bits } => *bits = thin_u32(bits, 3),
                MetricSpec::Subarray {
                    fractions, realizations, ..
                } => {
                    *fractions = thin(fractions, 2);
                    *realizations = (*realizations).min(3);
                }
                _ => {}
            }
        }
        s
    }

    /// Source `index` at z = 0 on the grid a run at `frequency_hz` would use.
    pub fn source_field(&self, index: usize, frequency_hz: f64) -> Result<FieldSlice> {
        let src = self
            .sources
            .get(index)
            .ok_or_else(|| Error::validation("sources", format!("no source at index {index}")))?;
        let medium = Medium::new(frequency_hz)?;
        let dom = domain_for(self, &src.source, &medium)?;
        build_source(&src.source, &medium, &dom.grid)
    }

    fn z_needed(&self) -> f64 {
        let mut z = *self.z_list_m.last().unwrap();
        for p in &self.probes {
            z = z.max(p.z_m);
        }
        for m in &self.metrics {
            match m {
                MetricSpec::OnAxis { z_stop_m, .. } => z = z.max(*z_stop_m),
                MetricSpec::KContent { z_m } | MetricSpec::CrossSection { z_m } => z = z.max(*z_m),
                _ => {}
            }
        }
        z
    }
}

/// Keeps `n` entries evenly spread over `v`, always including the last.
fn thin(v: &[f64], n: usize) -> Vec<f64> {
    if v.len() <= n {
        return v.to_vec();
    }
    (0..n)
        .map(|i| v[((i + 1) * v.len()) / n - 1])
        .collect()
}

fn thin_u32(v: &[u32], n: usize) -> Vec<u32> {
    if v.len() <= n {
        return v.to_vec();
    }
    (0..n).map(|i| v[(i * (v.len() - 1)) / (n - 1)]).collect()
}

/// Analytic quantities for one source at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub source: String,
    pub frequency_hz: f64,
    pub wavelength_m: f64,
    pub wavenumber_rad_per_m: f64,
    pub aperture_lx_m: f64,
    /// `2·Lx²/λ`.
    pub fraunhofer_m: f64,
    pub beams: Vec<DerivedBeam>,
    /// Spectral FWHM and spacing bound of a tapered closed-form source.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_fwhm_rad_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_spacing_m: Option<f64>,
    pub grid: Grid,
    pub estimated_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedBeam {
    pub parabola: Parabola,
    pub mirrored: bool,
    pub x_fwhm_m: f64,
    pub peak_offset_m: f64,
    pub z_max_m: Option<f64>,
    /// Focal distance of the mirror pair, when this beam has a mirrored partner.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub focal_distance_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub bundle_format: u32,
    pub versions: Versions,
    pub scenario: Scenario,
    pub derived: Vec<Derived>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub bendbeam: String,
}

/// Sidecar describing one binary field slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceDescriptor {
    pub layout: String,
    pub byte_order: String,
    pub precision: Precision,
    pub units: String,
    pub z_m: f64,
    pub frequency_hz: f64,
    pub grid: Grid,
}

struct Context<'a> {
    scn: &'a Scenario,
    out: &'a Path,
    files: Vec<String>,
}

impl Context<'_> {
    fn create(&mut self, rel: &str) -> Result<BufWriter<File>> {
        let p = self.out.join(rel);
        if let Some(d) = p.parent() {
            fs::create_dir_all(d)?;
        }
        self.files.push(rel.to_string());
        Ok(BufWriter::new(File::create(p)?))
    }
}

fn freq_tag(f: f64) -> String {
    let ghz = f / 1e9;
    if (ghz - ghz.round()).abs() < 1e-9 {
        format!("f{}GHz", ghz.round() as i64)
    } else {
        format!("f{}Hz", f.round() as i64)
    }
}

/// Validates, then runs every source at every frequency and writes the bundle.
pub fn run(scn: &Scenario, out_dir: &Path) -> Result<Manifest> {
    scn.validate()?;
    // size every domain before allocating anything large
    let mut plans = Vec::new();
    for src in &scn.sources {
        for &f in &scn.frequencies_hz {
            let medium = Medium::new(f)?;
            plans.push((src, medium, domain_for(scn, &src.source, &medium)?));
        }
    }
    fs::create_dir_all(out_dir)?;
    let mut ctx = Context {
        scn,
        out: out_dir,
        files: Vec::new(),
    };
    let mut derived = Vec::new();
    for (src, medium, dom) in &plans {
        derived.push(derive(&src.name, &src.source, medium, dom.grid, dom.estimated_bytes)?);
        run_one(&mut ctx, src, medium, dom.grid)?;
    }
    for src in &scn.sources {
        for m in &scn.metrics {
            if let MetricSpec::Sweep { z_fraction_of_z_max } = m {
                run_sweep(&mut ctx, src, *z_fraction_of_z_max)?;
            }
        }
    }
    let manifest = Manifest {
        bundle_format: BUNDLE_FORMAT,
        versions: Versions {
            bendbeam: env!("CARGO_PKG_VERSION").to_string(),
        },
        scenario: scn.clone(),
        derived,
        outputs: ctx.files.clone(),
    };
    let mut w = BufWriter::new(File::create(out_dir.join("manifest.json"))?);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;
    Ok(manifest)
}

struct Planned {
    grid: Grid,
    estimated_bytes: u64,
}

fn effective_step(scn: &Scenario, src: &SourceSpec, medium: &Medium) -> f64 {
    let mut step = scn.grid.step_m.unwrap_or(scn.grid.step_wavelengths * medium.lambda());
    if let Some(d) = src.array_spacing(medium) {
        step = step.min(0.5 * d);
    }
    step
}

fn domain_for(scn: &Scenario, src: &SourceSpec, medium: &Medium) -> Result<Planned> {
    let ap = src.aperture();
    let z_far = scn.z_needed();
    let mut extra = scn.grid.extra_x_m;
    let mut direct = Vec::new();
    for (p, mirrored) in src.parabolas() {
        if mirrored {
            // the mirror image occupies −x_c(z)
            let zs = [0.0, z_far, p.z0_m.clamp(0.0, z_far)];
            let lo = zs.iter().map(|&z| -p.x_at(z)).fold(f64::INFINITY, f64::min);
            let hi = zs.iter().map(|&z| -p.x_at(z)).fold(f64::NEG_INFINITY, f64::max);
            extra.0 = extra.0.max(ap.x_left() - lo);
            extra.1 = extra.1.max(hi - ap.x_right_m);
        } else {
            direct.push(p);
        }
    }
    for p in src.parabolas().iter().map(|(p, _)| p) {
        // keep the lobe scale of mirrored beams in the margin too
        if !direct.iter().any(|d| d.beta_per_m >= p.beta_per_m) {
            direct.push(Parabola {
                x0_m: ap.x_right_m,
                z0_m: 0.0,
                ..*p
            });
        }
    }
    let slices = if scn.write_slices { scn.z_list_m.len() } else { 1 };
    let req = DomainRequest {
        mode: scn.mode,
        step_m: Some(effective_step(scn, src, medium)),
        margin_m: scn.grid.margin_m,
        pad_factor: scn.grid.pad_factor,
        extra_x_m: extra,
        slices,
        memory_cap_bytes: scn.grid.memory_cap_bytes,
        ..DomainRequest::new(ap, direct, z_far)
    };
    let d = auto_domain(&req, medium)?;
    Ok(Planned {
        grid: d.grid,
        estimated_bytes: d.estimated_bytes,
    })
}

fn derive(name: &str, src: &SourceSpec, medium: &Medium, grid: Grid, estimated_bytes: u64) -> Result<Derived> {
    let ap = src.aperture();
    let pars = src.parabolas();
    let beams = pars
        .iter()
        .map(|&(p, mirrored)| {
            let partner = pars.iter().any(|&(q, m)| m != mirrored && q == p);
            Ok(DerivedBeam {
                parabola: p,
                mirrored,
                x_fwhm_m: airy_fwhm(p.beta_per_m, medium),
                peak_offset_m: airy_peak_offset(p.beta_per_m, medium),
                z_max_m: match src {
                    SourceSpec::Design(_) => z_max(ap.lx_m, &p).ok(),
                    SourceSpec::Airy { .. } => None,
                },
                focal_distance_m: if partner {
                    focal_distance(p.x0_m, p.z0_m, p.beta_per_m, medium).ok()
                } else {
                    None
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (spectral, spacing) = match src {
        SourceSpec::Airy {
            beta_per_m, alpha_per_m, ..
        } if *alpha_per_m > 0.0 => {
            let b = airy_spatial_bandwidth(*beta_per_m, *alpha_per_m, medium)?;
            (Some(b.fwhm_rad_per_m), Some(b.max_spacing_m))
        }
        _ => (None, None),
    };
    Ok(Derived {
        source: name.to_string(),
        frequency_hz: medium.frequency_hz,
        wavelength_m: medium.lambda(),
        wavenumber_rad_per_m: medium.k(),
        aperture_lx_m: ap.lx_m,
        fraunhofer_m: medium.fraunhofer_distance(ap.lx_m),
        beams,
        spectral_fwhm_rad_per_m: spectral,
        max_spacing_m: spacing,
        grid,
        estimated_bytes,
    })
}

/// Source field of `src` on `grid` at z = 0.
pub fn build_source(src: &SourceSpec, medium: &Medium, grid: &Grid) -> Result<FieldSlice> {
    match src {
        SourceSpec::Design(d) => d.source(medium, grid, None),
        SourceSpec::Airy {
            beta_per_m,
            alpha_per_m,
            x0_m,
            z0_m,
            aaf,
            half_width_m,
        } => {
            let Grid::Line(g) = grid else {
                return Err(Error::domain("closed-form Airy sources are line-mode only"));
            };
            let p = AiryParams::new(*beta_per_m, *alpha_per_m, *x0_m, *z0_m)?;
            FieldSlice::from_fn_1d(*g, 0.0, |x| {
                if x.abs() > *half_width_m {
                    Complex64::new(0.0, 0.0)
                } else if *aaf {
                    aaf_field(&p, x, 0.0, medium)
                } else {
                    airy_field(&p, x, 0.0, medium)
                }
            })
        }
    }
}

fn dir_of(src: &NamedSource, medium: &Medium) -> String {
    format!("{}/{}", src.name, freq_tag(medium.frequency_hz))
}

fn run_one(ctx: &mut Context, src: &NamedSource, medium: &Medium, grid: Grid) -> Result<()> {
    let scn = ctx.scn;
    let opts = scn.grid.options();
    let dir = dir_of(src, medium);
    let source = build_source(&src.source, medium, &grid)?;
    let needs_slices = scn.write_slices
        || scn
            .metrics
            .iter()
            .any(|m| matches!(m, MetricSpec::Track | MetricSpec::TubePower { .. }));
    let slices = if needs_slices {
        propagate_scan(&source, medium, &scn.z_list_m, &scn.blockers, &opts)?
    } else {
        Vec::new()
    };
    if scn.write_slices {
        for (i, s) in slices.iter().enumerate() {
            write_slice(ctx, &format!("{dir}/slices/slice_{i:04}"), s, medium, scn.precision)?;
        }
    }
    for m in &scn.metrics {
        match m {
            MetricSpec::Track => {
                for (j, p) in src.source.tracked().iter().enumerate() {
                    let t = track_main_lobe(&slices, p, medium)?;
                    t.write_csv(ctx.create(&format!("{dir}/track_beam{j}.csv"))?)?;
                }
            }
            MetricSpec::TubePower { half_width_m } => {
                let p = src.source.tracked()[0];
                let mut w = ctx.create(&format!("{dir}/tube_power.csv"))?;
                writeln!(w, "z_m,tube_power,total_power")?;
                for s in &slices {
                    let tube = beam_tube_power(s, &p, medium, *half_width_m)?;
                    writeln!(w, "{},{},{}", num(s.z_m), num(tube), num(total_power(s)))?;
                }
            }
            MetricSpec::OnAxis {
                x_m,
                z_start_m,
                z_stop_m,
                count,
            } => {
                let spec = to_spectrum(&source, medium);
                let g = *grid.x_axis();
                let ix = g.nearest_index(*x_m);
                let idx = match &grid {
                    Grid::Line(_) => ix,
                    Grid::Plane(p) => p.index(ix, p.y.nearest_index(0.0)),
                };
                let zs: Vec<f64> = (0..*count)
                    .map(|i| z_start_m + (z_stop_m - z_start_m) * i as f64 / (*count - 1) as f64)
                    .collect();
                let vals: Vec<f64> = zs
                    .par_iter()
                    .map(|&z| from_spectrum_with(&spec, z, &opts).values[idx].norm_sqr())
                    .collect();
                let mut w = ctx.create(&format!("{dir}/on_axis.csv"))?;
                writeln!(w, "z_m,x_m,intensity_v2_per_m2")?;
                for (z, v) in zs.iter().zip(vals) {
                    writeln!(w, "{},{},{}", num(*z), num(g.coordinate(ix)), num(v))?;
                }
            }
            MetricSpec::Probes => {
                let mut rows = Vec::new();
                for p in &scn.probes {
                    let blockers: Vec<Blocker> = scn.blockers.iter().filter(|b| b.z_m < p.z_m).cloned().collect();
                    let s = propagate_scan(&source, medium, &[p.z_m], &blockers, &opts)?;
                    rows.push((p, window_power(&s[0], &p.window(scn.mode))?));
                }
                let mut w = ctx.create(&format!("{dir}/probes.csv"))?;
                writeln!(w, "name,x_m,y_m,z_m,side_m,{}", power_column(scn.mode))?;
                for (p, pw) in rows {
                    writeln!(w, "{},{},{},{},{},{}", p.name, num(p.x_m), num(p.y_m), num(p.z_m), num(p.side_m), num(pw))?;
                }
            }
            MetricSpec::Blockage {
                probe,
                los_from_m,
                widths_m,
                z_positions_m,
            } => {
                let p = scn.probes.iter().find(|p| &p.name == probe).unwrap();
                let win = p.window(scn.mode);
                let clear = propagate_scan(&source, medium, &[p.z_m], &[], &opts)?.remove(0);
                let cases: Vec<(f64, f64, f64)> = widths_m
                    .iter()
                    .flat_map(|&w| {
                        z_positions_m.iter().map(move |&z| {
                            let t = (z - los_from_m.1) / (p.z_m - los_from_m.1);
                            (w, z, los_from_m.0 + t * (p.x_m - los_from_m.0))
                        })
                    })
                    .collect();
                let ratios = cases
                    .par_iter()
                    .map(|&(w, z, x)| {
                        let b = match scn.mode {
                            Mode::Line => Blocker::strip(z, x, w),
                            Mode::Plane => Blocker::disk(z, x, 0.0, w),
                        };
                        let s = propagate_scan(&source, medium, &[p.z_m], &[b], &opts)?;
                        power_ratio(&s[0], &clear, &win)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut w = ctx.create(&format!("{dir}/blockage.csv"))?;
                writeln!(w, "width_m,z_m,x_m,ratio")?;
                for ((wd, z, x), r) in cases.iter().zip(ratios) {
                    writeln!(w, "{},{},{},{}", num(*wd), num(*z), num(*x), num(r))?;
                }
            }
            MetricSpec::KContent { z_m } => {
                let s = if *z_m == 0.0 {
                    source.clone()
                } else {
                    propagate_scan(&source, medium, &[*z_m], &[], &opts)?.remove(0)
                };
                let kc = k_content(&s, medium);
                kc.write_csv(ctx.create(&format!("{dir}/k_content.csv"))?)?;
                if let Some(d) = src.source.array_spacing(medium) {
                    let mut w = ctx.create(&format!("{dir}/orders.csv"))?;
                    writeln!(w, "order,angle_rad,power_share")?;
                    let angles = grating_orders(d, medium)?;
                    for (m, share) in kc.order_shares(d) {
                        let a = if m == 0 {
                            0.0
                        } else {
                            angles
                                .iter()
                                .find(|o| o.order == m)
                                .map(|o| o.angle_rad)
                                .unwrap_or(f64::NAN)
                        };
                        writeln!(w, "{m},{},{}", num(a), num(share))?;
                    }
                }
            }
            MetricSpec::CrossSection { z_m } => {
                let blockers: Vec<Blocker> = scn.blockers.iter().filter(|b| b.z_m < *z_m).cloned().collect();
                let s = propagate_scan(&source, medium, &[*z_m], &blockers, &opts)?.remove(0);
                let tag = format!("{z_m}").replace('.', "p");
                CrossSection::from_slice(&s).write_csv(ctx.create(&format!("{dir}/cross_section_z{tag}.csv"))?)?;
            }
            MetricSpec::Quantization { bits } => {
                let setup = efficiency_setup(src, medium, grid, &opts)?;
                let mut w = ctx.create(&format!("{dir}/quantization.csv"))?;
                writeln!(w, "bits,efficiency")?;
                for &b in bits {
                    let e = quantization_efficiency(&setup, BitDepth::Bits(b))?;
                    writeln!(w, "{b},{}", num(e.value))?;
                }
            }
            MetricSpec::Subarray {
                fractions,
                realizations,
                periodic_period,
            } => {
                let setup = efficiency_setup(src, medium, grid, &opts)?;
                let mut w = ctx.create(&format!("{dir}/subarray.csv"))?;
                writeln!(w, "selection,fraction,realizations,mean,std")?;
                for &f in fractions {
                    let e = subarray_efficiency(&setup, f, *realizations, scn.seed)?;
                    writeln!(w, "random,{},{},{},{}", num(f), e.realizations, num(e.mean), num(e.std))?;
                }
                let per = periodic_efficiency(&setup, *periodic_period)?;
                writeln!(
                    w,
                    "periodic,{},1,{},{}",
                    num(1.0 / *periodic_period as f64),
                    num(per.value),
                    num(0.0)
                )?;
            }
            MetricSpec::Sweep { .. } => {}
        }
    }
    Ok(())
}

fn power_column(mode: Mode) -> &'static str {
    match mode {
        Mode::Line => "power_v2_per_m",
        Mode::Plane => "power_v2",
    }
}

fn efficiency_setup(src: &NamedSource, medium: &Medium, grid: Grid, opts: &PropagationOptions) -> Result<EfficiencySetup> {
    let SourceSpec::Design(d) = &src.source else {
        return Err(Error::domain("efficiency metrics need a design source"));
    };
    let p = src.source.tracked()[0];
    let zm = z_max(d.window.aperture.lx_m, &p)?;
    Ok(EfficiencySetup {
        design: d.clone(),
        medium: *medium,
        grid,
        z_ref_m: 0.5 * zm,
        tube_half_width_m: None,
        options: *opts,
    })
}

fn run_sweep(ctx: &mut Context, src: &NamedSource, z_fraction: Option<f64>) -> Result<()> {
    let scn = ctx.scn;
    let SourceSpec::Design(d) = &src.source else {
        return Err(Error::domain("sweeps need a design source"));
    };
    let p = src.source.tracked()[0];
    let zm = z_max(d.window.aperture.lx_m, &p)?;
    let z_cs = zm * z_fraction.unwrap_or(1.0);
    let mut design = d.clone();
    design.beams.retain(|b| !b.mirror);
    let mut step_wavelengths = scn.grid.step_wavelengths;
    for &f in &scn.frequencies_hz {
        let medium = Medium::new(f)?;
        if let Some(d) = src.source.array_spacing(&medium) {
            step_wavelengths = step_wavelengths.min(0.5 * d / medium.lambda());
        }
    }
    let opts = SweepOptions {
        mode: scn.mode,
        z_track_m: Some(vec![z_cs]),
        cross_section_z_m: Some(z_cs),
        step_wavelengths,
    };
    let points = frequency_sweep(&design, &scn.frequencies_hz, &opts)?;
    write_sweep_csv(&points, ctx.create(&format!("{}/sweep.csv", src.name))?)?;
    let mut w = ctx.create(&format!("{}/sweep_cross_sections.csv", src.name))?;
    writeln!(w, "frequency_hz,z_m,x_m,intensity_v2_per_m2")?;
    for pt in &points {
        let cs = &pt.cross_section;
        for (x, i) in cs.x_m.iter().zip(&cs.intensity) {
            writeln!(w, "{},{},{},{}", num(pt.frequency_hz), num(cs.z_m), num(*x), num(*i))?;
        }
    }
    Ok(())
}

fn write_slice(ctx: &mut Context, stem: &str, s: &FieldSlice, medium: &Medium, precision: Precision) -> Result<()> {
    let mut w = ctx.create(&format!("{stem}.bin"))?;
    write_slice_data(&mut w, s, precision)?;
    w.flush()?;
    let desc = SliceDescriptor {
        layout: "row-major complex pairs (re, im), x fastest".into(),
        byte_order: "little".into(),
        precision,
        units: "V/m".into(),
        z_m: s.z_m,
        frequency_hz: medium.frequency_hz,
        grid: s.grid,
    };
    let mut j = ctx.create(&format!("{stem}.json"))?;
    serde_json::to_writer_pretty(&mut j, &desc)?;
    writeln!(j)?;
    j.flush()?;
    Ok(())
}

/// Little-endian `(re, im)` pairs in the requested precision.
pub fn write_slice_data<W: Write>(w: &mut W, s: &FieldSlice, precision: Precision) -> Result<()> {
    for v in &s.values {
        match precision {
            Precision::Single => {
                w.write_all(&(v.re as f32).to_le_bytes())?;
                w.write_all(&(v.im as f32).to_le_bytes())?;
            }
            Precision::Double => {
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

/// Reads a slice written by [`run`] from its `.bin` file and sidecar.
pub fn read_slice(bin: &Path) -> Result<(FieldSlice, SliceDescriptor)> {
    let desc: SliceDescriptor = serde_json::from_reader(File::open(bin.with_extension("json"))?)?;
    let bytes = fs::read(bin)?;
    let width = match desc.precision {
        Precision::Single => 4,
        Precision::Double => 8,
    };
    if bytes.len() != desc.grid.len() * 2 * width {
        return Err(Error::domain(format!(
            "{} holds {} bytes, expected {}",
            bin.display(),
            bytes.len(),
            desc.grid.len() * 2 * width
        )));
    }
    let read = |c: &[u8]| match desc.precision {
        Precision::Single => f32::from_le_bytes(c.try_into().unwrap()) as f64,
        Precision::Double => f64::from_le_bytes(c.try_into().unwrap()),
    };
    let values = bytes
        .chunks_exact(2 * width)
        .map(|c| Complex64::new(read(&c[..width]), read(&c[width..])))
        .collect();
    Ok((FieldSlice::new(desc.grid, desc.z_m, values)?, desc))
}

/// Codeword of the first array source at the first frequency.
pub fn codeword(scn: &Scenario) -> Result<Codeword> {
    scn.validate()?;
    let medium = Medium::new(scn.frequencies_hz[0])?;
    for s in &scn.sources {
        if let SourceSpec::Design(d) = &s.source {
            if let Some(cfg) = d.array_config(&medium)? {
                let step = effective_step(scn, &s.source, &medium);
                let fp = d.footprint(&medium, step)?;
                let phases = sample_phase(&fp.beams[0].phase, &cfg)?;
                return make_codeword(&phases, &cfg);
            }
        }
    }
    Err(Error::validation("sources", "no source has an array realisation"))
}

/// Writes only the sweep outputs of `scn` (adding a default sweep if none is configured).
pub fn sweep(scn: &Scenario, out_dir: &Path) -> Result<Manifest> {
    let mut s = scn.clone();
    s.metrics.retain(|m| matches!(m, MetricSpec::Sweep { .. }));
    if s.metrics.is_empty() {
        s.metrics.push(MetricSpec::Sweep {
            z_fraction_of_z_max: None,
        });
    }
    s.write_slices = false;
    s.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut ctx = Context {
        scn: &s,
        out: out_dir,
        files: Vec::new(),
    };
    for src in &s.sources {
        for m in &s.metrics {
            if let MetricSpec::Sweep { z_fraction_of_z_max } = m {
                run_sweep(&mut ctx, src, *z_fraction_of_z_max)?;
            }
        }
    }
    let mut derived = Vec::new();
    for src in &s.sources {
        for &f in &s.frequencies_hz {
            let medium = Medium::new(f)?;
            let dom = domain_for(&s, &src.source, &medium)?;
            derived.push(derive(&src.name, &src.source, &medium, dom.grid, dom.estimated_bytes)?);
        }
    }
    let manifest = Manifest {
        bundle_format: BUNDLE_FORMAT,
        versions: Versions {
            bendbeam: env!("CARGO_PKG_VERSION").to_string(),
        },
        scenario: s.clone(),
        derived,
        outputs: ctx.files.clone(),
    };
    let mut w = BufWriter::new(File::create(out_dir.join("manifest.json"))?);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    Ok(manifest)
}

/// Paths of the metric CSVs listed in a manifest.
pub fn metric_files(manifest: &Manifest) -> Vec<PathBuf> {
    manifest
        .outputs
        .iter()
        .filter(|f| f.ends_with(".csv"))
        .map(PathBuf::from)
        .collect()
}
