//! Caustic trajectories and the input-plane phase that launches them.
//!
//! Every ray leaving the aperture at `x` is tangent to the caustic
//! `x_c = f(z_c)`; the local phase slope is `dφ/dx = k f'/√(1+f'²)`.
//! Closed forms exist for parabolas (paraxial and exact) and circles;
//! anything else goes through [`phase_from_trajectory_numeric`].
//!
//! Sign conventions: fields carry `e^{+jφ}`, a positive phase slope tilts a
//! ray towards `+x`, and plane waves propagate as `e^{+j k_z z}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Medium};
use crate::special::AI_FIRST_MAXIMUM;
use crate::spline::CubicSpline;

/// FWHM of |Ai|² main lobe, in units of the Airy length scale.
pub const AIRY_FWHM_COEFF: f64 = 2.278;
/// Main-lobe peak offset, in units of the Airy length scale.
pub const AIRY_PEAK_COEFF: f64 = 1.02;

const BISECTION_TOL_M: f64 = 1e-9;

/// Parabolic caustic `x_c = x0 + β (z_c − z0)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parabola {
    pub beta_per_m: f64,
    #[serde(default)]
    pub x0_m: f64,
    #[serde(default)]
    pub z0_m: f64,
}

impl Parabola {
    pub fn new(beta_per_m: f64, x0_m: f64, z0_m: f64) -> Result<Self> {
        if !(beta_per_m.is_finite() && beta_per_m > 0.0) {
            return Err(Error::domain(format!("β must be positive, got {beta_per_m}")));
        }
        if !(x0_m.is_finite() && z0_m.is_finite()) {
            return Err(Error::domain("vertex coordinates must be finite"));
        }
        Ok(Parabola {
            beta_per_m,
            x0_m,
            z0_m,
        })
    }

    #[inline]
    pub fn x_at(&self, z: f64) -> f64 {
        self.x0_m + self.beta_per_m * (z - self.z0_m).powi(2)
    }

    #[inline]
    pub fn slope_at(&self, z: f64) -> f64 {
        2.0 * self.beta_per_m * (z - self.z0_m)
    }

    /// Radicand `β z0² + x0 − x` shared by the paraxial phase and the ray map.
    #[inline]
    fn radicand(&self, x: f64) -> f64 {
        self.beta_per_m * self.z0_m * self.z0_m + self.x0_m - x
    }

    /// Caustic distance reached by the ray launched at `x` (inverse ray map).
    pub fn tangent_z(&self, x: f64) -> Result<f64> {
        let q = self.radicand(x);
        if q < 0.0 {
            return Err(Error::domain(format!(
                "no real tangent point for x = {x} m (β z0² + x0 − x = {q})"
            )));
        }
        Ok((q / self.beta_per_m).sqrt())
    }

    /// Largest aperture coordinate at which the paraxial phase is real.
    pub fn x_limit(&self) -> f64 {
        self.beta_per_m * self.z0_m * self.z0_m + self.x0_m
    }
}

/// A circle of radius `R` centred at `(center_x, 0)`. Phases are evaluated
/// in `u = (x − center_x)/R`, valid for `u ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub radius_m: f64,
    #[serde(default)]
    pub center_x_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrajectorySpec {
    Parabolic(Parabola),
    Circular(Circle),
    /// Sampled caustic `x_m[i] = f(z_m[i])`, `z_m` strictly increasing.
    Numeric { z_m: Vec<f64>, x_m: Vec<f64> },
}

impl TrajectorySpec {
    pub fn parabolic(beta_per_m: f64, x0_m: f64, z0_m: f64) -> Result<Self> {
        Ok(TrajectorySpec::Parabolic(Parabola::new(beta_per_m, x0_m, z0_m)?))
    }

    pub fn as_parabola(&self) -> Option<&Parabola> {
        match self {
            TrajectorySpec::Parabolic(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Paraxial,
    Nonparaxial,
    Numeric,
}

/// Closed-form phase law kept alongside the samples so that element
/// positions off the design grid can be evaluated exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseLaw {
    ParabolicParaxial { parabola: Parabola, k: f64 },
    ParabolicNonparaxial { parabola: Parabola, k: f64 },
    Circular { circle: Circle, k: f64 },
    /// Parabolic law continued past `x_limit` with the constant slope of
    /// the edge ray, for apertures reaching beyond the caustic's start.
    ParabolicExtended { parabola: Parabola, k: f64, paraxial: bool },
    Linear { slope_rad_per_m: f64, x_ref_m: f64 },
}

impl PhaseLaw {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            PhaseLaw::ParabolicParaxial { parabola, k } => paraxial_value(&parabola, k, x),
            PhaseLaw::ParabolicNonparaxial { parabola, k } => nonparaxial_value(&parabola, k, x),
            PhaseLaw::Circular { circle, k } => circular_value(&circle, k, x),
            PhaseLaw::ParabolicExtended { parabola, k, paraxial } => {
                let inner = if paraxial { paraxial_value } else { nonparaxial_value };
                let x_lim = parabola.x_limit();
                if x <= x_lim {
                    return inner(&parabola, k, x);
                }
                let s0 = -2.0 * parabola.beta_per_m * parabola.z0_m;
                let slope = if paraxial { k * s0 } else { k * s0 / (1.0 + s0 * s0).sqrt() };
                Ok(inner(&parabola, k, x_lim)? + slope * (x - x_lim))
            }
            PhaseLaw::Linear {
                slope_rad_per_m,
                x_ref_m,
            } => Ok(slope_rad_per_m * (x - x_ref_m)),
        }
    }
}

/// Input-plane phase sampled over the aperture support.
#[derive(Debug, Clone)]
pub struct PhaseProfile {
    pub grid: Grid1D,
    pub phase_rad: Vec<f64>,
    pub regime: Regime,
    pub law: Option<PhaseLaw>,
}

impl PhaseProfile {
    pub fn support(&self) -> (f64, f64) {
        (self.grid.start_m, self.grid.end_m())
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        let tol = 1e-9 * self.grid.step_m.max(1e-12);
        x >= lo - tol && x <= hi + tol
    }

    /// Phase at an arbitrary point of the support: exact for closed-form
    /// laws, cubic interpolation of the samples otherwise.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            let (lo, hi) = self.support();
            return Err(Error::domain(format!(
                "x = {x} m lies outside the phase support [{lo}, {hi}]"
            )));
        }
        if let Some(law) = &self.law {
            return law.eval(x);
        }
        let spline = CubicSpline::new(&self.grid.coordinates(), &self.phase_rad)?;
        Ok(spline.value(x))
    }

    /// Evaluates many points against one interpolant.
    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        if let Some(i) = xs.iter().position(|&x| !self.contains(x)) {
            let (lo, hi) = self.support();
            return Err(Error::domain(format!(
                "x = {} m lies outside the phase support [{lo}, {hi}]",
                xs[i]
            )));
        }
        if let Some(law) = &self.law {
            return xs.iter().map(|&x| law.eval(x)).collect();
        }
        let spline = CubicSpline::new(&self.grid.coordinates(), &self.phase_rad)?;
        Ok(xs.iter().map(|&x| spline.value(x)).collect())
    }

    /// Same profile with every phase negated (conjugate wavefront).
    pub fn conjugated(&self) -> PhaseProfile {
        PhaseProfile {
            grid: self.grid,
            phase_rad: self.phase_rad.iter().map(|p| -p).collect(),
            regime: self.regime,
            law: None,
        }
    }
}

fn sample_law(law: PhaseLaw, grid: &Grid1D, regime: Regime) -> Result<PhaseProfile> {
    let phase_rad = grid
        .coordinates()
        .into_iter()
        .map(|x| law.eval(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseProfile {
        grid: *grid,
        phase_rad,
        regime,
        law: Some(law),
    })
}

fn paraxial_value(p: &Parabola, k: f64, x: f64) -> Result<f64> {
    let mut q = p.radicand(x);
    if q < 0.0 {
        // rounding at the exact support edge
        if q > -1e-12 * (1.0 + x.abs()) {
            q = 0.0;
        } else {
            return Err(Error::domain(format!(
                "paraxial parabolic phase undefined at x = {x} m (radicand {q} < 0)"
            )));
        }
    }
    let b = p.beta_per_m;
    Ok(-2.0 * b * k * p.z0_m * x - (4.0 / 3.0) * b.sqrt() * k * q.powf(1.5))
}

fn nonparaxial_value(p: &Parabola, k: f64, x: f64) -> Result<f64> {
    let b = p.beta_per_m;
    let mut q = p.radicand(x);
    if q < 0.0 {
        if q > -1e-12 * (1.0 + x.abs()) {
            q = 0.0;
        } else {
            return Err(Error::domain(format!(
                "non-paraxial parabolic phase undefined at x = {x} m (radicand {q} < 0)"
            )));
        }
    }
    // Ψ is the caustic slope f'(z_c) of the ray launched at x
    let psi = 2.0 * (b * q).sqrt() - 2.0 * b * p.z0_m;
    let root = (1.0 + psi * psi).sqrt();
    Ok(k / (4.0 * b) * (-(psi + 4.0 * b * p.z0_m) * root + psi.asinh()))
}

fn circular_value(c: &Circle, k: f64, x: f64) -> Result<f64> {
    let r = c.radius_m;
    let u = (x - c.center_x_m) / r;
    if !(u >= 1.0) {
        if u > 1.0 - 1e-12 {
            return Ok(0.0);
        }
        return Err(Error::domain(format!(
            "circular phase requires (x − x_center)/R ≥ 1, got {u} at x = {x} m"
        )));
    }
    let arcsec = (1.0 / u).acos();
    Ok(k * r * ((u * u - 1.0).sqrt() - arcsec))
}

/// Paraxial phase for a parabolic caustic:
/// `φ(x) = −2βk z0 x − (4/3)√β k (β z0² + x0 − x)^{3/2}`.
pub fn parabolic_phase_paraxial(
    parabola: &Parabola,
    medium: &Medium,
    x_grid: &Grid1D,
) -> Result<PhaseProfile> {
    sample_law(
        PhaseLaw::ParabolicParaxial {
            parabola: *parabola,
            k: medium.k(),
        },
        x_grid,
        Regime::Paraxial,
    )
}

/// Exact (non-paraxial) phase for a parabolic caustic,
/// `φ = (k/4β)(−(Ψ+4βz0)√(1+Ψ²) + asinh Ψ)` with `Ψ = 2√(β(x0−x+βz0²)) − 2βz0`.
pub fn parabolic_phase_nonparaxial(
    parabola: &Parabola,
    medium: &Medium,
    x_grid: &Grid1D,
) -> Result<PhaseProfile> {
    sample_law(
        PhaseLaw::ParabolicNonparaxial {
            parabola: *parabola,
            k: medium.k(),
        },
        x_grid,
        Regime::Nonparaxial,
    )
}

/// Parabolic phase that stays defined right of `x_limit`, where it
/// continues as the straight wavefront of the ray launched at the caustic's
/// starting point. The phase and its slope are continuous there.
pub fn parabolic_phase_extended(
    parabola: &Parabola,
    medium: &Medium,
    x_grid: &Grid1D,
    paraxial: bool,
) -> Result<PhaseProfile> {
    sample_law(
        PhaseLaw::ParabolicExtended {
            parabola: *parabola,
            k: medium.k(),
            paraxial,
        },
        x_grid,
        if paraxial { Regime::Paraxial } else { Regime::Nonparaxial },
    )
}

/// `φ(x) = kR(√(u²−1) − arcsec u)`, `u = (x − x_center)/R ≥ 1`.
///
/// With the `e^{+jφ}` convention these rays diverge from a circular caustic
/// lying behind the aperture (z < 0); the conjugate phase launches the
/// converging family whose caustic is the same circle in front of it.
pub fn circular_phase(circle: &Circle, medium: &Medium, x_grid: &Grid1D) -> Result<PhaseProfile> {
    if !(circle.radius_m.is_finite() && circle.radius_m > 0.0) {
        return Err(Error::domain("circle radius must be positive"));
    }
    sample_law(
        PhaseLaw::Circular {
            circle: *circle,
            k: medium.k(),
        },
        x_grid,
        Regime::Nonparaxial,
    )
}

/// Linear steering phase `k sin θ (x − x_ref)`.
pub fn linear_phase(angle_rad: f64, x_ref_m: f64, medium: &Medium, x_grid: &Grid1D) -> Result<PhaseProfile> {
    sample_law(
        PhaseLaw::Linear {
            slope_rad_per_m: medium.k() * angle_rad.sin(),
            x_ref_m,
        },
        x_grid,
        Regime::Nonparaxial,
    )
}

/// Integrates `dφ/dx = k f'/√(1+f'²)` for a sampled caustic.
///
/// For each aperture node the tangent point `z_c` is found by bisection on
/// the ray map `x = f(z_c) − z_c f'(z_c)`; the slope is integrated with
/// composite Simpson steps and the phase is zero at the rightmost node.
pub fn phase_from_trajectory_numeric(
    traj: &TrajectorySpec,
    medium: &Medium,
    x_grid: &Grid1D,
) -> Result<PhaseProfile> {
    let (z, x) = match traj {
        TrajectorySpec::Numeric { z_m, x_m } => (z_m, x_m),
        TrajectorySpec::Parabolic(p) => {
            return parabolic_phase_nonparaxial(p, medium, x_grid);
        }
        TrajectorySpec::Circular(c) => return circular_phase(c, medium, x_grid),
    };
    let spline = CubicSpline::new(z, x)?;
    let k = medium.k();
    let (z_lo, z_hi) = spline.domain();

    // dense scan of the slope and ray map
    let n_scan = (z.len() * 16).max(256);
    let scan: Vec<f64> = (0..=n_scan)
        .map(|i| z_lo + (z_hi - z_lo) * i as f64 / n_scan as f64)
        .collect();
    let slopes: Vec<f64> = scan.iter().map(|&t| spline.derivative(t)).collect();
    let (smin, smax) = slopes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
    let slope_to_k = |s: f64| k * s / (1.0 + s * s).sqrt();
    let x_ref = x_grid.end_m();

    if smax - smin <= 1e-10 * (1.0 + smax.abs()) {
        // straight caustic: every ray shares one direction
        let slope = slope_to_k(0.5 * (smin + smax));
        let phase_rad = x_grid.coordinates().iter().map(|&xi| slope * (xi - x_ref)).collect();
        return Ok(PhaseProfile {
            grid: *x_grid,
            phase_rad,
            regime: Regime::Numeric,
            law: Some(PhaseLaw::Linear {
                slope_rad_per_m: slope,
                x_ref_m: x_ref,
            }),
        });
    }

    let ray_map = |t: f64| spline.value(t) - t * spline.derivative(t);
    let mapped: Vec<f64> = scan.iter().map(|&t| ray_map(t)).collect();
    let increasing = mapped.windows(2).all(|w| w[1] > w[0]);
    let decreasing = mapped.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::domain("caustic not single-valued over aperture"));
    }
    let (x_min, x_max) = if increasing {
        (mapped[0], mapped[n_scan])
    } else {
        (mapped[n_scan], mapped[0])
    };

    let tangent = |xa: f64| -> Result<f64> {
        let tol = 1e-9 * (1.0 + xa.abs());
        if xa < x_min - tol || xa > x_max + tol {
            return Err(Error::domain(format!(
                "aperture point x = {xa} m is not reached by the sampled caustic (ray map covers [{x_min}, {x_max}])"
            )));
        }
        let (mut a, mut b) = (z_lo, z_hi);
        let sign = if increasing { 1.0 } else { -1.0 };
        while b - a > BISECTION_TOL_M {
            let mid = 0.5 * (a + b);
            if sign * (ray_map(mid) - xa) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    };
    let dphi = |xa: f64| -> Result<f64> { Ok(slope_to_k(spline.derivative(tangent(xa)?))) };

    let xs = x_grid.coordinates();
    let h = x_grid.step_m;
    let node_slopes = xs.iter().map(|&xi| dphi(xi)).collect::<Result<Vec<_>>>()?;
    let mut phase = vec![0.0; xs.len()];
    let last = xs.len() - 1;
    for i in (0..last).rev() {
        let mid = dphi(xs[i] + 0.5 * h)?;
        let inc = h / 6.0 * (node_slopes[i] + 4.0 * mid + node_slopes[i + 1]);
        phase[i] = phase[i + 1] - inc;
    }
    Ok(PhaseProfile {
        grid: *x_grid,
        phase_rad: phase,
        regime: Regime::Numeric,
        law: None,
    })
}

/// Caustic recovered from a phase profile.
#[derive(Debug, Clone, Default)]
pub struct CausticCurve {
    /// `(x_c, z_c)` for every evaluated node.
    pub points: Vec<(f64, f64)>,
    /// Aperture coordinate each point came from.
    pub source_x: Vec<f64>,
    /// Interior nodes skipped because `|φ''|` fell below tolerance.
    pub skipped: Vec<usize>,
}

/// `(x_c, z_c) = (x − φ'/φ'', −k/φ'')` with central differences.
/// Nodes with `|φ''| < k·1e-5` (caustic beyond 100 km) are skipped.
pub fn caustic_from_phase(profile: &PhaseProfile, medium: &Medium) -> CausticCurve {
    caustic_from_phase_with_tol(profile, medium, medium.k() * 1e-5)
}

pub fn caustic_from_phase_with_tol(profile: &PhaseProfile, medium: &Medium, curvature_tol: f64) -> CausticCurve {
    let k = medium.k();
    let h = profile.grid.step_m;
    let p = &profile.phase_rad;
    let mut out = CausticCurve::default();
    for i in 1..p.len().saturating_sub(1) {
        let d1 = (p[i + 1] - p[i - 1]) / (2.0 * h);
        let d2 = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / (h * h);
        if !(d2.abs() >= curvature_tol) {
            out.skipped.push(i);
            continue;
        }
        let x = profile.grid.coordinate(i);
        out.points.push((x - d1 / d2, -k / d2));
        out.source_x.push(x);
    }
    out
}

/// Airy length scale `(4βk²)^{-1/3}`.
pub fn airy_length_scale(beta_per_m: f64, medium: &Medium) -> f64 {
    (4.0 * beta_per_m * medium.k() * medium.k()).cbrt().recip()
}

/// Main-lobe FWHM `2.278/(4βk²)^{1/3}`.
pub fn airy_fwhm(beta_per_m: f64, medium: &Medium) -> f64 {
    AIRY_FWHM_COEFF * airy_length_scale(beta_per_m, medium)
}

/// Main-lobe peak offset from the caustic, `−1.02/(4βk²)^{1/3}`.
pub fn airy_peak_offset(beta_per_m: f64, medium: &Medium) -> f64 {
    -AIRY_PEAK_COEFF * airy_length_scale(beta_per_m, medium)
}

/// Peak offset using the exact first maximum of Ai instead of the rounded 1.02.
pub fn airy_peak_offset_exact(beta_per_m: f64, medium: &Medium) -> f64 {
    AI_FIRST_MAXIMUM * airy_length_scale(beta_per_m, medium)
}

/// Focal distance of a mirror-symmetric pair: `d_f = √(−(x0+δx_m)/β) + z0`.
pub fn focal_distance(x0_m: f64, z0_m: f64, beta_per_m: f64, medium: &Medium) -> Result<f64> {
    focal_distance_with_offset(x0_m, z0_m, beta_per_m, airy_peak_offset(beta_per_m, medium))
}

pub fn focal_distance_with_offset(x0_m: f64, z0_m: f64, beta_per_m: f64, peak_offset_m: f64) -> Result<f64> {
    let r = -(x0_m + peak_offset_m) / beta_per_m;
    if r < 0.0 {
        return Err(Error::domain(format!(
            "focal distance undefined: −(x0 + δx_m)/β = {r} < 0"
        )));
    }
    Ok(r.sqrt() + z0_m)
}

/// Inverse of [`focal_distance_with_offset`]: the vertex distance z0 that
/// focuses at `d_f`.
pub fn z0_for_focal_distance(d_f_m: f64, x0_m: f64, beta_per_m: f64, peak_offset_m: f64) -> Result<f64> {
    let r = -(x0_m + peak_offset_m) / beta_per_m;
    if r < 0.0 {
        return Err(Error::InfeasibleGeometry(format!(
            "no vertex focuses at {d_f_m} m: −(x0 + δx_m)/β = {r} < 0"
        )));
    }
    Ok(d_f_m - r.sqrt())
}

/// Farthest distance the main lobe follows the parabola for an aperture
/// spanning `[−Lx, 0]`: `√((Lx + βz0² + x0)/β)`.
pub fn z_max(aperture_lx_m: f64, parabola: &Parabola) -> Result<f64> {
    let b = parabola.beta_per_m;
    let r = (aperture_lx_m + b * parabola.z0_m * parabola.z0_m + parabola.x0_m) / b;
    if r < 0.0 {
        return Err(Error::domain(format!("z_max undefined: radicand {r} < 0")));
    }
    Ok(r.sqrt())
}

/// Spatial bandwidth of an exponentially tapered Airy footprint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialBandwidth {
    /// `δk_FWHM = 2k√(ln2·2β/α)`, rad/m.
    pub fwhm_rad_per_m: f64,
    /// `δk_FWHM / k`.
    pub relative: f64,
    /// Nyquist element-spacing bound `π/δk_FWHM`, m.
    pub max_spacing_m: f64,
}

pub fn airy_spatial_bandwidth(beta_per_m: f64, alpha_per_m: f64, medium: &Medium) -> Result<SpatialBandwidth> {
    if !(beta_per_m > 0.0 && alpha_per_m > 0.0) {
        return Err(Error::domain("bandwidth needs β > 0 and α > 0"));
    }
    let relative = 2.0 * (std::f64::consts::LN_2 * 2.0 * beta_per_m / alpha_per_m).sqrt();
    let fwhm = relative * medium.k();
    Ok(SpatialBandwidth {
        fwhm_rad_per_m: fwhm,
        relative,
        max_spacing_m: std::f64::consts::PI / fwhm,
    })
}

/// Which parabola parameter to solve for when passing through a receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParabolaUnknown {
    Beta { x0_m: f64, z0_m: f64 },
    X0 { beta_per_m: f64, z0_m: f64 },
    /// Uses the branch `z0 = z_RX − √((x_RX − x0)/β)`.
    Z0 { beta_per_m: f64, x0_m: f64 },
}

/// Completes a parabola so that it passes through `(x_rx, z_rx)`.
pub fn solve_parabola_through_point(x_rx: f64, z_rx: f64, unknown: ParabolaUnknown) -> Result<Parabola> {
    match unknown {
        ParabolaUnknown::Beta { x0_m, z0_m } => {
            let dz = z_rx - z0_m;
            let dx = x_rx - x0_m;
            if dz == 0.0 || dx <= 0.0 {
                return Err(Error::InfeasibleGeometry(format!(
                    "no positive β passes through ({x_rx}, {z_rx}) from vertex ({x0_m}, {z0_m})"
                )));
            }
            Parabola::new(dx / (dz * dz), x0_m, z0_m)
        }
        ParabolaUnknown::X0 { beta_per_m, z0_m } => {
            Parabola::new(beta_per_m, x_rx - beta_per_m * (z_rx - z0_m).powi(2), z0_m)
        }
        ParabolaUnknown::Z0 { beta_per_m, x0_m } => {
            let r = (x_rx - x0_m) / beta_per_m;
            if !(r >= 0.0) {
                return Err(Error::InfeasibleGeometry(format!(
                    "receiver x = {x_rx} m lies on the wrong side of vertex x0 = {x0_m} m for β = {beta_per_m}"
                )));
            }
            Parabola::new(beta_per_m, x0_m, z_rx - r.sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn medium_k(k: f64) -> Medium {
        Medium::new(crate::grid::SPEED_OF_LIGHT * k / (2.0 * PI)).unwrap()
    }

    fn line(lo: f64, hi: f64, n: usize) -> Grid1D {
        Grid1D::new(lo, (hi - lo) / (n - 1) as f64, n).unwrap()
    }

    #[test]
    fn paraxial_phase_values() {
        let m = medium_k(3141.59);
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        let prof = parabolic_phase_paraxial(&p, &m, &line(-0.5, 0.0, 11)).unwrap();
        assert_eq!(*prof.phase_rad.last().unwrap(), 0.0);
        // −(4/3)·√0.002·3141.59·0.5^{3/2}
        let expect = -(4.0 / 3.0) * 0.002f64.sqrt() * 3141.59 * 0.5f64.powf(1.5);
        assert_relative_eq!(prof.phase_rad[0], expect, max_relative = 1e-12);
        assert!((prof.phase_rad[0] + 66.2).abs() < 0.05);
    }

    #[test]
    fn paraxial_derivative_matches_ray_slope() {
        let m = medium_k(3141.59);
        let p = Parabola::new(0.002, 0.03, 1.5).unwrap();
        let x = -0.5;
        let h = 1e-5;
        let f = |t: f64| PhaseLaw::ParabolicParaxial { parabola: p, k: m.k() }.eval(t).unwrap();
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        let zc = p.tangent_z(x).unwrap();
        let want = m.k() * p.slope_at(zc);
        assert_relative_eq!(d, want, max_relative = 1e-6);
    }

    #[test]
    fn paraxial_rejects_negative_radicand() {
        let m = medium_k(3141.59);
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        let err = parabolic_phase_paraxial(&p, &m, &line(-0.5, 0.25, 4)).unwrap_err();
        assert!(err.to_string().contains("x = 0.25"), "{err}");
    }

    #[test]
    fn nonparaxial_reduces_to_closed_parabolic_form() {
        let m = medium_k(3141.59);
        let b = 0.25;
        let p = Parabola::new(b, 0.0, 0.0).unwrap();
        let g = line(-1.0, 0.0, 201);
        let prof = parabolic_phase_nonparaxial(&p, &m, &g).unwrap();
        assert_eq!(*prof.phase_rad.last().unwrap(), 0.0);
        for (x, got) in g.coordinates().iter().zip(&prof.phase_rad) {
            let x = *x;
            let want = m.k() / (4.0 * b)
                * (-2.0 * (b * x * (4.0 * b * x - 1.0)).sqrt() + (2.0 * (-b * x).sqrt()).asinh());
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1e-12), "{got} vs {want}");
        }
    }

    #[test]
    fn small_curvature_limit_agrees_with_paraxial() {
        let m = medium_k(3141.59);
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        let g = line(-1.0, 0.0, 401);
        let a = parabolic_phase_paraxial(&p, &m, &g).unwrap();
        let b = parabolic_phase_nonparaxial(&p, &m, &g).unwrap();
        let excursion = a.phase_rad.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let worst = a
            .phase_rad
            .iter()
            .zip(&b.phase_rad)
            .fold(0.0f64, |acc, (u, v)| acc.max((u - v).abs()));
        assert!(worst < 0.01 * excursion, "worst {worst}, excursion {excursion}");
    }

    #[test]
    fn extended_phase_is_c1_at_the_limit() {
        let m = medium_k(3141.59);
        let p = Parabola::new(0.005, -0.5, 5.0).unwrap();
        let x_lim = p.x_limit();
        assert!((x_lim + 0.375).abs() < 1e-12);
        for paraxial in [true, false] {
            let law = PhaseLaw::ParabolicExtended { parabola: p, k: m.k(), paraxial };
            let f = |x: f64| law.eval(x).unwrap();
            let h = 1e-8;
            let left = (f(x_lim - h) - f(x_lim - 2.0 * h)) / h;
            let right = (f(x_lim + 2.0 * h) - f(x_lim + h)) / h;
            assert!((left - right).abs() < 1e-3 * left.abs(), "{left} vs {right}");
            assert!((f(x_lim + 1e-12) - f(x_lim)).abs() < 1e-6);
        }
        let prof = parabolic_phase_extended(&p, &m, &line(-1.0, 0.0, 101), false).unwrap();
        assert!(prof.phase_rad.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn circular_phase_values() {
        let m = medium_k(3141.59);
        let c = Circle { radius_m: 1.0, center_x_m: 0.0 };
        let prof = circular_phase(&c, &m, &line(1.0, 2.0, 101)).unwrap();
        assert!(prof.phase_rad[0].abs() < 1e-9);
        let want = 3141.59 * (3f64.sqrt() - PI / 3.0);
        assert_relative_eq!(*prof.phase_rad.last().unwrap(), want, max_relative = 1e-12);
        assert!((want - 2151.9).abs() < 1.0);
        assert!(prof.phase_rad.windows(2).all(|w| w[1] > w[0]));
        assert!(circular_phase(&c, &m, &line(0.5, 2.0, 11)).is_err());
    }

    #[test]
    fn numeric_straight_line_gives_steering_phase() {
        let m = medium_k(3141.59);
        let theta: f64 = 0.1;
        let z: Vec<f64> = (0..50).map(|i| i as f64 * 0.5).collect();
        let x: Vec<f64> = z.iter().map(|t| t * theta.tan()).collect();
        let g = line(-0.5, 0.0, 51);
        let prof = phase_from_trajectory_numeric(&TrajectorySpec::Numeric { z_m: z, x_m: x }, &m, &g).unwrap();
        for (xi, ph) in g.coordinates().iter().zip(&prof.phase_rad) {
            assert_relative_eq!(*ph, m.k() * theta.sin() * xi, epsilon = 1e-9);
        }
    }

    #[test]
    fn numeric_parabola_matches_closed_form() {
        let m = medium_k(3141.59);
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        let z: Vec<f64> = (0..=300).map(|i| i as f64 * 0.1).collect();
        let x: Vec<f64> = z.iter().map(|&t| p.x_at(t)).collect();
        let g = line(-1.0, 0.0, 1001);
        let num = phase_from_trajectory_numeric(&TrajectorySpec::Numeric { z_m: z, x_m: x }, &m, &g).unwrap();
        let exact = parabolic_phase_nonparaxial(&p, &m, &g).unwrap();
        let off = exact.phase_rad.last().unwrap() - num.phase_rad.last().unwrap();
        let rms = (num
            .phase_rad
            .iter()
            .zip(&exact.phase_rad)
            .map(|(a, b)| (a + off - b).powi(2))
            .sum::<f64>()
            / g.count as f64)
            .sqrt();
        assert!(rms < 1e-3, "rms {rms}");
    }

    #[test]
    fn numeric_circle_matches_closed_form() {
        let m = medium_k(3141.59);
        let r: f64 = 1.0;
        // arc on the z < 0 side reproduces the printed sign of the circular law
        let n = 4000;
        let z: Vec<f64> = (0..=n).map(|i| -0.9 * r + 0.9 * r * i as f64 / n as f64).collect();
        let x: Vec<f64> = z.iter().map(|t| (r * r - t * t).sqrt()).collect();
        let g = line(1.0, 2.0, 1001);
        let num = phase_from_trajectory_numeric(&TrajectorySpec::Numeric { z_m: z, x_m: x }, &m, &g).unwrap();
        let exact = circular_phase(&Circle { radius_m: r, center_x_m: 0.0 }, &m, &g).unwrap();
        let off = exact.phase_rad.last().unwrap() - num.phase_rad.last().unwrap();
        let rms = (num
            .phase_rad
            .iter()
            .zip(&exact.phase_rad)
            .map(|(a, b)| (a + off - b).powi(2))
            .sum::<f64>()
            / g.count as f64)
            .sqrt();
        assert!(rms < 1e-3, "rms {rms}");
    }

    #[test]
    fn numeric_fold_is_rejected() {
        let m = medium_k(3141.59);
        // S-shaped path: slope rises then falls, so the ray map folds
        let z: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        let x: Vec<f64> = z.iter().map(|t| 0.05 * (t * 0.5).sin()).collect();
        let err = phase_from_trajectory_numeric(&TrajectorySpec::Numeric { z_m: z, x_m: x }, &m, &line(-0.1, 0.0, 11))
            .unwrap_err();
        assert!(err.to_string().contains("caustic not single-valued"));
    }

    #[test]
    fn lens_phase_focuses_to_one_point() {
        let m = medium_k(3141.59);
        let f = 4.0;
        let g = line(-0.5, 0.5, 201);
        let phase_rad = g.coordinates().iter().map(|x| -m.k() * x * x / (2.0 * f)).collect();
        let prof = PhaseProfile { grid: g, phase_rad, regime: Regime::Paraxial, law: None };
        let c = caustic_from_phase(&prof, &m);
        assert!(c.skipped.is_empty());
        for (xc, zc) in c.points {
            assert!(xc.abs() < 1e-6 && (zc - f).abs() < 1e-6, "({xc}, {zc})");
        }
    }

    #[test]
    fn airy_phase_recovers_parabola() {
        let m = medium_k(3141.59);
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        let g = Grid1D::new(-0.5, 0.5e-3, 1001).unwrap();
        let prof = parabolic_phase_paraxial(&p, &m, &g).unwrap();
        let c = caustic_from_phase(&prof, &m);
        let mut worst: f64 = 0.0;
        for &(xc, zc) in &c.points {
            if (2.0..=14.0).contains(&zc) {
                worst = worst.max((xc - p.x_at(zc)).abs());
            }
        }
        assert!(worst < 1e-3, "worst residual {worst}");
    }

    #[test]
    fn linear_phase_has_no_caustic() {
        let m = medium_k(3141.59);
        let g = line(-1.0, 0.0, 101);
        let prof = linear_phase(0.2, 0.0, &m, &g).unwrap();
        let c = caustic_from_phase(&prof, &m);
        assert!(c.points.is_empty());
        assert_eq!(c.skipped.len(), 99);
    }

    #[test]
    fn airy_scalings() {
        let m = medium_k(3141.59);
        let w = airy_fwhm(0.002, &m);
        assert!((w - 0.0531).abs() < 5e-4, "{w}");
        assert_relative_eq!(airy_fwhm(0.016, &m), w / 2.0, max_relative = 1e-12);
        let m2 = medium_k(2.0 * 3141.59);
        assert_relative_eq!(airy_fwhm(0.002, &m2), w / 2f64.powf(2.0 / 3.0), max_relative = 1e-12);
        let d = airy_peak_offset(0.002, &m);
        assert!((d + 0.0238).abs() < 2e-4, "{d}");
        assert_relative_eq!(d / w, -1.02 / 2.278, max_relative = 1e-12);
    }

    #[test]
    fn focal_distance_cases() {
        let m = Medium::new(150e9).unwrap();
        let df = focal_distance(-0.25, 5.0, 0.002, &m).unwrap();
        assert!((df - 16.7).abs() < 0.05, "{df}");
        let dx = airy_peak_offset(0.002, &m);
        assert_relative_eq!(focal_distance(-dx, 3.3, 0.002, &m).unwrap(), 3.3, epsilon = 1e-12);
        let z0 = z0_for_focal_distance(10.0, -0.15, 0.002, 0.0).unwrap();
        assert_relative_eq!(z0, 10.0 - 75f64.sqrt(), epsilon = 1e-12);
        assert!((z0 - 1.34).abs() < 0.01);
        assert!(focal_distance(0.5, 0.0, 0.002, &m).is_err());
    }

    #[test]
    fn z_max_reference_values() {
        let p = Parabola::new(0.002, 0.0, 0.0).unwrap();
        for (lx, want) in [(0.5, 15.8), (0.25, 11.2), (0.125, 7.9)] {
            let z = z_max(lx, &p).unwrap();
            assert!((z - want).abs() < 0.05, "Lx={lx}: {z}");
        }
        let p10 = Parabola::new(0.002, 0.0, 10.0).unwrap();
        assert!((z_max(1.0, &p10).unwrap() - 24.49).abs() < 0.01);
        assert!(z_max(0.0, &Parabola::new(0.002, -1.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn bandwidth_values() {
        let m = Medium::new(150e9).unwrap();
        let bw = airy_spatial_bandwidth(0.002, 4.0, &m).unwrap();
        assert!((bw.relative - 0.0527).abs() < 1e-4, "{}", bw.relative);
        assert!((bw.max_spacing_m / m.lambda() - 9.5).abs() < 0.05);
        let bw4 = airy_spatial_bandwidth(0.008, 4.0, &m).unwrap();
        assert_relative_eq!(bw4.fwhm_rad_per_m, 2.0 * bw.fwhm_rad_per_m, max_relative = 1e-12);
        let wide = airy_spatial_bandwidth(0.002, 1e12, &m).unwrap();
        assert!(wide.relative < 1e-6);
        assert!(airy_spatial_bandwidth(0.002, 0.0, &m).is_err());
    }

    #[test]
    fn parabola_through_receiver() {
        let p = solve_parabola_through_point(0.45, 15.0, ParabolaUnknown::Beta { x0_m: 0.0, z0_m: 0.0 }).unwrap();
        assert_relative_eq!(p.beta_per_m, 0.002, max_relative = 1e-12);
        let p = solve_parabola_through_point(0.45, 0.5, ParabolaUnknown::Z0 { beta_per_m: 0.012, x0_m: -0.02 }).unwrap();
        assert_relative_eq!(p.z0_m, 0.5 - (0.47f64 / 0.012).sqrt(), epsilon = 1e-12);
        assert!((p.x_at(0.5) - 0.45).abs() <= 1e-12 * 0.45);
        let p = solve_parabola_through_point(-0.1, 4.0, ParabolaUnknown::Z0 { beta_per_m: 0.01, x0_m: -0.1 }).unwrap();
        assert_eq!(p.z0_m, 4.0);
        assert!(matches!(
            solve_parabola_through_point(-0.5, 4.0, ParabolaUnknown::Z0 { beta_per_m: 0.01, x0_m: 0.0 }),
            Err(Error::InfeasibleGeometry(_))
        ));
    }
}
