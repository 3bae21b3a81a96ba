//! C ABI over `bendbeam`: opaque handles, integer status codes and a
//! thread-local error message.
//!
//! Every function returns a [`BbStatus`]; results are written through out
//! pointers. Handles are released with their `_free` function.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use bendbeam::analysis::analysis_options;
use bendbeam::presets;
use bendbeam::propagation::propagate_to;
use bendbeam::scenario::{self, Scenario};
use bendbeam::trajectory::{airy_fwhm, focal_distance, z_max, Parabola};
use bendbeam::{Error, FieldSlice, Grid, Medium};

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Validation = 3,
    Resource = 4,
    Domain = 5,
    Infeasible = 6,
    Numerical = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Parsed, validated scenario.
pub struct BbScenario(Scenario);

/// Complex field on a line or plane grid.
pub struct BbField(FieldSlice);

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut v = msg.as_bytes().to_vec();
        v.retain(|&b| b != 0);
        *e.borrow_mut() = v;
    });
}

fn status_of(e: &Error) -> BbStatus {
    match e {
        Error::Validation { .. } => BbStatus::Validation,
        Error::Resource { .. } => BbStatus::Resource,
        Error::Domain(_) => BbStatus::Domain,
        Error::InfeasibleGeometry(_) => BbStatus::Infeasible,
        Error::Numerical(_) => BbStatus::Numerical,
        Error::Io(_) | Error::Json(_) => BbStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), BbStatus>) -> BbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BbStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            BbStatus::Panic
        }
    }
}

fn check<T>(r: bendbeam::Result<T>) -> Result<T, BbStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T) -> Result<(), BbStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        Err(BbStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, BbStatus> {
    non_null(p)?;
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        BbStatus::InvalidUtf8
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses and validates a JSON scenario.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bb_scenario_from_json(json: *const c_char, out: *mut *mut BbScenario) -> BbStatus {
    guard(|| {
        non_null(out)?;
        let s = check(scenario::parse(text(json)?))?;
        *out = Box::into_raw(Box::new(BbScenario(s)));
        Ok(())
    })
}

/// Loads a built-in scenario by name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bb_scenario_from_preset(name: *const c_char, out: *mut *mut BbScenario) -> BbStatus {
    guard(|| {
        non_null(out)?;
        let s = check(presets::preset(text(name)?))?;
        *out = Box::into_raw(Box::new(BbScenario(s)));
        Ok(())
    })
}

/// Switches a scenario to reduced resolution in place.
///
/// # Safety
/// `scn` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bb_scenario_reduce(scn: *mut BbScenario) -> BbStatus {
    guard(|| {
        non_null(scn)?;
        let s = &mut *scn;
        s.0 = s.0.reduced_for_ci();
        Ok(())
    })
}

/// Overrides the scenario seed.
///
/// # Safety
/// `scn` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bb_scenario_set_seed(scn: *mut BbScenario, seed: u64) -> BbStatus {
    guard(|| {
        non_null(scn)?;
        (*scn).0.seed = seed;
        Ok(())
    })
}

/// Runs the scenario and writes its bundle under `out_dir`.
///
/// # Safety
/// `scn` must be a live handle; `out_dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn bb_scenario_run(scn: *const BbScenario, out_dir: *const c_char) -> BbStatus {
    guard(|| {
        non_null(scn)?;
        let dir = text(out_dir)?;
        check(scenario::run(&(*scn).0, Path::new(dir)))?;
        Ok(())
    })
}

/// Number of sources and frequencies in the scenario.
///
/// # Safety
/// `scn` must be a live handle; out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn bb_scenario_counts(
    scn: *const BbScenario,
    sources: *mut usize,
    frequencies: *mut usize,
) -> BbStatus {
    guard(|| {
        non_null(scn)?;
        non_null(sources)?;
        non_null(frequencies)?;
        *sources = (*scn).0.sources.len();
        *frequencies = (*scn).0.frequencies_hz.len();
        Ok(())
    })
}

/// Source `source` of the scenario at z = 0, sampled for frequency `freq`.
///
/// # Safety
/// `scn` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bb_scenario_source_field(
    scn: *const BbScenario,
    source: usize,
    freq: usize,
    out: *mut *mut BbField,
) -> BbStatus {
    guard(|| {
        non_null(scn)?;
        non_null(out)?;
        let s = &(*scn).0;
        let Some(&f) = s.frequencies_hz.get(freq) else {
            set_error(&format!("no frequency at index {freq}"));
            return Err(BbStatus::Validation);
        };
        let field = check(s.source_field(source, f))?;
        *out = Box::into_raw(Box::new(BbField(field)));
        Ok(())
    })
}

/// Writes the phase (rad) of each element of the first array source.
/// `written` receives the element count; when `len` is too small nothing
/// is copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `scn` must be a live handle; `phases` null or `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bb_scenario_codeword(
    scn: *const BbScenario,
    phases: *mut f64,
    len: usize,
    written: *mut usize,
) -> BbStatus {
    guard(|| {
        non_null(scn)?;
        non_null(written)?;
        let code = check(scenario::codeword(&(*scn).0))?;
        *written = code.phases_rad.len();
        if phases.is_null() || len < code.phases_rad.len() {
            set_error("phase buffer too small");
            return Err(BbStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(code.phases_rad.as_ptr(), phases, code.phases_rad.len());
        Ok(())
    })
}

/// # Safety
/// `scn` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bb_scenario_free(scn: *mut BbScenario) {
    if !scn.is_null() {
        drop(Box::from_raw(scn));
    }
}

/// Propagates `field` by `z_m` at `frequency_hz` with the band limit on.
///
/// # Safety
/// `field` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bb_field_propagate(
    field: *const BbField,
    frequency_hz: f64,
    z_m: f64,
    out: *mut *mut BbField,
) -> BbStatus {
    guard(|| {
        non_null(field)?;
        non_null(out)?;
        let medium = check(Medium::new(frequency_hz))?;
        let src = &(*field).0;
        let z = src.z_m + z_m;
        let mut shifted = src.clone();
        shifted.z_m = 0.0;
        let mut f = check(propagate_to(&shifted, &medium, z_m, &analysis_options()))?;
        f.z_m = z;
        *out = Box::into_raw(Box::new(BbField(f)));
        Ok(())
    })
}

/// Grid of a field: x start, step and count, plus the y count (1 in line mode).
///
/// # Safety
/// `field` must be a live handle; out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn bb_field_grid(
    field: *const BbField,
    x_start_m: *mut f64,
    x_step_m: *mut f64,
    nx: *mut usize,
    ny: *mut usize,
    z_m: *mut f64,
) -> BbStatus {
    guard(|| {
        non_null(field)?;
        for p in [x_start_m, x_step_m, z_m] {
            non_null(p)?;
        }
        non_null(nx)?;
        non_null(ny)?;
        let f = &(*field).0;
        let x = f.grid.x_axis();
        *x_start_m = x.start_m;
        *x_step_m = x.step_m;
        *nx = x.count;
        *ny = match &f.grid {
            Grid::Line(_) => 1,
            Grid::Plane(p) => p.y.count,
        };
        *z_m = f.z_m;
        Ok(())
    })
}

/// Copies the field as interleaved `(re, im)` doubles, x fastest.
/// `len` counts doubles and must be at least twice the sample count.
///
/// # Safety
/// `field` must be a live handle; `values` null or `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bb_field_values(field: *const BbField, values: *mut f64, len: usize) -> BbStatus {
    guard(|| {
        non_null(field)?;
        let f = &(*field).0;
        if values.is_null() || len < 2 * f.values.len() {
            set_error(&format!("need {} doubles", 2 * f.values.len()));
            return Err(BbStatus::BufferTooSmall);
        }
        for (i, v) in f.values.iter().enumerate() {
            *values.add(2 * i) = v.re;
            *values.add(2 * i + 1) = v.im;
        }
        Ok(())
    })
}

/// Total power `Σ|E|²·ΔA` of a field.
///
/// # Safety
/// `field` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bb_field_power(field: *const BbField, out: *mut f64) -> BbStatus {
    guard(|| {
        non_null(field)?;
        non_null(out)?;
        *out = bendbeam::total_power(&(*field).0);
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bb_field_free(field: *mut BbField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Main-lobe FWHM `2.278/(4βk²)^{1/3}` in metres.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bb_airy_fwhm(beta_per_m: f64, frequency_hz: f64, out: *mut f64) -> BbStatus {
    guard(|| {
        non_null(out)?;
        let m = check(Medium::new(frequency_hz))?;
        if !(beta_per_m > 0.0) {
            set_error("β must be positive");
            return Err(BbStatus::Domain);
        }
        *out = airy_fwhm(beta_per_m, &m);
        Ok(())
    })
}

/// Farthest distance the lobe follows the parabola from an aperture of length `lx_m`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bb_z_max(lx_m: f64, beta_per_m: f64, x0_m: f64, z0_m: f64, out: *mut f64) -> BbStatus {
    guard(|| {
        non_null(out)?;
        let p = check(Parabola::new(beta_per_m, x0_m, z0_m))?;
        *out = check(z_max(lx_m, &p))?;
        Ok(())
    })
}

/// Focal distance of a mirror-symmetric pair, peak offset included.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bb_focal_distance(
    x0_m: f64,
    z0_m: f64,
    beta_per_m: f64,
    frequency_hz: f64,
    out: *mut f64,
) -> BbStatus {
    guard(|| {
        non_null(out)?;
        let m = check(Medium::new(frequency_hz))?;
        *out = check(focal_distance(x0_m, z0_m, beta_per_m, &m))?;
        Ok(())
    })
}
