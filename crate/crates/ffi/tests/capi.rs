use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use bendbeam_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe {
        bb_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn preset(name: &str) -> *mut BbScenario {
    let n = CString::new(name).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bb_scenario_from_preset(n.as_ptr(), &mut s) }, BbStatus::Ok);
    assert!(!s.is_null());
    s
}

const CONFIG: &str = r#"{
  "units": "SI",
  "frequencies_hz": [150e9],
  "sources": [{"name": "b", "source": {"kind": "design",
    "window": {"taper": {"kind": "uniform"}, "aperture": {"lx_m": 0.25}},
    "beams": [{"phase": {"law": "parabolic", "beta_per_m": 0.002, "x0_m": 0.0, "z0_m": 0.0, "paraxial": true}}],
    "array": {"spacing_wavelengths": 0.5, "bit_depth": {"bits": 2}}}}],
  "z_list_m": [2.0, 4.0]
}"#;

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(bb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn null_arguments_are_rejected() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bb_scenario_from_json(ptr::null(), &mut s) }, BbStatus::NullPointer);
    let j = CString::new(CONFIG).unwrap();
    assert_eq!(unsafe { bb_scenario_from_json(j.as_ptr(), ptr::null_mut()) }, BbStatus::NullPointer);
    let mut v = 0.0;
    assert_eq!(unsafe { bb_field_power(ptr::null(), &mut v) }, BbStatus::NullPointer);
    unsafe {
        bb_scenario_free(ptr::null_mut());
        bb_field_free(ptr::null_mut());
    }
}

#[test]
fn validation_error_carries_path() {
    let bad = CString::new(CONFIG.replace("\"SI\"", "\"imperial\"")).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bb_scenario_from_json(bad.as_ptr(), &mut s) }, BbStatus::Validation);
    assert!(s.is_null());
    assert!(last_error().contains("units"), "{}", last_error());
}

#[test]
fn unknown_preset_is_a_validation_error() {
    let n = CString::new("fig99").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bb_scenario_from_preset(n.as_ptr(), &mut s) }, BbStatus::Validation);
    assert!(last_error().contains("fig4"));
}

#[test]
fn error_message_truncates_and_reports_length() {
    let n = CString::new("nope").unwrap();
    let mut s = ptr::null_mut();
    unsafe { bb_scenario_from_preset(n.as_ptr(), &mut s) };
    let mut buf = [0 as c_char; 8];
    let full = unsafe { bb_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(full > 8);
    let got = unsafe { CStr::from_ptr(buf.as_ptr()) };
    assert_eq!(got.to_bytes().len(), 7);
}

#[test]
fn source_field_propagates_and_keeps_power() {
    let j = CString::new(CONFIG).unwrap();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(bb_scenario_from_json(j.as_ptr(), &mut s), BbStatus::Ok);
        let (mut ns, mut nf) = (0, 0);
        assert_eq!(bb_scenario_counts(s, &mut ns, &mut nf), BbStatus::Ok);
        assert_eq!((ns, nf), (1, 1));
        let mut f = ptr::null_mut();
        assert_eq!(bb_scenario_source_field(s, 0, 0, &mut f), BbStatus::Ok);
        assert_eq!(bb_scenario_source_field(s, 3, 0, &mut ptr::null_mut()), BbStatus::Validation);
        let (mut x0, mut dx, mut nx, mut ny, mut z) = (0.0, 0.0, 0, 0, -1.0);
        assert_eq!(bb_field_grid(f, &mut x0, &mut dx, &mut nx, &mut ny, &mut z), BbStatus::Ok);
        assert_eq!(ny, 1);
        assert_eq!(z, 0.0);
        let mut vals = vec![0.0; 2 * nx];
        assert_eq!(bb_field_values(f, vals.as_mut_ptr(), vals.len() - 1), BbStatus::BufferTooSmall);
        assert_eq!(bb_field_values(f, vals.as_mut_ptr(), vals.len()), BbStatus::Ok);
        let direct: f64 = vals.chunks(2).map(|c| c[0] * c[0] + c[1] * c[1]).sum::<f64>() * dx;
        let mut p0 = 0.0;
        bb_field_power(f, &mut p0);
        assert!((direct - p0).abs() <= 1e-12 * p0);
        let mut g = ptr::null_mut();
        assert_eq!(bb_field_propagate(f, 150e9, 3.0, &mut g), BbStatus::Ok);
        let mut p1 = 0.0;
        bb_field_power(g, &mut p1);
        assert!(p1 <= p0 * (1.0 + 1e-9) && p1 > 0.9 * p0, "{p0} {p1}");
        bb_field_grid(g, &mut x0, &mut dx, &mut nx, &mut ny, &mut z);
        assert_eq!(z, 3.0);
        bb_field_free(f);
        bb_field_free(g);
        bb_scenario_free(s);
    }
}

#[test]
fn codeword_is_quantized_to_four_levels() {
    let j = CString::new(CONFIG).unwrap();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(bb_scenario_from_json(j.as_ptr(), &mut s), BbStatus::Ok);
        let mut n = 0;
        assert_eq!(bb_scenario_codeword(s, ptr::null_mut(), 0, &mut n), BbStatus::BufferTooSmall);
        let lambda: f64 = 299_792_458.0 / 150e9;
        assert_eq!(n, (0.25 / (0.5 * lambda)).round() as usize + 1);
        let mut ph = vec![0.0; n];
        assert_eq!(bb_scenario_codeword(s, ph.as_mut_ptr(), n, &mut n), BbStatus::Ok);
        let step = std::f64::consts::FRAC_PI_2;
        for p in ph {
            let q = p / step;
            assert!((q - q.round()).abs() < 1e-9, "{p}");
        }
        bb_scenario_free(s);
    }
}

#[test]
fn preset_runs_reduced_to_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let s = preset("fig9c");
    unsafe {
        assert_eq!(bb_scenario_reduce(s), BbStatus::Ok);
        assert_eq!(bb_scenario_set_seed(s, 7), BbStatus::Ok);
        assert_eq!(bb_scenario_run(s, out.as_ptr()), BbStatus::Ok);
        bb_scenario_free(s);
    }
    let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 7"));
}

#[test]
fn analytic_helpers() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(bb_z_max(0.5, 0.002, 0.0, 0.0, &mut v), BbStatus::Ok);
        assert!((v - 15.81).abs() < 0.01);
        assert_eq!(bb_airy_fwhm(0.002, 150e9, &mut v), BbStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(bb_airy_fwhm(-1.0, 150e9, &mut v), BbStatus::Domain);
        assert_eq!(bb_airy_fwhm(0.002, 0.0, &mut v), BbStatus::Domain);
        assert_eq!(bb_focal_distance(-0.25, 5.0, 0.002, 150e9, &mut v), BbStatus::Ok);
        assert!((v - 16.7).abs() < 0.01);
        assert_eq!(bb_focal_distance(0.25, 5.0, 0.002, 150e9, &mut v), BbStatus::Domain);
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("bendbeam.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    let src = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.trim().strip_prefix("pub unsafe extern \"C\" fn ").or(l.trim().strip_prefix("pub extern \"C\" fn ")))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15, "{exports:?}");
    for e in exports {
        assert!(h.contains(&format!("{e}(")), "{e} missing from header");
    }
    assert!(h.contains("typedef struct bb_scenario bb_scenario;"));
    assert!(h.contains("BB_STATUS_OK = 0"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(header())
        .output()
    else {
        eprintln!("no C compiler found; header syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn c_program_links_and_runs() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.join("libbendbeam_ffi.so");
    if !lib.exists() {
        eprintln!("shared library not found next to the test binary; C link check skipped");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join("smoke.c");
    let Ok(build) = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg("-o")
        .arg(&exe)
        .arg(&lib)
        .arg(format!("-Wl,-rpath,{}", deps.display()))
        .output()
    else {
        eprintln!("no C compiler found; C link check skipped");
        return;
    };
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}{}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout.contains("z_max=15.8114"), "{stdout}");
}
