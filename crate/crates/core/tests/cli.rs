use std::fs;
use std::process::{Command, Output};

fn bendbeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bendbeam")).args(args).output().unwrap()
}

const CONFIG: &str = r#"{
  "units": "SI",
  "frequencies_hz": [150e9],
  "sources": [{"name": "bend", "source": {"kind": "design",
    "window": {"taper": {"kind": "uniform"}, "aperture": {"lx_m": 0.125}},
    "beams": [{"phase": {"law": "parabolic", "beta_per_m": 0.002, "x0_m": 0.0, "z0_m": 0.0, "paraxial": true}}],
    "array": {"bit_depth": {"bits": 3}}}}],
  "z_list_m": [2.0, 4.0],
  "metrics": [{"kind": "track"}]
}"#;

#[test]
fn list_presets_prints_registry() {
    let o = bendbeam(&["list-presets"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() >= 15);
    assert!(text.lines().any(|l| l.starts_with("fig4") && l.ends_with("blockage resilience sweep")));
}

#[test]
fn unknown_preset_exits_with_validation_code() {
    let o = bendbeam(&["preset", "fig99"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("fig13") && err.contains("figB"), "{err}");
}

#[test]
fn run_writes_bundle_and_codeword_goes_to_stdout() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("c.json");
    fs::write(&cfg, CONFIG).unwrap();
    let out = d.path().join("out");
    let o = bendbeam(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("manifest.json").exists());
    assert!(out.join("bend/f150GHz/track_beam0.csv").exists());
    let o = bendbeam(&["codeword", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() > 100);
}

#[test]
fn invalid_config_exits_2_and_names_path() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("c.json");
    fs::write(&cfg, CONFIG.replace("[2.0, 4.0]", "[]")).unwrap();
    let o = bendbeam(&["run", cfg.to_str().unwrap(), "--out", d.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("z_list_m"));
}

#[test]
fn memory_cap_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("c.json");
    fs::write(&cfg, CONFIG.replace("\"metrics\"", "\"grid\": {\"memory_cap_bytes\": 4096}, \"metrics\"")).unwrap();
    let o = bendbeam(&["run", cfg.to_str().unwrap(), "--out", d.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stderr).unwrap().contains("bytes"));
}

#[test]
fn printed_preset_config_runs_as_a_file() {
    let o = bendbeam(&["preset", "fig9c", "--ci", "--print-config"]);
    assert!(o.status.success());
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("fig9c.json");
    fs::write(&cfg, &o.stdout).unwrap();
    let out = d.path().join("o");
    let r = bendbeam(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn preset_and_sweep_verbs() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("fig13");
    let o = bendbeam(&["preset", "fig13", "--ci", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("bending/sweep.csv").exists());
    let cfg = d.path().join("c.json");
    fs::write(&cfg, CONFIG.replace("[150e9]", "[100e9, 150e9]")).unwrap();
    let sw = d.path().join("sw");
    let o = bendbeam(&["sweep", cfg.to_str().unwrap(), "--out", sw.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(sw.join("bend/sweep.csv")).unwrap().lines().count(), 3);
}
