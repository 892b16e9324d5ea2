use std::path::Path;
use std::process::{Command, Output};

fn lesa(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lesa")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn synth_fixture_writes_report() {
    let d = tempfile::tempdir().unwrap();
    let o = lesa(&["synth", "--fixture", "paper_design", "--out", "out"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(d.path().join("out/synth.json"))).unwrap();
    assert_eq!(v["c12_pf"], serde_json::json!(0.743));
    assert_eq!(v["metadata"]["version"], serde_json::json!(env!("CARGO_PKG_VERSION")));
    assert_eq!(v["metadata"]["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn config_file_and_overrides() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("run.ini"), lesa::config::DESIGN_FIXTURE).unwrap();
    let o = lesa(&["synth", "--config", "run.ini", "--design.theta_trim_deg", "0"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(d.path().join("synth.json"))).unwrap();
    assert_eq!(v["theta_trimmed_deg"], v["theta_deg"]);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    // configuration errors
    let o = lesa(&["synth"], d.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("design"));
    assert_eq!(code(&lesa(&["synth", "--fixture", "paper_design", "--f0_hz", "-1"], d.path())), 1);
    assert_eq!(code(&lesa(&["synth", "--fixture", "nope"], d.path())), 1);
    assert_eq!(code(&lesa(&["synth", "--fixture", "paper_design", "--bogus", "1"], d.path())), 1);
    assert_eq!(code(&lesa(&["frobnicate"], d.path())), 1);
    assert_eq!(code(&lesa(&["synth", "--config", "missing.ini"], d.path())), 1);
    // numeric failure
    let o = lesa(&["synth", "--fixture", "paper_design", "--design.fractional_bandwidth", "0"], d.path());
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!d.path().join("synth.json").exists());
    assert_eq!(code(&lesa(&["--help"], d.path())), 0);
}

#[test]
fn gain_engines_and_plot() {
    let d = tempfile::tempdir().unwrap();
    for e in ["cm", "abcd"] {
        let o = lesa(&["gain", "--fixture", "paper_design", "--engine", e, "--n_points", "201"], d.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let cm = read(d.path().join("gain_cm.csv"));
    assert_eq!(cm.lines().next(), Some("frequency_hz,gain_db,phase_deg,idler_gain_db"));
    assert_eq!(cm.lines().count(), 202);
    let abcd = read(d.path().join("gain_abcd.csv"));
    assert_eq!(abcd.lines().next(), Some("frequency_hz,gain_db,phase_deg"));

    let o = lesa(&["plot", "gain_cm.csv", "gain_abcd.csv", "--out", "a.svg"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    lesa(&["plot", "gain_cm.csv", "gain_abcd.csv", "--out", "b.svg"], d.path());
    let a = std::fs::read(d.path().join("a.svg")).unwrap();
    assert_eq!(a, std::fs::read(d.path().join("b.svg")).unwrap());
    let svg = String::from_utf8(a).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("gain_cm") && svg.contains("gain_abcd"));
}

#[test]
fn imd_and_compress_outputs() {
    let d = tempfile::tempdir().unwrap();
    let o = lesa(&["imd", "--fixture", "paper_design", "--delta_f_hz", "1e4,1e5"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let imd = read(d.path().join("imd_10000hz.csv"));
    assert_eq!(imd.lines().next(), Some("pin_dbm,im3_dbm,tls3_dbm,kerr3_dbm,im5_dbm,valid"));
    assert!(d.path().join("imd_100000hz.csv").exists());
    let o = lesa(&["plot", "imd_10000hz.csv", "--out", "charts"], d.path());
    assert_eq!(code(&o), 0);
    assert_eq!(read(d.path().join("charts/plot.svg")).matches("<polyline").count(), 3);

    let o = lesa(&["compress", "--fixture", "paper_design", "--p_points", "41"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c = read(d.path().join("compress.csv"));
    assert_eq!(c.lines().next(), Some("pin_dbm,gain_db,converged"));
    // mixing schemas is a usage-class error
    assert_eq!(code(&lesa(&["plot", "compress.csv", "imd_10000hz.csv"], d.path())), 1);
}
