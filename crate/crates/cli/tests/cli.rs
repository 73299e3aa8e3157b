use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use casimir_cli::output::read_curve;
use casimir_cli::{scan, ScanConfig};

fn casimir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const DRUDE: &str = r#"
distances = { min = 0.05, max = 5.0, points = 7 }
temperatures = [0.0, 0.1]
mirror1 = { epsilon = { kind = "drude_epsilon", plasma_frequency = 1.0, damping = 0.05 } }
mirror2 = { epsilon = { kind = "drude_epsilon", plasma_frequency = 1.0, damping = 0.05 } }
"#;

#[test]
fn scan_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", DRUDE);
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("{i}.csv"));
            let o = casimir(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs[0].clone()).unwrap();
    assert_eq!(text.lines().count(), 1 + 14);
    assert!(text.starts_with("L,T,pressure,err,method\n"));
}

#[test]
fn json_output_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", DRUDE);
    let o = casimir(&["scan", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let curve = read_curve(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    let config = ScanConfig::from_toml(DRUDE).unwrap();
    let prov = curve.provenance.unwrap();
    assert_eq!(prov.config_hash, config.hash());
    assert_eq!(prov.version, casimir_cli::VERSION);
    assert_eq!(curve.config, Some(config));
    assert_eq!(curve.rows.len(), 14);
}

#[test]
fn exit_status_separates_config_and_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    assert_eq!(casimir(&["scan", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let bad = write(dir.path(), "bad.toml", &DRUDE.replace("damping = 0.05 } }\nmirror2", "damping = -1.0 } }\nmirror2"));
    assert_eq!(casimir(&["scan", "--config", bad.to_str().unwrap()]).status.code(), Some(2));

    let starved = write(
        dir.path(),
        "starved.toml",
        &format!("{DRUDE}quadrature = {{ max_subdivisions = 1, relative_tolerance = 1e-10 }}\n"),
    );
    let o = casimir(&["scan", "--config", starved.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    // failed points still appear in the table
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 15);
    assert!(text.contains("NaN"));
}

/// Rewrites a config in units of `Ω' = sΩ`: frequencies and temperatures
/// shrink by `s`, distances in `Λ' = Λ/s` grow by `s`.
fn rescaled(s: f64) -> String {
    format!(
        r#"
distances = {{ values = [{}, {}, {}] }}
temperatures = [0.0, {}]
[mirror1.epsilon]
kind = "drude_epsilon"
plasma_frequency = {}
damping = {}
[mirror2.epsilon]
kind = "drude_lorentz_direct"
oscillators = [{{ strength = 0.1, resonance = {}, damping = {} }}]
[mirror2.mu]
kind = "metamaterial_mu_kk"
oscillator_strength = 0.5
resonance = {}
magnetic_damping = {}
"#,
        0.05 * s,
        0.5 * s,
        5.0 * s,
        0.1 / s,
        1.0 / s,
        0.01 / s,
        1.0 / s,
        0.01 / s,
        1.0 / s,
        0.001 / s
    )
}

#[test]
fn dimensionless_table_is_invariant_under_unit_change() {
    let run = |s: f64| scan(&ScanConfig::from_toml(&rescaled(s)).unwrap().resolve().unwrap()).unwrap().rows;
    let base = run(1.0);
    for s in [0.25, 4.0] {
        let other = run(s);
        assert_eq!(base.len(), other.len());
        for (a, b) in base.iter().zip(&other) {
            let (pa, pb) = (a.pressure.unwrap(), b.pressure.unwrap());
            let allowed = a.err.unwrap() + b.err.unwrap() + 1e-9 * pa.abs();
            assert!((pa - pb).abs() <= allowed, "s={s} L={} T={}: {pa} vs {pb}", a.l, a.t);
        }
    }
}

#[test]
fn window_command_reads_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "mixed.toml",
        &std::fs::read_to_string(shipped("mixed_pair.toml"))
            .unwrap()
            .replace("points = 61", "points = 21")
            .replace("temperatures = [0.0, 0.03, 0.1, 0.3]", "temperatures = [0.03, 0.3]"),
    );
    for format in ["csv", "json"] {
        let out = dir.path().join(format!("curve.{format}"));
        let o = casimir(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", format]);
        assert!(o.status.success());
        let w = casimir(&["window", "--in", out.to_str().unwrap(), "--json"]);
        assert!(w.status.success(), "{}", String::from_utf8_lossy(&w.stderr));
        let windows: Vec<serde_json::Value> = serde_json::from_slice(&w.stdout).unwrap();
        assert_eq!(windows.len(), 1, "{windows:?}");
        assert_eq!(windows[0]["T"], 0.03);
        assert_eq!(windows[0]["refined"], format == "json");
        let stderr = String::from_utf8_lossy(&w.stderr);
        assert_eq!(stderr.contains("interpolated"), format == "csv");
    }
}

#[test]
fn modes_command_lists_the_spectrum() {
    let o = casimir(&[
        "modes",
        "--config",
        shipped("lossless_drude.toml").to_str().unwrap(),
        "--k",
        "2",
        "--distance",
        "0.1",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("pol,n,re,im"));
    let tm = lines.filter(|l| l.starts_with("TM,")).count();
    assert!(tm >= 2, "{text}");

    let bad = casimir(&["modes", "--config", shipped("lossless_drude.toml").to_str().unwrap(), "--k", "-1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn shipped_cross_check_config_passes() {
    let spec = ScanConfig::load(&shipped("lossless_drude.toml")).unwrap().resolve().unwrap();
    assert!(scan(&spec).is_ok());
}
