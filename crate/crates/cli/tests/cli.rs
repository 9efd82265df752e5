use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn memfir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memfir"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn design_writes_seventeen_taps() {
    let dir = tempfile::tempdir().unwrap();
    let out = memfir(&[
        "design",
        "--family",
        "lowpass",
        "--fs",
        "400e3",
        "--fc",
        "20e3",
        "--order",
        "16",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("coefficients.txt")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 17);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("symmetry: symmetric"));
    assert!(stdout.contains("dc gain: 1"));
}

#[test]
fn design_rejects_bad_specs() {
    let out = memfir(&[
        "design", "--family", "lowpass", "--fs", "400e3", "--fc", "20e3", "--order", "0",
    ]);
    assert_eq!(code(&out), 2);
    let out = memfir(&[
        "design", "--family", "lowpass", "--fs", "400e3", "--fc", "300e3", "--order", "8",
    ]);
    assert_eq!(code(&out), 2);
    let out = memfir(&[
        "design", "--family", "highpass", "--fs", "500e3", "--fc", "10e3", "--order", "11",
    ]);
    assert_ne!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--coeff-file"));
}

#[test]
fn synth_both_methods_reports_separation() {
    let dir = tempfile::tempdir().unwrap();
    let out = memfir(&[
        "synth",
        "--coeff-file",
        path(&fixture("lowpass16_targets.txt")),
        "--bits",
        "7",
        "--method",
        "both",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("error_report.json"));
    let summaries = report["summaries"].as_array().unwrap();
    assert_eq!(summaries.len(), 2);
    let max = |m: &str| {
        summaries.iter().find(|s| s["method"] == m).unwrap()["max_error_pct"]
            .as_f64()
            .unwrap()
    };
    assert!(max("advanced") < 1.0);
    assert!(max("simple") > max("advanced"));
    let csv = std::fs::read_to_string(dir.path().join("error_report.csv")).unwrap();
    assert!(csv.starts_with("tap,method,bits,target,realized,error_pct\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 17);
}

#[test]
fn synth_highpass_three_resolutions() {
    let dir = tempfile::tempdir().unwrap();
    let out = memfir(&[
        "synth",
        "--coeff-file",
        path(&fixture("highpass11_targets.txt")),
        "--bits",
        "6,7,8",
        "--method",
        "advanced",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    for bits in [6, 7, 8] {
        let doc = read_json(&dir.path().join(format!("synth_advanced_{bits}bit.json")));
        let taps = doc["taps"].as_array().unwrap();
        assert_eq!(taps.len(), 12);
        assert!(taps.iter().all(|t| t["error_pct"].as_f64().unwrap() < 1.0));
        assert!(dir
            .path()
            .join(format!("synth_advanced_{bits}bit.csv"))
            .exists());
    }
}

#[test]
fn synth_usage_and_infeasible_exit_codes() {
    let coeffs = fixture("highpass11_targets.txt");
    assert_eq!(
        code(&memfir(&[
            "synth",
            "--coeff-file",
            path(&coeffs),
            "--bits",
            "0"
        ])),
        2
    );
    assert_eq!(
        code(&memfir(&[
            "synth",
            "--coeff-file",
            "/nonexistent/coeffs.txt"
        ])),
        1
    );
    let dir = tempfile::tempdir().unwrap();
    let out = memfir(&[
        "synth",
        "--coeff-file",
        path(&coeffs),
        "--method",
        "simple",
        "--rf-ohms",
        "100",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn serial_and_parallel_json_are_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let coeffs = fixture("lowpass16_targets.txt");
    for (dir, extra) in [(&a, "--serial"), (&b, "--seedless")] {
        let out = memfir(&[
            "synth",
            "--coeff-file",
            path(&coeffs),
            "--method",
            "advanced",
            "--bits",
            "6,7,8",
            extra,
            "--out-dir",
            path(dir.path()),
        ]);
        assert_eq!(code(&out), 0);
    }
    for bits in [6, 7, 8] {
        let name = format!("synth_advanced_{bits}bit.json");
        assert_eq!(
            std::fs::read(a.path().join(&name)).unwrap(),
            std::fs::read(b.path().join(&name)).unwrap()
        );
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"bits": [6, 8], "method": "simple"}"#).unwrap();
    let out = memfir(&[
        "synth",
        "--config",
        path(&cfg),
        "--method",
        "advanced",
        "--coeff-file",
        path(&fixture("lowpass16_targets.txt")),
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("synth_advanced_6bit.json").exists());
    assert!(dir.path().join("synth_advanced_8bit.json").exists());
    assert!(!dir.path().join("synth_simple_6bit.json").exists());

    std::fs::write(&cfg, r#"{"bitz": [6]}"#).unwrap();
    let out = memfir(&[
        "synth",
        "--config",
        path(&cfg),
        "--coeff-file",
        path(&fixture("lowpass16_targets.txt")),
    ]);
    assert_eq!(code(&out), 2);
}

fn synth_fixture(dir: &Path, coeffs: &str) -> PathBuf {
    let out = memfir(&[
        "synth",
        "--coeff-file",
        path(&fixture(coeffs)),
        "--out-dir",
        path(dir),
    ]);
    assert_eq!(code(&out), 0);
    dir.join("synth_advanced_7bit.json")
}

#[test]
fn simulate_lowpass_tracks_response() {
    let dir = tempfile::tempdir().unwrap();
    let result = synth_fixture(dir.path(), "lowpass16_targets.txt");
    let out = memfir(&[
        "simulate",
        "--result",
        path(&result),
        "--tones",
        path(&fixture("tones_5k_60k.json")),
        "--fs",
        "400e3",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_json(&dir.path().join("measurement.json"));
    for c in m["components"].as_array().unwrap() {
        let measured = c["measured_gain"].as_f64().unwrap();
        let expected = c["expected_gain"].as_f64().unwrap();
        assert!((measured / expected - 1.0).abs() < 1e-9);
    }
    assert_eq!(m["drift"]["max_relative_change"].as_f64().unwrap(), 0.0);
    for name in ["input.csv", "input.json", "output.csv", "output.json"] {
        assert!(dir.path().join(name).exists());
    }
}

#[test]
fn simulate_dead_zone_exit_code_and_auto_scale() {
    let dir = tempfile::tempdir().unwrap();
    let result = synth_fixture(dir.path(), "lowpass16_targets.txt");
    let tones = fixture("tones_5k_60k.json");
    let args = [
        "simulate",
        "--result",
        path(&result),
        "--tones",
        path(&tones),
        "--fs",
        "400e3",
        "--out-dir",
        path(dir.path()),
    ];
    let mut violating = args.to_vec();
    violating.extend(["--scale-a", "1"]);
    let out = memfir(&violating);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("a ≤"));
    let mut auto = args.to_vec();
    auto.extend(["--scale-a", "auto"]);
    assert_eq!(code(&memfir(&auto)), 0);
    let m = read_json(&dir.path().join("measurement.json"));
    assert!(m["peak_device_v"].as_f64().unwrap() <= 0.1);
}

#[test]
fn simulate_zero_input_gives_zero_output() {
    let dir = tempfile::tempdir().unwrap();
    let result = synth_fixture(dir.path(), "highpass11_targets.txt");
    let tones = dir.path().join("silent.json");
    std::fs::write(
        &tones,
        r#"{"components": [{"amp_v": 0.0, "freq_hz": 2000.0}]}"#,
    )
    .unwrap();
    let out = memfir(&[
        "simulate",
        "--result",
        path(&result),
        "--tones",
        path(&tones),
        "--fs",
        "500e3",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("output.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0")));
    let m = read_json(&dir.path().join("measurement.json"));
    assert_eq!(m["drift"]["max_relative_change"].as_f64().unwrap(), 0.0);
}

#[test]
fn response_targets_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = memfir(&[
        "response",
        "--coeff-file",
        path(&fixture("lowpass16_targets.txt")),
        "--fs",
        "400e3",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("response_ideal.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("f_hz,magnitude,magnitude_db,phase_rad"));
    assert!(lines.next().unwrap().starts_with("0,1,"));
    assert!(!dir.path().join("deviation.json").exists());
}

#[test]
fn response_with_both_methods_orders_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let out = memfir(&[
        "response",
        "--coeff-file",
        path(&fixture("lowpass16_targets.txt")),
        "--fs",
        "400e3",
        "--passband",
        "0,20e3",
        "--method",
        "both",
        "--bits",
        "7",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dev = read_json(&dir.path().join("deviation.json"));
    let band = |label: &str| {
        dev.as_array()
            .unwrap()
            .iter()
            .find(|d| d["label"] == label)
            .unwrap()["passband_max_db"]
            .as_f64()
            .unwrap()
    };
    assert!(band("advanced_7bit") <= band("simple_7bit"));
    assert!(band("advanced_7bit") < 0.1);
}

#[test]
fn response_rejects_result_for_other_targets() {
    let dir = tempfile::tempdir().unwrap();
    let result = synth_fixture(dir.path(), "highpass11_targets.txt");
    let out = memfir(&[
        "response",
        "--coeff-file",
        path(&fixture("lowpass16_targets.txt")),
        "--fs",
        "400e3",
        "--result",
        path(&result),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn delay_taps_are_shifted_copies() {
    let dir = tempfile::tempdir().unwrap();
    let out = memfir(&[
        "simulate",
        "--tones",
        path(&fixture("tones_2k.json")),
        "--fs",
        "400e3",
        "--duration",
        "1e-3",
        "--delay-taps",
        "5",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("delay_taps.csv")).unwrap();
    let rows: Vec<Vec<String>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 400);
    for n in 0..rows.len() {
        for k in 1..5 {
            let expected = if n >= k {
                rows[n - k][1].clone()
            } else {
                "0".to_string()
            };
            assert_eq!(rows[n][1 + k], expected);
        }
    }
    assert_eq!(
        code(&memfir(&[
            "simulate",
            "--tones",
            path(&fixture("tones_2k.json")),
            "--fs",
            "400e3"
        ])),
        2
    );
}
