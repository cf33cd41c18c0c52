//! Tests through the installed binary: output files, exit codes, and
//! cross-process reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spincomb"))
}

fn desk_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk.json")
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Small fast two-spin setup mirroring the library's test geometry.
fn tiny_config_text(sigma: f64, n_transients: usize, dt_s: Option<f64>) -> String {
    let dt = match dt_s {
        Some(v) => format!(r#", "dt_s": {v}"#),
        None => String::new(),
    };
    format!(
        r#"{{
            "cluster": {{
                "n_spins": 2,
                "offsets_hz": [80.0, 160.0],
                "couplings_hz": [[0.0, 0.0], [0.0, 0.0]]
            }},
            "band": {{ "f_start_hz": 80.0, "delta_f_hz": 80.0, "n_bits": 2 }},
            "pulses": {{
                "write_amplitude_hz": 4.0,
                "write_duration_ms": 25.0,
                "erase_amplitude_hz": 8.0,
                "erase_duration_ms": 12.5
            }},
            "acquisition": {{ "n_samples": 512, "dwell_s": 0.001953125 }},
            "noise": {{ "sigma": {sigma} }},
            "n_transients": {n_transients},
            "seed": 7,
            "propagation": {{ "method": "trotter2"{dt} }}
        }}"#
    )
}

#[test]
fn not_run_writes_all_output_files_with_expected_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.json");
    std::fs::write(&config, tiny_config_text(0.0, 1, None)).unwrap();
    let out_dir = dir.path().join("run");

    let out = run_ok(bin()
        .args(["not", "--config"])
        .arg(&config)
        .args(["--value", "2", "--out"])
        .arg(&out_dir));

    // stdout carries the summary; NOT of 2 on two bits is 1
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["operation"], "not");
    assert_eq!(summary["value_decimal"], "1");
    assert_eq!(summary["bits_lsb_first"], serde_json::json!([1, 0]));
    assert!(summary["config_sha256"].as_str().unwrap().len() == 64);

    let fid = std::fs::read_to_string(out_dir.join("fid.csv")).unwrap();
    assert!(fid.starts_with("t_s,re,im\n"));
    assert_eq!(fid.lines().count(), 513);

    let spectrum = std::fs::read_to_string(out_dir.join("spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("freq_hz,magnitude\n"));
    assert_eq!(spectrum.lines().count(), 512 * 4 + 1);

    let decoded: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("decoded.json")).unwrap())
            .unwrap();
    assert_eq!(decoded["value_decimal"], "1");

    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("result.json")).unwrap())
            .unwrap();
    assert_eq!(result["input_value_decimal"], "2");
    assert!(result.get("fid").is_none());

    // timing goes to stderr, never stdout
    assert!(String::from_utf8_lossy(&out.stderr).contains("elapsed:"));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("elapsed:"));
}

#[test]
fn repeated_desk_runs_are_byte_identical_across_processes() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        run_ok(bin()
            .args(["not", "--config"])
            .arg(desk_config())
            .args(["--value", "178", "--out"])
            .arg(out));
    }
    for name in ["fid.csv", "spectrum.csv", "decoded.json", "result.json"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    let decoded: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("decoded.json")).unwrap())
            .unwrap();
    assert_eq!(decoded["value_decimal"], "77");
}

#[test]
fn encode_roundtrips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.json");
    std::fs::write(&config, tiny_config_text(0.2, 4, None)).unwrap();
    let out = run_ok(bin()
        .args(["encode", "--config"])
        .arg(&config)
        .args(["--value", "3"]));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["value_decimal"], "3");
}

#[test]
fn seed_override_changes_the_config_hash_and_the_noise() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.json");
    std::fs::write(&config, tiny_config_text(0.5, 2, None)).unwrap();
    let run = |seed: &str| {
        let out = run_ok(bin()
            .args(["encode", "--config"])
            .arg(&config)
            .args(["--value", "1", "--seed", seed]));
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()
    };
    let a = run("1");
    let b = run("2");
    let a_again = run("1");
    assert_ne!(a["config_sha256"], b["config_sha256"]);
    assert_eq!(a["config_sha256"], a_again["config_sha256"]);
    assert_ne!(a["slot_amplitudes"], b["slot_amplitudes"]);
    assert_eq!(a["slot_amplitudes"], a_again["slot_amplitudes"]);
}

#[test]
fn transitions_and_classify_report_cluster_structure() {
    let dir = tempfile::tempdir().unwrap();
    let cluster = dir.path().join("cluster.json");
    std::fs::write(
        &cluster,
        r#"{
            "n_spins": 2,
            "offsets_hz": [80.0, 160.0],
            "couplings_hz": [[0.0, 0.0], [0.0, 0.0]]
        }"#,
    )
    .unwrap();

    let csv = run_ok(bin()
        .args(["transitions", "--cluster"])
        .arg(&cluster)
        .args(["--format", "csv"]));
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("upper,lower,frequency_hz,signed_frequency_hz,weight\n"));
    assert_eq!(text.lines().count(), 5, "two uncoupled spins give four lines");

    let json = run_ok(bin()
        .args(["transitions", "--cluster"])
        .arg(&cluster)
        .args(["--format", "json"]));
    let table: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(table["n_spins"], 2);
    assert_eq!(table["lines"].as_array().unwrap().len(), 4);

    let classify = run_ok(bin()
        .args(["classify", "--cluster"])
        .arg(&cluster)
        .args(["--drive-hz", "0.01"]));
    let report: serde_json::Value = serde_json::from_slice(&classify.stdout).unwrap();
    assert_eq!(report["regime"], "single");
    assert_eq!(report["n_spins"], 2);
}

#[test]
fn cluster_commands_accept_a_full_run_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.json");
    std::fs::write(&config, tiny_config_text(0.0, 1, None)).unwrap();

    let csv = run_ok(bin()
        .args(["transitions", "--cluster"])
        .arg(&config)
        .args(["--format", "csv"]));
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("upper,lower,frequency_hz,signed_frequency_hz,weight\n"));
    assert_eq!(text.lines().count(), 5, "cluster field of the config is used");

    let classify = run_ok(bin()
        .args(["classify", "--cluster"])
        .arg(&config)
        .args(["--drive-hz", "0.01"]));
    let report: serde_json::Value = serde_json::from_slice(&classify.stdout).unwrap();
    assert_eq!(report["regime"], "single");
}

#[test]
fn sweep_emits_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.json");
    std::fs::write(&config, tiny_config_text(0.0, 1, None)).unwrap();
    let out = run_ok(bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .args([
            "--from-hz", "0.01", "--to-hz", "100.0", "--points", "4", "--log",
            "--duration-ms", "10.0", "--format", "csv",
        ]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("drive_hz,regime,peak_frequency_hz,peak_magnitude\n"));
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().nth(1).unwrap().starts_with("0.01,"));
    assert!(text.lines().nth(4).unwrap().starts_with("100,"));
}

#[test]
fn missing_config_exits_with_the_usage_code() {
    let out = bin()
        .args(["calibrate", "--config", "/nonexistent/nowhere.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_of_range_value_exits_with_the_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.json");
    std::fs::write(&config, tiny_config_text(0.0, 1, None)).unwrap();
    let out = bin()
        .args(["encode", "--config"])
        .arg(&config)
        .args(["--value", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "2-bit band cannot hold 4");
}

#[test]
fn drowned_references_exit_with_the_calibration_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("noisy.json");
    std::fs::write(&config, tiny_config_text(500.0, 1, None)).unwrap();
    let out = bin()
        .args(["calibrate", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("calibration"));
}

#[test]
fn coarse_time_step_exits_with_the_stability_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("coarse.json");
    std::fs::write(&config, tiny_config_text(0.0, 1, Some(0.01))).unwrap();
    let out = bin()
        .args(["calibrate", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stability"));
}
