//! End-to-end checks of the command-line tool and the JSON/CSV formats.

use std::process::Command;

use last_sphere::harness::{DecoderKind, ExperimentConfig, RateMode, TimeoutPolicy};
use last_sphere::lattice::{build_nested_code, CodeRecord, NestedLastCode};

fn lastsd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lastsd"))
}

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        antennas: 1,
        receive: 2,
        blocklength: 2,
        rate_mode: RateMode::FixedRate { rate_bpcu: 2.0 },
        snr_grid_db: vec![10.0, 20.0],
        trials_per_point: 25,
        seed: 99,
        decoder: DecoderKind::Sphere,
        zeta: 1.0,
        timeout_policy: TimeoutPolicy::Fixed { limit: 10_000 },
        sequential_bias: 1.0,
        noiseless: false,
    }
}

fn is_17_digit_float(s: &str) -> bool {
    let (mantissa, exp) = match s.split_once('e') {
        Some(p) => p,
        None => return false,
    };
    let digits = mantissa.trim_start_matches('-').replace('.', "");
    digits.len() == 17 && digits.chars().all(|c| c.is_ascii_digit()) && exp.parse::<i32>().is_ok()
}

#[test]
fn sweep_writes_results_and_tail_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let out = dir.path().join("results.csv");
    let tail = dir.path().join("tail.csv");
    std::fs::write(&cfg_path, small_config().to_json().unwrap()).unwrap();
    let status = lastsd()
        .args(["sweep", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .arg("--tail")
        .arg(&tail)
        .status()
        .unwrap();
    assert!(status.success());

    let mut reader = csv::Reader::from_path(&out).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(
        headers,
        ["snr_db", "decoder", "trials", "avg_C", "err_rate", "outage_rate", "timeout_rate"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(&row[1], "sphere");
        assert_eq!(&row[2], "25");
        for col in [0, 3, 4, 5, 6] {
            assert!(is_17_digit_float(&row[col]), "{}", &row[col]);
        }
        let avg: f64 = row[3].parse().unwrap();
        assert!(avg >= 4.0);
    }
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 10.0);

    let mut reader = csv::Reader::from_path(&tail).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["snr_db", "L", "prob"]);
    let probs: Vec<(f64, f64, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap())
        })
        .collect();
    assert!(!probs.is_empty());
    // The grid starts at m = 4. A search that completes a path visits at
    // least m nodes; only an empty sphere can stop earlier, and that counts
    // as a decoding error.
    for row in &rows {
        let snr: f64 = row[0].parse().unwrap();
        let err: f64 = row[4].parse().unwrap();
        let first = probs.iter().find(|p| p.0 == snr).unwrap();
        assert_eq!(first.1, 4.0);
        assert!(1.0 - first.2 <= err + 1e-12, "snr {snr}: P(C<4)={} > err {err}", 1.0 - first.2);
    }
}

#[test]
fn sweep_rejects_invalid_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let mut cfg = small_config();
    cfg.snr_grid_db = vec![20.0, 10.0];
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let output = lastsd()
        .args(["sweep", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path().join("r.csv"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("strictly increasing"));
}

#[test]
fn analyze_prints_exponent_table() {
    let output = lastsd()
        .args(["analyze", "--system", "2,2,3", "--system", "3,3,5", "--snr-db", "20,30"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["M", "N", "T", "r", "d_out", "l_r", "r0", "L_out@20dB", "L_out@30dB"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3 + 4);
    let first = &rows[0];
    assert_eq!((&first[0], &first[3], &first[6]), ("2", "0", "0"));
    assert_eq!(first[5].parse::<f64>().unwrap(), -4.0);
    assert_eq!(rows[3][6].parse::<u32>().unwrap(), 1);
}

#[test]
fn validate_reports_passes() {
    let output = lastsd().args(["validate", "--instances", "20"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn config_json_uses_documented_field_names() {
    let value: serde_json::Value = serde_json::from_str(&small_config().to_json().unwrap()).unwrap();
    for key in [
        "M", "N", "T", "rate_mode", "snr_grid_db", "trials_per_point", "seed", "decoder", "zeta",
        "timeout_policy", "sequential_bias",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    assert_eq!(value["decoder"], "sphere");
    assert_eq!(value["timeout_policy"]["kind"], "fixed");
}

#[test]
fn code_json_round_trips_bit_identically() {
    let code = build_nested_code(2, 3, 4.0, 100.0, 5).unwrap();
    let json = code.to_json().unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["M", "T", "R", "rho", "p", "k", "kappa", "phi", "P", "u0", "seed"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    let back = NestedLastCode::from_json(&json).unwrap();
    assert_eq!(back.to_record(), code.to_record());
    let record: CodeRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(record.parity.len(), (12 - record.k) * record.k);
    let msg = vec![1u64; code.message_dim()];
    assert_eq!(back.encode(&msg).unwrap(), code.encode(&msg).unwrap());
}
