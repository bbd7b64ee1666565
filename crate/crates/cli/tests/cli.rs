use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_np-elastic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV artifact, without `#` header lines and the column row.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn json_lines(path: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spectrum_t_rows_and_m_limit() {
    let o = run(&["spectrum", "--family", "T", "--n-max", "3"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let values: Vec<f64> = rows.iter().map(|r| num(&r[2])).collect();
    assert_eq!(rows.len(), 3);
    for (v, e) in values.iter().zip([0.5, 0.3, 3.0 / 14.0]) {
        assert!((v - e).abs() < 1e-15);
    }
    let o = run(&["spectrum", "--family", "M"]);
    for r in csv_rows(&stdout(&o)) {
        assert!((num(&r[4]) + 1.0 / 6.0).abs() < 1e-15);
    }
}

#[test]
fn spectrum_rows_are_ordered_by_family_then_degree() {
    let o = run(&["spectrum", "--n-max", "2"]);
    let keys: Vec<(String, String)> = csv_rows(&stdout(&o)).into_iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    let expect: Vec<(String, String)> =
        [("T", "1"), ("T", "2"), ("M", "1"), ("M", "2"), ("N", "1"), ("N", "2")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    assert_eq!(keys, expect);
}

#[test]
fn empty_degree_range_is_header_only() {
    let o = run(&["spectrum", "--n-min", "4", "--n-max", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(csv_rows(&text).is_empty());
    assert!(text.lines().any(|l| l == "family,n,eigenvalue_re,eigenvalue_im,limit_value"));
}

#[test]
fn validate_np_and_lame_pass() {
    let dir = TempDir::new().unwrap();
    for suite in ["np", "lame"] {
        let out = dir.path().join(format!("{suite}.jsonl"));
        let o = run(&["validate", "--suite", suite, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let lines = json_lines(&out);
        assert!(lines[0].get("config").is_some());
        let records = &lines[1..lines.len() - 1];
        assert!(!records.is_empty());
        assert!(records.iter().all(|r| r["pass"] == true && r["rel_error"].as_f64().unwrap() <= 1e-6));
        assert_eq!(lines.last().unwrap()["summary"]["failed"], 0);
    }
}

#[test]
fn injected_fault_fails_validation() {
    let o = run(&["validate", "--suite", "np", "--n-max", "2", "--inject-fault", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn energy_suite_reports_band_constants() {
    let o = run(&["validate", "--suite", "energy", "--n-max", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let bands: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|v| v["operation"] == "denominator_band_ratio")
        .collect();
    assert_eq!(bands.len(), 4);
    for b in bands {
        assert!(b["params"]["lower"].as_f64().unwrap() > 0.0);
        assert!(b["params"]["upper"].as_f64().unwrap() >= b["params"]["lower"].as_f64().unwrap());
    }
}

#[test]
fn calr_verdicts_and_csv_mirror() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("inside.jsonl");
    let o = run(&["calr", "--rs", "2.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let lines = json_lines(&out);
    assert_eq!(lines.last().unwrap()["summary"]["verdict"], "resonant");
    let energies: Vec<f64> = lines[1..lines.len() - 1].iter().map(|r| r["energy_modal"].as_f64().unwrap()).collect();
    assert_eq!(energies.len(), 6);
    assert!(energies.windows(2).all(|w| w[1] > w[0]));
    let csv = std::fs::read_to_string(dir.path().join("inside.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "delta,n0,energy,farfield_sample"));
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 6);
    assert!((num(&rows[5][2]) - energies[5]).abs() <= 1e-15 * energies[5]);

    let out = dir.path().join("outside.jsonl");
    run(&["calr", "--rs", "3.5", "--out", out.to_str().unwrap()]);
    assert_eq!(json_lines(&out).last().unwrap()["summary"]["verdict"], "bounded");
}

#[test]
fn single_loss_is_an_insufficient_grid() {
    let o = run(&["calr", "--delta-grid", "0.01"]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2]["summary"]["verdict"], "insufficient-grid");
}

#[test]
fn artifacts_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("a.jsonl");
    let args = ["calr", "--rs", "2.7", "--delta-grid", "1e-1,1e-3,1e-5", "--out", out.to_str().unwrap()];
    run(&args);
    let first = (std::fs::read(&out).unwrap(), std::fs::read(dir.path().join("a.csv")).unwrap());
    run(&args);
    let second = (std::fs::read(&out).unwrap(), std::fs::read(dir.path().join("a.csv")).unwrap());
    assert_eq!(first, second);
}

#[test]
fn flags_override_config_file_and_are_echoed() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# test run\nlambda = 2\nmu = 5\nn-max = 2\n").unwrap();
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--mu", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "# lambda = 2.0000000000000000e0"));
    assert!(text.lines().any(|l| l == "# mu = 1.0000000000000000e0"));
    assert!(text.lines().any(|l| l == "# n_max = 2"));
    // λ = 2, μ = 1: M_1 = (6 + 6)/(2·4·3) = 1/2.
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 6);
    assert!((num(&rows[2][2]) - 0.5).abs() < 1e-15);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "colour = red\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["calr", "--delta-grid", "1e-3,1e-2"],
        vec!["validate", "--suite", "bogus"],
        vec!["validate"],
        vec!["spectrum", "--mu", "-1"],
        vec!["calr", "--ri", "3", "--re", "2"],
        vec!["spectrum", "--config", cfg.to_str().unwrap()],
        vec!["spectrum", "--config", "/nonexistent/run.cfg"],
        vec!["spectrum", "--no-such-flag"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

fn field_rows(args: &[&str]) -> Vec<(f64, f64)> {
    let o = run(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    csv_rows(&stdout(&o))
        .into_iter()
        .map(|r| {
            let x = [num(&r[2]), num(&r[3]), num(&r[4])];
            ((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt(), num(&r[6]))
        })
        .collect()
}

#[test]
fn zero_source_field_vanishes() {
    let rows = field_rows(&["field", "--kappa", "0", "--resolution", "9"]);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|&(_, u)| u == 0.0));
}

#[test]
fn resolution_one_is_a_single_sample() {
    let rows = field_rows(&["field", "--resolution", "1", "--offset", "0.5"]);
    assert_eq!(rows.len(), 1);
    assert!((rows[0].0 - 0.5).abs() < 1e-15);
}

#[test]
fn resonant_field_is_localised() {
    // r_e²/r_i = 4 for the default geometry.
    let rows = field_rows(&["field", "--delta-grid", "1e-5", "--resolution", "31"]);
    let inside = rows.iter().filter(|r| r.0 < 4.0).map(|r| r.1).fold(0.0, f64::max);
    let beyond = rows.iter().filter(|r| r.0 > 4.0).map(|r| r.1).fold(0.0, f64::max);
    assert!(beyond > 0.0 && inside > 10.0 * beyond, "{inside} vs {beyond}");
}

#[test]
fn guard_band_skips_interface_points() {
    let rows = field_rows(&["field", "--resolution", "41", "--extent", "2.5", "--guard", "0.1"]);
    assert!(rows.iter().all(|&(r, _)| (r - 1.0).abs() >= 0.1 && (r - 2.0).abs() >= 0.1));
}
