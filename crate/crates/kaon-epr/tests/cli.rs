//! End-to-end checks of the command-line binary: CSV schemas, exit codes
//! and cross-mode agreement.

use std::path::PathBuf;
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kaon-epr"))
}

fn temp_path(stem: &str, ext: &str) -> PathBuf {
    std::env::temp_dir().join(format!("kaon_epr_cli_{stem}_{}.{ext}", std::process::id()))
}

fn write_params(stem: &str, delta_l_epsilon: f64, lambda: f64) -> PathBuf {
    let path = temp_path(stem, "json");
    std::fs::write(
        &path,
        format!(
            r#"{{"gamma_s": 1.0, "gamma_l": 0.0017502, "m_s": 0.0, "m_l": 0.4736,
                "epsilon_re": {delta_l_epsilon}, "epsilon_im": 0.0, "lambda": {lambda}}}"#
        ),
    )
    .unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().unwrap()
}

struct Row<'a> {
    fields: Vec<&'a str>,
}

fn parse_csv<'a>(text: &'a str, expected_header: &str) -> Vec<Row<'a>> {
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), expected_header);
    lines
        .map(|line| Row {
            fields: line.split(',').collect(),
        })
        .collect()
}

#[test]
fn correlate_single_point_row_is_exact() {
    let params = write_params("exact", 0.0, 0.0);
    let out_path = temp_path("exact", "csv");
    let output = binary()
        .args(["correlate", "--params"])
        .arg(&params)
        .args(["--ta-range", "0:0:1", "--tb-range", "0:0:1", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows = parse_csv(
        &text,
        "t_a,t_b,tau_a,tau_b,mode,observable,value,analytic,abs_diff",
    );
    assert_eq!(rows.len(), 1);
    assert_eq!(
        rows[0].fields,
        vec![
            "0",
            "0",
            "0",
            "0",
            "distinguishable",
            "S@p S@q",
            "-1",
            "-1",
            "0"
        ]
    );
    let _ = std::fs::remove_file(&params);
    let _ = std::fs::remove_file(&out_path);
}

#[test]
fn correlate_modes_agree_on_the_same_grid() {
    let params = write_params("modes", 0.025015644561821038, 0.05);
    let mut csv = Vec::new();
    for mode in ["distinguishable", "identical"] {
        let out_path = temp_path(&format!("modes_{mode}"), "csv");
        let output = binary()
            .args(["correlate", "--params"])
            .arg(&params)
            .args([
                "--observables",
                "D+@p D+@q",
                "--mode",
                mode,
                "--ta-range",
                "0:5:6",
                "--tb-range",
                "0:5:6",
                "--p-mom",
                "0.3",
                "--q-mom",
                "0.5",
                "--out",
            ])
            .arg(&out_path)
            .output()
            .unwrap();
        assert!(
            output.status.success(),
            "{}",
            String::from_utf8_lossy(&output.stderr)
        );
        csv.push(std::fs::read_to_string(&out_path).unwrap());
        let _ = std::fs::remove_file(&out_path);
    }
    let header = "t_a,t_b,tau_a,tau_b,mode,observable,value,analytic,abs_diff";
    let dist = parse_csv(&csv[0], header);
    let ident = parse_csv(&csv[1], header);
    assert_eq!(dist.len(), 36);
    assert_eq!(ident.len(), 36);
    for (a, b) in dist.iter().zip(&ident) {
        assert_eq!(a.fields[0], b.fields[0]);
        assert_eq!(a.fields[1], b.fields[1]);
        assert_eq!(a.fields[4], "distinguishable");
        assert_eq!(b.fields[4], "identical");
        let value_a: f64 = a.fields[6].parse().unwrap();
        let value_b: f64 = b.fields[6].parse().unwrap();
        assert!((value_a - value_b).abs() < 1e-10, "{value_a} vs {value_b}");
        // each mode also matches the closed form to the sweep tolerance
        let deviation: f64 = a.fields[8].parse().unwrap();
        assert!(deviation < 1e-9);
    }
    let _ = std::fs::remove_file(&params);
}

#[test]
fn probabilities_csv_has_four_consistent_rows_per_point() {
    let params = write_params("probs", 0.025015644561821038, 0.02);
    let out_path = temp_path("probs", "csv");
    let output = binary()
        .args(["probabilities", "--params"])
        .arg(&params)
        .args(["--ta-range", "0:4:3", "--tb-range", "0:4:3", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows = parse_csv(&text, "t_a,t_b,pair,pipeline,analytic,abs_diff");
    // 3x3 grid, 4 flavor pairs per point; includes points with t_b < t_a
    assert_eq!(rows.len(), 36);
    for chunk in rows.chunks(4) {
        let labels: Vec<&str> = chunk.iter().map(|r| r.fields[2]).collect();
        assert_eq!(labels, vec!["K0-K0", "K0-K0bar", "K0bar-K0", "K0bar-K0bar"]);
        // the two mixed-flavor rows carry identical probabilities
        let mixed_a: f64 = chunk[1].fields[3].parse().unwrap();
        let mixed_b: f64 = chunk[2].fields[3].parse().unwrap();
        assert!((mixed_a - mixed_b).abs() < 1e-12);
        for row in chunk {
            let deviation: f64 = row.fields[5].parse().unwrap();
            assert!(deviation <= 1e-9, "row {:?}", row.fields);
        }
    }
    let _ = std::fs::remove_file(&params);
    let _ = std::fs::remove_file(&out_path);
}

#[test]
fn probabilities_vanish_at_equal_times_without_cp() {
    let params = write_params("epr", 0.0, 0.0);
    let out_path = temp_path("epr", "csv");
    let output = binary()
        .args(["probabilities", "--params"])
        .arg(&params)
        .args([
            "--ta-range",
            "1.5:1.5:1",
            "--tb-range",
            "1.5:1.5:1",
            "--out",
        ])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows = parse_csv(&text, "t_a,t_b,pair,pipeline,analytic,abs_diff");
    let same_flavor: f64 = rows[0].fields[3].parse().unwrap();
    assert!(
        same_flavor.abs() <= 1e-12,
        "p(K0,K0) at equal times = {same_flavor}"
    );
    let _ = std::fs::remove_file(&params);
    let _ = std::fs::remove_file(&out_path);
}

#[test]
fn validate_passes_for_the_presets() {
    for preset in ["kaon-like", "b-meson-like"] {
        let output = run(&["validate", "--preset", preset]);
        assert_eq!(output.status.code(), Some(0), "preset {preset}");
        let text = String::from_utf8_lossy(&output.stdout);
        assert!(text.contains("all checks passed"), "{text}");
        assert!(text.contains("Kraus normalization"));
        assert!(text.contains("semigroup"));
    }
}

#[test]
fn config_errors_exit_with_code_2() {
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "correlate",
            "--preset",
            "no-such-preset",
            "--out",
            "/tmp/x.csv",
        ],
        vec!["correlate", "--out", "/tmp/x.csv"], // neither preset nor params
        vec![
            "correlate",
            "--preset",
            "kaon-like",
            "--ta-range",
            "5:1:3",
            "--out",
            "/tmp/x.csv",
        ],
        vec![
            "correlate",
            "--preset",
            "kaon-like",
            "--observables",
            "D-@p D-@q",
            "--out",
            "/tmp/x.csv",
        ],
        vec![
            "correlate",
            "--preset",
            "kaon-like",
            "--mode",
            "bosonic",
            "--out",
            "/tmp/x.csv",
        ],
        vec![
            "probabilities",
            "--preset",
            "kaon-like",
            "--mode",
            "identical",
            "--out",
            "/tmp/x.csv",
        ],
    ];
    for args in cases {
        let output = run(&args);
        assert_eq!(
            output.status.code(),
            Some(2),
            "args {args:?}, stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
}

#[test]
fn malformed_params_file_is_a_config_error() {
    let path = temp_path("bad", "json");
    std::fs::write(&path, r#"{"gamma_s": 1.0, "gamma_l": "oops"}"#).unwrap();
    let output = binary()
        .args(["validate", "--params"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let _ = std::fs::remove_file(&path);
}
