use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fracfk::harness::read_report_rows;

fn fracfk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracfk")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const CONDITION_A: &str = r#"{"alpha": 0.5, "rho": [1, 1], "T": 1, "condition": "a"}"#;

#[test]
fn weights_are_binomial_coefficients() {
    let text = stdout(&fracfk(&["weights", "--order", "1", "--alpha", "0.5", "--tau", "1", "--n", "3"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,d_i"));
    let d: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (a, b) in d.iter().zip([1.0, -0.5, -0.125, -0.0625]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn bdf2_leading_weight() {
    let text = stdout(&fracfk(&["weights", "--order", "2", "--alpha", "0.5", "--tau", "0.01", "--n", "0"]));
    let d0: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((d0 - 150f64.sqrt()).abs() < 1e-12);
}

#[test]
fn unsupported_order_fails() {
    let out = fracfk(&["weights", "--order", "3", "--alpha", "0.5", "--tau", "1", "--n", "2"]);
    assert!(!out.status.success());
}

#[test]
fn solve_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "p.json", CONDITION_A);
    let files: Vec<String> = ["a.csv", "b.csv"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let out = out.to_str().unwrap();
            stdout(&fracfk(&["solve", "--config", &config, "--scheme", "bdf2", "--tau", "0.05", "--cells", "16", "--out", out]));
            fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(files[0], files[1]);
    let rows: Vec<&str> = files[0].lines().collect();
    assert_eq!(rows[0], "x,re,im");
    assert_eq!(rows.len(), 18);
    assert!(rows[1].ends_with(",0.00000000000000000e0,0.00000000000000000e0"));
}

#[test]
fn solve_rejects_step_not_dividing_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "p.json", CONDITION_A);
    let out = fracfk(&["solve", "--config", &config, "--tau", "0.3", "--cells", "8"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not divide"));
}

#[test]
fn oracle_agrees_with_fine_solve() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "p.json", CONDITION_A);
    let parse = |text: &str| -> Vec<(f64, f64)> {
        text.lines()
            .skip(1)
            .map(|l| {
                let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
                (v[1], v[2])
            })
            .collect()
    };
    let reference = parse(&stdout(&fracfk(&["oracle", "--config", &config, "--time", "1", "--cells", "16"])));
    let out = dir.path().join("s.csv");
    stdout(&fracfk(&[
        "solve", "--config", &config, "--scheme", "bdf2", "--tau", "0.005", "--cells", "16", "--out",
        out.to_str().unwrap(),
    ]));
    let solved = parse(&fs::read_to_string(out).unwrap());
    assert_eq!(reference.len(), 17);
    for (a, b) in reference.iter().zip(&solved) {
        assert!((a.0 - b.0).abs() < 1e-5 && (a.1 - b.1).abs() < 1e-5, "{a:?} {b:?}");
    }
}

#[test]
fn probe_regularity_lists_levels() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "p.json", CONDITION_A);
    let out = fracfk(&["probe-regularity", "--config", &config, "--cells", "32", "--levels", "4"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("slope"));
}

#[test]
fn convergence_studies_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "s.json",
        r#"{"alpha": 0.5, "rho": [-1, 1], "T": 1, "condition": "a", "scheme": "bdf2", "chain": [8, 16], "fixed": 20}"#,
    );
    let out = dir.path().join("out");
    let out_str = out.to_str().unwrap();
    for cmd in ["conv-time", "conv-space", "compare-projection"] {
        stdout(&fracfk(&[cmd, "--config", &config, "--out", out_str]));
    }
    for stem in ["temporal_bdf2", "spatial_bdf2_l2", "spatial_bdf2_h1", "projection_main", "projection_variant"] {
        let rows = read_report_rows(out.join(format!("{stem}.csv"))).unwrap();
        assert_eq!(rows.len(), 2, "{stem}");
        assert!(rows[0].rate.is_none() && rows[1].rate.is_some());
        assert!(out.join(format!("{stem}.json")).exists());
        assert_eq!(fs::read_to_string(out.join(format!("{stem}.dat"))).unwrap().lines().count(), 3);
    }
}

#[test]
fn repro_table_one_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tables");
    let text = stdout(&fracfk(&["repro-tables", "--ids", "1", "--assert", "--out", out.to_str().unwrap()]));
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 2);
    assert!(out.join("table1_alpha0.3.csv").exists());
}

#[test]
fn repro_assert_fails_on_impossible_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tables");
    let status = fracfk(&[
        "repro-tables", "--ids", "1", "--assert", "--error-tol", "0", "--rate-tol", "0", "--out",
        out.to_str().unwrap(),
    ])
    .status;
    assert!(!status.success());
}
