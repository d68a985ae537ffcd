use std::fs;
use std::process::Command;

use orbit_metrology::sweep::{read_rows, rows_from_csv, rows_from_json};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orbit-metrology"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let (code, _, err) = run(&[
            "sweep",
            "--experiment",
            "haar_ramsey",
            "--n",
            "4,5,6",
            "--samples",
            "50",
            "--seed",
            "3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let rows = read_rows(&a).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![4, 5, 6]);
    assert!(rows
        .iter()
        .all(|r| r.samples == 50 && r.seed == 3 && r.analytic_oracle.is_some()));
}

#[test]
fn symmetric_sweep_carries_closed_form_oracles() {
    let (code, out, _) = run(&[
        "sweep",
        "--experiment",
        "haar_ramsey",
        "--ensemble",
        "symmetric",
        "--n",
        "10,20",
        "--samples",
        "20",
    ]);
    assert_eq!(code, 0);
    let rows = rows_from_csv(&out).unwrap();
    assert!((rows[0].analytic_oracle.unwrap() - 1000.0 / 33.0).abs() < 1e-12);
    assert!((rows[1].analytic_oracle.unwrap() - 8000.0 / 63.0).abs() < 1e-12);
}

#[test]
fn json_output_parses_back() {
    let (code, out, _) = run(&["haar-ramsey", "--n", "3", "--samples", "10", "--format", "json"]);
    assert_eq!(code, 0);
    let rows = rows_from_json(&out).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].experiment, "haar_ramsey");
}

#[test]
fn malformed_config_is_a_validation_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("rows.csv");
    fs::write(&cfg, "experiment = \"projected\"\nn = [4, 6]\nne = 4\nsamples = 5\n").unwrap();
    let (code, _, err) = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{err}");
    assert!(!out.exists());
    // The flag wins over the file.
    let (code, _, err) = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--ne",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(read_rows(&out).unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["sweep", "--experiment", "nope", "--n", "4"]).0, 2);
    assert_eq!(run(&["sweep", "--experiment", "haar_ramsey", "--n", "6,4"]).0, 2);
    assert_eq!(run(&["haar-ramsey", "--n", "13", "--samples", "2"]).0, 3);
    assert_eq!(run(&["weights", "--n", "9", "--samples", "1"]).0, 3);
    assert_eq!(run(&["census", "--n", "4", "--format", "csv"]).0, 2);
}

#[test]
fn report_subcommands() {
    let (code, out, _) = run(&["dla", "--generators", "XX,ZI"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["dla_dimension"], 3);
    assert_eq!(v["n"], 2);

    let (code, out, _) = run(&["census", "--n", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["class_counts"], serde_json::json!([4.0, 8.0, 4.0]));
    assert_eq!(v["symmetrized_counts"], serde_json::json!([3.0, 4.0, 3.0]));

    let (code, out, _) = run(&["loss", "--n", "8", "--k", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let cf = v["closed_form"].as_f64().unwrap();
    assert!((v["loss_before_encoding"].as_f64().unwrap() - cf).abs() < 1e-8);

    let (code, out, _) = run(&["time-avg", "--n", "4", "--time", "50"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["limit"]["exact"].as_f64().unwrap() - 8.0).abs() < 1e-9);

    for args in [
        &["twist", "--n", "8"][..],
        &["weights", "--n", "4", "--samples", "3"],
        &["projected", "--n", "4", "--ne", "1", "--samples", "3"],
        &["noise", "--n", "4", "--p", "0.5", "--samples", "3"],
        &["loss", "--haar", "--n", "6", "--k", "1", "--samples", "3"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 0, "{args:?}: {err}");
    }
}
