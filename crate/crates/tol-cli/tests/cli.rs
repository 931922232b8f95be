//! End-to-end checks of the `tol` binary: subcommand plumbing, persisted
//! formats, environment override, and exit codes.

use std::path::PathBuf;
use std::process::Command;

fn tol() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tol"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tol-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn simulate_writes_csv_and_summary_under_out_dir() {
    let dir = workdir("sim");
    let out = tol()
        .env("TOL_OUT_DIR", &dir)
        .args([
            "simulate",
            "--symbol",
            "1:1,2:1",
            "--n",
            "60",
            "--gamma",
            "0.75",
            "--trials",
            "2",
            "--seed",
            "5",
            "--dist",
            "complex-gaussian",
            "--eps",
            "0.1",
            "--out",
            "run.csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("run.csv")).unwrap();
    assert!(csv.starts_with("# symbol=1:1,2:1"));
    assert!(csv.contains("trial,N,gamma,seed,re,im,dist_to_curve,wind_index_or_NA,is_outlier"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count() - 1, 120);
    assert!(dir.join("run.summary.json").exists());

    // determinism: a second identical run writes identical bytes
    let dir2 = workdir("sim2");
    let out2 = tol()
        .env("TOL_OUT_DIR", &dir2)
        .args([
            "simulate", "--symbol", "1:1,2:1", "--n", "60", "--gamma", "0.75", "--trials", "2",
            "--seed", "5", "--dist", "complex-gaussian", "--eps", "0.1", "--out", "run.csv",
        ])
        .output()
        .unwrap();
    assert!(out2.status.success());
    let csv2 = std::fs::read_to_string(dir2.join("run.csv")).unwrap();
    assert_eq!(csv, csv2);
}

#[test]
fn field_then_plot_round_trip() {
    let dir = workdir("field");
    let out = tol()
        .env("TOL_OUT_DIR", &dir)
        .args([
            "field",
            "--symbol",
            "1:1",
            "--wind",
            "1",
            "--trunc-l",
            "14",
            "--trials",
            "3",
            "--seed",
            "9",
            "--dist",
            "complex-gaussian",
            "--eps",
            "0.1",
            "--window=-0.4,0.4,-0.4,0.4",
            "--out",
            "zeros.jsonl",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let jsonl = std::fs::read_to_string(dir.join("zeros.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 3);
    let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    for key in ["symbol", "d", "L", "seed", "window", "zeros", "dist"] {
        assert!(first.get(key).is_some(), "missing `{key}`");
    }

    let plot = tol()
        .env("TOL_OUT_DIR", &dir)
        .args(["plot", "--points"])
        .arg(dir.join("zeros.jsonl"))
        .args(["--out", "zeros.svg"])
        .output()
        .unwrap();
    assert!(plot.status.success(), "{}", String::from_utf8_lossy(&plot.stderr));
    let svg = std::fs::read_to_string(dir.join("zeros.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = workdir("cfg");
    let cfg = serde_json::json!({
        "symbol": "1:1",
        "n": [40],
        "gamma": 0.8,
        "trials": 1,
        "seed": 3,
        "dist": "rademacher",
        "eps": 0.1
    });
    let cfg_path = dir.join("cfg.json");
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = tol()
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .args(["--trials", "2"]) // override
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("2 trials"), "{stdout}");
}

#[test]
fn detcheck_passes_and_exit_codes() {
    let ok = tol()
        .args(["detcheck", "--trials", "8", "--seed", "2"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("worst relative error"));

    // impossible tolerance forces the acceptance-failure exit code
    let fail = tol()
        .args(["detcheck", "--trials", "3", "--seed", "2", "--tol", "0.0"])
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(4));

    // config errors exit 2
    let bad = tol()
        .args(["simulate", "--symbol", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    // a window crossing the curve is a config error (distance check)
    let cross = tol()
        .args([
            "field", "--symbol", "1:1", "--wind", "1", "--trials", "1", "--seed", "1",
            "--eps", "0.1", "--window=0.8,1.6,-0.1,0.1",
        ])
        .output()
        .unwrap();
    assert_eq!(cross.status.code(), Some(2));

    // a clean window in the wrong region is a numerical/region failure
    let num = tol()
        .args([
            "field", "--symbol", "1:1", "--wind", "1", "--trials", "1", "--seed", "1",
            "--eps", "0.1", "--window=1.3,1.8,-0.1,0.1",
        ])
        .output()
        .unwrap();
    assert_eq!(num.status.code(), Some(3));
}

#[test]
fn specradius_prints_quantiles() {
    let out = tol()
        .args([
            "specradius", "--symbol", "1:1", "--n", "30", "--trials", "8", "--seed", "6",
            "--dist", "complex-gaussian",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("q50"), "{stdout}");
    assert!(stdout.contains("30, "), "{stdout}");
}

#[test]
fn compare_self_agrees() {
    let dir = workdir("cmp");
    let run = |name: &str, seed: &str| {
        let out = tol()
            .env("TOL_OUT_DIR", &dir)
            .args([
                "field",
                "--symbol",
                "1:1",
                "--wind",
                "1",
                "--trunc-l",
                "12",
                "--trials",
                "32",
                "--seed",
                seed,
                "--dist",
                "complex-gaussian",
                "--eps",
                "0.1",
                "--window=-0.4,0.4,-0.4,0.4",
                "--out",
                name,
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run("a.jsonl", "21");
    run("b.jsonl", "22");
    let out = tol()
        .args(["compare", "--a"])
        .arg(dir.join("a.jsonl"))
        .arg("--b")
        .arg(dir.join("b.jsonl"))
        .args(["--disk", "0,0,0.4", "--significance", "0.05"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("rank p"), "{stdout}");
}
