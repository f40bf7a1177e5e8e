use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::json;
use shapeopt_cli::runner::{AUDIT_FILE, CONFIG_SNAPSHOT};
use shapeopt_core::persist::{read_trajectory, MEANS_FILE, RECORDS_FILE, TRAJECTORY_FILE};

fn shapeopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapeopt"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn write_json(dir: &Path, name: &str, value: serde_json::Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    path
}

fn run(config: &Path, out: &Path) -> Output {
    shapeopt(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

#[test]
fn analytic_mock_run_writes_every_generation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_json(
        tmp.path(),
        "c.json",
        json!({"problem": "analytic_test", "optimizer": "mock", "generations": 30, "seeds": [3]}),
    );
    let out = tmp.path().join("out");
    let o = run(&cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let seed = out.join("seed_3");
    let rows = read_trajectory(&seed.join(TRAJECTORY_FILE)).unwrap();
    assert_eq!(rows.len(), 30);
    assert!(rows.windows(2).all(|w| w[1].best_score_so_far >= w[0].best_score_so_far));
    let records = fs::read_to_string(seed.join(RECORDS_FILE)).unwrap();
    assert_eq!(records.lines().count(), 30 * 8);
    assert_eq!(fs::read_to_string(seed.join(MEANS_FILE)).unwrap().lines().count(), 30);
    assert!(seed.join(CONFIG_SNAPSHOT).exists());
    // The quadratic optimum is 0; the mock should get close.
    assert!(rows[29].best_score_so_far > -0.05, "{:?}", rows[29]);
}

#[test]
fn invalid_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write_json(tmp.path(), "a.json", json!({"problem": "analytic_test", "colour": 1}));
    assert_eq!(code(&run(&unknown, tmp.path())), 2);
    let too_many = write_json(
        tmp.path(),
        "b.json",
        json!({"problem": "axisym_volume", "optimizer": "mock", "modes": 9}),
    );
    assert_eq!(code(&run(&too_many, tmp.path())), 2);
    let missing = tmp.path().join("nope.json");
    assert_eq!(code(&run(&missing, tmp.path())), 2);
}

#[test]
fn unreachable_llm_exits_3_and_keeps_partial_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_json(
        tmp.path(),
        "c.json",
        json!({
            "problem": "analytic_test",
            "optimizer": "llm",
            "generations": 10,
            "n_ini": 2,
            "llm": {
                "endpoint": "http://127.0.0.1:9/v1/chat/completions",
                "model": "none",
                "max_retries": 1,
                "timeout_secs": 2
            }
        }),
    );
    let out = tmp.path().join("out");
    let o = run(&cfg, &out);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let seed = out.join("seed_0");
    let records = fs::read_to_string(seed.join(RECORDS_FILE)).unwrap();
    assert_eq!(records.lines().count(), 2 * 8, "seeded generations are kept");
    assert_eq!(read_trajectory(&seed.join(TRAJECTORY_FILE)).unwrap().len(), 2);
    let audit = fs::read_to_string(seed.join(AUDIT_FILE)).unwrap();
    assert!(audit.lines().count() >= 2, "each attempt is audited");
}

#[test]
fn empty_evaluator_command_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_json(
        tmp.path(),
        "c.json",
        json!({
            "problem": "airfoil",
            "optimizer": "ga",
            "free_points": 1,
            "generations": 2,
            "airfoil": {"evaluator": {"command": []}, "baseline_ratio": 1.0}
        }),
    );
    let o = run(&cfg, &tmp.path().join("out"));
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

fn analytic_runs(root: &Path, name: &str, optimizer: &str, seeds: &[u64], generations: usize) -> PathBuf {
    let cfg = write_json(
        root,
        &format!("{name}.json"),
        json!({"problem": "analytic_test", "optimizer": optimizer, "generations": generations, "seeds": seeds}),
    );
    let out = root.join(name);
    assert_eq!(code(&run(&cfg, &out)), 0);
    out
}

fn read_compare(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn compare(methods: &[String], out: &Path) -> Output {
    let mut args = vec!["compare".to_string()];
    for m in methods {
        args.push("--method".into());
        args.push(m.clone());
    }
    args.push("--out".into());
    args.push(out.to_str().unwrap().into());
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    shapeopt(&refs)
}

#[test]
fn compare_single_run_has_no_spread() {
    let tmp = tempfile::tempdir().unwrap();
    let es = analytic_runs(tmp.path(), "es", "mock", &[0], 6);
    let out = tmp.path().join("cmp.csv");
    let o = compare(&[format!("es={}", es.join("seed_0").display())], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_compare(&out);
    assert_eq!(header, ["generation", "es_mean", "es_min", "es_max"]);
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert_eq!(r[1], r[2]);
        assert_eq!(r[1], r[3]);
    }
}

#[test]
fn compare_identical_seeds_and_two_methods() {
    let tmp = tempfile::tempdir().unwrap();
    let a = analytic_runs(tmp.path(), "a", "mock", &[5], 6);
    let b = analytic_runs(tmp.path(), "b", "mock", &[5], 6);
    let ga = analytic_runs(tmp.path(), "ga", "ga", &[0, 1, 2], 6);
    let out = tmp.path().join("cmp.csv");
    let o = compare(
        &[
            format!("es={},{}", a.join("seed_5").display(), b.join("seed_5").display()),
            format!("ga={}", ga.display()),
        ],
        &out,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_compare(&out);
    assert_eq!(header, ["generation", "es_mean", "es_min", "es_max", "ga_mean", "ga_min", "ga_max"]);
    for (g, r) in rows.iter().enumerate() {
        assert_eq!(r[0], g as f64);
        assert_eq!(r[2], r[3], "identical runs have zero spread");
        assert!(r[5] <= r[4] && r[4] <= r[6]);
    }
}

#[test]
fn compare_truncates_to_shortest_run() {
    let tmp = tempfile::tempdir().unwrap();
    let short = analytic_runs(tmp.path(), "short", "mock", &[0], 4);
    let long = analytic_runs(tmp.path(), "long", "ga", &[0], 9);
    let out = tmp.path().join("cmp.csv");
    let o = compare(&[format!("s={}", short.display()), format!("l={}", long.display())], &out);
    assert_eq!(code(&o), 0);
    assert_eq!(read_compare(&out).1.len(), 4);

    let bad = compare(&["no_equals_sign".into()], &out);
    assert_eq!(code(&bad), 2);
}

#[test]
fn evaluate_sphere() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_json(
        tmp.path(),
        "c.json",
        json!({"problem": "axisym_volume", "optimizer": "mock", "modes": 1}),
    );
    let out = tmp.path().join("eval");
    let o = shapeopt(&[
        "evaluate",
        "--config",
        cfg.to_str().unwrap(),
        "--design",
        &format!("{}", -std::f64::consts::FRAC_PI_2),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let d_r = v["d_r"].as_f64().unwrap();
    assert!((d_r - 1.0).abs() < 1e-6, "{v}");
    for f in ["profile.csv", "traction.csv", "evaluation.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn sweep_single_value() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_json(
        tmp.path(),
        "c.json",
        json!({
            "problem": "axisym_area",
            "optimizer": "mock",
            "modes": 2,
            "generations": 3,
            "axisym": {"elements": 40}
        }),
    );
    let out = tmp.path().join("sweep");
    let o = shapeopt(&[
        "sweep-nini",
        "--config",
        cfg.to_str().unwrap(),
        "--n-ini",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["generation", "n_ini_1"]);
    assert_eq!(r.records().count(), 3);
    assert!(out.join("n_ini_1").join("seed_0").join(RECORDS_FILE).exists());
}

/// Stub flow solver: lift from the point count, fixed drag, and a failure
/// whenever the geometry file has fewer than 10 lines.
const STUB_SOLVER: &str = r#"#!/bin/sh
geom="$1"
out="$5"
[ "$2" = "--re" ] || exit 2
[ "$4" = "--out" ] || exit 2
n=$(wc -l < "$geom")
[ "$n" -ge 10 ] || exit 1
x=$(head -n 1 "$geom" | cut -d' ' -f1)
printf '{"lift": %s, "drag": 1.0, "ratio": %s, "re": %s}\n' "$x" "$x" "$3" > "$out"
"#;

#[test]
fn airfoil_ga_with_stub_solver() {
    let tmp = tempfile::tempdir().unwrap();
    let script = tmp.path().join("solver.sh");
    fs::write(&script, STUB_SOLVER).unwrap();
    fs::set_permissions(&script, fs::Permissions::from_mode(0o755)).unwrap();
    let cfg = write_json(
        tmp.path(),
        "c.json",
        json!({
            "problem": "airfoil",
            "optimizer": "ga",
            "free_points": 2,
            "population_size": 4,
            "generations": 3,
            "airfoil": {
                "evaluator": {"command": [script.to_str().unwrap()], "reynolds": 100.0, "timeout_secs": 20.0},
                "baseline_ratio": 0.5
            }
        }),
    );
    let out = tmp.path().join("out");
    let o = run(&cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let records = fs::read_to_string(out.join("seed_0").join(RECORDS_FILE)).unwrap();
    assert_eq!(records.lines().count(), 12);
    for line in records.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["design"].as_array().unwrap().len(), 6);
        let score = v["score"].as_f64().unwrap();
        // The stub's ratio is the first x coordinate, in [0.6, 3] for point 0.
        assert!(score == -5.0 || (score > -1.0 && score <= 5.0), "{score}");
    }

    let geom = tmp.path().join("geom");
    let o = shapeopt(&[
        "evaluate",
        "--config",
        cfg.to_str().unwrap(),
        "--design",
        "0,0,0,0,0,0",
        "--out",
        geom.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(geom.join("geometry.dat").exists());
}
