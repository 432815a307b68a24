use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn netperc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netperc"))
        .args(args)
        .env_remove("NETPERC_THREADS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = netperc(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn csv(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn close(v: &Value, want: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() <= tol
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dist_examples() {
    let p = json(&["dist", "--family", "poisson", "--lambda", "10", "--delta", "200"]);
    assert!(close(&p["mean"], 10.0, 1e-3));
    assert!(close(&p["T_c"], 0.1, 1e-4));
    assert_eq!(p["critical"], false);

    let c = json(&["dist", "--family", "constant", "--k", "2"]);
    assert_eq!(c["Lambda"], 0.0);
    assert_eq!(c["critical"], true);

    let pl = json(&["dist", "--family", "powerlaw", "--gamma", "2.5", "--delta", "200"]);
    let total: f64 = pl["pmf"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() <= 1e-12);

    let text = ok(&["dist", "--family", "constant", "--k", "2", "--format", "csv"]);
    assert_eq!(text, "k,p\n0,0\n1,0\n2,1\n");
}

#[test]
fn check_seq_reports_realizability() {
    assert_eq!(json(&["check-seq", "--degrees", "3,3,2,2,2"])["realizable"], true);
    let bad = json(&["check-seq", "--degrees", "1,3,3,3"]);
    assert_eq!(bad["realizable"], false);
    assert_eq!(bad["total"], 10);
}

#[test]
fn generate_is_byte_identical_under_a_seed() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    for p in [&a, &b] {
        ok(&["generate", "--family", "constant", "--k", "3", "--n", "100", "--seed", "7", "-o", path_str(p)]);
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with(b"100 150\n"));

    let other = dir.path().join("c.txt");
    ok(&["generate", "--family", "constant", "--k", "3", "--n", "100", "--seed", "8", "-o", path_str(&other)]);
    assert_ne!(std::fs::read(other).unwrap(), a);
}

#[test]
fn simulate_without_transmission_stays_at_one() {
    let dir = TempDir::new().unwrap();
    let net = dir.path().join("net.bin");
    ok(&[
        "generate", "--family", "constant", "--k", "3", "--n", "100", "--seed", "7", "--format", "binary", "-o",
        path_str(&net),
    ]);
    let args = ["simulate", "--network", path_str(&net), "--beta", "0", "--gamma", "1", "--replicates", "20"];
    let s = json(&args);
    assert_eq!(s["mean_size"], 1.0);
    assert_eq!(s["histogram"], serde_json::json!([[1, 20]]));
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn simulate_is_deterministic_and_logs_events() {
    let dir = TempDir::new().unwrap();
    let ev = dir.path().join("events.csv");
    let args = [
        "simulate", "--family", "constant", "--k", "3", "--n", "2000", "--beta", "1.5", "--gamma", "1",
        "--replicates", "30", "--seed", "4", "--events", path_str(&ev),
    ];
    let first = ok(&args);
    let log = std::fs::read_to_string(&ev).unwrap();
    assert_eq!(first, ok(&args));
    assert_eq!(log, std::fs::read_to_string(&ev).unwrap());
    assert!(log.starts_with("t,kind,vertex\n0,infection,"));
    let threaded = Command::new(env!("CARGO_BIN_EXE_netperc"))
        .args(&args[..args.len() - 2])
        .env("NETPERC_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(threaded.stdout).unwrap(), first);
}

#[test]
fn ebcm_trajectory_ends_near_two_thirds() {
    let text = ok(&["ebcm", "--family", "constant", "--k", "3", "--beta", "1.5", "--gamma", "1"]);
    assert!(text.starts_with("t,theta,S,I,R,phiS,phiI,phiR\n"));
    let last = csv(&text).pop().unwrap();
    let theta: f64 = last[1].parse().unwrap();
    assert!((theta - 2.0 / 3.0).abs() < 1e-3, "{theta}");

    let fs = json(&["ebcm", "--family", "constant", "--k", "3", "--beta", "1.5", "--gamma", "1", "--format", "json"]);
    assert!(close(&fs["theta_inf"], 2.0 / 3.0, 1e-9));
    assert!(close(&fs["R_inf"], 19.0 / 27.0, 1e-9));
}

#[test]
fn percolate_examples() {
    let r = json(&["percolate", "--family", "constant", "--k", "3", "--beta", "1.5", "--gamma", "1"]);
    assert!(close(&r["T"], 0.6, 1e-12));
    assert!(close(&r["T_c"], 0.5, 1e-12));
    assert!(close(&r["u_T"], 4.0 / 9.0, 1e-9));
    assert!(close(&r["S_T"], 19.0 / 27.0, 1e-9));
    assert_eq!(r["epidemic"], true);

    let sub = json(&["percolate", "--family", "constant", "--k", "3", "--t", "0.3"]);
    assert_eq!(sub["S_T"], 0.0);
    assert_eq!(sub["epidemic"], false);
    // 1 + 3T / (1 - 2T) at T = 0.3
    assert!(close(&sub["mean_small"], 3.25, 1e-9));

    let sweep = ok(&[
        "percolate", "--family", "poisson", "--mean", "10", "--delta", "200", "--sweep", "beta", "--gamma", "1",
        "--points", "30", "--max", "3",
    ]);
    assert!(sweep.starts_with("beta,gamma,T,Tc,uT,ST,R0,Rinf\n"));
    let s_t: Vec<f64> = csv(&sweep).iter().map(|r| r[5].parse().unwrap()).collect();
    assert_eq!(s_t.len(), 30);
    assert!(s_t.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(s_t[0], 0.0);
}

#[test]
fn compare_reproduces_the_figure_grid() {
    for family in ["poisson", "geometric", "powerlaw"] {
        let out = netperc(&["compare", "--family", family, "--include-zero"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with("beta,gamma,ST,Rinf,residual\n"));
        let rows = csv(&text);
        assert_eq!(rows.len(), 3 * 41);
        for r in &rows {
            let residual: f64 = r[4].parse().unwrap();
            assert!(residual <= 1e-8, "{family}: {r:?}");
            if r[0] == "0" {
                assert_eq!((r[2].as_str(), r[3].as_str()), ("0", "0"));
            }
        }
        let stderr = String::from_utf8(out.stderr).unwrap();
        let mean: f64 = stderr.split("mean ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert!((mean - 10.0).abs() <= 0.05, "{family}: {stderr}");
    }
    let one = ok(&["compare", "--family", "poisson", "--points", "4", "--beta-max", "6", "--gammas", "1"]);
    let row = csv(&one).into_iter().find(|r| r[0] == "1.5").unwrap();
    assert!(row[4].parse::<f64>().unwrap() <= 1e-8);
}

#[test]
fn flags_override_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("p.json");
    std::fs::write(&cfg, r#"{"distribution": {"family": "constant", "params": {"k": 3}, "delta": 3}, "T": 0.3}"#)
        .unwrap();
    let c = path_str(&cfg);
    assert_eq!(json(&["--config", c, "percolate"])["epidemic"], false);
    assert_eq!(json(&["--config", c, "percolate", "--t", "0.6"])["epidemic"], true);
    let swapped = json(&["--config", c, "percolate", "--family", "constant", "--k", "4"]);
    assert!(close(&swapped["T_c"], 1.0 / 3.0, 1e-12));

    let tuned = dir.path().join("d.json");
    std::fs::write(&tuned, r#"{"distribution": {"family": "powerlaw", "mean": 10, "delta": 200}}"#).unwrap();
    assert!(close(&json(&["--config", path_str(&tuned), "dist"])["mean"], 10.0, 1e-6));
}

const BROKEN: [(&str, &str, &str); 20] = [
    ("dist", "{", "EOF"),
    ("dist", "[1, 2]", "expected"),
    ("dist", r#"{"distrib": {}}"#, "unknown field `distrib`"),
    ("dist", r#"{"distribution": {"family": "binomial", "params": {}, "delta": 4}}"#, "binomial"),
    ("dist", r#"{"distribution": {"family": "poisson", "params": {"lambda": -1}, "delta": 40}}"#, "lambda"),
    ("dist", r#"{"distribution": {"family": "poisson", "params": {"lambda": 5}}}"#, "delta"),
    ("dist", r#"{"distribution": {"family": "powerlaw", "params": {"gamma": 0.5}, "delta": 100}}"#, "gamma"),
    ("dist", r#"{"distribution": {"family": "custom", "params": {"pmf": [0.5, 0.2]}, "delta": 1}}"#, "pmf"),
    ("dist", r#"{"distribution": {"family": "constant", "params": {"k": 3}, "delta": 3, "k_min": 2}}"#, "k_min"),
    ("dist", r#"{"distribution": {"family": "poisson", "mean": 50, "delta": 20}}"#, "mean"),
    ("dist", r#"{"format": "xml"}"#, "unknown variant `xml`"),
    ("check-seq", r#"{"degrees": [1, -2]}"#, "invalid value"),
    ("check-seq", r#"{"degrees": [1], "input": "x.txt"}"#, "both"),
    ("generate", r#"{"distribution": {"family": "constant", "params": {"k": 3}, "delta": 3}}"#, "--n"),
    ("generate", r#"{"distribution": {"family": "constant", "params": {"k": 3}, "delta": 3}, "n": 10, "mode": "lazy"}"#, "lazy"),
    ("percolate", r#"{"distribution": {"family": "constant", "params": {"k": 3}, "delta": 3}, "T": 1.5}"#, "transmissibility"),
    ("percolate", r#"{"distribution": {"family": "constant", "params": {"k": 3}, "delta": 3}, "beta": 1, "gamma": 0}"#, "gamma"),
    ("ebcm", r#"{"distribution": {"family": "constant", "params": {"k": 3}, "delta": 3}, "beta": 1, "gamma": 1, "theta0": 1.5}"#, "theta0"),
    ("simulate", r#"{"distribution": {"family": "constant", "params": {"k": 3}, "delta": 3}, "n": 50, "beta": 1, "gamma": 1, "replicates": 0}"#, "replicates"),
    ("compare", r#"{"family": "powerlaw", "mean": 10, "delta": 200, "gammas": [1], "tol": 0.5}"#, "tol"),
];

#[test]
fn broken_configs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    for (i, (cmd, body, needle)) in BROKEN.iter().enumerate() {
        let path = dir.path().join(format!("broken{i}.json"));
        std::fs::write(&path, body).unwrap();
        let out = netperc(&["--config", path_str(&path), cmd]);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(2), "case {i} ({body}): {stderr}");
        assert!(stderr.contains(needle), "case {i}: {stderr:?} lacks {needle:?}");
    }
}

#[test]
fn bad_flags_exit_with_two() {
    for args in [
        &["dist", "--family", "poisson", "--lambda", "5"][..],
        &["dist", "--family", "poisson", "--lambda", "5", "--alpha", "1", "--delta", "30"],
        &["dist", "--family", "constant", "--k", "3", "--gamma", "2", "--exponent", "2"],
        &["percolate", "--family", "constant", "--k", "3"],
        &["frobnicate"],
        &["--threads", "0", "dist", "--family", "constant", "--k", "3"],
        &["simulate", "--network", "/nonexistent/net.txt", "--beta", "1", "--gamma", "1"],
    ] {
        let out = netperc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn runtime_failures_exit_with_one() {
    // parity is always odd for N = 3 and k = 3, so no sequence exists
    let out = netperc(&["generate", "--family", "constant", "--k", "3", "--n", "3", "--sequence-restarts", "5"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}
