use loopcx::battery;
use loopcx::io::{LoopPair, LoopPairFile};
use loopcx::liegroup::MatrixGroupSpec;
use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

fn loopcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopcx")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn abelcoh_suite_passes_with_a_json_report() {
    let o = loopcx(&["verify", "abelcoh"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["suite"], "abelcoh");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true && c["measured"] == 0.0));
}

#[test]
fn rplus_xmod_fails_with_a_peiffer_witness() {
    let o = loopcx(&["verify", "xmod", "--group", "rplus", "--cocycle", "rplus(1.0,4.5)", "--grid", "32,32"]);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let peiffer = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "Peiffer identity").unwrap();
    assert_eq!(peiffer["pass"], false);
    assert!(peiffer["witness"].as_str().unwrap().starts_with("pair"));
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(code(&loopcx(&["verify", "nosuch"])), 2);
    assert_eq!(code(&loopcx(&["verify", "loopspace", "--grid", "48,48"])), 2);
    assert_eq!(code(&loopcx(&["verify", "loopspace", "--group", "g2"])), 2);
    assert_eq!(code(&loopcx(&["verify", "loopspace", "--model", "path", "--group", "u1"])), 2);
    assert_eq!(code(&loopcx(&["torsion", "2,x"])), 2);
    assert_eq!(code(&loopcx(&["frobnicate"])), 2);
}

#[test]
fn empty_loop_file_gives_an_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "empty.json", "");
    let o = loopcx(&["commutator", &f, "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "pair,phase,expected,tol,pass\n");
}

/// exp(c·sin²(π(t−a)/(b−a))) on (a, b), 1 elsewhere, sampled at 2πj/n.
fn scalar_bump(n: usize, a: f64, b: f64, c: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            if t > a && t < b {
                (c * (PI * (t - a) / (b - a)).sin().powi(2)).exp()
            } else {
                1.0
            }
        })
        .collect()
}

#[test]
fn rplus_phases_match_the_closed_form() {
    let n = 64;
    let (js, jt) = (10, 40);
    let (s, t) = (TAU * js as f64 / n as f64, TAU * jt as f64 / n as f64);
    let mut csv = String::from("id,side,a,b");
    for k in 0..n {
        csv += &format!(",v{k}");
    }
    csv.push('\n');
    let mut expected = vec![];
    for (k, (c1, c2)) in [(0.7, -1.3), (2.5, 1.9), (-3.0, 4.0)].into_iter().enumerate() {
        let ga = scalar_bump(n, 0.3, 2.5, c1);
        let gb = scalar_bump(n, 3.0, 5.8, c2);
        for (side, (a, b), v) in [("a", (0.3, 2.5), &ga), ("b", (3.0, 5.8), &gb)] {
            csv += &format!("p{k},{side},{a},{b}");
            for x in v {
                csv += &format!(",{x:e}");
            }
            csv.push('\n');
        }
        let phase = ga[js].ln() * gb[jt].ln();
        expected.push((phase + PI).rem_euclid(TAU) - PI);
    }
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "rplus.csv", &csv);
    let cocycle = format!("rplus({s},{t})");
    let o = loopcx(&["commutator", &f, "--group", "rplus", "--cocycle", &cocycle]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let phases: Vec<f64> = table["phases"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(phases.len(), 3);
    for (p, e) in phases.iter().zip(&expected) {
        assert!((p - e).abs() < 1e-12, "{p} vs {e}");
    }
    assert!(expected.iter().all(|e| e.abs() > 0.1));
}

#[test]
fn su2_pairs_commute_and_overlaps_are_rejected() {
    let g = Arc::new(MatrixGroupSpec::su2(1.0));
    let pairs: Vec<LoopPair> = battery::disjoint_bump_pairs(&g, 32, 4, 0.8, 9)
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(k, (a, b))| LoopPair { id: format!("p{k}"), a, b })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "su2.json", &serde_json::to_string(&LoopPairFile::new(&g, 32, &pairs)).unwrap());
    let o = loopcx(&["commutator", &f, "--grid", "32,32", "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert!(cols[1].parse::<f64>().unwrap().abs() < 1e-3);
        assert_eq!(cols[4], "true");
    }

    let overlapping = vec![LoopPair { id: "x".into(), a: pairs[0].a.clone(), b: pairs[0].a.clone() }];
    let f = write(dir.path(), "bad.json", &serde_json::to_string(&LoopPairFile::new(&g, 32, &overlapping)).unwrap());
    let o = loopcx(&["commutator", &f, "--grid", "32,32"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("supports overlap"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "[run]\nseed = 11\n\n[extension]\ngroup = \"rplus\"\ngrid = \"48,48\"\ncocycle = \"rplus(1.0,4.5)\"\n",
    );
    assert_eq!(code(&loopcx(&["verify", "xmod", "--config", &cfg])), 2);
    let a = loopcx(&["verify", "xmod", "--config", &cfg, "--grid", "32,32"]);
    assert_eq!(code(&a), 1);
    let b = loopcx(&[
        "verify",
        "xmod",
        "--group",
        "rplus",
        "--cocycle",
        "rplus(1.0,4.5)",
        "--grid",
        "32,32",
        "--seed",
        "11",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let c = loopcx(&["verify", "xmod", "--config", &cfg, "--grid", "32,32", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);

    let relaxed = write(
        dir.path(),
        "relaxed.toml",
        "[tolerances]\n\"Peiffer identity\" = 10.0\n\"ker(s) and ker(t) commute\" = 10.0\n",
    );
    let o = loopcx(&[
        "verify",
        "xmod",
        "--config",
        &relaxed,
        "--group",
        "rplus",
        "--cocycle",
        "rplus(1.0,4.5)",
        "--grid",
        "32,32",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let typo = write(dir.path(), "typo.toml", "[run]\nsed = 3\n");
    assert_eq!(code(&loopcx(&["verify", "abelcoh", "--config", &typo])), 2);
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_caps() {
    let args = ["verify", "centralext", "--grid", "32,32", "--samples", "4", "--format", "csv"];
    let a = loopcx(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_loopcx")).args(args).env("LOOPCX_THREADS", "1").output().unwrap();
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("suite,name,measured,tol,pass,witness\n"));
}

#[test]
fn periods_flag_half_level_as_non_integral() {
    let o = loopcx(&["periods", "--level", "1", "--grid", "32,32"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["nearest"], 1.0);
    let o = loopcx(&["periods", "--level", "0.5", "--grid", "32,32"]);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r["multiple"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert_eq!(r["integral"], false);
    let o = loopcx(&["periods", "--level", "0", "--grid", "32,32"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&loopcx(&["periods", "--group", "u1"])), 2);
}

#[test]
fn torsion_and_tables_are_exact() {
    let o = loopcx(&["torsion", "2,2"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["quotient"], "Z2xZ2");
    assert_eq!(r["generators"][1]["matrix"], serde_json::json!([["0/1", "0/1"], ["0/1", "1/2"]]));
    let r: serde_json::Value = serde_json::from_slice(&loopcx(&["torsion", "3"]).stdout).unwrap();
    assert_eq!(r["quotient"], "trivial");

    let dir = tempfile::tempdir().unwrap();
    // κ((k1,k2),(l1,l2)) = ξ^(k1 l2) on Z3 x Z3 with ξ = 1/3: skew = ξ^(k1 l2 − k2 l1).
    let f = write(dir.path(), "kappa.json", r#"{"group": "3,3", "matrix": [["0/1", "1/3"], ["0/1", "0/1"]]}"#);
    let o = loopcx(&["skew", &f, "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 82);
    assert!(text.contains("(1 0),(0 1),1/3\n"));
    assert!(text.contains("(0 1),(1 0),2/3\n"));
    assert!(text.contains("(1 1),(1 1),0/1\n"));
    let same = loopcx(&["table", "skew", &f, "--format", "csv"]);
    assert_eq!(same.stdout, o.stdout);

    let o = loopcx(&["table", "parity", "--max", "3", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\n3,1/2,false\n"));
    assert!(stdout(&o).contains("\n-2,0/1,true\n"));

    let bad = write(dir.path(), "bad.json", r#"{"group": "2", "matrix": [["1/3"]]}"#);
    assert_eq!(code(&loopcx(&["table", "bihom", &bad])), 2);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.json");
    let o = loopcx(&["verify", "loopspace", "--grid", "32,32", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(r["suite"], "loopspace");
}
