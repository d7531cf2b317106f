use std::path::Path;
use std::process::{Command, Output};

use maur::estimation::fit_ma2;
use maur::model::MaModel;
use maur::region::RootKind;
use maur::roots::RootSet;
use maur::simulate::simulate_ma;

fn maur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maur"))
        .args(args)
        .output()
        .expect("run binary")
}

fn maur_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maur"))
        .args(args)
        .env("MAUR_THREADS", threads)
        .output()
        .expect("run binary")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const CRIT: &str = r#"{"alphas":[0.05],"b_glr":[1.96],"b_mle":[-6.9],"reps":10000,"seed":3,"K":100000,"m":null,"beta_max":60.0,"discarded":0}"#;

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = maur(&["simulate", "--q", "2", "--roots", "1,0.3", "--n", "100", "--seed", "42", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# seed: 42"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 101);
    // same seed, same file
    let again = dir.path().join("s2.csv");
    maur(&["simulate", "--q", "2", "--roots", "1,0.3", "--n", "100", "--seed", "42", "--out", p(&again)]);
    assert_eq!(text, std::fs::read_to_string(&again).unwrap());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(maur(&["simulate", "--bogus"]).status.code(), Some(1));
    assert_eq!(maur(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(maur(&[]).status.code(), Some(1));
    assert_eq!(maur(&["simulate", "--q", "1", "--roots", "1,0.3", "--n", "10"]).status.code(), Some(1));
    assert_eq!(maur(&["estimate", "--data", "/nonexistent.csv"]).status.code(), Some(1));
    assert_eq!(maur(&["mc", "table3", "--n", "3", "--reps", "5"]).status.code(), Some(1));
    assert_eq!(maur(&["--help"]).status.code(), Some(0));
}

#[test]
fn estimate_and_loglik_agree() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("s.csv");
    maur(&["simulate", "--q", "2", "--roots", "0.6,-0.2", "--n", "150", "--seed", "5", "--out", p(&data)]);
    let o = maur(&["estimate", "--data", p(&data)]);
    assert_eq!(o.status.code(), Some(0));
    let est: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let c: Vec<f64> = est["coeffs_hat"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let coeffs = format!("{},{}", c[0], c[1]);
    let o = maur(&["loglik", "--data", p(&data), "--coeffs", &coeffs]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let ll: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let a = est["loglik"].as_f64().unwrap();
    let b = ll["profile_loglik"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-9, "{a} {b}");
}

#[test]
fn test_subcommand_emits_json() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("s.csv");
    let crit = dir.path().join("ct.json");
    std::fs::write(&crit, CRIT).unwrap();
    maur(&["simulate", "--q", "2", "--roots", "0.5,-0.3", "--n", "200", "--seed", "11", "--out", p(&data)]);
    let o = maur(&["test", "glr", "--data", p(&data), "--level", "0.05", "--crit", p(&crit)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["method"], "GLR");
    assert_eq!(r["critical_value"], 1.96);
    assert_eq!(r["reject"], r["statistic"].as_f64().unwrap() > 1.96);
    assert_eq!(maur(&["test", "glr", "--data", p(&data), "--level", "0.1", "--crit", p(&crit)]).status.code(), Some(1));
}

#[test]
fn undefined_mle_test_is_numerical_failure() {
    let model = MaModel::from_roots(&RootSet::conjugate_pair(0.7, 1.2), 1.0).unwrap();
    let seed = (0..50)
        .find(|&s| fit_ma2(&simulate_ma(&model, 100, s).unwrap()).unwrap().root_kind == Some(RootKind::Complex))
        .expect("a complex-region fit");
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("s.csv");
    let crit = dir.path().join("ct.json");
    std::fs::write(&crit, CRIT).unwrap();
    simulate_ma(&model, 100, seed).unwrap().write_csv(std::fs::File::create(&data).unwrap()).unwrap();
    let o = maur(&["test", "mle", "--data", p(&data), "--crit", p(&crit)]);
    assert_eq!(o.status.code(), Some(2));
    // the likelihood ratio test stays defined
    assert_eq!(maur(&["test", "glr", "--data", p(&data), "--crit", p(&crit)]).status.code(), Some(0));
}

#[test]
fn mc_output_ignores_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec!["mc", "table8", "--reps", "40", "--n", "30,60", "--seed", "3", "--out"]
            .into_iter()
            .map(String::from)
            .chain([p(out).to_string()])
            .collect::<Vec<_>>()
    };
    let run = |out: &Path, threads: &str| {
        let args = args(out);
        let refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        maur_env(&refs, threads)
    };
    assert_eq!(run(&a, "1").status.code(), Some(0));
    assert_eq!(run(&b, "3").status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
}

#[test]
fn mc_table3_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t3.csv");
    let o = maur(&["mc", "table3", "--reps", "2000", "--n", "400", "--seed", "7", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let golden = include_str!("golden/table3_n400_seed7.csv");
    assert_eq!(std::fs::read_to_string(&out).unwrap(), golden);
}
