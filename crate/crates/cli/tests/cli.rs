use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const HEADER: &str = "run_id,algorithm,adversary,T,n,S,c,delta,seed,regret,switches,epochs";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_switchbench"));
    cmd.env_remove("SWITCHBENCH_SEED");
    cmd
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run_with(config: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg("--config").arg(config).args(extra).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const MFPL: &str = "algorithm = mfpl\nadversary = iid_bernoulli\nT = 200\nn = 4\nepsilon = 0.1\nreplications = 10\nseed = 7\n";

#[test]
fn run_emits_one_row_per_replication() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "a.cfg", MFPL);
    let out = run_with(&cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 10);
    for (i, row) in rows.iter().enumerate() {
        assert!(row.starts_with(&format!("{i},mfpl,iid_bernoulli,200,4,")), "{row}");
    }
    assert!(text.contains("# replications=10"));
}

#[test]
fn missing_required_key_exits_2_naming_it() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "b.cfg", "algorithm = bmfpl\nadversary = iid_bernoulli\nT = 50\nn = 3\n");
    let out = run_with(&cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("delta"), "{}", stderr(&out));
}

#[test]
fn unknown_key_and_bad_override_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.cfg", MFPL);
    let out = run_with(&cfg, &["--param", "epsilon_typo=3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("epsilon_typo"));
    let out = run_with(&cfg, &["--param", "epsilon"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "d.cfg", MFPL);
    let a = run_with(&cfg, &[]);
    let b = run_with(&cfg, &[]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn serial_and_parallel_outputs_match() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "e.cfg",
        "algorithm = pfe_budget\nadversary = mrw\nT = 400\nn = 4\nS = 12\ndelta = 0.1\nreplications = 24\n",
    );
    let serial = dir.path().join("serial.csv");
    let parallel = dir.path().join("parallel.csv");
    let a = run_with(&cfg, &["--jobs", "1", "--out", serial.to_str().unwrap()]);
    let b = run_with(&cfg, &["--jobs", "8", "--out", parallel.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(b.status.code(), Some(0), "{}", stderr(&b));
    assert!(a.stdout.is_empty());
    assert_eq!(fs::read(serial).unwrap(), fs::read(parallel).unwrap());
}

#[test]
fn seed_precedence_flag_over_env_over_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "f.cfg", MFPL);
    let file = stdout(&run_with(&cfg, &[]));
    let env = bin()
        .env("SWITCHBENCH_SEED", "99")
        .args(["run", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    let flag = bin()
        .env("SWITCHBENCH_SEED", "99")
        .args(["run", "--seed", "99", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    let plain_flag = stdout(&run_with(&cfg, &["--seed", "99"]));
    assert_ne!(file, stdout(&env));
    assert_eq!(stdout(&env), stdout(&flag));
    assert_eq!(stdout(&flag), plain_flag);
    let bad = bin()
        .env("SWITCHBENCH_SEED", "not-a-number")
        .args(["run", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn json_output_has_config_rows_and_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "g.cfg", MFPL);
    let out = run_with(&cfg, &["--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
    assert_eq!(v["summary"]["replications"], 10);
    assert_eq!(v["config"]["algorithm"], "mfpl");
    assert!(v.get("elapsed").is_none());
}

#[test]
fn sweep_needs_three_increasing_points() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "h.cfg", "algorithm = ftl\nadversary = alternating\nT = 11\nn = 2\nreplications = 2\n");
    let short = bin()
        .args(["sweep", "--config", cfg.to_str().unwrap(), "--param", "T", "--grid", "11,21"])
        .output()
        .unwrap();
    assert_eq!(short.status.code(), Some(2));
    assert!(stderr(&short).contains("grid"));
    let unordered = bin()
        .args(["sweep", "--config", cfg.to_str().unwrap(), "--param", "T", "--grid", "21,11,41"])
        .output()
        .unwrap();
    assert_eq!(unordered.status.code(), Some(2));
    let ok = bin()
        .args(["sweep", "--config", cfg.to_str().unwrap(), "--param", "T", "--grid", "11,21,41"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let text = stdout(&ok);
    // FTL on the alternating game loses (T - 1)/2 more than the best action
    assert!(text.contains("\n11,5,"), "{text}");
    assert!(text.contains("\n41,20,"), "{text}");
    assert!(text.contains("# slope="));
}

#[test]
fn verify_binomial_passes_and_rejects_bad_r() {
    let ok = bin().args(["verify", "--suite", "binomial"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4, "{text}");
    let bad = bin().args(["verify", "--suite", "binomial", "--param", "r=3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("`r`"));
}

#[test]
fn verify_small_suites_pass() {
    let out = bin()
        .args(["verify", "--suite", "btl", "--param", "instances=200", "--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = bin()
        .args(["verify", "--suite", "fpl", "--param", "runs=90", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["checks"].as_array().unwrap().len(), 18);
}

#[test]
fn list_shows_every_id() {
    let out = bin().arg("list").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for id in [
        "ftl", "mfpl", "pr", "sd", "lagged_mfpl", "bmfpl", "bpr", "pfe_budget_high", "pfe_budget_low", "pfe_budget",
        "exp3p", "batched_exp3p", "exp3p_switching_cost", "uniform_bandit", "cpr", "bcpr", "iid_bernoulli",
        "batched_bernoulli", "alternating", "sd_tail", "follow_punisher", "mrw", "gap_bernoulli",
    ] {
        assert!(text.lines().any(|l| l.trim_start().starts_with(&format!("{id} "))), "{id} missing");
    }
}

#[test]
fn io_errors_exit_3() {
    let missing = bin().args(["run", "--config", "/nonexistent/x.cfg"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(3));
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "i.cfg", MFPL);
    let out = run_with(&cfg, &["--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bin().arg("bogus").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["run"]).output().unwrap().status.code(), Some(2));
    assert_eq!(
        bin().args(["verify", "--suite", "nope"]).output().unwrap().status.code(),
        Some(2)
    );
}
