//! End-to-end checks of the command-line surface: exit codes, file formats,
//! and validation behavior.

use std::process::{Command, Output};

fn qtss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn deal_writes_shares_and_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shares.json");
    let out = qtss(&[
        "deal", "--d", "7", "--t", "2", "--n", "4", "--seed", "9", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["d"], 7);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["shares"].as_array().unwrap().len(), 4);
    // private value withheld without --unsafe-dump
    assert!(v.get("private_value").is_none());

    let out = qtss(&["deal", "--d", "7", "--t", "2", "--n", "4", "--seed", "9", "--unsafe-dump"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["private_value"].is_u64());
}

#[test]
fn deal_rejects_t_above_n() {
    let out = qtss(&["deal", "--d", "7", "--t", "5", "--n", "4"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn run_default_config_accepts() {
    let out = qtss(&["run", "--seed", "1"]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "accepted");
    assert_eq!(v["recovered"][0], 3);
    assert_eq!(v["recovered"][1], 2);
}

#[test]
fn run_m_below_t_refused_at_validation() {
    let out = qtss(&["run", "--d", "7", "--t", "3", "--n", "4", "--m", "2", "--seed", "1"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn run_corrupt_participant_mostly_rejected() {
    // (d-1)/d = 6/7 of seeds reject with exit 3
    let mut rejected = 0;
    for seed in 0..40 {
        let out = qtss(&[
            "run", "--d", "7", "--corrupt-participant", "1", "--seed", &seed.to_string(),
        ]);
        match exit_code(&out) {
            3 => rejected += 1,
            0 => {}
            other => panic!("unexpected exit {other}"),
        }
    }
    assert!(rejected >= 25, "only {rejected}/40 rejected");
}

#[test]
fn attack_exhaustive_d3_rational_rates() {
    let out = qtss(&[
        "attack", "--strategy", "intercept-resend", "--d", "3", "--t", "1", "--n", "2",
        "--m", "1", "--s1", "2", "--s2", "1", "--exhaustive",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // 4/9 of the 81 weighted branches are detected
    assert_eq!(v["detected"], 36);
    assert_eq!(v["total"], 81);
}

#[test]
fn attack_zero_trials_rejected() {
    let out = qtss(&["attack", "--strategy", "lying-measurer", "--trials", "0"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn attack_unknown_strategy_rejected() {
    let out = qtss(&["attack", "--strategy", "replay"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn attack_csv_mirrors_json_fields() {
    let out = qtss(&[
        "attack", "--strategy", "fake-share", "--d", "7", "--trials", "200", "--seed", "4",
        "--format", "csv",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("strategy,d,t,n,m,trials,detected"));
    assert!(lines.next().unwrap().starts_with("fake-share,7,"));
}

#[test]
fn properties_pass_and_perturb_fails() {
    let out = qtss(&["properties", "--d", "3,5"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));

    let out = qtss(&["properties", "--d", "3", "--perturb"]);
    assert_eq!(exit_code(&out), 5);
}
