use assert_cmd::Command;
use predicates::prelude::*;

fn bsfe() -> Command {
    let mut cmd = Command::cargo_bin("bsfe").unwrap();
    cmd.env_remove("BSFE_SEED");
    cmd
}

#[test]
fn run_ot_reports_derived_qubit_count() {
    bsfe()
        .args(["run-ot", "--l", "8", "--s", "32", "--seed", "7", "--out", "-"])
        .assert()
        .success()
        .stdout(predicate::str::contains("m         384"))
        .stdout(predicate::str::contains("exact     10"));
}

#[test]
fn same_argv_and_seed_give_identical_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for name in ["a.jsonl", "b.jsonl"] {
        let path = dir.path().join(name);
        bsfe()
            .args(["run-ot", "--l", "8", "--s", "32", "--seed", "7"])
            .args(["--out", path.to_str().unwrap()])
            .assert()
            .success();
        outs.push(std::fs::read(path).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    assert!(!outs[0].is_empty());
}

#[test]
fn transcript_lines_carry_version_and_tick() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    bsfe()
        .args(["run-ot", "--trials", "2", "--seed", "1", "--out", path.to_str().unwrap()])
        .assert()
        .success();
    for line in std::fs::read_to_string(path).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["v"], 1);
        assert!(v["t"].is_u64());
        assert!(v["ev"].is_string());
    }
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg");
    std::fs::write(&path, "frobnicate=1\n").unwrap();
    bsfe()
        .args(["run-ot", "--config", path.to_str().unwrap()])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("unknown key `frobnicate`"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg");
    std::fs::write(&path, "l=8\ns=32\ntrials=3\n").unwrap();
    bsfe()
        .args(["run-ot", "--config", path.to_str().unwrap(), "--trials", "5", "--out", "-"])
        .assert()
        .success()
        .stdout(predicate::str::contains("trials    5"));
}

#[test]
fn env_seed_is_the_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    bsfe()
        .env("BSFE_SEED", "9")
        .args(["run-ot", "--out", a.to_str().unwrap()])
        .assert()
        .success();
    bsfe()
        .args(["run-ot", "--seed", "9", "--out", b.to_str().unwrap()])
        .assert()
        .success();
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn attack_emits_experiment_record() {
    bsfe()
        .args(["attack", "ot-sender", "--strategy", "fixed-basis", "--trials", "50"])
        .args(["--seed", "3", "--out", "-"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"ev\":\"experiment_result\""))
        .stdout(predicate::str::contains("estimate"));
}

#[test]
fn bad_subcommand_is_a_usage_error() {
    bsfe().arg("run-nothing").assert().code(1);
}

#[test]
fn circuit_file_is_parsed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.circ");
    std::fs::write(&path, "in 3\ng0 = AND x0 x1\ng1 = XOR g0 x2\nout g1\n").unwrap();
    bsfe()
        .args(["run-otp", "--circuit", path.to_str().unwrap(), "--seed", "4", "--out", "-"])
        .assert()
        .success()
        .stdout(predicate::str::contains("exact     true"));
}

#[test]
fn selftest_passes() {
    bsfe()
        .args(["selftest", "--out", "-"])
        .assert()
        .success()
        .stdout(predicate::str::contains("pass"));
}
