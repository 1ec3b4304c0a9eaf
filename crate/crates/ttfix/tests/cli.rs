//! Runs the `ttfix` binary on the fixtures.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn ttfix(input: &str, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttfix"))
        .arg("--input")
        .arg(fixture(input))
        .args(extra)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fix_basis_text_and_json() {
    let o = ttfix("phi1.aut", &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "rank 2\na\nbaB\n");
    let o = ttfix("phi1.json", &["--format", "json", "--seed", "5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rank"], 2);
    assert!(v["core"]["edges"].as_u64().unwrap() > 0);
    assert_eq!(v["constants"]["c_star"], 1);
    let o = ttfix("phi2.json", &[]);
    assert_eq!(stdout(&o), "rank 0\n");
}

#[test]
fn other_modes() {
    let o = ttfix("phi2.aut", &["--mode", "validate"]);
    assert!(stdout(&o).starts_with("relative train track: ok"));
    let o = ttfix("phi2.aut", &["--mode", "areas", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["strata"][0]["areas"].as_array().unwrap().len(), 6);
    let o = ttfix("phi1.aut", &["--mode", "df-explore", "--mu", "b", "--depth", "2", "--format", "dot"]);
    assert!(stdout(&o).starts_with("digraph"));
    let o = ttfix("phi1.aut", &["--mode", "finiteness", "--mu", "a"]);
    assert!(stdout(&o).starts_with("finite (1 vertices)"));
    let o = ttfix("phi1.aut", &["--mode", "finiteness", "--mu", "b"]);
    assert!(stdout(&o).starts_with("infinite"));
    let o = ttfix("phi1.aut", &["--mode", "membership", "--mu", "b", "--tau", "baa"]);
    assert_eq!(stdout(&o), "member\n");
    let o = ttfix("twisted.json", &["--mode", "membership", "--mu", "1_0", "--tau", "1_0", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn exit_codes() {
    assert_eq!(ttfix("bad/no_inverse.aut", &[]).status.code(), Some(2));
    let o = ttfix("bad/bad_letter.aut", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(ttfix("bad/not_train_track.aut", &[]).status.code(), Some(3));
    assert_eq!(ttfix("phi1.aut", &["--mode", "finiteness"]).status.code(), Some(2));
    assert_eq!(ttfix("phi1.aut", &["--mode", "membership", "--mu", "b", "--tau", "bz"]).status.code(), Some(2));
}
