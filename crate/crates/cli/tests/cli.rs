use std::process::{Command, Output};

fn soulcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soulcheck")).args(args).output().expect("binary runs")
}

#[test]
fn passing_suite_exits_zero() {
    let out = soulcheck(&["verify", "soul-curv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass"));
}

#[test]
fn sos_discrepancy_exits_three() {
    let out = soulcheck(&["verify", "sos-residual", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("discrepancy"));
}

#[test]
fn unknown_suite_is_usage_error() {
    let out = soulcheck(&["verify", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn bad_flag_is_usage_error() {
    assert_eq!(soulcheck(&["verify", "soul-curv", "--format", "yaml"]).status.code(), Some(2));
    assert_eq!(soulcheck(&["verify", "soul-curv", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn json_has_stable_keys() {
    let out = soulcheck(&["verify", "kf-identity", "--samples", "2000", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    let entry = &value.as_array().expect("array")[0];
    let text = String::from_utf8_lossy(&out.stdout);
    let positions: Vec<usize> = ["\"id\"", "\"status\"", "\"max_error\"", "\"samples\"", "\"notes\""]
        .iter()
        .map(|k| text.find(k).expect("key present"))
        .collect();
    assert!(positions.windows(2).all(|p| p[0] < p[1]), "key order {positions:?}");
    assert_eq!(entry.as_object().expect("object").len(), 5);
    assert_eq!(entry["id"], "kf-identity");
    assert_eq!(entry["status"], "pass");
    assert_eq!(entry["samples"], 2000);
}

#[test]
fn output_is_deterministic() {
    let args = ["scan", "--seed", "7", "--samples", "25000", "--format", "json"];
    let a = soulcheck(&args);
    let b = soulcheck(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn jobs_do_not_change_results() {
    let one = soulcheck(&["scan", "--seed", "3", "--samples", "25000", "--jobs", "1", "--format", "json"]);
    let four = soulcheck(&["scan", "--seed", "3", "--samples", "25000", "--jobs", "4", "--format", "json"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn seed_changes_results() {
    let a = soulcheck(&["verify", "dr-nabla", "--seed", "1", "--samples", "4", "--format", "json"]);
    let b = soulcheck(&["verify", "dr-nabla", "--seed", "2", "--samples", "4", "--format", "json"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("soulcheck-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("result.txt");
    let out = soulcheck(&["verify", "clutching", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("clutching"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn list_names_every_suite() {
    let out = soulcheck(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for id in ["kf-identity", "nonnegativity", "holonomy", "vanishing"] {
        assert!(text.contains(id));
    }
}
