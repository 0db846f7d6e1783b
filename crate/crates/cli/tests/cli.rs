use std::path::Path;
use std::process::{Command, Output};

fn pamcts(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pamcts"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

const SPEC: &str = r#"
[environment]
kind = "frozen-lake"
[environment.time0]
width = 3
height = 3
start = 0
goal = 8
holes = [1, 6]
slip = [1.0, 0.0, 0.0]
[environment.time_t]
width = 3
height = 3
start = 0
goal = 8
holes = [1, 6]
slip = [0.6, 0.2, 0.2]

[agent]
kind = "pamcts"
alpha = "auto-sweep"
[agent.sweep]
iterations = 20
episodes = 5

[search]
iterations = 50

[run]
episodes = 4
master_seed = 5
output = "out.csv"
"#;

#[test]
fn subcommands_work_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spec.toml"), SPEC).unwrap();

    let solve = pamcts(&["solve", "-c", "spec.toml", "-o", "stale.json"], dir.path());
    assert!(solve.status.success(), "{}", String::from_utf8_lossy(&solve.stderr));
    let artifact: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("stale.json")).unwrap()).unwrap();
    assert_eq!(artifact["provenance"]["method"], "value-iteration");

    let run = pamcts(&["run", "-c", "spec.toml"], dir.path());
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(rows[0]["n"], 4);
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    let summary = pamcts(&["summarize", "out.csv"], dir.path());
    assert!(summary.status.success());
    assert_eq!(serde_json::from_slice::<serde_json::Value>(&summary.stdout).unwrap(), rows);

    let sweep = pamcts(&["sweep-alpha", "-c", "spec.toml"], dir.path());
    assert!(sweep.status.success());
    let sweep: serde_json::Value = serde_json::from_slice(&sweep.stdout).unwrap();
    assert_eq!(sweep["per_alpha"].as_array().unwrap().len(), 5);

    let bounds = pamcts(&["verify-bounds", "--suite", "value-gap", "--trials", "20", "--strict"], dir.path());
    assert!(bounds.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&bounds.stdout).unwrap();
    assert_eq!(reports[0]["violations"], 0);
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), SPEC.replace("episodes = 4", "episodes = 0")).unwrap();
    let out = pamcts(&["run", "-c", "bad.toml"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("episodes"));
    assert!(!pamcts(&["summarize", "missing.csv"], dir.path()).status.success());
}
