//! End-to-end checks of the command-line interface: config files, flag
//! precedence, and error reporting.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pfgtd"))
}

#[test]
fn config_file_drives_a_run_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("exp.toml");
    std::fs::write(
        &config_path,
        r#"
env = "random-walk-tabular"
algo = "td"
alpha = 0.125
runs = 3
steps = 50
seed = 5
cadence = 10
"#,
    )
    .unwrap();

    let out_a = dir.path().join("a");
    let output = bin()
        .args(["run", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out_a)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_a.join("curves_random-walk-tabular_td.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["config"]["n_runs"], 3);
    assert_eq!(summary["config"]["alpha"], 0.125);
    assert_eq!(summary["config"]["seed_base"], 5);

    // A flag beats the file.
    let out_b = dir.path().join("b");
    let output = bin()
        .args(["run", "--config"])
        .arg(&config_path)
        .args(["--runs", "7", "--alpha", "0.5"])
        .arg("--out")
        .arg(&out_b)
        .output()
        .unwrap();
    assert!(output.status.success());
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_b.join("curves_random-walk-tabular_td.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["config"]["n_runs"], 7);
    assert_eq!(summary["config"]["alpha"], 0.5);
}

#[test]
fn outputs_do_not_depend_on_the_thread_pool_size() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run", "--env", "boyan", "--algo", "pfgtd+", "--runs", "6", "--steps", "200",
        "--cadence", "50", "--seed", "21",
    ];
    for (sub, threads) in [("one", "1"), ("many", "8")] {
        let out = dir.path().join(sub);
        let output = bin()
            .args(args)
            .arg("--out")
            .arg(&out)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    }
    for name in ["curves_boyan_pfgtd+.csv", "curves_boyan_pfgtd+.json"] {
        let a = std::fs::read(dir.path().join("one").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("many").join(name)).unwrap();
        assert_eq!(a, b, "{name} depends on the worker count");
    }
}

#[test]
fn unknown_names_fail_with_context() {
    let output = bin()
        .args(["run", "--env", "gridworld", "--algo", "pfgtd+"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("gridworld"), "stderr: {stderr}");

    let output = bin()
        .args(["run", "--env", "boyan", "--algo", "sarsa"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("sarsa"));
}

#[test]
fn rejected_config_keys_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    std::fs::write(&config_path, "env = \"boyan\"\nalgo = \"td\"\nlearning-rate = 0.1\n").unwrap();
    let output = bin().args(["run", "--config"]).arg(&config_path).output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("learning-rate"));
}

#[test]
fn dump_model_prints_json_to_stdout() {
    let output = bin().args(["dump-model", "--env", "random-walk-dependent"]).output().unwrap();
    assert!(output.status.success());
    let value: serde_json::Value =
        serde_json::from_slice(&output.stdout).expect("stdout should be JSON");
    for key in ["a", "b", "c", "theta_star", "xi", "lambda_max_m"] {
        assert!(value.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(value["environment"], "random-walk-dependent");
}

#[test]
fn dump_model_spec_flag_emits_the_environment_description() {
    let output = bin().args(["dump-model", "--env", "baird", "--spec"]).output().unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["n_states"], 7);
    assert_eq!(value["gamma"], 0.99);
    assert_eq!(value["sampling"], "iid");
    // The multi-scale stream has a description too.
    let output = bin().args(["dump-model", "--env", "multi-scale", "--spec"]).output().unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["gamma"], 0.9875);
}

#[test]
fn dump_model_lists_environments() {
    let output = bin().args(["dump-model", "--list"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    for name in ["baird", "boyan", "multi-scale"] {
        assert!(text.contains(name));
    }
}

#[test]
fn neu_objective_and_radius_flags_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "run",
            "--env",
            "random-walk-dependent",
            "--algo",
            "pfgtd",
            "--runs",
            "2",
            "--steps",
            "40",
            "--objective",
            "neu",
            "--radius",
            "7.5",
        ])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("curves_random-walk-dependent_pfgtd.json"))
            .unwrap(),
    )
    .unwrap();
    assert_eq!(summary["config"]["objective"], "neu");
    assert_eq!(summary["config"]["radius"], 7.5);
}
