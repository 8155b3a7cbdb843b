use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_offlinemania"))
        .args(args)
        .current_dir(dir)
        .env_remove("OMD_TRACK_PATH")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn unknown_policy_exits_with_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let o = cli(&["evaluate", "--policy", "nope"], d.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown policy"));
}

#[test]
fn bad_flags_exit_with_usage_error() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["evaluate", "--episodes", "x"], d.path()).status.code(), Some(1));
    assert_eq!(cli(&["no-such-verb"], d.path()).status.code(), Some(1));
    assert_eq!(cli(&["--help"], d.path()).status.code(), Some(0));
}

#[test]
fn evaluate_expert_json() {
    let d = tempfile::tempdir().unwrap();
    let o = cli(&["evaluate", "--policy", "expert", "--episodes", "5", "--seed", "0", "--json"], d.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mean = v["mean_return"].as_f64().unwrap();
    assert!((1065.0..=1301.0).contains(&mean), "{mean}");
    assert!(v["mean_laps"].as_f64().unwrap() >= 5.0);
    assert_eq!(v["seeds"], serde_json::json!([0, 1, 2, 3, 4]));
}

#[test]
fn rollout_replay_and_render() {
    let d = tempfile::tempdir().unwrap();
    assert!(cli(&["rollout", "--policy", "basic", "--seed", "3", "--out", "t.json"], d.path()).status.success());
    let o = cli(&["verify-replay", "t.json"], d.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(cli(&["render-replay", "t.json", "--out", "t.svg"], d.path()).status.success());
    let svg = std::fs::read_to_string(d.path().join("t.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("class=\"wall\"") && svg.contains("class=\"centerline\""));
    assert!(svg.contains("<circle"), "basic should touch a wall at least once");

    // Tampering with one reward is caught.
    let text = std::fs::read_to_string(d.path().join("t.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["steps"][10]["reward"] = serde_json::json!(123.0);
    std::fs::write(d.path().join("bad.json"), v.to_string()).unwrap();
    assert_eq!(cli(&["verify-replay", "bad.json"], d.path()).status.code(), Some(3));
}

#[test]
fn empty_trajectory_is_a_format_error() {
    let d = tempfile::tempdir().unwrap();
    let o = cli(&["rollout", "--policy", "random", "--out", "t.json"], d.path());
    assert!(o.status.success());
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("t.json")).unwrap()).unwrap();
    v["steps"] = serde_json::json!([]);
    std::fs::write(d.path().join("empty.json"), v.to_string()).unwrap();
    let o = cli(&["render-replay", "empty.json", "--out", "x.svg"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("format"));
    std::fs::write(d.path().join("junk.json"), "").unwrap();
    assert_eq!(cli(&["render-replay", "junk.json", "--out", "x.svg"], d.path()).status.code(), Some(2));
}

#[test]
fn validate_track_accepts_canonical_and_rejects_pinch() {
    let d = tempfile::tempdir().unwrap();
    let good = offlinemania::track::CANONICAL_TRACK_JSON;
    std::fs::write(d.path().join("good.json"), good).unwrap();
    assert!(cli(&["validate-track", "good.json"], d.path()).status.success());

    let mut v: serde_json::Value = serde_json::from_str(good).unwrap();
    v["half_width"] = serde_json::json!(10.0);
    std::fs::write(d.path().join("pinched.json"), v.to_string()).unwrap();
    assert_eq!(cli(&["validate-track", "pinched.json"], d.path()).status.code(), Some(3));

    std::fs::write(d.path().join("broken.json"), "{").unwrap();
    assert_eq!(cli(&["validate-track", "broken.json"], d.path()).status.code(), Some(2));
}

#[test]
fn bench_with_zero_steps_is_empty() {
    let d = tempfile::tempdir().unwrap();
    let o = cli(&["bench", "--n-envs", "4", "--n-steps", "0", "--json"], d.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["single_steps_per_sec"].is_null() && v["batched_steps_per_sec"].is_null());
}

#[test]
fn dataset_verbs() {
    let d = tempfile::tempdir().unwrap();
    for (p, seed) in [("basic", "1"), ("expert", "2")] {
        let out = format!("{p}.omd");
        let o = cli(&["gen-dataset", "--policy", p, "--n", "3000", "--seed", seed, "--out", &out], d.path());
        assert!(o.status.success());
    }
    let o = cli(
        &["mix-dataset", "--input", "basic.omd", "--input", "expert.omd", "--ratios", "0.9,0.1", "--total", "1000", "--out", "m.omd"],
        d.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = cli(&["inspect-dataset", "m.omd", "--json"], d.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 1000);
    assert_eq!(v["provenance"][0]["count"], 900);
    assert_eq!(v["provenance"][1]["policy"], "expert");

    let o = cli(
        &["mix-dataset", "--input", "basic.omd", "--ratios", "0.5", "--total", "10", "--out", "x.omd"],
        d.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = cli(
        &["mix-dataset", "--input", "basic.omd", "--ratios", "1.0", "--total", "5000", "--out", "x.omd"],
        d.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("quota"));

    let bytes = std::fs::read(d.path().join("basic.omd")).unwrap();
    std::fs::write(d.path().join("cut.omd"), &bytes[..bytes.len() - 10]).unwrap();
    let o = cli(&["inspect-dataset", "cut.omd"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncated"));
}

#[test]
fn track_override_by_environment() {
    let d = tempfile::tempdir().unwrap();
    let track = r#"{"version":"1","name":"ring","half_width":6.0,
        "start_area":{"center":[0,0],"size_m":8,"heading_offset_deg_range":[-30,30]},
        "centerline":[[-40,0],[40,0],[52,4],[58,15],[52,26],[40,30],[-40,30],[-52,26],[-58,15],[-52,4]]}"#;
    std::fs::write(d.path().join("ring.json"), track).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_offlinemania"))
        .args(["evaluate", "--policy", "basic", "--episodes", "1", "--json"])
        .current_dir(d.path())
        .env("OMD_TRACK_PATH", d.path().join("ring.json"))
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["env_version"].as_str().unwrap().starts_with("ring+"));
}
