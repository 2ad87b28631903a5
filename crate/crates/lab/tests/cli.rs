//! End-to-end CLI checks: subcommands, exit codes, config validation, and
//! one smoke run per experiment kind.

use std::fs;
use std::process::Command;

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_ergolab")
}

fn write_cfg(dir: &std::path::Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn version_and_list_systems() {
    let out = Command::new(exe()).arg("version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ergolab "));

    let out = Command::new(exe()).arg("list-systems").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["cantor", "bernoulli", "farey-induced", "binary-lebesgue"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn validate_accepts_a_good_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "good.json",
        r#"{
          "system": {"name": "bernoulli", "params": {"p": [0.5, 0.5]}},
          "kind": "hsv-bound",
          "seed": 1,
          "output": {"csv": "out.csv", "summary": "out.json"},
          "params": {"target_depths": [1, 2]}
        }"#,
    );
    let out = Command::new(exe()).arg("validate").arg(&cfg).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        // Malformed JSON.
        "{not json",
        // Unknown top-level key.
        r#"{"system": {"name": "cantor"}, "kind": "pressure", "seed": 1,
            "output": {"csv": "a", "summary": "b"}, "extra": 1}"#,
        // Unknown kind.
        r#"{"system": {"name": "cantor"}, "kind": "mystery", "seed": 1,
            "output": {"csv": "a", "summary": "b"}}"#,
        // Unknown system.
        r#"{"system": {"name": "not-a-system"}, "kind": "pressure", "seed": 1,
            "output": {"csv": "a", "summary": "b"}}"#,
        // Unknown kind-parameter key.
        r#"{"system": {"name": "cantor"}, "kind": "thin-annuli", "seed": 1,
            "output": {"csv": "a", "summary": "b"},
            "params": {"points": 2, "scale_base": 3.0, "j_min": 4, "j_max": 5,
                       "kappa": {"constant": 3.0}, "bogus": true}}"#,
        // Out-of-range numeric.
        r#"{"system": {"name": "cantor"}, "kind": "thin-annuli", "seed": 1,
            "output": {"csv": "a", "summary": "b"},
            "params": {"points": 0, "scale_base": 3.0, "j_min": 4, "j_max": 5,
                       "kappa": {"constant": 3.0}}}"#,
        // Kappa with both forms.
        r#"{"system": {"name": "cantor"}, "kind": "thin-annuli", "seed": 1,
            "output": {"csv": "a", "summary": "b"},
            "params": {"points": 2, "scale_base": 3.0, "j_min": 4, "j_max": 5,
                       "kappa": {"constant": 3.0,
                                 "log_power": {"alpha": 1.0, "beta": 2.0}}}}"#,
    ];
    for (i, body) in cases.iter().enumerate() {
        let cfg = write_cfg(dir.path(), &format!("bad{i}.json"), body);
        let out = Command::new(exe()).arg("validate").arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "case {i}: {body}");
    }
}

#[test]
fn missing_config_file_is_an_io_error() {
    let out = Command::new(exe())
        .arg("run")
        .arg("/nonexistent/nowhere.json")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "cfg.json",
        r#"{
          "system": {"name": "cantor"},
          "kind": "pressure",
          "seed": 1,
          "output": {"csv": "/proc/definitely/not/writable.csv",
                     "summary": "/proc/definitely/not/writable.json"}
        }"#,
    );
    let out = Command::new(exe()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn smoke_run_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().display();
    let configs = [
        (
            "pressure",
            format!(
                r#"{{"system": {{"name": "two-ratio"}}, "kind": "pressure", "seed": 1,
                    "output": {{"csv": "{base}/p.csv", "summary": "{base}/p.json"}}}}"#
            ),
        ),
        (
            "hsv-bound",
            format!(
                r#"{{"system": {{"name": "golden-parry"}}, "kind": "hsv-bound", "seed": 1,
                    "output": {{"csv": "{base}/h.csv", "summary": "{base}/h.json"}},
                    "params": {{"target_depths": [1, 2]}}}}"#
            ),
        ),
        (
            "entry-law",
            format!(
                r#"{{"system": {{"name": "bernoulli", "params": {{"p": [0.5, 0.5]}}}},
                    "kind": "entry-law", "seed": 4,
                    "output": {{"csv": "{base}/e.csv", "summary": "{base}/e.json"}},
                    "params": {{"target": {{"word": [0, 1]}}, "samples": 400}}}}"#
            ),
        ),
        (
            "return-law",
            format!(
                r#"{{"system": {{"name": "binary-lebesgue"}}, "kind": "return-law", "seed": 4,
                    "output": {{"csv": "{base}/r.csv", "summary": "{base}/r.json"}},
                    "params": {{"target": {{"ball": {{"center": 0.375, "radius": 0.03125}}}},
                                "samples": 200}}}}"#
            ),
        ),
        (
            "thin-annuli",
            format!(
                r#"{{"system": {{"name": "cantor"}}, "kind": "thin-annuli", "seed": 2,
                    "output": {{"csv": "{base}/t.csv", "summary": "{base}/t.json"}},
                    "params": {{"points": 3, "scale_base": 3.0, "j_min": 5, "j_max": 7,
                                "kappa": {{"constant": 3.0}}}}}}"#
            ),
        ),
        (
            "doubling",
            format!(
                r#"{{"system": {{"name": "cantor"}}, "kind": "doubling", "seed": 2,
                    "output": {{"csv": "{base}/db.csv", "summary": "{base}/db.json"}},
                    "params": {{"points": 3, "j_min": 6, "j_max": 9, "epsilon": 0.5}}}}"#
            ),
        ),
        (
            "bad-radii",
            format!(
                r#"{{"system": {{"name": "binary-lebesgue"}}, "kind": "bad-radii", "seed": 2,
                    "output": {{"csv": "{base}/br.csv", "summary": "{base}/br.json"}},
                    "params": {{"a": 0.01, "kappa": {{"constant": 3.0}},
                                "j_min": 4, "j_max": 10}}}}"#
            ),
        ),
        (
            "dimension",
            format!(
                r#"{{"system": {{"name": "cantor"}}, "kind": "dimension", "seed": 2,
                    "output": {{"csv": "{base}/dm.csv", "summary": "{base}/dm.json"}},
                    "params": {{"at": [0.0], "scale_base": 3.0, "j_min": 4, "j_max": 10}}}}"#
            ),
        ),
        (
            "parabolic-asymptotics",
            format!(
                r#"{{"system": {{"name": "farey-induced"}}, "kind": "parabolic-asymptotics",
                    "seed": 2,
                    "output": {{"csv": "{base}/pa.csv", "summary": "{base}/pa.json"}},
                    "params": {{"n_list": [1, 10, 100, 1000]}}}}"#
            ),
        ),
    ];
    for (kind, body) in &configs {
        let cfg = write_cfg(dir.path(), &format!("{kind}.json"), body);
        let out = Command::new(exe()).arg("run").arg(&cfg).output().unwrap();
        assert!(
            out.status.success(),
            "{kind}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    // Every run left both outputs with a header and at least one row.
    for f in ["p.csv", "h.csv", "e.csv", "r.csv", "t.csv", "db.csv", "br.csv", "dm.csv", "pa.csv"]
    {
        let text = fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(text.lines().count() >= 2, "{f} has no rows");
    }
    // Summaries parse back as JSON and echo the config.
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(summary["kind"], "thin-annuli");
    assert_eq!(summary["config"]["system"]["name"], "cantor");
    assert!(summary["version"].is_string());
}

#[test]
fn claim_failures_still_exit_zero() {
    // A periodic system fails the exponential-law claim; that is data, not
    // an error.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "cycle.json",
        &format!(
            r#"{{"system": {{"name": "two-state-cycle"}}, "kind": "return-law", "seed": 5,
                "output": {{"csv": "{0}/c.csv", "summary": "{0}/c.json"}},
                "params": {{"target": {{"word": [0]}}, "samples": 100}}}}"#,
            dir.path().display()
        ),
    );
    let out = Command::new(exe()).arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let ks: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(7)
        .unwrap()
        .parse()
        .unwrap();
    assert!(ks > 0.6, "periodic control should fail the law, ks = {ks}");
}
