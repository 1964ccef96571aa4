use std::process::{Command, Output};

fn uscm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uscm")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(out: &str, name: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{name} = ")))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn eval_prints_named_quantities() {
    let o = uscm(&["eval", "--g", "0.5", "--delta", "0.5"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(value(&s, "omega_minus"), 0.5f64.sqrt());
    assert_eq!(value(&s, "snr_amplitude"), 9.0);
    assert!(s.contains("status = ok"));
}

#[test]
fn flags_win_over_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# point\nmodel = dicke\ng = 0.9\ndelta = 0.5\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&uscm(&["eval", "--config", cfg]));
    assert_eq!(value(&from_file, "g_over_gc"), 0.9);
    let overridden = stdout(&uscm(&["eval", "--config", cfg, "--g", "0.3"]));
    assert_eq!(value(&overridden, "g_over_gc"), 0.3);
    assert_eq!(value(&overridden, "snr_amplitude"), value(&stdout(&uscm(&["eval", "--g", "0.3", "--delta", "0.5"])), "snr_amplitude"));
}

#[test]
fn sweep_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = uscm(&[
        "sweep",
        "--model",
        "rabi",
        "--range",
        "one_minus_g_over_gc:1e-3:1e-1:3:log",
        "--t",
        "2",
        "--xi-r",
        "-0.5",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
    assert_eq!(doc["spec"]["model"], "rabi");
    assert!(doc.get("generated_unix").is_some());

    let o = uscm(&["sweep", "--range", "g_over_gc:0:0.5:2", "--no-timestamp"]);
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 3);
    assert!(s.starts_with("g_over_gc,"));
}

#[test]
fn beyond_threshold_points_are_flagged_not_fatal() {
    let o = uscm(&["sweep", "--range", "g_over_gc:0.5:1.5:3", "--no-timestamp"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let last = s.lines().last().unwrap();
    assert!(last.ends_with(",beyond_threshold"), "{last}");
    assert!(last.contains(",,"));
}

#[test]
fn exit_codes() {
    assert_eq!(uscm(&["figure", "fig7"]).status.code(), Some(1));
    assert_eq!(uscm(&["sweep", "--range", "g_over_gc:0.5:0.1:3"]).status.code(), Some(1));
    assert_eq!(uscm(&["sweep", "--range", "kappa:1:2:2", "--model", "rabi"]).status.code(), Some(1));
    assert_eq!(uscm(&["eval", "--bogus"]).status.code(), Some(1));
    assert_eq!(uscm(&["eval", "--config", "/nonexistent/run.conf"]).status.code(), Some(3));
    assert_eq!(uscm(&["sweep", "--range", "g:0:0.5:2", "--out", "/nonexistent/dir/x.csv"]).status.code(), Some(3));
    assert_eq!(uscm(&["--help"]).status.code(), Some(0));
}

#[test]
fn validate_reports_and_detects_convention_flip() {
    let o = uscm(&["validate", "--quick"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("overall: PASS"));
    let o = uscm(&["validate", "--quick", "--vacuum-variance", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("FAIL squeeze_orientation")));
    assert_eq!(uscm(&["validate", "--tol", "nonsense=1"]).status.code(), Some(1));
}

#[test]
fn validate_normal_mode_gap_deviation() {
    let o = uscm(&["validate", "--json"]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let gap = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "normal_mode_gap").unwrap();
    assert!(gap["deviation"].as_f64().unwrap() <= 1e-8);
    assert_eq!(r["passed"], true);
}
