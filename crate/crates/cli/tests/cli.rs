use std::path::Path;
use std::process::{Command, Output};

const SQUARE: &str = r#"
[territory]
vertices = [[-10,-10],[10,-10],[10,10],[-10,10]]
[design]
n_stations = 1
station_restarts = 20
monitor_restarts = 8
ray_count = 90
[simulation]
episode_intruder_total = 4
concurrent_intruders = 2
[montecarlo]
runs = 2
"#;

fn pdefend(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdefend")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn design(dir: &Path, cfg: &str) -> String {
    let out = dir.join("design");
    let o = pdefend(&["design", "--config", cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.join("design.json").to_str().unwrap().to_owned()
}

#[test]
fn square_design_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SQUARE);
    let path = design(tmp.path(), &cfg);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["config_hash"].as_str().unwrap().len(), 64);
    assert!(json["n_monitors"].as_u64().unwrap() >= 1);
    assert!(json["rs_min"].as_f64().unwrap() <= 50.0);
    let regions = std::fs::read_to_string(tmp.path().join("design/regions.csv")).unwrap();
    for kind in ["territory", "priority", "monitoring", "critical", "station", "monitor"] {
        assert!(regions.contains(&format!(",{kind},")), "missing {kind}");
    }
}

#[test]
fn malformed_vertices_fail_naming_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[territory]\nvertices = [[0,0],[1,1],[2,2]]\n");
    let o = pdefend(&["design", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("territory.vertices"));
}

#[test]
fn unreachable_design_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SQUARE.replace("[design]", "[design]\nsensor_range = 0.5\nmonitor_cap = 2");
    let cfg = write_config(tmp.path(), &body);
    let o = pdefend(&["design", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("design failed"));
}

#[test]
fn simulate_is_reproducible_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SQUARE);
    let design = design(tmp.path(), &cfg);
    let run = |name: &str, seed: &str| {
        let out = tmp.path().join(name);
        let o = pdefend(&[
            "simulate", "--config", &cfg, "--design", &design, "--seed", seed, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (
            std::fs::read(out.join("summary.json")).unwrap(),
            std::fs::read(out.join("trace.jsonl")).unwrap(),
        )
    };
    let a = run("a", "7");
    let b = run("b", "7");
    let c = run("c", "8");
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
    let first = String::from_utf8(a.1).unwrap();
    assert!(first.lines().next().unwrap().contains("\"config_hash\""));
}

#[test]
fn zero_intruders_succeed() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SQUARE.replace("episode_intruder_total = 4", "episode_intruder_total = 0");
    let cfg = write_config(tmp.path(), &body);
    let design = design(tmp.path(), &cfg);
    let out = tmp.path().join("sim");
    let o = pdefend(&["simulate", "--config", &cfg, "--design", &design, "--strict", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["success"], true);
    assert_eq!(summary["captures"], 0);
}

#[test]
fn montecarlo_sweep_has_one_row_per_point() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SQUARE.replace("runs = 2", "runs = 1\nomegas = [0, 15, 30, 45]\nconcurrent = [6, 8, 10]")
        .replace("episode_intruder_total = 4", "episode_intruder_total = 1");
    let cfg = write_config(tmp.path(), &body);
    let design = design(tmp.path(), &cfg);
    let out = tmp.path().join("mc");
    let o = pdefend(&["montecarlo", "--config", &cfg, "--design", &design, "--jobs", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 24);
    assert!(sweep.lines().next().unwrap().starts_with("config_hash,baseline,omega_deg,m,"));
    let episodes = std::fs::read_to_string(out.join("episodes.csv")).unwrap();
    assert_eq!(episodes.lines().count(), 1 + 24);
    assert!(episodes.starts_with("config_hash,"));
}

#[test]
fn baseline_flag_restricts_the_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SQUARE.replace("runs = 2", "runs = 1\nomegas = [0]\nconcurrent = [2]");
    let cfg = write_config(tmp.path(), &body);
    let design = design(tmp.path(), &cfg);
    let out = tmp.path().join("mc");
    let o = pdefend(&[
        "montecarlo", "--config", &cfg, "--design", &design, "--baseline", "dream", "--predictor", "velocity",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 2);
    assert!(sweep.contains(",dream,"));
}
