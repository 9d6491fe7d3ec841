use std::path::Path;
use std::process::Command;

use darisa::experiments::{Experiment, ScenarioConfig};

fn darisa(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_darisa"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("DARISA_SEED")
        .output()
        .expect("binary runs")
}

#[test]
fn shipped_scenarios_load_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 6);
}

#[test]
fn presets_round_trip_through_toml() {
    for e in Experiment::ALL {
        let cfg = ScenarioConfig::preset(e);
        let text = cfg.to_toml_string().unwrap();
        let back = ScenarioConfig::from_toml_str(&text).unwrap();
        assert_eq!(back.to_toml_string().unwrap(), text, "{}", e.name());
    }
}

#[test]
fn predict_writes_csv_and_json() {
    let out = tempfile::tempdir().unwrap();
    let res = darisa(&["predict"], out.path());
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(out.path().join("predict.csv")).unwrap();
    assert!(csv.lines().count() == 2);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("predict.json")).unwrap()).unwrap();
    assert_eq!(json["experiment"], "predict");
}

#[test]
fn bad_config_gives_json_error_record() {
    let out = tempfile::tempdir().unwrap();
    let scenario = out.path().join("bad.toml");
    std::fs::write(&scenario, "trials = 0\n").unwrap();
    let res = darisa(&["edof-agility", "--config", scenario.to_str().unwrap()], out.path());
    assert_eq!(res.status.code(), Some(1));
    let record: serde_json::Value = serde_json::from_slice(&res.stderr).unwrap();
    assert_eq!(record["error"], "config");
    assert_eq!(record["verb"], "edof-agility");
    assert!(record["message"].as_str().unwrap().contains("trials"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let out = tempfile::tempdir().unwrap();
    let scenario = out.path().join("typo.toml");
    std::fs::write(&scenario, "trails = 3\n").unwrap();
    let res = darisa(&["predict", "--config", scenario.to_str().unwrap()], out.path());
    assert_eq!(res.status.code(), Some(1));
    let record: serde_json::Value = serde_json::from_slice(&res.stderr).unwrap();
    assert_eq!(record["error"], "config");
}

#[test]
fn invalid_array_is_reported_by_kind() {
    let out = tempfile::tempdir().unwrap();
    let scenario = out.path().join("array.toml");
    std::fs::write(&scenario, "[rx]\nn_x = 0\nn_y = 2\nspacing = 0.5\ncount = 2\n").unwrap();
    let res = darisa(&["predict", "--config", scenario.to_str().unwrap()], out.path());
    assert_eq!(res.status.code(), Some(1));
    let record: serde_json::Value = serde_json::from_slice(&res.stderr).unwrap();
    assert_eq!(record["error"], "invalid_array");
}

#[test]
fn seed_flag_overrides_scenario_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/quick-agility.toml");
    let s = scenario.to_str().unwrap();
    let ra = darisa(&["edof-agility", "--config", s, "--trials", "2", "--seed", "11"], a.path());
    let rb = darisa(&["edof-agility", "--config", s, "--trials", "2", "--seed", "12"], b.path());
    assert!(ra.status.success() && rb.status.success());
    let csv_a = std::fs::read(a.path().join("edof-agility.csv")).unwrap();
    let csv_b = std::fs::read(b.path().join("edof-agility.csv")).unwrap();
    assert_ne!(csv_a, csv_b);
}
