use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};
use sqglab::io::{read_diagnostics, write_snapshot};
use sqglab::spectral::{Grid, RealField};
use sqglab_cli::{
    cmd_bounds, cmd_check_symbols, cmd_moc_audit, cmd_run, cmd_verify_lemmas, LemmaArgs, MocAuditArgs, RunOverrides,
    EXIT_BLOWUP, EXIT_FAILURE, EXIT_OK, MANIFEST_FILE,
};

fn write_config(dir: &Path, v: &Value) -> std::path::PathBuf {
    let p = dir.join("scenario.json");
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn critical_config(out: &Path) -> Value {
    json!({
        "grid_n": 32,
        "alpha1": 0.0,
        "alpha2": 0.0,
        "beta": 1.0,
        "theta0": {"kind": "random", "params": {"k_max": 4}, "seed": 11},
        "t_end": 0.3,
        "record_dt": 0.1,
        "snapshot_dt": 0.15,
        "out_dir": out
    })
}

#[test]
fn run_writes_csv_snapshots_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &critical_config(&out));
    let o = cmd_run(&cfg, &RunOverrides::default());
    assert_eq!(o.code, EXIT_OK, "{}", o.report);
    let text = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "time,linf,l2,grad_linf,blowup_integral,moc_ratio,total_dissipation"
    );
    assert_eq!(read_diagnostics(&out.join("diagnostics.csv")).unwrap().len(), 4);
    let manifest: Value = serde_json::from_slice(&std::fs::read(out.join(MANIFEST_FILE)).unwrap()).unwrap();
    let paths: Vec<&str> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["path"].as_str().unwrap())
        .collect();
    assert_eq!(
        paths,
        [
            "diagnostics.csv",
            "snapshots/snap_00000.sqgf",
            "snapshots/snap_00001.sqgf",
            "snapshots/snap_00002.sqgf"
        ]
    );
    assert_eq!(manifest["config"]["grid_n"], 32);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &critical_config(&dir.path().join("unused")));
    let mut hashes = Vec::new();
    for name in ["a", "b"] {
        let o = cmd_run(
            &cfg,
            &RunOverrides {
                out_dir: Some(dir.path().join(name)),
                seed: Some(5),
            },
        );
        assert_eq!(o.code, EXIT_OK);
        hashes.push(o.report["content_hash"].clone());
    }
    assert_eq!(hashes[0], hashes[1]);
    let a = std::fs::read(dir.path().join("a/diagnostics.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/diagnostics.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_override_changes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &critical_config(&dir.path().join("unused")));
    let run = |name: &str, seed| {
        cmd_run(
            &cfg,
            &RunOverrides {
                out_dir: Some(dir.path().join(name)),
                seed: Some(seed),
            },
        )
        .report["content_hash"]
            .clone()
    };
    assert_ne!(run("a", 1), run("b", 2));
}

#[test]
fn invalid_config_exits_one_naming_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = critical_config(&dir.path().join("out"));
    v["alpha1"] = json!(-1.0);
    let o = cmd_run(&write_config(dir.path(), &v), &RunOverrides::default());
    assert_eq!(o.code, EXIT_FAILURE);
    assert!(o.report["error"].as_str().unwrap().contains("alpha1"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn blowup_exits_two_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let v = json!({
        "grid_n": 64,
        "alpha1": 2.0,
        "alpha2": 1.0,
        "beta": 2.0,
        "theta0": {"kind": "trig", "params": {"terms": [
            {"amplitude": 5.0, "f1": "sin", "k1": 1, "f2": "sin", "k2": 1},
            {"amplitude": 5.0, "f1": "one", "f2": "cos", "k2": 1}
        ]}},
        "t_end": 1.0,
        "record_dt": 0.05,
        "gradient_ceiling": 15.0,
        "out_dir": out
    });
    let o = cmd_run(&write_config(dir.path(), &v), &RunOverrides::default());
    assert_eq!(o.code, EXIT_BLOWUP, "{}", o.report);
    assert_eq!(o.report["run"]["status"], "blowup");
    let rows = read_diagnostics(&out.join("diagnostics.csv")).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.len() > 1);
    assert!(rows.last().unwrap().time < 1.0);
    assert!(out.join("blowup.sqgf").exists());
    assert!(out.join(MANIFEST_FILE).exists());
}

#[test]
fn check_symbols_examples() {
    assert_eq!(cmd_check_symbols(0.3, 0.3, 0.8, None).code, EXIT_OK);
    assert_eq!(cmd_check_symbols(0.0, 0.0, 1.0, None).code, EXIT_OK);
    let o = cmd_check_symbols(0.6, 0.6, 2.0, None);
    assert_eq!(o.code, EXIT_FAILURE);
    let checks = o.report["criticality"]["report"]["checks"].as_array().unwrap();
    let conservation = checks.iter().find(|c| c["name"] == "moc_conservation_ratio").unwrap();
    assert_eq!(conservation["verdict"], "FAIL");
    assert_eq!(cmd_check_symbols(-1.0, 0.0, 1.0, None).code, EXIT_FAILURE);
}

#[test]
fn verify_lemmas_critical_all_pass() {
    let o = cmd_verify_lemmas(&LemmaArgs::default());
    assert_eq!(o.code, EXIT_OK, "{}", o.report);
    let items = o.report["items"].as_array().unwrap();
    assert_eq!(items.len(), 5);
    assert!(items.iter().all(|i| i["verdict"] == "PASS"));
}

#[test]
fn bounds_unit_case() {
    let o = cmd_bounds(1.0, 1.0, 1.0, Default::default());
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.report["m"], 2.0);
    assert_eq!(cmd_bounds(0.5, 1.0, 1.0, Default::default()).code, EXIT_FAILURE);
}

#[test]
fn moc_audit_constant_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.sqgf");
    write_snapshot(&p, 0.0, &RealField::constant(Grid::new(32).unwrap(), 1.5)).unwrap();
    let o = cmd_moc_audit(&MocAuditArgs {
        snapshot: p,
        beta: 1.0,
        r_cap: None,
        amplitude: Some(1.0),
        all_shifts: true,
        max_level: None,
    });
    assert_eq!(o.code, EXIT_OK, "{}", o.report);
    assert_eq!(o.report["m_est"], 0.0);
    assert!(o.report["breakthrough"]["margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn binary_exit_codes_and_json() {
    let bin = env!("CARGO_BIN_EXE_sqglab");
    let out = Command::new(bin)
        .args(["--json", "bounds", "--theta0-linf", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["m"], 2.0);

    let out = Command::new(bin)
        .args(["check-symbols", "--alpha1", "0.6", "--alpha2", "0.6", "--beta", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = Command::new(bin)
        .args(["--json", "run", "--config", "/nonexistent/scenario.json"])
        .env("SQGLAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"].is_string());
}
