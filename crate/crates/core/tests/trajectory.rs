use proptest::prelude::*;
use serde_json::json;
use sqglab::evolution::{run, InitialData, SimState, Stepper, StepperConfig, DIAGNOSTICS_FILE, SNAPSHOT_DIR};
use sqglab::io::{read_diagnostics, read_snapshot};
use sqglab::scenario::ScenarioConfig;
use sqglab::spectral::{dealias, Grid, RealField};
use sqglab::symbols::SymbolTriple;

fn scenario(out: &std::path::Path, extra: serde_json::Value) -> ScenarioConfig {
    let mut v = json!({
        "grid_n": 128,
        "alpha1": 0.0,
        "alpha2": 0.0,
        "beta": 1.0,
        "theta0": {"kind": "trig", "params": {"terms": [
            {"f1": "sin", "k1": 1, "f2": "sin", "k2": 1},
            {"f1": "one", "f2": "cos", "k2": 1}
        ]}},
        "t_end": 1.0,
        "record_dt": 0.1,
        "out_dir": out
    });
    for (k, val) in extra.as_object().unwrap() {
        v[k] = val.clone();
    }
    ScenarioConfig::from_json(&v.to_string()).unwrap()
}

#[test]
fn critical_run_dissipates_l2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), json!({"snapshot_dt": 0.5}));
    let out = run(&cfg).unwrap();
    let rows = read_diagnostics(&dir.path().join(DIAGNOSTICS_FILE)).unwrap();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows, out.records);
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    assert_eq!(last.time, 1.0);
    assert!(last.l2 < first.l2);
    for w in rows.windows(2) {
        assert!(w[1].l2 <= w[0].l2 * (1.0 + 1e-8));
        assert!(w[1].blowup_integral >= w[0].blowup_integral);
    }
    assert_eq!(out.snapshots.len(), 3);
    let (t, field) = read_snapshot(&out.snapshots[2]).unwrap();
    assert_eq!(t, 1.0);
    let expected = out.final_state.theta.to_real();
    assert_eq!(field.values(), expected.values());
    assert!(dir.path().join(SNAPSHOT_DIR).is_dir());
}

#[test]
fn zero_horizon_records_initial_state_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&scenario(dir.path(), json!({"t_end": 0.0, "grid_n": 32}))).unwrap();
    assert_eq!(out.records.len(), 1);
    assert_eq!(out.records[0].time, 0.0);
    assert_eq!(out.steps, 0);
}

#[test]
fn sup_norm_nonincreasing_on_smooth_random_data() {
    let grid = Grid::new(128).unwrap();
    let stepper = Stepper::new(grid, StepperConfig::new(SymbolTriple::critical())).unwrap();
    let theta = dealias(&InitialData::random(6, 1.0, 1.0, 21).sample(grid).to_spectral());
    let mut s = SimState::new(theta);
    let mut prev = sqglab::diagnostics::refined_linf(&s.theta);
    while s.time < 0.5 {
        let dt = stepper.cfl_dt(&s).min(0.5 - s.time);
        s = stepper.step(&s, dt).unwrap();
        let now = sqglab::diagnostics::refined_linf(&s.theta);
        assert!(now <= prev * (1.0 + 1e-6), "t = {}: {now} > {prev}", s.time);
        prev = now;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mean_conserved_and_l2_monotone(
        seed in 0u64..1000,
        mean in -2.0f64..2.0,
        alpha1 in 0.0f64..0.5,
        alpha2 in 0.0f64..0.5,
    ) {
        let grid = Grid::new(32).unwrap();
        let triple = SymbolTriple::new(alpha1, alpha2, 1.0, None).unwrap();
        let stepper = Stepper::new(grid, StepperConfig::new(triple)).unwrap();
        let base = InitialData::random(4, 0.5, 1.0, seed).sample(grid);
        let shifted = RealField::new(grid, base.values().iter().map(|v| v + mean).collect()).unwrap();
        let mut s = SimState::new(dealias(&shifted.to_spectral()));
        let m0 = s.theta.mean();
        let mut l2 = s.theta.to_real().l2_norm();
        for _ in 0..20 {
            let dt = stepper.cfl_dt(&s);
            s = stepper.step(&s, dt).unwrap();
            prop_assert!((s.theta.mean() - m0).abs() <= 1e-12 * m0.abs().max(1.0));
            let now = s.theta.to_real().l2_norm();
            prop_assert!(now <= l2 * (1.0 + 1e-8));
            l2 = now;
        }
    }
}
