//! Trajectories: event scheduling, diagnostics and snapshot output.

use std::path::PathBuf;

use super::{SimState, Stepper};
use crate::diagnostics::{DiagnosticsRecord, ShiftSet};
use crate::error::{Error, Result};
use crate::io::{write_snapshot, DiagnosticsWriter};
use crate::scenario::ScenarioConfig;
use crate::spectral::dealias;

/// What fired at an output time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub record: bool,
    pub snapshot: bool,
}

/// Relative tolerance for landing on an output time.
const TIME_EPS: f64 = 1e-12;

/// Advances `state` to `t_end` with CFL steps, landing exactly on every
/// multiple of `record_dt` and `snapshot_dt`, and calls `on_event` at `t = 0`,
/// at each output time and at `t_end`.
pub fn integrate<F>(
    stepper: &Stepper,
    mut state: SimState,
    t_end: f64,
    record_dt: f64,
    snapshot_dt: Option<f64>,
    mut on_event: F,
) -> Result<(SimState, usize)>
where
    F: FnMut(&SimState, Event) -> Result<()>,
{
    if !(record_dt > 0.0) || snapshot_dt.is_some_and(|d| !(d > 0.0)) || !(t_end >= state.time) {
        return Err(Error::Config(format!(
            "invalid schedule: t_end = {t_end}, record_dt = {record_dt}, snapshot_dt = {snapshot_dt:?}"
        )));
    }
    let t0 = state.time;
    let eps = TIME_EPS * t_end.abs().max(1.0);
    on_event(
        &state,
        Event {
            record: true,
            snapshot: snapshot_dt.is_some(),
        },
    )?;
    let mut rec_k = 1u64;
    let mut snap_k = 1u64;
    let mut steps = 0usize;
    while state.time < t_end - eps {
        let next_rec = (t0 + rec_k as f64 * record_dt).min(t_end);
        let next_snap = snapshot_dt.map(|d| t0 + snap_k as f64 * d);
        let target = next_snap.map_or(next_rec, |s| s.min(next_rec));
        let remaining = target - state.time;
        let cfl = stepper.cfl_dt(&state);
        // Split the last stretch evenly so no sliver step remains.
        let pieces = (remaining / cfl).ceil().max(1.0);
        let (dt, lands) = if pieces <= 2.0 {
            (remaining / pieces, pieces == 1.0)
        } else {
            (cfl, false)
        };
        state = stepper.step(&state, dt)?;
        steps += 1;
        if lands {
            state.time = target;
        }
        let record = (state.time - next_rec).abs() <= eps;
        let snapshot = next_snap.is_some_and(|s| (state.time - s).abs() <= eps);
        if record {
            rec_k += 1;
        }
        if snapshot {
            snap_k += 1;
        }
        if record || snapshot {
            on_event(&state, Event { record, snapshot })?;
        }
    }
    Ok((state, steps))
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    pub csv_path: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub final_state: SimState,
    pub steps: usize,
}

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";
/// Last finite state of a run stopped by the blow-up criterion.
pub const BLOWUP_SNAPSHOT: &str = "blowup.sqgf";

/// Runs a scenario, writing `diagnostics.csv` and `snapshots/` under
/// `config.out_dir`. Outputs written before a blow-up stay on disk.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    config.validate()?;
    let grid = config.grid()?;
    let stepper = Stepper::new(grid, config.stepper_config()?)?;
    let triple = stepper.config().triple;
    std::fs::create_dir_all(&config.out_dir)?;
    let snap_dir = config.out_dir.join(SNAPSHOT_DIR);
    if config.snapshot_dt.is_some() {
        std::fs::create_dir_all(&snap_dir)?;
    }
    let csv_path = config.out_dir.join(DIAGNOSTICS_FILE);
    let mut writer = DiagnosticsWriter::create(&csv_path)?;
    let shifts = config
        .diagnostics
        .moc_ratio
        .then(|| ShiftSet::dyadic(grid, config.diagnostics.shift_max_level));

    let mut theta = config.initial_data()?.sample(grid).to_spectral();
    if config.dealias {
        theta = dealias(&theta);
    }
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let result = integrate(
        &stepper,
        SimState::new(theta),
        config.t_end,
        config.record_dt,
        config.snapshot_dt,
        |state, event| {
            if event.record {
                let rec = DiagnosticsRecord::from_state(
                    state,
                    &triple,
                    shifts.as_ref(),
                    config.diagnostics.total_dissipation,
                );
                writer.push(&rec)?;
                records.push(rec);
            }
            if event.snapshot {
                let path = snap_dir.join(format!("snap_{:05}.sqgf", snapshots.len()));
                write_snapshot(&path, state.time, &state.theta.to_real())?;
                snapshots.push(path);
            }
            Ok(())
        },
    );
    match result {
        Ok((final_state, steps)) => Ok(RunOutput {
            records,
            csv_path,
            snapshots,
            final_state,
            steps,
        }),
        Err(Error::BlowUp(b)) => {
            write_snapshot(
                &config.out_dir.join(BLOWUP_SNAPSHOT),
                b.last_state.time,
                &b.last_state.theta.to_real(),
            )?;
            Err(Error::BlowUp(b))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::StepperConfig;
    use crate::spectral::{Grid, RealField};
    use crate::symbols::SymbolTriple;
    use serde_json::json;

    fn scenario(dir: &std::path::Path, t_end: f64) -> ScenarioConfig {
        let v = json!({
            "grid_n": 32,
            "alpha1": 0.0,
            "alpha2": 0.0,
            "beta": 1.0,
            "theta0": {"kind": "trig", "params": {"terms": [
                {"f1": "sin", "k1": 1, "f2": "sin", "k2": 1},
                {"f1": "one", "f2": "cos", "k2": 1}
            ]}},
            "t_end": t_end,
            "record_dt": 0.1,
            "snapshot_dt": 0.25,
            "out_dir": dir
        });
        ScenarioConfig::from_json(&v.to_string()).unwrap()
    }

    #[test]
    fn zero_duration_gives_one_record() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&scenario(dir.path(), 0.0)).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.steps, 0);
        assert_eq!(out.snapshots.len(), 1);
    }

    #[test]
    fn lands_on_output_times() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&scenario(dir.path(), 0.5)).unwrap();
        let times: Vec<f64> = out.records.iter().map(|r| r.time).collect();
        let expected = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
        assert_eq!(times.len(), expected.len());
        for (t, e) in times.iter().zip(expected) {
            assert!((t - e).abs() < 1e-12, "{t} vs {e}");
        }
        assert_eq!(out.snapshots.len(), 3);
        assert!(out.records.last().unwrap().l2 < out.records[0].l2);
    }

    #[test]
    fn callback_errors_propagate() {
        let g = Grid::new(32).unwrap();
        let stepper = Stepper::new(g, StepperConfig::new(SymbolTriple::critical())).unwrap();
        let s = SimState::new(RealField::from_fn(g, |x, _| x.sin()).to_spectral());
        let r = integrate(&stepper, s, 1.0, 0.1, None, |st, _| {
            if st.time > 0.25 {
                Err(Error::Config("stop".into()))
            } else {
                Ok(())
            }
        });
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
