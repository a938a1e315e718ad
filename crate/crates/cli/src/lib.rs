//! Command implementations behind the `sqglab` binary.
//!
//! Each command returns an [`Outcome`]: the exit code and a JSON document.
//! Exit codes are `0` for success, `1` for configuration errors or failed
//! verifications and `2` for a run stopped by the blow-up criterion.

mod manifest;

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use sqglab::diagnostics::{bound_crossover, breakthrough_search, gradient_bound, moc_ratio, BoundConstants, ShiftSet};
use sqglab::evolution::run;
use sqglab::io::read_snapshot;
use sqglab::quadrature::{verify_lemma26, LemmaConfig};
use sqglab::scenario::ScenarioConfig;
use sqglab::symbols::{
    check_criticality, check_kernel_assumptions, check_moc_assumptions, check_multiplier_assumptions, default_r_grid,
    default_zeta_grid, ModulusOfContinuity, SymbolTriple,
};
use sqglab::{Error, Verdict};

pub use manifest::{blob_hash, write_manifest, Manifest, ManifestEntry, MANIFEST_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BLOWUP: i32 = 2;

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    fn new(code: i32, report: impl Serialize) -> Self {
        Self {
            code,
            report: serde_json::to_value(report).expect("reports serialize"),
        }
    }

    /// `{"error": ...}` with exit code 1.
    pub fn error(err: &Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            report: json!({ "error": err.to_string() }),
        }
    }

    fn from_verdict(verdict: Verdict, report: Value) -> Self {
        let code = if verdict == Verdict::Fail {
            EXIT_FAILURE
        } else {
            EXIT_OK
        };
        Self { code, report }
    }
}

fn or_error(r: Result<Outcome, Error>) -> Outcome {
    r.unwrap_or_else(|e| Outcome::error(&e))
}

/// Overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn load_scenario(config_path: &Path, overrides: &RunOverrides) -> Result<ScenarioConfig, Error> {
    let mut cfg = ScenarioConfig::load(config_path)?;
    if let Some(dir) = &overrides.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(seed) = overrides.seed {
        cfg.theta0.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a scenario and writes the manifest next to its outputs.
pub fn cmd_run(config_path: &Path, overrides: &RunOverrides) -> Outcome {
    let cfg = match load_scenario(config_path, overrides) {
        Ok(c) => c,
        Err(e) => return Outcome::error(&e),
    };
    let result = run(&cfg);
    let (code, status) = match &result {
        Ok(out) => (
            EXIT_OK,
            json!({
                "status": "completed",
                "steps": out.steps,
                "records": out.records.len(),
                "snapshots": out.snapshots.len(),
                "final_time": out.final_state.time,
            }),
        ),
        Err(Error::BlowUp(b)) => (
            EXIT_BLOWUP,
            json!({ "status": "blowup", "time": b.time, "reason": b.reason }),
        ),
        Err(e) => return Outcome::error(e),
    };
    match write_manifest(&cfg, &status) {
        Ok(m) => Outcome {
            code,
            report: json!({ "run": status, "out_dir": cfg.out_dir, "content_hash": m.content_hash }),
        },
        Err(e) => Outcome::error(&e),
    }
}

pub fn cmd_check_symbols(alpha1: f64, alpha2: f64, beta: f64, r_cap: Option<f64>) -> Outcome {
    or_error((|| {
        let triple = SymbolTriple::new(alpha1, alpha2, beta, r_cap)?;
        let kernel = check_kernel_assumptions(&triple.kernel, &default_r_grid())?;
        let multiplier = check_multiplier_assumptions(&triple.multiplier, &default_zeta_grid())?;
        let moc = check_moc_assumptions(&triple.moc);
        let criticality = check_criticality(&triple);
        let verdict = Verdict::all([
            kernel.verdict(),
            multiplier.verdict(),
            moc.verdict(),
            criticality.verdict(),
        ]);
        let report = json!({
            "triple": triple,
            "verdict": verdict,
            "kernel": kernel,
            "multiplier": multiplier,
            "moc": moc,
            "criticality": criticality,
        });
        Ok(Outcome::from_verdict(verdict, report))
    })())
}

/// Arguments of `verify-lemmas`.
#[derive(Debug, Clone, Copy)]
pub struct LemmaArgs {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub gamma: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub r0: f64,
}

impl Default for LemmaArgs {
    fn default() -> Self {
        Self {
            alpha1: 0.0,
            alpha2: 0.0,
            beta: 1.0,
            gamma: 0.5,
            j_min: 8,
            j_max: 20,
            r0: 0.1,
        }
    }
}

pub fn cmd_verify_lemmas(args: &LemmaArgs) -> Outcome {
    or_error((|| {
        if args.j_min > args.j_max {
            return Err(Error::Config(format!(
                "j_min = {} exceeds j_max = {}",
                args.j_min, args.j_max
            )));
        }
        let triple = SymbolTriple::new(args.alpha1, args.alpha2, args.beta, None)?;
        let radii: Vec<f64> = (args.j_min..=args.j_max).map(|j| 2f64.powi(-j)).collect();
        let config = LemmaConfig {
            r0: args.r0,
            ..LemmaConfig::default()
        };
        let items = verify_lemma26(&triple, args.gamma, &radii, &config)?;
        let verdict = Verdict::all(items.iter().map(|i| i.verdict));
        Ok(Outcome::from_verdict(
            verdict,
            json!({ "triple": triple, "gamma": args.gamma, "verdict": verdict, "items": items }),
        ))
    })())
}

pub fn cmd_bounds(theta0_linf: f64, theta0_grad_linf: f64, beta: f64, constants: BoundConstants) -> Outcome {
    or_error((|| {
        let report = gradient_bound(theta0_linf, theta0_grad_linf, beta, constants)?;
        let crossover = bound_crossover(beta, constants.c_outer)?;
        let mut value = serde_json::to_value(report)?;
        value["crossover"] = json!(crossover);
        Ok(Outcome::new(EXIT_OK, value))
    })())
}

/// Arguments of `moc-audit`.
#[derive(Debug, Clone)]
pub struct MocAuditArgs {
    pub snapshot: PathBuf,
    pub beta: f64,
    pub r_cap: Option<f64>,
    /// Amplitude `M` for the breakthrough search.
    pub amplitude: Option<f64>,
    pub all_shifts: bool,
    pub max_level: Option<u32>,
}

pub fn cmd_moc_audit(args: &MocAuditArgs) -> Outcome {
    or_error((|| {
        let (time, theta) = read_snapshot(&args.snapshot)?;
        let grid = theta.grid();
        let moc = match args.r_cap {
            Some(c) => ModulusOfContinuity::new(args.beta, c)?,
            None => ModulusOfContinuity::with_default_cap(args.beta)?,
        };
        let shifts = if args.all_shifts {
            ShiftSet::all(grid)?
        } else {
            ShiftSet::dyadic(grid, args.max_level)
        };
        let report = moc_ratio(&theta, &moc, &shifts);
        let breakthrough = args
            .amplitude
            .map(|m| breakthrough_search(&theta, &moc, m, &shifts))
            .transpose()?;
        Ok(Outcome::new(
            EXIT_OK,
            json!({
                "snapshot": args.snapshot,
                "time": time,
                "n": grid.n(),
                "beta": moc.beta(),
                "r_cap": moc.r_cap(),
                "m_est": report.m_est,
                "argmax_point": report.argmax_point,
                "argmax_shift": report.argmax_shift,
                "table": report.table,
                "breakthrough": breakthrough,
            }),
        ))
    })())
}

/// Caps the global thread pool when `SQGLAB_THREADS` is set.
pub fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("SQGLAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("SQGLAB_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(Error::Config("SQGLAB_THREADS must be at least 1".into()));
        }
        // A pool installed earlier in the process wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
