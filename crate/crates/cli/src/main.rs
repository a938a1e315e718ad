use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sqglab::diagnostics::BoundConstants;
use sqglab_cli::{
    cmd_bounds, cmd_check_symbols, cmd_moc_audit, cmd_run, cmd_verify_lemmas, configure_threads, LemmaArgs,
    MocAuditArgs, Outcome, RunOverrides,
};

#[derive(Parser)]
#[command(name = "sqglab", version, about = "Slightly supercritical SQG laboratory")]
struct Cli {
    /// Print the machine-readable JSON report on standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write diagnostics, snapshots and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the scenario's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed of the initial data, overriding theta0.seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check the structural and criticality assumptions of a symbol triple.
    CheckSymbols(Triple),
    /// Verify the radial integral inequalities by quadrature.
    VerifyLemmas {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 8)]
        j_min: i32,
        #[arg(long, default_value_t = 20)]
        j_max: i32,
        /// Samples must lie below this radius.
        #[arg(long, default_value_t = 0.1)]
        r0: f64,
    },
    /// Evaluate the a priori gradient bound.
    Bounds {
        #[arg(long)]
        theta0_linf: f64,
        #[arg(long, default_value_t = 1.0)]
        theta0_grad_linf: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        c_outer: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c3: f64,
        #[arg(long, default_value_t = 1.0)]
        c4: f64,
    },
    /// Estimate the modulus-of-continuity amplitude of a snapshot.
    MocAudit {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        r_cap: Option<f64>,
        /// Amplitude M for the breakthrough search.
        #[arg(long)]
        amplitude: Option<f64>,
        /// Enumerate every shift (n ≤ 64).
        #[arg(long)]
        all_shifts: bool,
        #[arg(long)]
        max_level: Option<u32>,
    },
}

#[derive(Args)]
struct Triple {
    #[arg(long, default_value_t = 0.0)]
    alpha1: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha2: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long)]
    r_cap: Option<f64>,
}

fn execute(command: Command) -> Outcome {
    match command {
        Command::Run { config, out, seed } => cmd_run(&config, &RunOverrides { out_dir: out, seed }),
        Command::CheckSymbols(t) => cmd_check_symbols(t.alpha1, t.alpha2, t.beta, t.r_cap),
        Command::VerifyLemmas {
            triple,
            gamma,
            j_min,
            j_max,
            r0,
        } => cmd_verify_lemmas(&LemmaArgs {
            alpha1: triple.alpha1,
            alpha2: triple.alpha2,
            beta: triple.beta,
            gamma,
            j_min,
            j_max,
            r0,
        }),
        Command::Bounds {
            theta0_linf,
            theta0_grad_linf,
            beta,
            c,
            c_outer,
            c1,
            c3,
            c4,
        } => cmd_bounds(
            theta0_linf,
            theta0_grad_linf,
            beta,
            BoundConstants { c, c_outer, c1, c3, c4 },
        ),
        Command::MocAudit {
            snapshot,
            beta,
            r_cap,
            amplitude,
            all_shifts,
            max_level,
        } => cmd_moc_audit(&MocAuditArgs {
            snapshot,
            beta,
            r_cap,
            amplitude,
            all_shifts,
            max_level,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("sqglab: {e}");
        return ExitCode::from(1);
    }
    let outcome = execute(cli.command);
    if let Some(err) = outcome.report.get("error").and_then(|e| e.as_str()) {
        eprintln!("sqglab: {err}");
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&outcome.report).expect("JSON value"));
    } else if outcome.report.get("error").is_none() {
        println!("{}", summary(&outcome));
    }
    ExitCode::from(outcome.code as u8)
}

/// One human-readable line per report.
fn summary(outcome: &Outcome) -> String {
    let r = &outcome.report;
    if let Some(run) = r.get("run") {
        return format!("run {}: {}", run["status"].as_str().unwrap_or("?"), r["out_dir"]);
    }
    if let Some(v) = r.get("verdict") {
        return format!("verdict {}", v.as_str().unwrap_or("?"));
    }
    if let Some(m) = r.get("m") {
        return format!("M = {m}, r0 = {}, r1 = {}", r["r0"], r["r1"]);
    }
    if let Some(m) = r.get("m_est") {
        return format!("M_est = {m}");
    }
    r.to_string()
}
