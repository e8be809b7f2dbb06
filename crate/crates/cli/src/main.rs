//! drec: run seeded Monte Carlo sweeps of the iterative recovery models and
//! emit machine-readable reports. One subcommand per model plus `selftest`.

mod config;
mod report;

use clap::{Args, Parser, Subcommand};
use config::{parse_config, spec_to_config};
use drec_core::bench::{run_sweep, selftest};
use report::{emit_report, OutFormat};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "drec", version, about = "Iterative discrete-structure recovery experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Gaussian mixture clustering sweep.
    Gmm(RunArgs),
    /// Approximate ranking sweep.
    Rank(RunArgs),
    /// Sign recovery sweep.
    Sign(RunArgs),
    /// Multireference alignment sweep.
    Mra(RunArgs),
    /// Z2 synchronization sweep.
    #[command(name = "sync-z2")]
    SyncZ2(RunArgs),
    /// Z/kZ synchronization sweep.
    #[command(name = "sync-zk")]
    SyncZk(RunArgs),
    /// Permutation synchronization sweep.
    #[command(name = "sync-perm")]
    SyncPerm(RunArgs),
    /// Run the brute-force oracle and invariant suite; nonzero exit on failure.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config: a flat JSON object (see README for per-model keys).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if absent.
    #[arg(long, default_value = "./out")]
    out: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's replicate count.
    #[arg(long)]
    replicates: Option<usize>,
    /// Summary format; trajectories and rates are always CSV.
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    /// Override the config's worker thread count (0 = auto).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Verbosity {
    Quiet,
    Info,
    Debug,
}

fn verbosity() -> Verbosity {
    match std::env::var("DR_LOG").as_deref() {
        Ok("debug") => Verbosity::Debug,
        Ok("quiet") => Verbosity::Quiet,
        _ => Verbosity::Info,
    }
}

fn log(level: Verbosity, msg: &str) {
    if verbosity() >= level {
        eprintln!("{msg}");
    }
}

fn run(kind: &'static str, args: &RunArgs) -> u8 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return 2;
        }
    };
    let mut spec = match parse_config(kind, &text) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(replicates) = args.replicates {
        if replicates < 1 {
            eprintln!("error: replicates must be ≥ 1");
            return 2;
        }
        spec.replicates = replicates;
    }
    if let Some(threads) = args.threads {
        spec.threads = threads;
    }
    log(Verbosity::Debug, &format!("effective config: {}", spec_to_config(&spec)));

    log(
        Verbosity::Info,
        &format!(
            "{kind}: {} grid point(s) x {} replicate(s), seed {}, threads {}",
            spec.grid.len(),
            spec.replicates,
            spec.seed,
            if spec.threads == 0 { "auto".to_string() } else { spec.threads.to_string() },
        ),
    );
    let report = run_sweep(&spec);
    for point in &report.points {
        log(
            Verbosity::Debug,
            &format!(
                "grid {:.6}: mean error {:.6e}, ideal {:.6e}, failures {}",
                point.snr_param,
                point.mean_error,
                point.ideal_error,
                point.failures(),
            ),
        );
    }
    let paths = match emit_report(&report, args.format, &args.out) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", args.out.display());
            return 2;
        }
    };
    for path in &paths {
        log(Verbosity::Info, &format!("wrote {}", path.display()));
    }

    let failures = report.total_failures();
    if failures > 0 {
        eprintln!("{failures} replicate(s) failed; see the failures column");
        return 1;
    }
    0
}

fn run_selftest() -> u8 {
    let failures = selftest();
    if failures.is_empty() {
        println!("selftest: ok");
        0
    } else {
        for f in &failures {
            println!("selftest: FAIL {f}");
        }
        println!("selftest: {} check(s) failed", failures.len());
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.cmd {
        Cmd::Gmm(args) => run("gmm", args),
        Cmd::Rank(args) => run("rank", args),
        Cmd::Sign(args) => run("sign", args),
        Cmd::Mra(args) => run("mra", args),
        Cmd::SyncZ2(args) => run("sync-z2", args),
        Cmd::SyncZk(args) => run("sync-zk", args),
        Cmd::SyncPerm(args) => run("sync-perm", args),
        Cmd::Selftest => run_selftest(),
    };
    ExitCode::from(code)
}
