//! Command-line front end: single runs, parameter sweeps and the oracle
//! self-test.
//!
//! Exit codes: 0 success, 1 bad arguments / config / I/O, 2 failed verify.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use freebs::engine::{RunSummary, Simulation, SummaryBuilder};
use freebs::model::load_raw_config;
use freebs::scheduler::SchedulerKind;
use freebs::sweep::{self, SweepParam, SweepSpec};
use freebs::{trace, verify};

#[derive(Parser)]
#[command(
    name = "freebs",
    version,
    about = "Deadline-constrained multicast offloading simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration and write its summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "free_bs")]
        scheduler: SchedulerKind,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Per-slot trace CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Summary JSON; printed to stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Sweep one parameter over paired-seed replications.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        reps: u32,
        #[arg(long, value_delimiter = ',', default_value = "free_bs,baseline")]
        schedulers: Vec<SchedulerKind>,
        /// Output directory; receives `sweep.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check Free-BS against exhaustive search on random slots.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        slots: u64,
    },
}

enum Failure {
    Config(anyhow::Error),
    Other(anyhow::Error),
    VerifyFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) | Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::VerifyFailed) => ExitCode::from(2),
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run {
            config,
            scheduler,
            seed,
            trace,
            summary,
        } => {
            let mut raw = load_raw_config(&config).map_err(|e| Failure::Config(e.into()))?;
            if let Some(s) = seed {
                raw.seed = s;
            }
            let cfg = raw.validate().map_err(|e| Failure::Config(e.into()))?;
            let s = run(&cfg, scheduler, trace.as_ref()).map_err(Failure::Other)?;
            let json = serde_json::to_string_pretty(&s).expect("summary serializes");
            match summary {
                Some(path) => fs::write(&path, json + "\n")
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(Failure::Other),
                None => {
                    println!("{json}");
                    Ok(())
                }
            }
        }
        Command::Sweep {
            config,
            param,
            values,
            reps,
            schedulers,
            out,
        } => {
            let raw = load_raw_config(&config).map_err(|e| Failure::Config(e.into()))?;
            let spec = SweepSpec::new(param, values, reps, schedulers)
                .map_err(|e| Failure::Config(e.into()))?;
            let rows =
                sweep::run_sweep(&raw, &spec, sweep::threads_from_env()).map_err(|e| match e {
                    sweep::SweepError::Config { .. } => Failure::Config(e.into()),
                    other => Failure::Other(other.into()),
                })?;
            fs::create_dir_all(&out)
                .with_context(|| format!("creating {}", out.display()))
                .map_err(Failure::Other)?;
            let path = out.join("sweep.csv");
            sweep::write_csv(&path, &rows).map_err(|e| Failure::Other(e.into()))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
            Ok(())
        }
        Command::Verify { config, slots } => {
            let raw = load_raw_config(&config).map_err(|e| Failure::Config(e.into()))?;
            let cfg = raw.validate().map_err(|e| Failure::Config(e.into()))?;
            let report = verify::verify_oracle(&cfg, slots, cfg.seed);
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            if report.passed() {
                Ok(())
            } else {
                eprintln!("verify failed: {} mismatching slots", report.mismatches);
                Err(Failure::VerifyFailed)
            }
        }
    }
}

fn run(
    cfg: &freebs::SimConfig,
    scheduler: SchedulerKind,
    trace_path: Option<&PathBuf>,
) -> Result<RunSummary> {
    let mut builder = SummaryBuilder::new(cfg);
    let mut sink = match trace_path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(f);
            trace::write_header(&mut w, cfg.n_users)?;
            Some((p, w))
        }
        None => None,
    };
    for record in Simulation::new(cfg, scheduler) {
        if let Some((p, w)) = sink.as_mut() {
            trace::write_record(w, &record).with_context(|| format!("writing {}", p.display()))?;
        }
        builder.push(&record);
    }
    if let Some((p, mut w)) = sink {
        w.flush()
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(builder.finish()?)
}
