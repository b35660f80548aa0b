use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hf_aos::benchmarks::registry;
use hf_aos::harness::{self, ExperimentConfig};
use hf_aos::Result;

#[derive(Parser)]
#[command(
    name = "hf-aos",
    version,
    about = "Hybrid adaptive operator selection experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Offline-train the state-based model on the config's problems.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every (problem, mode, trial) and write trials.csv plus comparisons.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config's mode list, e.g. `--aos hf --aos random`.
        #[arg(long = "aos")]
        aos: Vec<String>,
        /// Adds a Solomon instance to the config's problems.
        #[arg(long)]
        instance: Vec<PathBuf>,
    },
    /// Rebuild comparison tables from an existing trials.csv.
    Compare {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Benchmark function registry.
    Bench {
        #[command(subcommand)]
        action: BenchAction,
    },
}

#[derive(Subcommand)]
enum BenchAction {
    List,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = harness::train_to_file(&cfg, &out)?;
            let last = report.episodes.last().map_or(0.0, |e| e.mean_loss);
            println!(
                "trained {} episodes, {} updates, last mean loss {last:.6}",
                report.episodes.len(),
                report.losses.len()
            );
            println!("model written to {}", out.display());
        }
        Command::Run {
            config,
            model,
            out,
            aos,
            instance,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(m) = model {
                cfg.model_path = Some(m);
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            if !aos.is_empty() {
                cfg.aos_modes = aos;
            }
            cfg.problems
                .extend(instance.into_iter().map(harness::ProblemSpec::instance));
            let results = harness::evaluate(&cfg, None)?;
            let rows = harness::write_report(&cfg.output_dir, &results)?;
            println!(
                "{} trials written to {}",
                results.len(),
                cfg.output_dir.join(harness::TRIALS_FILE).display()
            );
            print!("{}", harness::render_table(&rows));
        }
        Command::Compare { results, out } => {
            let trials = harness::read_trials(&results)?;
            let rows = harness::write_tables(&out, &trials)?;
            print!("{}", harness::render_table(&rows));
        }
        Command::Bench {
            action: BenchAction::List,
        } => {
            println!(
                "{:<16} {:>10} {:>10} {:>7}  formula",
                "name", "lo", "hi", "min_dim"
            );
            for f in registry() {
                println!(
                    "{:<16} {:>10} {:>10} {:>7}  {}",
                    f.name, f.lo, f.hi, f.min_dim, f.formula
                );
            }
        }
    }
    Ok(())
}
