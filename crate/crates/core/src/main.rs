use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use evifuse::bench::{self, Dataset, FusionSettings, SimConfig};

#[derive(Parser)]
#[command(
    name = "evifuse",
    version,
    about = "Classifier fusion by voting, possibility and belief functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-source dataset.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Simulate a scenario and compare fusion methods on it.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated methods, or `all`.
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare fusion methods on an existing dataset CSV.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "true_class")]
        truth_col: String,
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long)]
        out: PathBuf,
        /// Optional JSON with `vote`, `possibility`, `denoeux`, `appriou` blocks.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> evifuse::Result<SimConfig> {
    let mut config = SimConfig::load(path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run(cli: Cli) -> evifuse::Result<()> {
    match cli.command {
        Command::Simulate { config, out, seed } => {
            let config = load_config(&config, seed)?;
            let dataset = bench::simulate(&config)?;
            dataset.save(&out)?;
            eprintln!(
                "wrote {} samples x {} sources to {}",
                dataset.len(),
                dataset.source_ids().len(),
                out.display()
            );
        }
        Command::Run {
            config,
            methods,
            out,
            seed,
        } => {
            let config = load_config(&config, seed)?;
            let methods = bench::parse_methods(&methods, &config.fusion)?;
            let report = bench::run_experiment(&config, &methods)?;
            report.save(&out)?;
            eprint!("{}", report.summary_table());
        }
        Command::Eval {
            dataset,
            truth_col,
            methods,
            out,
            config,
            trials,
            seed,
        } => {
            let settings: FusionSettings = match config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None => FusionSettings::default(),
            };
            let methods = bench::parse_methods(&methods, &settings)?;
            let dataset = Dataset::load_with_truth(&dataset, &truth_col)?;
            let report = bench::evaluate(&dataset, &methods, &settings, seed, trials)?;
            report.save(&out)?;
            eprint!("{}", report.summary_table());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
