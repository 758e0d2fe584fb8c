use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use trustsim::experiments::{self, chart, config, report, EXPERIMENT_IDS};

#[derive(Parser)]
#[command(name = "trustsim", version, about = "Push/pull trust model simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSVs, a chart and a t-test summary.
    Run {
        #[arg(long)]
        experiment: u32,
        /// Number of independent runs (default: the experiment's own count).
        #[arg(long)]
        runs: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (default: one per core).
        #[arg(long)]
        parallel: Option<usize>,
        /// `key = value` overrides, in the format printed by `config dump`.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Moving-average window for the chart.
        #[arg(long, default_value_t = chart::DEFAULT_SMOOTHING)]
        smoothing: usize,
    },
    /// List the experiment catalogue.
    List,
    /// Inspect configurations.
    Config {
        #[command(subcommand)]
        action: ConfigAction,
    },
}

#[derive(Subcommand)]
enum ConfigAction {
    /// Print an experiment's effective configuration.
    Dump {
        #[arg(long)]
        experiment: u32,
    },
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

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::List => {
            println!("{:>3}  {:>4}  {:>6}  setting", "id", "runs", "rounds");
            for id in EXPERIMENT_IDS {
                let s = experiments::experiment_config(id)?;
                println!("{:>3}  {:>4}  {:>6}  {}", id, s.nisr, s.config.env.rounds, s.summary);
            }
        }
        Command::Config {
            action: ConfigAction::Dump { experiment },
        } => {
            print!("{}", config::dump(&experiments::experiment_config(experiment)?));
        }
        Command::Run {
            experiment,
            runs,
            seed,
            out,
            parallel,
            config: overrides,
            smoothing,
        } => {
            let mut spec = experiments::experiment_config(experiment)?;
            if let Some(path) = overrides {
                let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                config::apply_overrides(&mut spec, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let workers = parallel.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let result = experiments::run_experiment(&spec, runs, seed, workers)?;
            fs::create_dir_all(&out).map_err(|e| format!("{}: {e}", out.display()))?;
            let file = |kind: &str| out.join(format!("experiment-{experiment}-{kind}"));
            report::write_records_csv(experiment, &result.logs, &file("records.csv"))?;
            report::write_series_csv(experiment, &result.series, &file("series.csv"))?;
            let title = format!("Experiment {experiment}: {}", spec.summary);
            chart::render_chart(&result.series, smoothing, &title, &file("chart.svg"))?;
            report::write_summary(&result, &file("summary.txt"))?;
            print!("{}", report::summary_text(&result));
            println!();
            println!("wrote {}", out.join(format!("experiment-{experiment}-*")).display());
        }
    }
    Ok(())
}
