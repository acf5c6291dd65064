use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bridgelab::expcli::{default_out_dir, render_list, render_list_json, render_schema, run_experiment, Experiment, ExperimentConfig};
use bridgelab::Error;

/// Monte Carlo checks for bridges of self-similar Markov processes.
#[derive(Parser)]
#[command(name = "bridgelab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "n-paths")]
        n_paths: Option<usize>,
        /// Output directory (default: $BRIDGELAB_OUT, else ./bridgelab-out).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        parallelism: Option<usize>,
    },
    /// List the experiments with their defaults.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print the CSV columns written by an experiment.
    Schema { experiment: String },
}

fn report(e: &Error) {
    match e {
        Error::Config(problems) => {
            eprintln!("invalid config:");
            for p in problems {
                eprintln!("  - {p}");
            }
        }
        other => eprintln!("error: {other}"),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List { json } => {
            if json {
                println!("{}", render_list_json());
            } else {
                print!("{}", render_list());
            }
            ExitCode::SUCCESS
        }
        Command::Schema { experiment } => match experiment.parse::<Experiment>() {
            Ok(e) => {
                print!("{}", render_schema(e));
                ExitCode::SUCCESS
            }
            Err(e) => {
                report(&e);
                ExitCode::from(2)
            }
        },
        Command::Run {
            config,
            seed,
            n_paths,
            out,
            parallelism,
        } => {
            let mut cfg = match ExperimentConfig::from_file(&config) {
                Ok(c) => c,
                Err(e) => {
                    report(&e);
                    return ExitCode::from(2);
                }
            };
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.n_paths = n_paths.unwrap_or(cfg.n_paths);
            cfg.parallelism = parallelism.unwrap_or(cfg.parallelism);
            if let Err(e) = cfg.validate() {
                report(&e);
                return ExitCode::from(2);
            }
            let out = out.unwrap_or_else(default_out_dir);
            match run_experiment(&cfg, &out) {
                Ok(run) => {
                    for t in &run.summary.tests {
                        println!(
                            "{}  {}  statistic={} threshold={}",
                            if t.passed { "PASS" } else { "FAIL" },
                            t.test_name,
                            t.statistic,
                            t.threshold
                        );
                    }
                    for m in &run.summary.moments {
                        println!(
                            "{}  moment c={} q={}  empirical={} predicted={} se={} allowance={}",
                            if m.passed { "PASS" } else { "FAIL" },
                            m.c,
                            m.q,
                            m.empirical,
                            m.predicted,
                            m.std_error,
                            m.allowance
                        );
                    }
                    println!("wrote {}", run.dir.display());
                    if run.summary.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => {
                    report(&e);
                    ExitCode::from(2)
                }
            }
        }
    }
}
