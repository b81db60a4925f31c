use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ifbc::bench::{
    emit_results, parse_algorithms, run_experiment, run_experiment_with_threads, ExperimentSpec,
};
use ifbc::error::Error;

#[derive(Parser)]
#[command(
    name = "ifbc-bench",
    version,
    about = "Monte Carlo comparison of user-selection strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file and write CSV results.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated subset of brute, s, o.
        #[arg(long)]
        algorithms: Option<String>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        out,
        trials,
        seed,
        algorithms,
        threads,
    } = Cli::parse().command;

    let mut spec = match ExperimentSpec::from_file(&config) {
        Ok(spec) => spec,
        Err(e) => return fail(&e, 2),
    };
    if let Some(n) = trials {
        spec.num_trials = n;
    }
    if let Some(s) = seed {
        spec.master_seed = s;
    }
    if let Some(a) = algorithms {
        match parse_algorithms(&a) {
            Ok(a) => spec.algorithms = a,
            Err(msg) => return fail(&Error::InvalidInput(msg), 2),
        }
    }
    if let Err(e) = spec.validate() {
        return fail(&e, 2);
    }

    let result = match threads {
        Some(t) => run_experiment_with_threads(&spec, t),
        None => run_experiment(&spec),
    };
    let result = match result {
        Ok(r) => r,
        Err(e @ Error::SearchSpaceTooLarge { .. }) => return fail(&e, 3),
        Err(e) => return fail(&e, 2),
    };
    if !result.brute_skipped.is_empty() {
        let list: Vec<String> = result.brute_skipped.iter().map(|k| k.to_string()).collect();
        eprintln!(
            "note: brute force over cap {} and skipped at k_t = {}",
            spec.brute_cap,
            list.join(",")
        );
    }
    match emit_results(&spec, &result, &out) {
        Ok(files) => {
            eprintln!(
                "wrote {} and {}",
                files.trials.display(),
                files.aggregates.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, 1),
    }
}

fn fail(e: &Error, code: u8) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code)
}
