use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pamcts_core::harness::{
    read_records_file, run_experiment, summarize_records, sweep_experiment, train_stale_q, ExperimentSpec,
    TrainingMethod,
};
use pamcts_core::theory::{
    verify_psi_relation_batch, verify_selection_soundness, verify_theorem1_batch, verify_theorem3_batch,
};

#[derive(Parser)]
#[command(name = "pamcts", version, about = "Tree search guided by stale action values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the stale action-value table for the time-0 environment.
    Solve {
        #[arg(short, long)]
        config: PathBuf,
        /// Where to write the artifact JSON; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Execute every episode of an experiment and write the results CSV.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        /// Overrides `run.output`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        serial: bool,
    },
    /// Run only the alpha selection sweep and print per-alpha means.
    SweepAlpha {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Check the analytical bounds on random tabular instances.
    VerifyBounds {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit non-zero when any suite reports a violation.
        #[arg(long)]
        strict: bool,
    },
    /// Aggregate result CSVs into JSON table rows.
    Summarize {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    ValueIteration,
    TabularQLearning,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Suite {
    All,
    Drift,
    Selection,
    Psi,
    ValueGap,
}

fn load_spec(path: &PathBuf) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ExperimentSpec::from_toml(&text)?)
}

fn emit(json: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, json).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve { config, output, method } => {
            let spec = load_spec(&config)?;
            let method = match method {
                Some(Method::ValueIteration) => TrainingMethod::ValueIteration,
                Some(Method::TabularQLearning) => TrainingMethod::TabularQLearning,
                None => spec.training.method.unwrap_or_else(|| spec.environment.default_method()),
            };
            let artifact = train_stale_q(&spec.environment, method, &spec.training, spec.search.gamma)?;
            if artifact.provenance.status != "converged" {
                eprintln!("warning: training status {}", artifact.provenance.status);
            }
            emit(&artifact.to_json()?, output.as_ref())
        }
        Command::Run { config, output, serial } => {
            let mut spec = load_spec(&config)?;
            if output.is_some() {
                spec.run.output = output;
            }
            if serial {
                spec.run.parallel = false;
            }
            if spec.run.output.is_none() {
                bail!("no output path: set run.output or pass --output");
            }
            let outcome = run_experiment(&spec)?;
            let rows = summarize_records(&outcome.records)?;
            eprintln!(
                "{} episodes, agent {} alpha {}",
                outcome.records.len(),
                outcome.agent.name(),
                outcome.agent.alpha()
            );
            println!("{}", serde_json::to_string_pretty(&rows)?);
            Ok(())
        }
        Command::SweepAlpha { config } => {
            let result = sweep_experiment(&load_spec(&config)?)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
            Ok(())
        }
        Command::VerifyBounds { suite, trials, seed, strict } => {
            let mut reports = Vec::new();
            let wants = |s: Suite| suite == Suite::All || suite == s;
            if wants(Suite::Drift) {
                reports.push(verify_theorem1_batch(trials, 6, 3, 0.2, 0.9, seed)?);
            }
            if wants(Suite::Selection) {
                let r = verify_selection_soundness(trials, seed)?;
                reports.push(r.current_gap);
                reports.push(r.stale_gap);
            }
            if wants(Suite::Psi) {
                reports.push(verify_psi_relation_batch(trials, seed)?);
            }
            if wants(Suite::ValueGap) {
                reports.push(verify_theorem3_batch(trials, 5, 0.9, seed)?);
            }
            println!("{}", serde_json::to_string_pretty(&reports)?);
            if strict && reports.iter().any(|r| !r.passed()) {
                bail!("bound violations found");
            }
            Ok(())
        }
        Command::Summarize { inputs } => {
            let mut records = Vec::new();
            for path in &inputs {
                records.extend(read_records_file(path)?);
            }
            println!("{}", serde_json::to_string_pretty(&summarize_records(&records)?)?);
            Ok(())
        }
    }
}
