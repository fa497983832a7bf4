use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use seqar_cli::{init_workers, run, CliError, ExperimentConfig, Mode};

#[derive(Parser)]
#[command(
    name = "seqar",
    version,
    about = "Sequential model selection for varying-coefficient AR(1) processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path per sample size.
    Simulate(RunArgs),
    /// Run the sequential kernel procedure on one path.
    Estimate(RunArgs),
    /// Select the weighted Fourier estimator on one path.
    Select(RunArgs),
    /// Monte Carlo risk of every weight vector and of the selected one.
    Risk(RunArgs),
    /// Risk report with oracle ratios across sample sizes.
    OracleCheck(RunArgs),
    /// Moment and decomposition diagnostics.
    Diagnostics(RunArgs),
    /// Check a configuration file and print it with defaults filled in.
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `run.output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (mode, args) = match cli.command {
        Command::Simulate(a) => (Some(Mode::Simulate), a),
        Command::Estimate(a) => (Some(Mode::Estimate), a),
        Command::Select(a) => (Some(Mode::Select), a),
        Command::Risk(a) => (Some(Mode::Risk), a),
        Command::OracleCheck(a) => (Some(Mode::OracleCheck), a),
        Command::Diagnostics(a) => (Some(Mode::Diagnostics), a),
        Command::Validate(a) => (None, a),
    };
    let bytes = std::fs::read(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Config(format!("{} is not valid UTF-8", args.config.display())))?;
    let mut cfg = ExperimentConfig::from_toml_str(&text)?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.run.output_dir = out;
    }
    let Some(mode) = mode else {
        cfg.validate(Mode::Estimate)?;
        println!("# configuration ok");
        print!("{}", cfg.to_toml());
        return Ok(());
    };
    init_workers(cfg.run.workers)?;
    let written = run(mode, &cfg, &bytes, &cfg.run.output_dir)?;
    for name in written {
        println!("{}", cfg.run.output_dir.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("seqar: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
