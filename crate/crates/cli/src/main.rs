mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CliResult, RunConfig};

#[derive(Parser)]
#[command(name = "gaussvm", version, about = "Gaussian-kernel SVM experiment driver")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Flat key = value config file; flags override file values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Base seed; required for data-producing runs unless the config sets it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread cap; defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory; defaults to $GAUSSVM_OUT, then ./out.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Also emit SVG plots derived from the tabular output.
    #[arg(long, global = true)]
    plot: bool,

    /// Extra KEY=VALUE override; repeatable, same keys as the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a training set from a synthetic family and serialize it.
    Gen,
    /// Train one regularized kernel machine and dump solution + diagnostics.
    Train,
    /// Fit margin-noise, geometric-decay, and envelope exponents.
    Noise,
    /// Scan approximation-error witnesses over a (sigma, lambda) grid.
    Approx,
    /// Scan covering-number bounds over a (sigma, epsilon) grid.
    Cover,
    /// Run the learning-rate experiment and fit the observed exponent.
    Rates,
    /// Run the property-check suites; nonzero exit if any fails.
    Check,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult<i32> {
    let command = match cli.command {
        Cmd::Gen => "gen",
        Cmd::Train => "train",
        Cmd::Noise => "noise",
        Cmd::Approx => "approx",
        Cmd::Cover => "cover",
        Cmd::Rates => "rates",
        Cmd::Check => "check",
    };

    let mut flags: Vec<(String, String)> = Vec::new();
    if let Some(seed) = cli.seed {
        flags.push(("seed".into(), seed.to_string()));
    }
    if let Some(jobs) = cli.jobs {
        flags.push(("jobs".into(), jobs.to_string()));
    }
    if let Some(out) = &cli.out {
        flags.push(("out".into(), out.display().to_string()));
    }
    if cli.plot {
        flags.push(("plot".into(), "true".into()));
    }
    for pair in &cli.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| format!("--set expects KEY=VALUE, got '{pair}'"))?;
        flags.push((k.trim().to_string(), v.trim().to_string()));
    }

    let cfg = RunConfig::build(command, cli.config.as_deref(), &flags)?;
    if let Some(jobs) = cfg.jobs()? {
        if jobs == 0 {
            return Err("key 'jobs': must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| format!("cannot configure worker pool: {e}"))?;
    }

    match command {
        "gen" => commands::run_gen(&cfg)?,
        "train" => commands::run_train(&cfg)?,
        "noise" => commands::run_noise(&cfg)?,
        "approx" => commands::run_approx(&cfg)?,
        "cover" => commands::run_cover(&cfg)?,
        "rates" => commands::run_rates(&cfg)?,
        "check" => return commands::run_check(&cfg),
        _ => unreachable!(),
    }
    Ok(0)
}
