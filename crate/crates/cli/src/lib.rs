//! Command-line front end: seeded replicate batches, budget sweeps with CSV
//! and SVG output, instance analysis, and the verification suite.

pub mod config;
pub mod error;
pub mod report;
pub mod svg;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use qbl_core::analysis::{analyze_with_mc, AnalysisReport};
use qbl_core::rng::{stream, Stream};
use qbl_core::InstanceSpec;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use report::SweepRow;

pub const RESULTS_FILE: &str = "results.csv";
pub const CHART_FILE: &str = "sweep.svg";

#[derive(Debug, Parser)]
#[command(name = "qbl", version, about = "Bandits with a budget of best-action queries")]
pub struct Cli {
    /// Write outputs here instead of the config's `output_dir`.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Override the root seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every (policy, k) pair of a config and write results.csv.
    Run { config: PathBuf },
    /// As `run`, plus a regret-vs-k chart (sweep.svg).
    Sweep { config: PathBuf },
    /// Run the named numerical checks.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: verify::Level,
    },
    /// Print the analytic report for an instance file.
    Analyze {
        instance: PathBuf,
        /// Add a Monte Carlo cross-check of OPT_d with this many samples.
        #[arg(long)]
        mc_samples: Option<usize>,
    },
}

/// Executes a parsed command line, writing human-readable output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => {
            let config = load_config(&config, cli.output_dir, cli.seed)?;
            cmd_run(&config, out).map(|_| ())
        }
        Command::Sweep { config } => {
            let config = load_config(&config, cli.output_dir, cli.seed)?;
            cmd_sweep(&config, out)
        }
        Command::Verify { level } => {
            let mut opts = verify::VerifyOptions::new(level);
            opts.seed = cli.seed.unwrap_or(0);
            opts.threads = config::threads_override()?
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            cmd_verify(&opts, out)
        }
        Command::Analyze { instance, mc_samples } => {
            let report = cmd_analyze(&instance, mc_samples, cli.seed.unwrap_or(0))?;
            writeln!(out, "{}", report.to_json()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

pub fn load_config(path: &Path, output_dir: Option<PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let mut config = ExperimentConfig::load(path)?;
    config.apply_env()?;
    if let Some(dir) = output_dir {
        config.output_dir = dir;
    }
    if let Some(seed) = seed {
        config.root_seed = seed;
    }
    Ok(config)
}

/// Runs the experiment and writes `results.csv` atomically.
pub fn cmd_run(config: &ExperimentConfig, out: &mut dyn Write) -> Result<Vec<SweepRow>, CliError> {
    let rows = report::run_experiment(config)?;
    let path = config.output_dir.join(RESULTS_FILE);
    report::write_atomic(&path, &report::to_csv(&rows))?;
    let io = |e| CliError::io("<stdout>", e);
    writeln!(out, "{:<24} {:>8} {:>14} {:>10}", "policy", "k", "mean_regret", "std_err").map_err(io)?;
    for r in &rows {
        writeln!(out, "{:<24} {:>8} {:>14.3} {:>10.3}", r.policy, r.k, r.mean_pseudo_regret, r.std_err).map_err(io)?;
    }
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    Ok(rows)
}

pub fn cmd_sweep(config: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    if config.k_grid.len() < 2 {
        return Err(CliError::Config(format!("k_grid: a sweep needs at least 2 values, got {}", config.k_grid.len())));
    }
    let instance = config.build_instance()?;
    let rows = cmd_run(config, out)?;
    let title = format!("n = {}, T = {}, {} replicates", instance.n_arms(), config.horizon, config.replicates);
    let chart = svg::render(&rows, instance.n_arms(), config.horizon, &title);
    let path = config.output_dir.join(CHART_FILE);
    report::write_atomic(&path, chart.svg.as_bytes())?;
    let io = |e| CliError::io("<stdout>", e);
    match chart.fit {
        Some(c) => writeln!(out, "fitted envelope constant c = {c:.6} ({} series)", svg::FIT_POLICY).map_err(io)?,
        None => writeln!(out, "no {} series; reference curve omitted", svg::FIT_POLICY).map_err(io)?,
    }
    writeln!(out, "wrote {}", path.display()).map_err(io)
}

pub fn cmd_verify(opts: &verify::VerifyOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let mut io_err = None;
    let checks = verify::run_suite(opts, |c| {
        let mut line = c.to_string();
        if !c.detail.is_empty() {
            line.push_str(&format!("\n    {}", c.detail));
        }
        if let Err(e) = writeln!(out, "{line}").and_then(|_| out.flush()) {
            io_err.get_or_insert(e);
        }
    });
    if let Some(e) = io_err {
        return Err(CliError::io("<stdout>", e));
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.to_string()).collect();
    writeln!(out, "{}/{} checks passed", checks.len() - failed.len(), checks.len())
        .map_err(|e| CliError::io("<stdout>", e))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed))
    }
}

pub fn cmd_analyze(path: &Path, mc_samples: Option<usize>, seed: u64) -> Result<AnalysisReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let instance = InstanceSpec::from_json(&text)?.build()?;
    match mc_samples {
        Some(n) => Ok(analyze_with_mc(&instance, n, &mut stream(seed, Stream::Analysis))?),
        None => Ok(qbl_core::analysis::analyze(&instance)),
    }
}
