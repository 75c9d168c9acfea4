use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use epibound::experiments::{
    run_bound_compare, run_policy_experiment, run_reliability_report, run_sis_demo,
    ExperimentOutput, Overrides, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "epibound",
    version,
    about = "SI epidemic bounds, simulation and vaccination experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean field, simulation mean and both upper bounds from a fixed source.
    BoundCompare(RunArgs),
    /// Vaccination policies against the unvaccinated epidemic.
    Policy(RunArgs),
    /// SIS ensembles below and above threshold.
    SisDemo(RunArgs),
    /// Hazard, survival and residual-life tables.
    Reliability(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Infection rates (comma separated); replaces model.beta.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Vaccine budgets (comma separated); replaces scenario.k.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Edge-list file; replaces the configured graph.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use full-scale replica counts (10^4) unless --replicas is given.
    #[arg(long)]
    full_scale: bool,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::from_path(&self.config)
            .with_context(|| format!("reading {}", self.config.display()))?;
        cfg.apply(&Overrides {
            beta: self.beta.clone(),
            k: self.k.clone(),
            replicas: self.replicas,
            seed: self.seed,
            graph: self.graph.clone(),
            out: self.out.clone(),
            full_scale: self.full_scale,
        })?;
        Ok(cfg)
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (args, runner): (
        &RunArgs,
        fn(&RunConfig) -> epibound::Result<ExperimentOutput>,
    ) = match &cli.command {
        Command::BoundCompare(a) => (a, run_bound_compare),
        Command::Policy(a) => (a, run_policy_experiment),
        Command::SisDemo(a) => (a, run_sis_demo),
        Command::Reliability(a) => (a, run_reliability_report),
    };
    let cfg = args.load()?;
    let out = runner(&cfg)?;
    let (csv, manifest) = out.write(&cfg.output.dir)?;
    println!("{} rows -> {}", out.table.len(), csv.display());
    println!("manifest -> {}", manifest.display());
    Ok(())
}
