use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use darisa::experiments::{self, output, Experiment, Instance, ScenarioConfig};
use darisa::Error;

#[derive(Parser)]
#[command(name = "darisa", version, about = "DARISA MIMO DoF and EDoF experiments")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Scenario TOML; the verb's built-in preset when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "DARISA_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Verb {
    /// Mean rank of H_w versus aperture and spread.
    DofSweep,
    /// Singular values and capacity, random versus optimized phases.
    EigenCapacity,
    /// Optimized EDoF versus element spacing.
    EdofSpacing,
    /// Optimized EDoF versus agility K.
    EdofAgility,
    /// Optimized EDoF versus receive element count.
    EdofElements,
    /// Optimized EDoF versus phase bits.
    EdofBits,
    /// One optimization with its full trace.
    Optimize,
    /// Closed-form DoF predictions only.
    Predict,
}

impl Verb {
    fn experiment(self) -> Experiment {
        match self {
            Verb::DofSweep => Experiment::DofSweep,
            Verb::EigenCapacity => Experiment::EigenCapacity,
            Verb::EdofSpacing => Experiment::EdofSpacing,
            Verb::EdofAgility => Experiment::EdofAgility,
            Verb::EdofElements => Experiment::EdofElements,
            Verb::EdofBits => Experiment::EdofBits,
            Verb::Optimize => Experiment::Optimize,
            Verb::Predict => Experiment::Predict,
        }
    }
}

fn run(cli: &Cli) -> darisa::Result<Vec<PathBuf>> {
    let experiment = cli.verb.experiment();
    let mut cfg = match &cli.common.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::preset(experiment),
    };
    if let Some(seed) = cli.common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.common.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let dir = &cli.common.out_dir;
    pool.install(|| match experiment {
        Experiment::DofSweep => output::write_sweep(dir, &cfg, &experiments::run_dof_sweep(&cfg)?),
        Experiment::EigenCapacity => output::write_eigen_capacity(dir, &cfg, &experiments::run_eigen_capacity(&cfg)?),
        Experiment::Optimize => output::write_single(dir, &cfg, &experiments::run_single_optimization(&cfg)?),
        Experiment::Predict => output::write_prediction(dir, &cfg, &Instance::from_config(&cfg)?.predict()?),
        e => output::write_sweep(dir, &cfg, &experiments::run_edof_experiments(&cfg, e)?),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = serde_json::json!({
                "error": e.kind(),
                "message": e.to_string(),
                "verb": cli.verb.experiment().name(),
            });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
