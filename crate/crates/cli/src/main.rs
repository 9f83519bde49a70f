use std::path::PathBuf;
use std::process::ExitCode;

use boostcolony::report::Format;
use boostcolony_cli::{resolve, run, Experiment, Overrides};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "boostcolony", version, about = "Boosting and ant-colony recruitment experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Colony accuracy of weak ants against waves, with the lower bound.
    WeakLearnability(Common),
    /// Instance-weight and pheromone traces.
    Traces(Common),
    /// Boosting margin and quorum margin distributions.
    Margins(Common),
    /// Accuracy against iterations and waves.
    Convergence(Common),
    /// Accuracy under label and observation noise, with equivalence tests.
    Noise(Common),
    /// Expected-update equivalence between boosting and the colony.
    IsoCheck(Common),
    /// Every experiment in turn.
    All(Common),
}

#[derive(Args)]
struct Common {
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replicates per cell (applies to every study being run).
    #[arg(long)]
    replicates: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config layered over the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weak-ant edges, comma separated.
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    /// Wave horizons, comma separated.
    #[arg(long, value_delimiter = ',')]
    waves: Option<Vec<usize>>,
    /// Noise levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    noise_levels: Option<Vec<f64>>,
    /// Output formats: csv, json or both.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<Format>>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (experiments, common): (Vec<Experiment>, Common) = match cli.command {
        Command::WeakLearnability(c) => (vec![Experiment::WeakLearnability], c),
        Command::Traces(c) => (vec![Experiment::Traces], c),
        Command::Margins(c) => (vec![Experiment::Margins], c),
        Command::Convergence(c) => (vec![Experiment::Convergence], c),
        Command::Noise(c) => (vec![Experiment::Noise], c),
        Command::IsoCheck(c) => (vec![Experiment::IsoCheck], c),
        Command::All(c) => (Experiment::ALL.to_vec(), c),
    };
    let overrides = Overrides {
        seed: common.seed,
        replicates: common.replicates,
        out: common.out,
        gammas: common.gammas,
        waves: common.waves,
        noise_levels: common.noise_levels,
        formats: common.format,
    };
    let cfg = match resolve(common.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => {
            log::error!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg, &experiments) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::from(2)
        }
    }
}
