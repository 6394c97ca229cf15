//! `pdefend`: static design, single episodes and Monte-Carlo sweeps from a
//! TOML configuration.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use perimeter_defense::geometry::Predictor;
use perimeter_defense::simulation::{Baseline, SimError};
use perimeter_defense::static_design::DesignError;
use thiserror::Error;

use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Parse(PathBuf, #[source] toml::de::Error),
    #[error("invalid `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("design failed: {0}")]
    Design(#[from] DesignError),
    #[error("simulation failed: {0}")]
    Sim(#[from] SimError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Parser)]
#[command(name = "pdefend", version, about = "Perimeter defense design and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed of the command's random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimFlags {
    /// Reuse a design.json instead of running the design loop.
    #[arg(long)]
    design: Option<PathBuf>,
    #[arg(long, value_parser = parse_predictor)]
    predictor: Option<Predictor>,
    #[arg(long)]
    baseline: Option<Baseline>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Place reserve stations, trace both regions and size the monitoring team.
    Design {
        #[command(flatten)]
        common: Common,
    },
    /// Run one episode and write its trace and summary.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimFlags,
        /// Exit with status 2 when a guard or priority violation is recorded.
        #[arg(long)]
        strict: bool,
        /// Include the cost matrix of every step in the trace.
        #[arg(long)]
        dump_assignments: bool,
    },
    /// Sweep baselines, turn rates and intruder counts.
    Montecarlo {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimFlags,
        /// Episodes per sweep point.
        #[arg(long)]
        runs: Option<usize>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn parse_predictor(s: &str) -> Result<Predictor, String> {
    match s {
        "eq2" => Ok(Predictor::Eq2),
        "velocity" => Ok(Predictor::Velocity),
        other => Err(format!("unknown predictor `{other}` (expected eq2 or velocity)")),
    }
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    RunConfig::load(&common.config)
}

fn apply_sim_flags(cfg: &mut RunConfig, seed: Option<u64>, sim: &SimFlags) {
    if let Some(seed) = seed {
        cfg.simulation.seed = seed;
    }
    if let Some(p) = sim.predictor {
        cfg.simulation.predictor = p;
    }
    if let Some(b) = sim.baseline {
        cfg.simulation.baseline = b;
        cfg.montecarlo.baselines = vec![b];
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Design { common } => {
            let mut cfg = load(&common)?;
            if let Some(seed) = common.seed {
                cfg.design.seed = seed;
            }
            let out = commands::output_dir(&cfg, common.out);
            let design = commands::cmd_design(&cfg, &out)?;
            println!(
                "{} stations, {} monitors, rs_min {:.3} m -> {}",
                design.layout.n(),
                design.n_monitors,
                design.rs_min,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            common,
            sim,
            strict,
            dump_assignments,
        } => {
            let mut cfg = load(&common)?;
            apply_sim_flags(&mut cfg, common.seed, &sim);
            cfg.simulation.dump_assignments |= dump_assignments;
            cfg.validate()?;
            let out = commands::output_dir(&cfg, common.out);
            let outcome = commands::cmd_simulate(&cfg, &out, sim.design.as_deref())?;
            let r = &outcome.result;
            println!(
                "{}: {} captures, {} intrusions, peak team {}, {} spawns -> {}",
                if r.success { "success" } else { "failure" },
                r.captures,
                r.intrusions,
                r.peak_team_size,
                r.spawn_count,
                out.display()
            );
            if strict && outcome.violated {
                eprintln!(
                    "allocation guarantee violated: {} guard flags, {} priority violations",
                    r.guard_flags, r.priority_violations
                );
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Montecarlo { common, sim, runs, jobs } => {
            let mut cfg = load(&common)?;
            apply_sim_flags(&mut cfg, common.seed, &sim);
            if let Some(runs) = runs {
                cfg.montecarlo.runs = runs;
            }
            cfg.validate()?;
            let out = commands::output_dir(&cfg, common.out);
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(j) = jobs {
                pool = pool.num_threads(j.max(1));
            }
            let pool = pool.build()?;
            let points = pool.install(|| commands::cmd_montecarlo(&cfg, &out, sim.design.as_deref()))?;
            println!("{points} sweep points -> {}", out.join("sweep.csv").display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
