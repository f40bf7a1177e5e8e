use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use shapeopt_cli::{cmd_compare, cmd_evaluate, cmd_run, cmd_sweep_nini, RunConfig, RunnerError};

#[derive(Parser)]
#[command(name = "shapeopt", version, about = "Language-model-guided parametric shape optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured optimizer once per seed.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue existing run directories after their last complete generation.
        #[arg(long)]
        resume: bool,
    },
    /// Tabulate mean, min, and max best-so-far per generation across runs.
    Compare {
        /// NAME=DIR[,DIR...]; a directory of seed_* runs counts as all of them.
        #[arg(long = "method", required = true)]
        methods: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeat a run for several numbers of seeded initial generations.
    SweepNini {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        n_ini: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a single design vector.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated design values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        design: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_method(arg: &str) -> Result<(String, Vec<PathBuf>)> {
    let Some((name, dirs)) = arg.split_once('=') else {
        bail!("expected NAME=DIR[,DIR...], got {arg:?}");
    };
    let dirs: Vec<PathBuf> = dirs.split(',').filter(|d| !d.is_empty()).map(PathBuf::from).collect();
    if name.is_empty() || dirs.is_empty() {
        bail!("expected NAME=DIR[,DIR...], got {arg:?}");
    }
    Ok((name.to_string(), dirs))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out, resume } => {
            let cfg = RunConfig::load(&config)?;
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            for s in cmd_run(&cfg, &out, resume)? {
                println!(
                    "seed {}: {} generations, best score {} in {}",
                    s.seed,
                    s.generations,
                    s.best_score,
                    s.dir.display()
                );
            }
        }
        Command::Compare { methods, out } => {
            let methods = methods
                .iter()
                .map(|m| parse_method(m))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| RunnerError::Config(shapeopt_cli::ConfigError::Invalid(e.to_string())))?;
            let table = cmd_compare(&methods, &out)?;
            println!("{} generations written to {}", table.rows.len(), out.display());
        }
        Command::SweepNini { config, n_ini, out } => {
            let cfg = RunConfig::load(&config)?;
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            let table = cmd_sweep_nini(&cfg, &n_ini, &out)?;
            for (v, best) in &table.final_best {
                println!("n_ini {v}: best scores {best:?}");
            }
        }
        Command::Evaluate { config, design, out } => {
            let cfg = RunConfig::load(&config)?;
            let summary = cmd_evaluate(&cfg, &design, out.as_deref())
                .with_context(|| format!("evaluating {design:?}"))?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .chain()
                .find_map(|c| {
                    c.downcast_ref::<RunnerError>()
                        .map(RunnerError::exit_code)
                        .or_else(|| c.downcast_ref::<shapeopt_cli::ConfigError>().map(|_| 2))
                })
                .unwrap_or(1);
            ExitCode::from(code as u8)
        }
    }
}
