//! Batch front-end for the fog-chamber LiDAR pipeline:
//! simulate -> extract -> fit -> predict / evaluate.

use clap::{Parser, Subcommand, ValueEnum};
use fogsim_cli::commands::evaluate::EvaluateArgs;
use fogsim_cli::commands::extract::ExtractArgs;
use fogsim_cli::commands::fit::{FitArgs, RegimeChoice};
use fogsim_cli::commands::predict::PredictArgs;
use fogsim_cli::commands::simulate::SimulateArgs;
use fogsim_cli::commands::{evaluate, extract, fit, predict, simulate};
use fogsim_cli::config::RunConfig;
use fogsim_cli::CliError;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "fogsim",
    about = "Simulate a scanning ToF LiDAR in dissipating fog, extract disappear-visibility \
             datasets, and train/evaluate Gaussian-process range-capability models",
    version
)]
struct Cli {
    /// Pipeline configuration file (JSON); flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base random seed (required for simulate and fit).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: fogsim-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Both,
    Diffuse,
    Retro,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured scenarios: one clear-air reference plus one
    /// fog recording each, with a manifest of output hashes.
    Simulate {
        /// Scenario preset (paper-boards, paper-car, paper-signs,
        /// paper-background, paper-all).
        #[arg(long)]
        preset: Option<String>,
        /// Scene JSON file (alternative to --preset).
        #[arg(long)]
        scene: Option<PathBuf>,
        /// Also write CSV mirrors of the fog recordings.
        #[arg(long)]
        csv: bool,
    },
    /// Reduce recordings to the disappear-visibility dataset.
    Extract {
        /// Manifest file from `simulate`, or the directory holding it.
        #[arg(long)]
        recordings: PathBuf,
        /// Lock threshold on the averaged range (m).
        #[arg(long)]
        sigma: Option<f64>,
        /// Lock stability window (s).
        #[arg(long)]
        window: Option<u32>,
        /// Clear-air ROI range gate (m).
        #[arg(long)]
        sigma_roi: Option<f64>,
    },
    /// Train the diffuse/retro Gaussian-process models.
    Fit {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        regime: RegimeArg,
        /// Optimizer starts.
        #[arg(long)]
        starts: Option<u32>,
        /// Training-subset cap.
        #[arg(long)]
        cap: Option<usize>,
        /// Held-out fraction (shared with evaluate).
        #[arg(long)]
        eval_fraction: Option<f64>,
        /// Train on the full dataset (no held-out split).
        #[arg(long)]
        paper_mode: bool,
    },
    /// Predict disappear visibility at a point or over a grid.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        range: Option<f64>,
        #[arg(long)]
        refl: Option<f64>,
        /// Comma-separated range axis of a grid (m).
        #[arg(long, value_delimiter = ',')]
        ranges: Option<Vec<f64>>,
        /// Comma-separated reflectivity axis of a grid.
        #[arg(long, value_delimiter = ',')]
        refls: Option<Vec<f64>>,
        /// Write the grid CSV here instead of stdout.
        #[arg(long)]
        grid_out: Option<PathBuf>,
    },
    /// Failure rates, error tables and prediction grids for trained models.
    Evaluate {
        #[arg(long)]
        model_diffuse: PathBuf,
        #[arg(long)]
        model_retro: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Held-out fraction (shared with fit).
        #[arg(long)]
        eval_fraction: Option<f64>,
        /// Evaluate against the full dataset including training points.
        #[arg(long)]
        paper_mode: bool,
        /// Exit with code 3 when a grid monotonicity flag fails.
        #[arg(long)]
        check_monotonicity: bool,
    },
}

fn require_seed(cli_seed: Option<u64>, config: &RunConfig, what: &str) -> Result<u64, CliError> {
    cli_seed.or(config.seed).ok_or_else(|| {
        CliError::Validation(format!("{what} requires a seed (--seed or config.seed)"))
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--jobs: {e}")))?;
    }
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("fogsim-out"));

    match cli.command {
        Command::Simulate { preset, scene, csv } => {
            if preset.is_some() {
                config.preset = preset;
                config.scene = None;
            } else if scene.is_some() {
                config.scene = scene;
                config.preset = None;
            }
            let seed = require_seed(cli.seed, &config, "simulate")?;
            simulate::run(&SimulateArgs { config, seed, out, csv_mirror: csv })
        }
        Command::Extract { recordings, sigma, window, sigma_roi } => {
            if let Some(s) = sigma {
                config.sigma = Some(s);
            }
            if let Some(w) = window {
                config.window = Some(w);
            }
            if let Some(s) = sigma_roi {
                config.sigma_roi = Some(s);
            }
            extract::run(&ExtractArgs {
                manifest: recordings,
                out,
                sigma: config.sigma(),
                window: config.window(),
                sigma_roi: config.sigma_roi(),
            })
        }
        Command::Fit { dataset, regime, starts, cap, eval_fraction, paper_mode } => {
            let seed = require_seed(cli.seed, &config, "fit")?;
            let gpr = config.gpr.clone().unwrap_or_default();
            fit::run(&FitArgs {
                dataset,
                out,
                seed,
                regime: match regime {
                    RegimeArg::Both => RegimeChoice::Both,
                    RegimeArg::Diffuse => RegimeChoice::Diffuse,
                    RegimeArg::Retro => RegimeChoice::Retro,
                },
                starts: starts.or(gpr.starts),
                cap: cap.or(gpr.cap),
                eval_fraction: eval_fraction.or(gpr.eval_fraction).unwrap_or(0.2),
                paper_mode,
            })
        }
        Command::Predict { model, range, refl, ranges, refls, grid_out } => {
            predict::run(&PredictArgs {
                model,
                range,
                reflectivity: refl,
                ranges,
                reflectivities: refls,
                out: grid_out,
            })
        }
        Command::Evaluate {
            model_diffuse,
            model_retro,
            dataset,
            eval_fraction,
            paper_mode,
            check_monotonicity,
        } => {
            let gpr = config.gpr.clone().unwrap_or_default();
            let seed = cli.seed.or(config.seed).unwrap_or(0);
            evaluate::run(&EvaluateArgs {
                model_diffuse,
                model_retro,
                dataset,
                out,
                seed,
                eval_fraction: eval_fraction.or(gpr.eval_fraction).unwrap_or(0.2),
                paper_mode,
                check_monotonicity,
            })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
