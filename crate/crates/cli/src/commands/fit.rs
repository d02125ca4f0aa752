//! `fogsim fit`: train the diffuse and retro regressors.

use super::{ensure_dir, write_bytes};
use crate::{runtime, CliError};
use fogsim_core::eval::train_eval_split;
use fogsim_core::gpr::{fit, FitConfig, GprError, Regime};
use fogsim_core::recording::read_dataset_csv;
use serde::Serialize;
use std::io::BufReader;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeChoice {
    Both,
    Diffuse,
    Retro,
}

#[derive(Clone, Debug)]
pub struct FitArgs {
    pub dataset: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub regime: RegimeChoice,
    pub starts: Option<u32>,
    pub cap: Option<usize>,
    /// Fraction held out for evaluation; ignored in paper mode.
    pub eval_fraction: f64,
    /// Train on the full dataset (the evaluation protocol of the original
    /// chamber study).
    pub paper_mode: bool,
}

#[derive(Serialize)]
struct RegimeReport {
    regime: Regime,
    amplitude: f64,
    lengthscale: f64,
    noise_std: f64,
    lml: f64,
    n_train: usize,
    n_regime: usize,
}

#[derive(Serialize)]
struct FitReport {
    seed: u64,
    n_samples: usize,
    n_training_pool: usize,
    eval_fraction: f64,
    paper_mode: bool,
    regimes: Vec<RegimeReport>,
}

pub fn run(args: &FitArgs) -> Result<(), CliError> {
    let file = std::fs::File::open(&args.dataset).map_err(|e| {
        CliError::Validation(format!("cannot read dataset {}: {e}", args.dataset.display()))
    })?;
    let samples = read_dataset_csv(BufReader::new(file))
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.dataset.display())))?;

    let pool = if args.paper_mode {
        samples.clone()
    } else {
        train_eval_split(&samples, args.eval_fraction, args.seed).0
    };

    let mut fit_cfg = FitConfig::default();
    if let Some(starts) = args.starts {
        fit_cfg.n_starts = starts;
    }
    if let Some(cap) = args.cap {
        fit_cfg.training_cap = cap;
    }

    let regimes: &[Regime] = match args.regime {
        RegimeChoice::Both => &[Regime::Diffuse, Regime::Retro],
        RegimeChoice::Diffuse => &[Regime::Diffuse],
        RegimeChoice::Retro => &[Regime::Retro],
    };

    ensure_dir(&args.out)?;
    let mut reports = Vec::new();
    for &regime in regimes {
        let n_regime = pool.iter().filter(|s| regime.matches(s.reflectivity)).count();
        let model = fit(&pool, regime, &fit_cfg, args.seed).map_err(|e| match e {
            GprError::InsufficientData { .. } => CliError::Runtime(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        })?;
        let mut bytes = Vec::new();
        model.write_json(&mut bytes).map_err(runtime)?;
        write_bytes(&args.out.join(format!("model_{regime}.json")), &bytes)?;
        eprintln!(
            "fit {regime}: n_train={} amplitude={:.4} lengthscale={:.4} noise_std={:.4} lml={:.3}",
            model.n_train(),
            model.params.amplitude,
            model.params.lengthscale,
            model.params.noise_std,
            model.lml
        );
        reports.push(RegimeReport {
            regime,
            amplitude: model.params.amplitude,
            lengthscale: model.params.lengthscale,
            noise_std: model.params.noise_std,
            lml: model.lml,
            n_train: model.n_train(),
            n_regime,
        });
    }

    let report = FitReport {
        seed: args.seed,
        n_samples: samples.len(),
        n_training_pool: pool.len(),
        eval_fraction: if args.paper_mode { 0.0 } else { args.eval_fraction },
        paper_mode: args.paper_mode,
        regimes: reports,
    };
    let json = serde_json::to_string_pretty(&report).map_err(runtime)?;
    write_bytes(&args.out.join("fit_report.json"), format!("{json}\n").as_bytes())?;
    Ok(())
}
