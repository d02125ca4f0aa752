//! `fogsim evaluate`: failure rates, error tables and prediction grids.

use super::predict::load_model;
use super::{ensure_dir, write_bytes};
use crate::{runtime, CliError};
use fogsim_core::eval::{
    check_grid_monotonicity, error_table, failure_rate, prediction_grid, render_error_text,
    render_failure_text, train_eval_split, write_error_csv, write_failure_csv, write_grid_csv,
    MonotonicityReport, DEFAULT_ERROR_RANGE_EDGES, DEFAULT_FAILURE_RANGE_EDGES,
    DEFAULT_REFLECTIVITY_EDGES,
};
use fogsim_core::recording::read_dataset_csv;
use fogsim_core::scene::ReflectorClass;
use serde::Serialize;
use std::io::BufReader;
use std::path::PathBuf;

/// Default grid of the emitted prediction tables.
pub const GRID_RANGES: [f64; 4] = [10.0, 15.0, 20.0, 25.0];
pub const GRID_REFLS_DIFFUSE: [f64; 6] = [1.0, 5.0, 10.0, 30.0, 50.0, 80.0];
pub const GRID_REFLS_RETRO: [f64; 3] = [120.0, 180.0, 250.0];

#[derive(Clone, Debug)]
pub struct EvaluateArgs {
    pub model_diffuse: PathBuf,
    pub model_retro: PathBuf,
    pub dataset: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub eval_fraction: f64,
    /// Evaluate against the full dataset including training points.
    pub paper_mode: bool,
    /// Exit nonzero when a grid monotonicity flag fails.
    pub check_monotonicity: bool,
}

#[derive(Serialize)]
struct MonotonicityFile {
    diffuse: MonotonicityReport,
    retro: MonotonicityReport,
}

pub fn run(args: &EvaluateArgs) -> Result<(), CliError> {
    let model_d = load_model(&args.model_diffuse)?;
    let model_r = load_model(&args.model_retro)?;
    let file = std::fs::File::open(&args.dataset).map_err(|e| {
        CliError::Validation(format!("cannot read dataset {}: {e}", args.dataset.display()))
    })?;
    let samples = read_dataset_csv(BufReader::new(file))
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.dataset.display())))?;

    let eval_set = if args.paper_mode {
        samples
    } else {
        train_eval_split(&samples, args.eval_fraction, args.seed).1
    };
    eprintln!("evaluating {} samples", eval_set.len());

    ensure_dir(&args.out)?;

    let failures = failure_rate(&model_d, &model_r, &eval_set, &DEFAULT_FAILURE_RANGE_EDGES);
    let mut bytes = Vec::new();
    write_failure_csv(&failures, &mut bytes).map_err(runtime)?;
    write_bytes(&args.out.join("failure_report.csv"), &bytes)?;
    let failure_text = render_failure_text(&failures);
    write_bytes(&args.out.join("failure_report.txt"), failure_text.as_bytes())?;

    let errors = error_table(
        &model_d,
        &model_r,
        &eval_set,
        &DEFAULT_ERROR_RANGE_EDGES,
        &DEFAULT_REFLECTIVITY_EDGES,
    );
    let mut bytes = Vec::new();
    write_error_csv(&errors, &mut bytes).map_err(runtime)?;
    write_bytes(&args.out.join("error_table.csv"), &bytes)?;
    let error_text = render_error_text(&errors);
    write_bytes(&args.out.join("error_table.txt"), error_text.as_bytes())?;

    let grid_d = prediction_grid(&model_d, &GRID_RANGES, &GRID_REFLS_DIFFUSE);
    let grid_r = prediction_grid(&model_r, &GRID_RANGES, &GRID_REFLS_RETRO);
    let mut bytes = Vec::new();
    write_grid_csv(&grid_d, &mut bytes).map_err(runtime)?;
    write_bytes(&args.out.join("grid_diffuse.csv"), &bytes)?;
    let mut bytes = Vec::new();
    write_grid_csv(&grid_r, &mut bytes).map_err(runtime)?;
    write_bytes(&args.out.join("grid_retro.csv"), &bytes)?;

    let mono = MonotonicityFile {
        diffuse: check_grid_monotonicity(&grid_d, &GRID_RANGES, &GRID_REFLS_DIFFUSE),
        retro: check_grid_monotonicity(&grid_r, &GRID_RANGES, &GRID_REFLS_RETRO),
    };
    let json = serde_json::to_string_pretty(&mono).map_err(runtime)?;
    write_bytes(&args.out.join("monotonicity.json"), format!("{json}\n").as_bytes())?;

    println!("failure rates (fraction outside the 95% region):");
    print!("{failure_text}");
    println!();
    println!("mean absolute prediction errors:");
    print!("{error_text}");
    println!();
    println!(
        "overall: diffuse {:.2}% vs retro {:.2}%",
        100.0 * failures.overall_rate(ReflectorClass::Diffuse),
        100.0 * failures.overall_rate(ReflectorClass::Retro),
    );
    println!(
        "grid monotonicity: diffuse {} retro {}",
        if mono.diffuse.pass() { "pass" } else { "FAIL" },
        if mono.retro.pass() { "pass" } else { "FAIL" },
    );

    if args.check_monotonicity && !(mono.diffuse.pass() && mono.retro.pass()) {
        let mut details = mono.diffuse.violations;
        details.extend(mono.retro.violations);
        return Err(CliError::FlagFailure(format!(
            "grid monotonicity violated: {}",
            details.join("; ")
        )));
    }
    Ok(())
}
