//! `fogsim predict`: query a trained model at points or over a grid.

use super::write_bytes;
use crate::{runtime, CliError};
use fogsim_core::eval::{prediction_grid, write_grid_csv};
use fogsim_core::gpr::GpModel;
use std::io::BufReader;
use std::path::PathBuf;

#[derive(Clone, Debug)]
pub struct PredictArgs {
    pub model: PathBuf,
    /// Single-point query.
    pub range: Option<f64>,
    pub reflectivity: Option<f64>,
    /// Grid query (cartesian product).
    pub ranges: Option<Vec<f64>>,
    pub reflectivities: Option<Vec<f64>>,
    /// Write grid CSV here instead of stdout.
    pub out: Option<PathBuf>,
}

pub fn load_model(path: &PathBuf) -> Result<GpModel, CliError> {
    let file = std::fs::File::open(path).map_err(|e| {
        CliError::Validation(format!("cannot read model {}: {e}", path.display()))
    })?;
    GpModel::read_json(BufReader::new(file))
        .map_err(|e| CliError::Validation(format!("model {}: {e}", path.display())))
}

pub fn run(args: &PredictArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    match (args.range, args.reflectivity, &args.ranges, &args.reflectivities) {
        (Some(r), Some(b), None, None) => {
            let p = model.predict(r, b);
            if p.extrapolated {
                eprintln!(
                    "warning: ({r} m, {b}) lies outside the training bounds; prediction clamped"
                );
            }
            println!("range_m={r} reflectivity={b} mean_m={} std_m={}", p.mean, p.std);
            Ok(())
        }
        (None, None, Some(ranges), Some(refls)) => {
            if ranges.is_empty() || refls.is_empty() {
                return Err(CliError::Validation("empty grid axis".into()));
            }
            let rows = prediction_grid(&model, ranges, refls);
            let mut bytes = Vec::new();
            write_grid_csv(&rows, &mut bytes).map_err(runtime)?;
            match &args.out {
                Some(path) => write_bytes(path, &bytes)?,
                None => print!("{}", String::from_utf8_lossy(&bytes)),
            }
            Ok(())
        }
        _ => Err(CliError::Validation(
            "pass either --range and --refl, or --ranges and --refls".into(),
        )),
    }
}
