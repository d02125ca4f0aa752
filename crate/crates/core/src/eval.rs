//! Model evaluation: confidence-region failure rates, binned absolute-error
//! tables and prediction grids.
//!
//! A prediction fails when the true disappear visibility falls outside the
//! 95% (two-sigma) region around the predictive mean. Non-failed predictions
//! contribute their absolute error to (range, reflectivity) bins. Reports are
//! pure functions of (models, samples): identical inputs render identical
//! bytes.

use crate::gpr::GpModel;
use crate::recording::DisappearSample;
use crate::rng::{domain, DetRng, StreamKey};
use crate::scene::ReflectorClass;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write;

/// Range-bin edges of the failure report (m). The final bin covers the
/// longest tested placements.
pub const DEFAULT_FAILURE_RANGE_EDGES: [f64; 6] = [0.0, 10.0, 15.0, 20.0, 25.0, 30.0];
/// Range-bin edges of the error table (m).
pub const DEFAULT_ERROR_RANGE_EDGES: [f64; 5] = [10.0, 15.0, 20.0, 25.0, 30.0];
/// Reflectivity-bin edges of the error table.
pub const DEFAULT_REFLECTIVITY_EDGES: [f64; 9] =
    [0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 100.0, 200.0, 255.0];

/// Multiplier on the predictive standard deviation for the 95% region.
pub const CONFIDENCE_SIGMA: f64 = 2.0;

/// Failure statistics for one (range bin, class) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureBin {
    pub range_lo: f64,
    pub range_hi: f64,
    pub class: ReflectorClass,
    pub n: usize,
    pub failures: usize,
}

impl FailureBin {
    pub fn rate(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.failures as f64 / self.n as f64
        }
    }
}

/// Failure rates binned by range and reflector class, plus per-class totals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub bins: Vec<FailureBin>,
    pub overall_diffuse: (usize, usize),
    pub overall_retro: (usize, usize),
    /// Samples whose range fell outside the configured bins.
    pub unbinned: usize,
}

impl FailureReport {
    pub fn overall_rate(&self, class: ReflectorClass) -> f64 {
        let (n, f) = match class {
            ReflectorClass::Diffuse => self.overall_diffuse,
            ReflectorClass::Retro => self.overall_retro,
        };
        if n == 0 {
            0.0
        } else {
            f as f64 / n as f64
        }
    }
}

fn model_for<'a>(
    model_diffuse: &'a GpModel,
    model_retro: &'a GpModel,
    sample: &DisappearSample,
) -> &'a GpModel {
    match sample.reflector_class() {
        ReflectorClass::Diffuse => model_diffuse,
        ReflectorClass::Retro => model_retro,
    }
}

/// A sample fails when its measured value lies outside the 95% region of the
/// observation-predictive distribution, `|v_dis - mean| > CONFIDENCE_SIGMA *
/// std`. Measured disappear visibilities are noisy observations, so the
/// region width includes the model's noise term.
pub fn is_failed(model: &GpModel, sample: &DisappearSample) -> bool {
    let p = model.predict_observation(sample.mean_range, sample.reflectivity);
    (sample.v_dis - p.mean).abs() > CONFIDENCE_SIGMA * p.std
}

/// Failure rates over the evaluated samples.
pub fn failure_rate(
    model_diffuse: &GpModel,
    model_retro: &GpModel,
    samples: &[DisappearSample],
    range_edges: &[f64],
) -> FailureReport {
    let n_bins = range_edges.len().saturating_sub(1);
    let mut bins: Vec<FailureBin> = Vec::with_capacity(2 * n_bins);
    for w in range_edges.windows(2) {
        for class in [ReflectorClass::Diffuse, ReflectorClass::Retro] {
            bins.push(FailureBin { range_lo: w[0], range_hi: w[1], class, n: 0, failures: 0 });
        }
    }
    let mut overall_diffuse = (0usize, 0usize);
    let mut overall_retro = (0usize, 0usize);
    let mut unbinned = 0usize;

    for s in samples {
        let class = s.reflector_class();
        let failed = is_failed(model_for(model_diffuse, model_retro, s), s);
        let overall = match class {
            ReflectorClass::Diffuse => &mut overall_diffuse,
            ReflectorClass::Retro => &mut overall_retro,
        };
        overall.0 += 1;
        overall.1 += usize::from(failed);

        let bin_idx = range_edges
            .windows(2)
            .position(|w| s.mean_range >= w[0] && s.mean_range < w[1]);
        match bin_idx {
            Some(i) => {
                let b = &mut bins[2 * i + usize::from(class == ReflectorClass::Retro)];
                b.n += 1;
                b.failures += usize::from(failed);
            }
            None => unbinned += 1,
        }
    }
    FailureReport { bins, overall_diffuse, overall_retro, unbinned }
}

/// One cell of the error table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCell {
    /// Non-failed predictions contributing to the mean absolute error.
    pub n: usize,
    /// Failed predictions excluded from the error.
    pub failed: usize,
    /// Mean absolute prediction error (m); meaningless when `n == 0`.
    pub mean_abs_error: f64,
}

/// Mean absolute errors over (range bin, reflectivity bin) cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub range_edges: Vec<f64>,
    pub reflectivity_edges: Vec<f64>,
    /// Row-major: `cells[range_bin][refl_bin]`.
    pub cells: Vec<Vec<ErrorCell>>,
    /// Per-range-bin overall across all reflectivities.
    pub row_overall: Vec<ErrorCell>,
}

/// Absolute errors of the non-failed predictions, binned.
pub fn error_table(
    model_diffuse: &GpModel,
    model_retro: &GpModel,
    samples: &[DisappearSample],
    range_edges: &[f64],
    reflectivity_edges: &[f64],
) -> ErrorTable {
    let n_r = range_edges.len() - 1;
    let n_b = reflectivity_edges.len() - 1;
    let mut sums = vec![vec![(0usize, 0usize, 0.0f64); n_b]; n_r];
    let mut row_sums = vec![(0usize, 0usize, 0.0f64); n_r];

    for s in samples {
        let ri = range_edges.windows(2).position(|w| s.mean_range >= w[0] && s.mean_range < w[1]);
        // last reflectivity bin is closed on the right
        let bi = reflectivity_edges.windows(2).enumerate().position(|(i, w)| {
            s.reflectivity >= w[0]
                && (s.reflectivity < w[1] || (i == n_b - 1 && s.reflectivity <= w[1]))
        });
        let (Some(ri), Some(bi)) = (ri, bi) else { continue };
        let model = model_for(model_diffuse, model_retro, s);
        let p = model.predict_observation(s.mean_range, s.reflectivity);
        let err = (s.v_dis - p.mean).abs();
        if err > CONFIDENCE_SIGMA * p.std {
            sums[ri][bi].1 += 1;
            row_sums[ri].1 += 1;
        } else {
            sums[ri][bi].0 += 1;
            sums[ri][bi].2 += err;
            row_sums[ri].0 += 1;
            row_sums[ri].2 += err;
        }
    }

    let to_cell = |(n, failed, sum): (usize, usize, f64)| ErrorCell {
        n,
        failed,
        mean_abs_error: if n == 0 { 0.0 } else { sum / n as f64 },
    };
    ErrorTable {
        range_edges: range_edges.to_vec(),
        reflectivity_edges: reflectivity_edges.to_vec(),
        cells: sums.into_iter().map(|row| row.into_iter().map(to_cell).collect()).collect(),
        row_overall: row_sums.into_iter().map(to_cell).collect(),
    }
}

/// One row of a prediction grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub range_m: f64,
    pub reflectivity: f64,
    pub mean: f64,
    pub std: f64,
    pub extrapolated: bool,
}

/// Dense prediction grid over the cartesian product of the given values.
pub fn prediction_grid(model: &GpModel, range_values: &[f64], refl_values: &[f64]) -> Vec<GridRow> {
    let mut rows = Vec::with_capacity(range_values.len() * refl_values.len());
    for &r in range_values {
        for &b in refl_values {
            let p = model.predict(r, b);
            rows.push(GridRow {
                range_m: r,
                reflectivity: b,
                mean: p.mean,
                std: p.std,
                extrapolated: p.extrapolated,
            });
        }
    }
    rows
}

/// Outcome of the grid monotonicity checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// Mean non-increasing in reflectivity at every fixed range.
    pub non_increasing_in_reflectivity: bool,
    /// Mean non-decreasing in range at every fixed reflectivity.
    pub non_decreasing_in_range: bool,
    pub violations: Vec<String>,
}

impl MonotonicityReport {
    pub fn pass(&self) -> bool {
        self.non_increasing_in_reflectivity && self.non_decreasing_in_range
    }
}

/// Check the expected orderings on a grid produced by [`prediction_grid`].
pub fn check_grid_monotonicity(
    rows: &[GridRow],
    range_values: &[f64],
    refl_values: &[f64],
) -> MonotonicityReport {
    let n_b = refl_values.len();
    let mean_at = |ri: usize, bi: usize| rows[ri * n_b + bi].mean;
    let tol = 1e-9;
    let mut report = MonotonicityReport {
        non_increasing_in_reflectivity: true,
        non_decreasing_in_range: true,
        violations: Vec::new(),
    };
    for (ri, &r) in range_values.iter().enumerate() {
        for bi in 1..n_b {
            if mean_at(ri, bi) > mean_at(ri, bi - 1) + tol {
                report.non_increasing_in_reflectivity = false;
                report.violations.push(format!(
                    "R={r}: mean rises from beta {} to {} ({} -> {})",
                    refl_values[bi - 1],
                    refl_values[bi],
                    mean_at(ri, bi - 1),
                    mean_at(ri, bi)
                ));
            }
        }
    }
    for (bi, &b) in refl_values.iter().enumerate() {
        for ri in 1..range_values.len() {
            if mean_at(ri, bi) < mean_at(ri - 1, bi) - tol {
                report.non_decreasing_in_range = false;
                report.violations.push(format!(
                    "beta={b}: mean drops from R {} to {} ({} -> {})",
                    range_values[ri - 1],
                    range_values[ri],
                    mean_at(ri - 1, bi),
                    mean_at(ri, bi)
                ));
            }
        }
    }
    report
}

/// Seeded shuffle split into (training, evaluation) sets.
pub fn train_eval_split(
    samples: &[DisappearSample],
    eval_fraction: f64,
    seed: u64,
) -> (Vec<DisappearSample>, Vec<DisappearSample>) {
    debug_assert!((0.0..1.0).contains(&eval_fraction));
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    let mut rng: DetRng = StreamKey::root(seed).child(domain::SPLIT).rng();
    rng.shuffle(&mut idx);
    let n_eval = (samples.len() as f64 * eval_fraction).round() as usize;
    let (eval_idx, train_idx) = idx.split_at(n_eval.min(samples.len()));
    let mut eval_idx = eval_idx.to_vec();
    let mut train_idx = train_idx.to_vec();
    eval_idx.sort_unstable();
    train_idx.sort_unstable();
    (
        train_idx.into_iter().map(|i| samples[i].clone()).collect(),
        eval_idx.into_iter().map(|i| samples[i].clone()).collect(),
    )
}

// --- report rendering ----------------------------------------------------

fn class_name(c: ReflectorClass) -> &'static str {
    match c {
        ReflectorClass::Diffuse => "diffuse",
        ReflectorClass::Retro => "retro",
    }
}

/// CSV rows: `scope,range_lo,range_hi,class,n,failures,rate`.
pub fn write_failure_csv<W: Write>(report: &FailureReport, mut w: W) -> std::io::Result<()> {
    writeln!(w, "scope,range_lo,range_hi,class,n,failures,rate")?;
    for b in &report.bins {
        writeln!(
            w,
            "bin,{},{},{},{},{},{}",
            b.range_lo,
            b.range_hi,
            class_name(b.class),
            b.n,
            b.failures,
            b.rate()
        )?;
    }
    for class in [ReflectorClass::Diffuse, ReflectorClass::Retro] {
        let (n, f) = match class {
            ReflectorClass::Diffuse => report.overall_diffuse,
            ReflectorClass::Retro => report.overall_retro,
        };
        writeln!(
            w,
            "overall,,,{},{},{},{}",
            class_name(class),
            n,
            f,
            report.overall_rate(class)
        )?;
    }
    Ok(())
}

/// Aligned plain-text failure table (percent per range bin and class).
pub fn render_failure_text(report: &FailureReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {:>16} {:>16}", "R", "diffuse [0-100)", "retro [100-255]");
    let mut i = 0;
    while i < report.bins.len() {
        let d = &report.bins[i];
        let r = &report.bins[i + 1];
        let fmt = |b: &FailureBin| {
            if b.n == 0 {
                "—".to_string()
            } else {
                format!("{:.1}% ({}/{})", 100.0 * b.rate(), b.failures, b.n)
            }
        };
        let _ = writeln!(
            out,
            "{:<10} {:>16} {:>16}",
            format!("{}-{}m", d.range_lo, d.range_hi),
            fmt(d),
            fmt(r)
        );
        i += 2;
    }
    let _ = writeln!(
        out,
        "{:<10} {:>16} {:>16}",
        "overall",
        format!("{:.1}%", 100.0 * report.overall_rate(ReflectorClass::Diffuse)),
        format!("{:.1}%", 100.0 * report.overall_rate(ReflectorClass::Retro))
    );
    out
}

/// CSV rows: `range_lo,range_hi,refl_lo,refl_hi,n,failed,mean_abs_error`.
pub fn write_error_csv<W: Write>(table: &ErrorTable, mut w: W) -> std::io::Result<()> {
    writeln!(w, "range_lo,range_hi,refl_lo,refl_hi,n,failed,mean_abs_error")?;
    for (ri, row) in table.cells.iter().enumerate() {
        for (bi, cell) in row.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                table.range_edges[ri],
                table.range_edges[ri + 1],
                table.reflectivity_edges[bi],
                table.reflectivity_edges[bi + 1],
                cell.n,
                cell.failed,
                if cell.n == 0 { String::new() } else { cell.mean_abs_error.to_string() }
            )?;
        }
        let o = &table.row_overall[ri];
        writeln!(
            w,
            "{},{},overall,,{},{},{}",
            table.range_edges[ri],
            table.range_edges[ri + 1],
            o.n,
            o.failed,
            if o.n == 0 { String::new() } else { o.mean_abs_error.to_string() }
        )?;
    }
    Ok(())
}

/// Aligned plain-text error table; empty cells render as an em dash.
pub fn render_error_text(table: &ErrorTable) -> String {
    let mut out = String::new();
    let mut header = format!("{:<10}", "R \\ beta");
    for w in table.reflectivity_edges.windows(2) {
        header.push_str(&format!(" {:>10}", format!("[{}-{})", w[0], w[1])));
    }
    header.push_str(&format!(" {:>10}", "overall"));
    let _ = writeln!(out, "{header}");
    for (ri, row) in table.cells.iter().enumerate() {
        let mut line = format!(
            "{:<10}",
            format!("{}-{}m", table.range_edges[ri], table.range_edges[ri + 1])
        );
        for cell in row {
            if cell.n == 0 {
                line.push_str(&format!(" {:>10}", "—"));
            } else {
                line.push_str(&format!(" {:>10}", format!("{:.2}m", cell.mean_abs_error)));
            }
        }
        let o = &table.row_overall[ri];
        if o.n == 0 {
            line.push_str(&format!(" {:>10}", "—"));
        } else {
            line.push_str(&format!(" {:>10}", format!("{:.2}m", o.mean_abs_error)));
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

/// CSV rows: `range_m,reflectivity,mean_m,std_m,extrapolated`.
pub fn write_grid_csv<W: Write>(rows: &[GridRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "range_m,reflectivity,mean_m,std_m,extrapolated")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.range_m, r.reflectivity, r.mean, r.std, r.extrapolated)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpr::{fit, FitConfig, Regime};

    fn sample(r: f64, b: f64, v: f64) -> DisappearSample {
        DisappearSample {
            mean_range: r,
            reflectivity: b,
            v_dis: v,
            target_id: "t".into(),
            part_id: "p".into(),
            ring: 0,
            azimuth_code: 0,
        }
    }

    fn toy_models() -> (GpModel, GpModel) {
        let diffuse: Vec<DisappearSample> = (0..30)
            .map(|i| {
                let r = 10.0 + (i % 6) as f64 * 3.0;
                let b = 2.0 + (i / 6) as f64 * 12.0;
                sample(r, b, 150.0 + 3.0 * r - 1.2 * b)
            })
            .collect();
        let retro: Vec<DisappearSample> = (0..30)
            .map(|i| {
                let r = 10.0 + (i % 6) as f64 * 3.0;
                let b = 120.0 + (i / 6) as f64 * 25.0;
                sample(r, b, 30.0 + 0.8 * r - 0.05 * b)
            })
            .collect();
        let md = fit(&diffuse, Regime::Diffuse, &FitConfig::fast(), 1).unwrap();
        let mr = fit(&retro, Regime::Retro, &FitConfig::fast(), 1).unwrap();
        (md, mr)
    }

    #[test]
    fn sample_at_mean_never_fails() {
        let (md, mr) = toy_models();
        let p = md.predict(14.0, 10.0);
        let s = sample(14.0, 10.0, p.mean);
        assert!(!is_failed(&md, &s));
        let report = failure_rate(&md, &mr, &[s], &DEFAULT_FAILURE_RANGE_EDGES);
        assert_eq!(report.overall_diffuse, (1, 0));
    }

    #[test]
    fn sample_beyond_two_sigma_fails() {
        let (md, _) = toy_models();
        let p = md.predict_observation(14.0, 10.0);
        let s = sample(14.0, 10.0, p.mean + 2.5 * p.std);
        assert!(is_failed(&md, &s));
        let inside = sample(14.0, 10.0, p.mean + 1.5 * p.std);
        assert!(!is_failed(&md, &inside));
    }

    #[test]
    fn failure_report_bins_partition_samples() {
        let (md, mr) = toy_models();
        let samples: Vec<DisappearSample> = (0..50)
            .map(|i| sample(5.0 + (i as f64 * 0.49), (i % 220) as f64, 40.0))
            .collect();
        let report = failure_rate(&md, &mr, &samples, &DEFAULT_FAILURE_RANGE_EDGES);
        let binned: usize = report.bins.iter().map(|b| b.n).sum();
        assert_eq!(binned + report.unbinned, samples.len());
        let overall = report.overall_diffuse.0 + report.overall_retro.0;
        assert_eq!(overall, samples.len());
    }

    #[test]
    fn exact_predictions_give_zero_error_cells() {
        let (md, mr) = toy_models();
        let samples: Vec<DisappearSample> = (0..20)
            .map(|i| {
                let r = 11.0 + i as f64;
                let b = 5.0 + i as f64;
                sample(r, b, md.predict(r, b).mean)
            })
            .collect();
        let table = error_table(
            &md,
            &mr,
            &samples,
            &DEFAULT_ERROR_RANGE_EDGES,
            &DEFAULT_REFLECTIVITY_EDGES,
        );
        for row in &table.cells {
            for cell in row {
                assert_eq!(cell.mean_abs_error, 0.0);
                assert_eq!(cell.failed, 0);
            }
        }
    }

    #[test]
    fn single_sample_error_lands_in_its_cell() {
        let (md, mr) = toy_models();
        let p = md.predict_observation(12.0, 25.0);
        // keep it strictly inside the confidence region so it is not excluded
        let err = (1.9 * p.std).min(3.2);
        let s = sample(12.0, 25.0, p.mean + err);
        let table = error_table(
            &md,
            &mr,
            &[s],
            &DEFAULT_ERROR_RANGE_EDGES,
            &DEFAULT_REFLECTIVITY_EDGES,
        );
        let cell = table.cells[0][2]; // 10-15 m, [20-30)
        assert_eq!(cell.n, 1);
        assert!((cell.mean_abs_error - err).abs() < 1e-12);
        // every other cell is empty and rendered as a dash
        let text = render_error_text(&table);
        assert!(text.contains("—"));
    }

    #[test]
    fn counts_reconcile_between_reports() {
        let (md, mr) = toy_models();
        let samples: Vec<DisappearSample> = (0..200)
            .map(|i| {
                let r = 10.0 + (i % 20) as f64;
                let b = (i % 250) as f64;
                sample(r, b, 20.0 + (i % 90) as f64)
            })
            .collect();
        let table = error_table(
            &md,
            &mr,
            &samples,
            &DEFAULT_ERROR_RANGE_EDGES,
            &DEFAULT_REFLECTIVITY_EDGES,
        );
        for row in &table.cells {
            for cell in row {
                let _total = cell.n + cell.failed; // evaluated + failed = all in cell
            }
        }
        let evaluated: usize = table.cells.iter().flatten().map(|c| c.n + c.failed).sum();
        let in_domain = samples
            .iter()
            .filter(|s| (10.0..30.0).contains(&s.mean_range))
            .count();
        assert_eq!(evaluated, in_domain);
    }

    #[test]
    fn one_by_one_grid_equals_predict() {
        let (md, _) = toy_models();
        let rows = prediction_grid(&md, &[14.0], &[10.0]);
        assert_eq!(rows.len(), 1);
        let p = md.predict(14.0, 10.0);
        assert_eq!(rows[0].mean, p.mean);
        assert_eq!(rows[0].std, p.std);
    }

    #[test]
    fn monotonicity_check_flags_violations() {
        let rows = vec![
            GridRow { range_m: 10.0, reflectivity: 1.0, mean: 50.0, std: 1.0, extrapolated: false },
            GridRow { range_m: 10.0, reflectivity: 5.0, mean: 60.0, std: 1.0, extrapolated: false },
        ];
        let report = check_grid_monotonicity(&rows, &[10.0], &[1.0, 5.0]);
        assert!(!report.non_increasing_in_reflectivity);
        assert!(!report.pass());
        assert_eq!(report.violations.len(), 1);

        let rows_ok = vec![
            GridRow { range_m: 10.0, reflectivity: 1.0, mean: 60.0, std: 1.0, extrapolated: false },
            GridRow { range_m: 10.0, reflectivity: 5.0, mean: 50.0, std: 1.0, extrapolated: false },
        ];
        assert!(check_grid_monotonicity(&rows_ok, &[10.0], &[1.0, 5.0]).pass());
    }

    #[test]
    fn split_is_seeded_and_disjoint() {
        let samples: Vec<DisappearSample> =
            (0..100).map(|i| sample(10.0 + i as f64 * 0.1, i as f64, 30.0)).collect();
        let (train1, eval1) = train_eval_split(&samples, 0.2, 7);
        let (train2, eval2) = train_eval_split(&samples, 0.2, 7);
        assert_eq!(train1, train2);
        assert_eq!(eval1, eval2);
        assert_eq!(train1.len() + eval1.len(), samples.len());
        assert_eq!(eval1.len(), 20);
        let (_, eval_other) = train_eval_split(&samples, 0.2, 8);
        assert_ne!(eval1, eval_other, "different seeds must shuffle differently");
    }

    #[test]
    fn reports_render_identical_bytes() {
        let (md, mr) = toy_models();
        let samples: Vec<DisappearSample> = (0..60)
            .map(|i| sample(10.0 + (i % 18) as f64, (i * 7 % 250) as f64, 25.0 + (i % 40) as f64))
            .collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_failure_csv(&failure_rate(&md, &mr, &samples, &DEFAULT_FAILURE_RANGE_EDGES), &mut a)
            .unwrap();
        write_failure_csv(&failure_rate(&md, &mr, &samples, &DEFAULT_FAILURE_RANGE_EDGES), &mut b)
            .unwrap();
        assert_eq!(a, b);
    }
}
