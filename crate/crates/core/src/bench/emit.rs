//! CSV output for campaign summaries, raw traces and convergence curves.
//!
//! All numbers are written with six decimals so that two executions with the
//! same master seed produce byte-identical files.

use std::fs;
use std::path::Path;

use crate::bench::campaign::{AlgorithmSpec, CampaignResult, PValue, RunRecord};
use crate::bench::stats::{mean, std_dev};
use crate::error::Result;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const TRACES_FILE: &str = "traces.csv";
pub const CONVERGENCE_DIR: &str = "convergence";

const COLUMNS_README: &str = "\
summary.csv       one row per (problem, algorithm)
  mean, std       mean and sample std of the final best-observed value over successful runs
  p_value         two-sided paired Wilcoxon signed-rank p-value against GP-BO;
                  NA for the baseline or when fewer than 6 paired runs exist,
                  - when every paired difference is zero

traces.csv        one row per (problem, algorithm, run, step); step 0..n_init-1 is the LHS design
  query           query location rescaled to [0, 1]
  value           objective value at the query
  best_so_far     running minimum of value

convergence/<problem>.csv   per algorithm and step, across successful runs
  mean_best, std_best       mean and sample std of best_so_far
  runs                      number of runs contributing
";

pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NA".to_string()
    } else {
        format!("{x:.6}")
    }
}

fn fmt_p(p: PValue) -> String {
    match p {
        PValue::NotApplicable => "NA".to_string(),
        PValue::Degenerate => "-".to_string(),
        PValue::Value(v) => fmt_num(v),
    }
}

/// Writes `summary.csv`, `traces.csv`, `convergence/<problem>.csv` and a
/// short `README.txt` describing the columns.
pub fn emit_results(result: &CampaignResult, runs: &[RunRecord], out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir.join(CONVERGENCE_DIR))?;

    let mut summary = csv::Writer::from_path(out_dir.join(SUMMARY_FILE))?;
    summary.write_record(["problem", "algorithm", "mean", "std", "p_value"])?;
    for cell in &result.cells {
        summary.write_record([
            cell.problem.to_string(),
            cell.algorithm.label(),
            fmt_num(cell.mean),
            fmt_num(cell.std),
            fmt_p(cell.p_value),
        ])?;
    }
    summary.flush()?;

    let mut traces = csv::Writer::from_path(out_dir.join(TRACES_FILE))?;
    traces.write_record(["problem", "algorithm", "run", "step", "query", "value", "best_so_far"])?;
    for record in runs {
        let Ok(trace) = &record.outcome else { continue };
        for step in 0..trace.len() {
            traces.write_record([
                record.problem.to_string(),
                record.algorithm.label(),
                record.run.to_string(),
                step.to_string(),
                fmt_num(trace.queries[step]),
                fmt_num(trace.values[step]),
                fmt_num(trace.best_so_far[step]),
            ])?;
        }
    }
    traces.flush()?;

    let mut problems: Vec<&'static str> = Vec::new();
    for cell in &result.cells {
        if !problems.contains(&cell.problem) {
            problems.push(cell.problem);
        }
    }
    for problem in problems {
        let mut algorithms: Vec<AlgorithmSpec> = Vec::new();
        for cell in result.cells.iter().filter(|c| c.problem == problem) {
            if !algorithms.contains(&cell.algorithm) {
                algorithms.push(cell.algorithm);
            }
        }
        let mut w = csv::Writer::from_path(out_dir.join(CONVERGENCE_DIR).join(format!("{problem}.csv")))?;
        w.write_record(["algorithm", "step", "mean_best", "std_best", "runs"])?;
        for algorithm in algorithms {
            for (step, column) in convergence_columns(runs, problem, algorithm).iter().enumerate() {
                w.write_record([
                    algorithm.label(),
                    step.to_string(),
                    fmt_num(mean(column)),
                    fmt_num(std_dev(column)),
                    column.len().to_string(),
                ])?;
            }
        }
        w.flush()?;
    }

    fs::write(out_dir.join("README.txt"), COLUMNS_README)?;
    Ok(())
}

/// `best_so_far` values grouped by step across the successful runs of one cell.
pub fn convergence_columns(runs: &[RunRecord], problem: &str, algorithm: AlgorithmSpec) -> Vec<Vec<f64>> {
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for record in runs.iter().filter(|r| r.problem == problem && r.algorithm == algorithm) {
        let Ok(trace) = &record.outcome else { continue };
        if columns.len() < trace.len() {
            columns.resize(trace.len(), Vec::new());
        }
        for (step, b) in trace.best_so_far.iter().enumerate() {
            columns[step].push(*b);
        }
    }
    columns
}
