use std::fs;
use std::path::Path;

use super::compare::{compare_all, render_table, ComparisonRow, DEFAULT_ALPHA};
use super::runner::TrialResult;
use crate::error::Result;

pub const TRIALS_FILE: &str = "trials.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";
pub const TABLE_FILE: &str = "comparison.txt";

const TRIAL_HEADER: [&str; 6] = ["problem", "mode", "trial", "best", "evals", "seconds"];
const COMPARISON_HEADER: [&str; 5] = ["row_mode", "col_mode", "better", "comparable", "worse"];

pub fn write_trials(path: &Path, results: &[TrialResult]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    w.write_record(TRIAL_HEADER)?;
    for r in results {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trials(path: &Path) -> Result<Vec<TrialResult>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize()
        .collect::<std::result::Result<Vec<TrialResult>, _>>()?)
}

pub fn write_comparison(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    w.write_record(COMPARISON_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `comparison.csv` and `comparison.txt` into `dir`.
pub fn write_tables(dir: &Path, results: &[TrialResult]) -> Result<Vec<ComparisonRow>> {
    fs::create_dir_all(dir)?;
    let rows = compare_all(results, DEFAULT_ALPHA)?;
    write_comparison(&dir.join(COMPARISON_FILE), &rows)?;
    fs::write(dir.join(TABLE_FILE), render_table(&rows))?;
    Ok(rows)
}

/// Writes `trials.csv` plus the comparison files into `dir`.
pub fn write_report(dir: &Path, results: &[TrialResult]) -> Result<Vec<ComparisonRow>> {
    fs::create_dir_all(dir)?;
    write_trials(&dir.join(TRIALS_FILE), results)?;
    write_tables(dir, results)
}
