use std::fmt;

use serde::{Deserialize, Serialize};

use super::runner::TrialResult;
use super::wilcoxon::wilcoxon_signed_rank;
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Counts of problems on which the row method is significantly better,
/// comparable, or significantly worse than the column method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub better: usize,
    pub comparable: usize,
    pub worse: usize,
}

impl ComparisonCell {
    pub fn total(&self) -> usize {
        self.better + self.comparable + self.worse
    }

    pub fn mirrored(&self) -> Self {
        Self {
            better: self.worse,
            comparable: self.comparable,
            worse: self.better,
        }
    }
}

impl fmt::Display for ComparisonCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.better, self.comparable, self.worse)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub row_mode: String,
    pub col_mode: String,
    pub better: usize,
    pub comparable: usize,
    pub worse: usize,
}

impl ComparisonRow {
    pub fn cell(&self) -> ComparisonCell {
        ComparisonCell {
            better: self.better,
            comparable: self.comparable,
            worse: self.worse,
        }
    }
}

/// Distinct values in first-appearance order.
fn ordered<'a>(it: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for v in it {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Final best values of `mode` on `problem`, ordered by trial index.
fn samples(results: &[TrialResult], problem: &str, mode: &str) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = results
        .iter()
        .filter(|r| r.problem == problem && r.mode == mode)
        .map(|r| (r.trial, r.best))
        .collect();
    v.sort_by_key(|(t, _)| *t);
    v
}

/// Per-problem Wilcoxon comparison of `row` against `col` (lower is better).
pub fn build_comparison(
    results: &[TrialResult],
    row: &str,
    col: &str,
    alpha: f64,
) -> Result<ComparisonCell> {
    let mut cell = ComparisonCell::default();
    for problem in ordered(results.iter().map(|r| r.problem.as_str())) {
        let a = samples(results, problem, row);
        let b = samples(results, problem, col);
        if a.is_empty() && b.is_empty() {
            continue;
        }
        if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.0 != y.0) {
            return Err(Error::Config(format!(
                "{problem}: {row} has {} trials, {col} has {} (trial indices must match)",
                a.len(),
                b.len()
            )));
        }
        let xs: Vec<f64> = a.iter().map(|x| x.1).collect();
        let ys: Vec<f64> = b.iter().map(|y| y.1).collect();
        let test = wilcoxon_signed_rank(&xs, &ys)?;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        if test.p_value < alpha && mean(&xs) < mean(&ys) {
            cell.better += 1;
        } else if test.p_value < alpha && mean(&xs) > mean(&ys) {
            cell.worse += 1;
        } else {
            cell.comparable += 1;
        }
    }
    Ok(cell)
}

/// Every unordered mode pair, in first-appearance order.
pub fn compare_all(results: &[TrialResult], alpha: f64) -> Result<Vec<ComparisonRow>> {
    let modes = ordered(results.iter().map(|r| r.mode.as_str()));
    let mut rows = Vec::new();
    for (i, row) in modes.iter().enumerate() {
        for col in &modes[i + 1..] {
            let c = build_comparison(results, row, col, alpha)?;
            rows.push(ComparisonRow {
                row_mode: row.to_string(),
                col_mode: col.to_string(),
                better: c.better,
                comparable: c.comparable,
                worse: c.worse,
            });
        }
    }
    Ok(rows)
}

/// Plain-text matrix with "+/≈/-" cells; the diagonal is "-".
pub fn render_table(rows: &[ComparisonRow]) -> String {
    let modes = ordered(
        rows.iter()
            .flat_map(|r| [r.row_mode.as_str(), r.col_mode.as_str()]),
    );
    let lookup = |a: &str, b: &str| -> String {
        if a == b {
            return "-".into();
        }
        rows.iter()
            .find_map(|r| {
                if r.row_mode == a && r.col_mode == b {
                    Some(r.cell().to_string())
                } else if r.row_mode == b && r.col_mode == a {
                    Some(r.cell().mirrored().to_string())
                } else {
                    None
                }
            })
            .unwrap_or_default()
    };
    let width = modes.iter().map(|m| m.len()).max().unwrap_or(0).max(12) + 2;
    let mut out = format!("{:width$}", "(+/≈/-)");
    for m in &modes {
        out.push_str(&format!("{m:>width$}"));
    }
    out.push('\n');
    for a in &modes {
        out.push_str(&format!("{a:width$}"));
        for b in &modes {
            out.push_str(&format!("{:>width$}", lookup(a, b)));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn results(problem: &str, mode: &str, values: &[f64]) -> Vec<TrialResult> {
        values
            .iter()
            .enumerate()
            .map(|(t, &best)| TrialResult {
                problem: problem.into(),
                mode: mode.into(),
                trial: t,
                best,
                evals: 1,
                seconds: 0.0,
            })
            .collect()
    }

    #[test]
    fn identical_results_are_comparable() {
        let mut r = Vec::new();
        for p in ["p1", "p2", "p3"] {
            r.extend(results(p, "a", &[1.0, 2.0, 3.0]));
            r.extend(results(p, "b", &[1.0, 2.0, 3.0]));
        }
        let c = build_comparison(&r, "a", "b", DEFAULT_ALPHA).unwrap();
        assert_eq!(
            c,
            ComparisonCell {
                better: 0,
                comparable: 3,
                worse: 0
            }
        );
    }

    #[test]
    fn strict_domination_at_thirty_trials() {
        let mut r = Vec::new();
        for p in ["p1", "p2"] {
            let base: Vec<f64> = (0..30).map(|i| 10.0 + i as f64).collect();
            let better: Vec<f64> = base
                .iter()
                .enumerate()
                .map(|(i, v)| v - 1.0 - i as f64 * 0.01)
                .collect();
            r.extend(results(p, "hf", &better));
            r.extend(results(p, "random", &base));
        }
        let c = build_comparison(&r, "hf", "random", DEFAULT_ALPHA).unwrap();
        assert_eq!(
            c,
            ComparisonCell {
                better: 2,
                comparable: 0,
                worse: 0
            }
        );
        assert_eq!(
            build_comparison(&r, "random", "hf", DEFAULT_ALPHA).unwrap(),
            c.mirrored()
        );
    }

    #[test]
    fn unequal_trials_rejected() {
        let mut r = results("p", "a", &[1.0, 2.0, 3.0]);
        r.extend(results("p", "b", &[1.0, 2.0]));
        assert!(matches!(
            build_comparison(&r, "a", "b", DEFAULT_ALPHA),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn cell_format() {
        assert_eq!(
            ComparisonCell {
                better: 79,
                comparable: 58,
                worse: 1
            }
            .to_string(),
            "79/58/1"
        );
    }

    #[test]
    fn pair_count() {
        let mut r = Vec::new();
        for m in ["a", "b", "c", "d"] {
            r.extend(results("p", m, &[1.0, 2.0]));
        }
        let rows = compare_all(&r, DEFAULT_ALPHA).unwrap();
        assert_eq!(rows.len(), 6);
        let text = render_table(&rows);
        assert_eq!(text.lines().count(), 5);
    }
}
