//! Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped and tied magnitudes get midranks. For up to
//! [`EXACT_MAX_N`] non-zero pairs the two-sided p-value comes from the exact
//! null distribution of `W+`, built by dynamic programming over doubled
//! ranks (midranks are multiples of 1/2). Larger samples use the normal
//! approximation with tie and continuity corrections.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub const EXACT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    pub w_plus: f64,
    pub w_minus: f64,
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub p_value: f64,
    /// Non-zero differences used.
    pub n: usize,
    pub exact: bool,
    /// Every difference was zero; `p_value` is 1.
    pub degenerate: bool,
}

/// Midranks of `|d|` for the non-zero entries of `diffs`, paired with the
/// sign of each difference.
pub fn signed_ranks(diffs: &[f64]) -> Vec<(f64, bool)> {
    let mut nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    nz.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut out = Vec::with_capacity(nz.len());
    let mut i = 0;
    while i < nz.len() {
        let mut j = i;
        while j + 1 < nz.len() && nz[j + 1].abs() == nz[i].abs() {
            j += 1;
        }
        // Positions i..=j share ranks i+1..=j+1.
        let rank = (i + j + 2) as f64 / 2.0;
        for d in &nz[i..=j] {
            out.push((rank, *d > 0.0));
        }
        i = j + 1;
    }
    out
}

/// Exact two-sided p-value `P(min(W+, W-) <= w)` under the null for the
/// given (absolute) ranks.
pub fn exact_p(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let w2 = (2.0 * w).round() as usize;
    let hits: f64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s).min(total - s) <= w2)
        .map(|(_, c)| c)
        .sum();
    (hits / 2f64.powi(ranks.len() as i32)).min(1.0)
}

/// Normal approximation with tie correction and continuity correction.
pub fn normal_p(ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Config(format!(
            "need two paired samples of equal length >= 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Config("samples must be finite".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let ranked = signed_ranks(&diffs);
    let n = ranked.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w_plus: 0.0,
            w_minus: 0.0,
            statistic: 0.0,
            p_value: 1.0,
            n: 0,
            exact: true,
            degenerate: true,
        });
    }
    let w_plus: f64 = ranked.iter().filter(|(_, pos)| *pos).map(|(r, _)| r).sum();
    let w_minus: f64 = ranked.iter().filter(|(_, pos)| !*pos).map(|(r, _)| r).sum();
    let statistic = w_plus.min(w_minus);
    let ranks: Vec<f64> = ranked.iter().map(|(r, _)| *r).collect();
    let exact = n <= EXACT_MAX_N;
    let p_value = if exact {
        exact_p(&ranks, statistic)
    } else {
        normal_p(&ranks, statistic)
    };
    Ok(WilcoxonResult {
        w_plus,
        w_minus,
        statistic,
        p_value,
        n,
        exact,
        degenerate: false,
    })
}
