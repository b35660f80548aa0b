//! Stateless operator selection: fitness-improvement-rate credit feeding an
//! adaptive-pursuit probability vector.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{Objective, OperatorId};

/// Smallest denominator used by the improvement-rate credit.
pub const CREDIT_EPS: f64 = 1e-12;

/// Relative improvement `(y_prev - y_new) / |y_prev|`, floored at 0 and
/// capped at 1. The denominator is guarded by [`CREDIT_EPS`].
pub fn assign_credit(y_prev: Objective, y_new: Objective) -> f64 {
    let prev = y_prev.value();
    let rate = (prev - y_new.value()) / prev.abs().max(CREDIT_EPS);
    rate.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PursuitParams {
    pub alpha: f64,
    pub beta: f64,
    pub p_max: f64,
}

impl Default for PursuitParams {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            beta: 0.01,
            p_max: 0.85,
        }
    }
}

/// Adaptive-pursuit state over `K` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct StatelessAos {
    probs: Vec<f64>,
    quality: Vec<f64>,
    params: PursuitParams,
}

impl StatelessAos {
    pub fn new(k: usize, params: PursuitParams) -> Result<Self> {
        if k < 2 {
            return Err(Error::Config(format!("need at least 2 operators, got {k}")));
        }
        let PursuitParams { alpha, beta, p_max } = params;
        if !(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Config(format!(
                "alpha and beta must lie in (0,1): {alpha}, {beta}"
            )));
        }
        if !(p_max > 1.0 / k as f64 && p_max < 1.0) {
            return Err(Error::Config(format!(
                "p_max must lie in (1/K, 1), got {p_max}"
            )));
        }
        Ok(Self {
            probs: vec![1.0 / k as f64; k],
            quality: vec![0.0; k],
            params,
        })
    }

    pub fn with_defaults(k: usize) -> Result<Self> {
        Self::new(k, PursuitParams::default())
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn quality(&self) -> &[f64] {
        &self.quality
    }

    pub fn params(&self) -> PursuitParams {
        self.params
    }

    /// Exponential recency-weighted average of credit for one operator.
    pub fn update_quality(&mut self, op: OperatorId, credit: f64) {
        debug_assert!(credit >= 0.0);
        let a = self.params.alpha;
        let q = &mut self.quality[op.index()];
        *q = a * credit + (1.0 - a) * *q;
    }

    /// Operator with the highest quality; lowest index on ties.
    pub fn best_operator(&self) -> OperatorId {
        let mut best = 0;
        for (i, &q) in self.quality.iter().enumerate().skip(1) {
            if q > self.quality[best] {
                best = i;
            }
        }
        OperatorId(best)
    }

    /// One pursuit step: the current best operator moves toward `p_max`, the
    /// others toward `(1 - p_max) / (K - 1)`.
    pub fn update_probabilities(&mut self) {
        let PursuitParams { beta, p_max, .. } = self.params;
        let winner = self.best_operator().index();
        let floor = (1.0 - p_max) / (self.k() - 1) as f64;
        for (i, p) in self.probs.iter_mut().enumerate() {
            let target = if i == winner { p_max } else { floor };
            *p = beta * target + (1.0 - beta) * *p;
        }
    }

    /// Credit update followed by one pursuit step, as done after every
    /// operator application.
    pub fn record(&mut self, op: OperatorId, credit: f64) {
        self.update_quality(op, credit);
        self.update_probabilities();
    }

    /// Inverse-CDF categorical draw using a single uniform.
    pub fn sample_operator(&self, rng: &mut RngStream) -> OperatorId {
        sample_categorical(&self.probs, rng.uniform())
    }
}

/// Inverse-CDF lookup of `u` in `[0, 1)`. Rounding slack at the top end falls
/// to the last index with positive mass.
pub fn sample_categorical(probs: &[f64], u: f64) -> OperatorId {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return OperatorId(i);
        }
    }
    let last = probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1);
    OperatorId(last)
}
