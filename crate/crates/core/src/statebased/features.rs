//! Search-state features shared by both problem domains.
//!
//! Layout (all in `[0, 1]`), `W` = [`WINDOW`]:
//!
//! | index | feature |
//! |-------|---------|
//! | 0 | fraction of budget used |
//! | 1 | steps since best-so-far improved, over `W`, saturating |
//! | 2 | gap `(y - y*) / (abs(y*) + eps)` squashed by `g / (1 + g)` |
//! | 3 | dispersion over its running maximum |
//! | 4 | `ln(1 + 9 r) / ln 10`, `r` = share of the last `W` objectives below the current one |
//! | 5 | last step improved (0/1) |
//! | 6 | share of the last `W` steps that improved |
//! | 7 | last credit |
//! | 8 .. 8+K | per-operator selection share over the last `W` steps |
//! | 8+K .. 8+2K | per-operator mean credit over the last `W` steps |

use std::collections::VecDeque;

use crate::types::{Objective, OperatorId, StateVector};

pub const WINDOW: usize = 50;
const GAP_EPS: f64 = 1e-12;

pub fn feature_dim(k: usize) -> usize {
    8 + 2 * k
}

/// What the host exposes about its current search state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub current: Objective,
    pub best: Objective,
    pub dispersion: f64,
    pub budget_used: f64,
}

#[derive(Debug, Clone)]
struct Step {
    op: OperatorId,
    credit: f64,
    improved: bool,
    objective: f64,
}

#[derive(Debug, Clone)]
pub struct FeatureTracker {
    k: usize,
    window: VecDeque<Step>,
    since_best_improved: usize,
    best_seen: Option<f64>,
    max_dispersion: f64,
}

impl FeatureTracker {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            window: VecDeque::with_capacity(WINDOW + 1),
            since_best_improved: 0,
            best_seen: None,
            max_dispersion: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        feature_dim(self.k)
    }

    /// Records one operator application.
    pub fn observe(
        &mut self,
        op: OperatorId,
        credit: f64,
        improved: bool,
        y_after: Objective,
        best: Objective,
    ) {
        match self.best_seen {
            Some(b) if best.value() < b => self.since_best_improved = 0,
            Some(_) => self.since_best_improved += 1,
            None => self.since_best_improved = 0,
        }
        self.best_seen = Some(best.value());
        if self.window.len() == WINDOW {
            self.window.pop_front();
        }
        self.window.push_back(Step {
            op,
            credit,
            improved,
            objective: y_after.value(),
        });
    }

    pub fn extract(&mut self, snap: &Snapshot) -> StateVector {
        if self.best_seen.is_none() {
            self.best_seen = Some(snap.best.value());
        }
        self.max_dispersion = self.max_dispersion.max(snap.dispersion);

        let mut f = Vec::with_capacity(self.dim());
        f.push(snap.budget_used);
        f.push((self.since_best_improved as f64 / WINDOW as f64).min(1.0));

        let gap = (snap.current.value() - snap.best.value()).max(0.0)
            / (snap.best.value().abs() + GAP_EPS);
        f.push(gap / (1.0 + gap));

        f.push(if self.max_dispersion > 0.0 {
            snap.dispersion / self.max_dispersion
        } else {
            0.0
        });

        let n = self.window.len();
        let rank = if n == 0 {
            0.0
        } else {
            self.window
                .iter()
                .filter(|s| s.objective < snap.current.value())
                .count() as f64
                / n as f64
        };
        f.push((1.0 + 9.0 * rank).ln() / 10f64.ln());

        let last = self.window.back();
        f.push(if last.is_some_and(|s| s.improved) {
            1.0
        } else {
            0.0
        });
        f.push(if n == 0 {
            0.0
        } else {
            self.window.iter().filter(|s| s.improved).count() as f64 / n as f64
        });
        f.push(last.map_or(0.0, |s| s.credit));

        let mut counts = vec![0usize; self.k];
        let mut credit_sums = vec![0.0; self.k];
        for s in &self.window {
            counts[s.op.index()] += 1;
            credit_sums[s.op.index()] += s.credit;
        }
        for &c in &counts {
            f.push(if n == 0 {
                1.0 / self.k as f64
            } else {
                c as f64 / n as f64
            });
        }
        for (sum, &c) in credit_sums.iter().zip(&counts) {
            f.push(if c == 0 { 0.0 } else { sum / c as f64 });
        }
        StateVector::clamped(f)
    }
}
