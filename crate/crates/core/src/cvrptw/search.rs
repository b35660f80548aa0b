use super::instance::Instance;
use super::moves::{apply_move, NUM_MOVES};
use super::plan::{evaluate_plan, initial_plan, EvaluatedPlan, ObjectiveWeights, RoutePlan};
use crate::error::{Error, Result};
use crate::hybrid::{SearchHost, StepOutcome};
use crate::rng::RngStream;
use crate::statebased::Snapshot;
use crate::types::{Objective, OperatorId};

/// Single-trajectory descent: each move is accepted only when it strictly
/// lowers the objective. The budget counts moves, null moves included.
#[derive(Debug, Clone)]
pub struct LocalSearchHost<'a> {
    inst: &'a Instance,
    weights: ObjectiveWeights,
    current: EvaluatedPlan,
    last_candidate: Objective,
    budget: usize,
    used: usize,
    rng: RngStream,
}

impl<'a> LocalSearchHost<'a> {
    pub fn new(
        inst: &'a Instance,
        weights: ObjectiveWeights,
        budget: usize,
        init_rng: &mut RngStream,
        engine_rng: RngStream,
    ) -> Result<Self> {
        if budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        let plan = initial_plan(inst, init_rng);
        Self::from_plan(inst, weights, plan, budget, engine_rng)
    }

    pub fn from_plan(
        inst: &'a Instance,
        weights: ObjectiveWeights,
        plan: RoutePlan,
        budget: usize,
        rng: RngStream,
    ) -> Result<Self> {
        let current = evaluate_plan(inst, &plan, weights)?;
        Ok(Self {
            inst,
            weights,
            last_candidate: current.objective,
            current,
            budget,
            used: 0,
            rng,
        })
    }

    pub fn current(&self) -> &EvaluatedPlan {
        &self.current
    }

    pub fn into_best(self) -> EvaluatedPlan {
        self.current
    }
}

/// Coefficient of variation of route distances (0 for a single route).
fn route_spread(inst: &Instance, plan: &RoutePlan) -> f64 {
    let lens: Vec<f64> = plan
        .routes
        .iter()
        .map(|r| super::plan::route_cost(inst, r).distance)
        .collect();
    if lens.len() < 2 {
        return 0.0;
    }
    let n = lens.len() as f64;
    let mean = lens.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = lens.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

impl SearchHost for LocalSearchHost<'_> {
    fn k_ops(&self) -> usize {
        NUM_MOVES
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn used(&self) -> usize {
        self.used
    }

    fn best(&self) -> Objective {
        self.current.objective
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            current: self.last_candidate,
            best: self.current.objective,
            dispersion: route_spread(self.inst, &self.current.plan),
            budget_used: self.used as f64 / self.budget as f64,
        }
    }

    fn apply(&mut self, op: OperatorId) -> Result<StepOutcome> {
        let out = apply_move(
            op,
            &self.current.plan,
            self.inst,
            self.weights,
            &mut self.rng,
        )?;
        self.used += 1;
        let y_before = self.current.objective;
        let candidate = if out.changed {
            evaluate_plan(self.inst, &out.plan, self.weights)?
        } else {
            self.current.clone()
        };
        let y_after = candidate.objective;
        self.last_candidate = y_after;
        let accepted = y_after.value() < y_before.value();
        if accepted {
            self.current = candidate;
        }
        Ok(StepOutcome {
            y_before,
            y_after,
            new_global_best: accepted,
        })
    }
}
