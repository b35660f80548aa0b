//! Differential evolution host with a pool of four mutation strategies.
//!
//! The controller picks the strategy for each target individual in turn; one
//! application produces one trial vector and costs one evaluation.

use serde::{Deserialize, Serialize};

use crate::benchmarks::RealFunction;
use crate::error::{Error, Result};
use crate::hybrid::{SearchHost, StepOutcome};
use crate::rng::RngStream;
use crate::statebased::Snapshot;
use crate::types::{Objective, OperatorId};

pub const NUM_STRATEGIES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// `x_r1 + F (x_r2 - x_r3)`
    Rand1,
    /// `x_r1 + F (x_r2 - x_r3) + F (x_r4 - x_r5)`
    Rand2,
    /// `x_r1 + F (x_best - x_r1) + F (x_r2 - x_r3) + F (x_r4 - x_r5)`
    RandToBest2,
    /// `x_i + K (x_r1 - x_i) + F (x_r2 - x_r3)`, `K ~ U[0,1)`, no crossover.
    CurrentToRand1,
}

impl Strategy {
    pub const ALL: [Strategy; NUM_STRATEGIES] = [
        Strategy::Rand1,
        Strategy::Rand2,
        Strategy::RandToBest2,
        Strategy::CurrentToRand1,
    ];

    pub fn from_operator(op: OperatorId) -> Result<Self> {
        Self::ALL
            .get(op.index())
            .copied()
            .ok_or_else(|| Error::Config(format!("DE has no operator {}", op.index())))
    }

    pub fn donors(self) -> usize {
        match self {
            Strategy::Rand1 | Strategy::CurrentToRand1 => 3,
            Strategy::Rand2 | Strategy::RandToBest2 => 5,
        }
    }

    pub fn uses_crossover(self) -> bool {
        self != Strategy::CurrentToRand1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub pop_size: usize,
    pub f: f64,
    pub cr: f64,
    /// Evaluation budget, including the initial population.
    pub budget: usize,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            pop_size: 50,
            f: 0.5,
            cr: 0.9,
            budget: 10_000,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 5 {
            return Err(Error::Config(format!(
                "population size must be >= 5, got {}",
                self.pop_size
            )));
        }
        if !(self.f > 0.0 && self.f <= 2.0) {
            return Err(Error::Config(format!(
                "F must lie in (0, 2], got {}",
                self.f
            )));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::Config(format!(
                "CR must lie in [0, 1], got {}",
                self.cr
            )));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Vec<f64>>,
    pub objectives: Vec<Objective>,
    pub best_index: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> Objective {
        self.objectives[self.best_index]
    }

    /// Lowest objective, lowest index on ties.
    pub fn refresh_best(&mut self) {
        let mut best = 0;
        for (i, o) in self.objectives.iter().enumerate() {
            if o.value() < self.objectives[best].value() {
                best = i;
            }
        }
        self.best_index = best;
    }

    /// Mean distance to the centroid over the box diagonal.
    pub fn dispersion(&self, lo: f64, hi: f64) -> f64 {
        let d = self.members[0].len();
        let n = self.members.len() as f64;
        let mut centroid = vec![0.0; d];
        for m in &self.members {
            for (c, v) in centroid.iter_mut().zip(m) {
                *c += v / n;
            }
        }
        let mean = self
            .members
            .iter()
            .map(|m| {
                m.iter()
                    .zip(&centroid)
                    .map(|(v, c)| (v - c).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .sum::<f64>()
            / n;
        mean / ((hi - lo) * (d as f64).sqrt())
    }
}

pub fn init_population(
    f: &RealFunction,
    cfg: &DeConfig,
    rng: &mut RngStream,
) -> Result<Population> {
    cfg.validate()?;
    let (lo, hi) = f.bounds();
    let members: Vec<Vec<f64>> = (0..cfg.pop_size)
        .map(|_| (0..f.dim()).map(|_| rng.uniform_in(lo, hi)).collect())
        .collect();
    let objectives = members
        .iter()
        .map(|m| f.evaluate(m))
        .collect::<Result<Vec<_>>>()?;
    let mut pop = Population {
        members,
        objectives,
        best_index: 0,
    };
    pop.refresh_best();
    Ok(pop)
}

/// Mutant vector for explicit donors (before crossover and clamping).
/// `k_coef` is only used by current-to-rand/1.
pub fn mutate(
    strategy: Strategy,
    pop: &Population,
    target: usize,
    donors: &[usize],
    f: f64,
    k_coef: f64,
) -> Vec<f64> {
    let x = |i: usize| &pop.members[i];
    let d = pop.members[target].len();
    (0..d)
        .map(|j| match strategy {
            Strategy::Rand1 => x(donors[0])[j] + f * (x(donors[1])[j] - x(donors[2])[j]),
            Strategy::Rand2 => {
                x(donors[0])[j]
                    + f * (x(donors[1])[j] - x(donors[2])[j])
                    + f * (x(donors[3])[j] - x(donors[4])[j])
            }
            Strategy::RandToBest2 => {
                let base = x(donors[0])[j];
                base + f * (x(pop.best_index)[j] - base)
                    + f * (x(donors[1])[j] - x(donors[2])[j])
                    + f * (x(donors[3])[j] - x(donors[4])[j])
            }
            Strategy::CurrentToRand1 => {
                let cur = x(target)[j];
                cur + k_coef * (x(donors[0])[j] - cur) + f * (x(donors[1])[j] - x(donors[2])[j])
            }
        })
        .collect()
}

/// Binomial crossover; coordinate `j_rand` always comes from the mutant.
pub fn binomial_crossover(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut RngStream,
) -> Vec<f64> {
    let j_rand = rng.below(target.len());
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&t, &m))| {
            if j == j_rand || rng.uniform() < cr {
                m
            } else {
                t
            }
        })
        .collect()
}

/// Builds a clamped trial vector for `target` with the strategy behind `op`.
pub fn apply_operator(
    op: OperatorId,
    pop: &Population,
    target: usize,
    cfg: &DeConfig,
    func: &RealFunction,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let strategy = Strategy::from_operator(op)?;
    if pop.len() < strategy.donors() + 1 {
        return Err(Error::Config(format!(
            "{strategy:?} needs {} individuals, have {}",
            strategy.donors() + 1,
            pop.len()
        )));
    }
    let donors = rng.distinct_excluding(pop.len(), strategy.donors(), target);
    let k_coef = if strategy == Strategy::CurrentToRand1 {
        rng.uniform()
    } else {
        0.0
    };
    let mutant = mutate(strategy, pop, target, &donors, cfg.f, k_coef);
    let mut trial = if strategy.uses_crossover() {
        binomial_crossover(&pop.members[target], &mutant, cfg.cr, rng)
    } else {
        mutant
    };
    func.clamp(&mut trial);
    Ok(trial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Survivor {
    KeepTarget,
    TakeTrial,
}

/// Greedy replacement; the trial wins ties.
pub fn select_survivor(target_obj: Objective, trial_obj: Objective) -> Survivor {
    if trial_obj.value() <= target_obj.value() {
        Survivor::TakeTrial
    } else {
        Survivor::KeepTarget
    }
}

/// DE run state driven one target at a time by the controller.
#[derive(Debug, Clone)]
pub struct DeHost {
    func: RealFunction,
    cfg: DeConfig,
    pop: Population,
    target: usize,
    used: usize,
    current: Objective,
    rng: RngStream,
}

impl DeHost {
    /// `init_rng` draws the initial population; `engine_rng` drives donors and
    /// crossover.
    pub fn new(
        func: RealFunction,
        cfg: DeConfig,
        init_rng: &mut RngStream,
        engine_rng: RngStream,
    ) -> Result<Self> {
        cfg.validate()?;
        if cfg.budget < cfg.pop_size {
            return Err(Error::Config(format!(
                "budget {} smaller than population {}",
                cfg.budget, cfg.pop_size
            )));
        }
        let pop = init_population(&func, &cfg, init_rng)?;
        let current = pop.best();
        Ok(Self {
            used: cfg.pop_size,
            func,
            cfg,
            pop,
            target: 0,
            current,
            rng: engine_rng,
        })
    }

    pub fn population(&self) -> &Population {
        &self.pop
    }

    pub fn function(&self) -> &RealFunction {
        &self.func
    }

    pub fn best_solution(&self) -> &[f64] {
        &self.pop.members[self.pop.best_index]
    }
}

impl SearchHost for DeHost {
    fn k_ops(&self) -> usize {
        NUM_STRATEGIES
    }

    fn budget(&self) -> usize {
        self.cfg.budget
    }

    fn used(&self) -> usize {
        self.used
    }

    fn best(&self) -> Objective {
        self.pop.best()
    }

    fn snapshot(&self) -> Snapshot {
        let (lo, hi) = self.func.bounds();
        Snapshot {
            current: self.current,
            best: self.pop.best(),
            dispersion: self.pop.dispersion(lo, hi),
            budget_used: self.used as f64 / self.cfg.budget as f64,
        }
    }

    fn apply(&mut self, op: OperatorId) -> Result<StepOutcome> {
        let i = self.target;
        let trial = apply_operator(op, &self.pop, i, &self.cfg, &self.func, &mut self.rng)?;
        let y = self.func.evaluate(&trial)?;
        self.used += 1;
        let y_before = self.pop.objectives[i];
        let prev_best = self.pop.best();
        if select_survivor(y_before, y) == Survivor::TakeTrial {
            self.pop.members[i] = trial;
            self.pop.objectives[i] = y;
            if y.value() < prev_best.value() {
                self.pop.best_index = i;
            } else if i == self.pop.best_index {
                self.pop.refresh_best();
            }
        }
        self.current = y;
        self.target = (i + 1) % self.pop.len();
        Ok(StepOutcome {
            y_before,
            y_after: y,
            new_global_best: y.value() < prev_best.value(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::make_function;

    fn obj(v: f64) -> Objective {
        Objective::new(v).unwrap()
    }

    fn pop_from(members: Vec<Vec<f64>>) -> Population {
        let objectives = members
            .iter()
            .map(|m| obj(m.iter().map(|v| v * v).sum()))
            .collect();
        let mut p = Population {
            members,
            objectives,
            best_index: 0,
        };
        p.refresh_best();
        p
    }

    #[test]
    fn init_structure() {
        let f = make_function("sphere", 2, None).unwrap();
        let cfg = DeConfig {
            pop_size: 5,
            ..Default::default()
        };
        let pop = init_population(&f, &cfg, &mut RngStream::new(1, 1)).unwrap();
        assert_eq!(pop.len(), 5);
        for (m, o) in pop.members.iter().zip(&pop.objectives) {
            assert!(m.iter().all(|v| (-100.0..=100.0).contains(v)));
            assert_eq!(*o, f.evaluate(m).unwrap());
        }
        let min = pop
            .objectives
            .iter()
            .map(|o| o.value())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(pop.best().value(), min);
        let again = init_population(&f, &cfg, &mut RngStream::new(1, 1)).unwrap();
        assert_eq!(pop, again);
    }

    #[test]
    fn small_population_rejected() {
        let f = make_function("sphere", 2, None).unwrap();
        let cfg = DeConfig {
            pop_size: 4,
            ..Default::default()
        };
        assert!(matches!(
            init_population(&f, &cfg, &mut RngStream::new(1, 1)),
            Err(Error::Config(_))
        ));
        assert!(DeConfig {
            f: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(DeConfig {
            cr: 1.5,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn rand1_hand_arithmetic() {
        let pop = pop_from(vec![vec![0.0], vec![2.0], vec![5.0], vec![1.0], vec![3.0]]);
        let v = mutate(Strategy::Rand1, &pop, 0, &[1, 2, 3], 0.5, 0.0);
        assert_eq!(v, vec![4.0]);
    }

    #[test]
    fn rand1_zero_difference() {
        let pop = pop_from(vec![
            vec![0.0, 0.0],
            vec![2.0, 3.0],
            vec![5.0, 1.0],
            vec![5.0, 1.0],
            vec![3.0, 3.0],
        ]);
        let v = mutate(Strategy::Rand1, &pop, 0, &[1, 2, 3], 0.8, 0.0);
        assert_eq!(v, pop.members[1]);
    }

    #[test]
    fn degenerate_population_gives_base_vector() {
        let best = vec![1.5, -2.0, 0.25];
        let pop = pop_from(vec![best.clone(); 6]);
        for s in Strategy::ALL {
            let donors: Vec<usize> = (1..=s.donors()).collect();
            assert_eq!(mutate(s, &pop, 0, &donors, 0.7, 0.6), best, "{s:?}");
        }
    }

    #[test]
    fn too_small_for_strategy() {
        let f = make_function("sphere", 1, None).unwrap();
        let pop = pop_from(vec![vec![0.0]; 5]);
        let cfg = DeConfig {
            pop_size: 5,
            ..Default::default()
        };
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(
            apply_operator(OperatorId(1), &pop, 0, &cfg, &f, &mut rng),
            Err(Error::Config(_))
        ));
        assert!(apply_operator(OperatorId(0), &pop, 0, &cfg, &f, &mut rng).is_ok());
        assert!(apply_operator(OperatorId(4), &pop, 0, &cfg, &f, &mut rng).is_err());
    }

    #[test]
    fn survivor_rule() {
        assert_eq!(select_survivor(obj(10.0), obj(8.0)), Survivor::TakeTrial);
        assert_eq!(select_survivor(obj(10.0), obj(10.0)), Survivor::TakeTrial);
        assert_eq!(select_survivor(obj(10.0), obj(11.0)), Survivor::KeepTarget);
    }

    #[test]
    fn crossover_keeps_forced_coordinate() {
        let mut rng = RngStream::new(2, 2);
        let t = vec![0.0; 8];
        let m = vec![1.0; 8];
        let c = binomial_crossover(&t, &m, 0.0, &mut rng);
        assert_eq!(c.iter().filter(|&&v| v == 1.0).count(), 1);
        assert_eq!(binomial_crossover(&t, &m, 1.0, &mut rng), m);
    }

    #[test]
    fn host_invariants_hold() {
        let f = make_function("rastrigin", 5, None).unwrap();
        let cfg = DeConfig {
            pop_size: 10,
            budget: 2_000,
            ..Default::default()
        };
        let mut host = DeHost::new(
            f.clone(),
            cfg,
            &mut RngStream::new(4, 1),
            RngStream::new(4, 4),
        )
        .unwrap();
        let mut rng = RngStream::new(4, 9);
        let mut last_best = host.best();
        while !host.exhausted() {
            host.apply(OperatorId(rng.below(4))).unwrap();
            assert!(host.best() <= last_best);
            last_best = host.best();
            let pop = host.population();
            for (m, o) in pop.members.iter().zip(&pop.objectives) {
                assert!(m.iter().all(|v| (-5.12..=5.12).contains(v)));
                assert_eq!(*o, f.evaluate(m).unwrap());
            }
        }
        assert_eq!(host.used(), 2_000);
    }

    #[test]
    fn budget_below_population_rejected() {
        let f = make_function("sphere", 2, None).unwrap();
        let cfg = DeConfig {
            pop_size: 10,
            budget: 5,
            ..Default::default()
        };
        assert!(DeHost::new(f, cfg, &mut RngStream::new(0, 1), RngStream::new(0, 4)).is_err());
    }
}
