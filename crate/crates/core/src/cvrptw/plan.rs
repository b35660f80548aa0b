use serde::{Deserialize, Serialize};

use super::instance::Instance;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::Objective;

/// Customer sequences, one per vehicle; the depot is implicit at both ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoutePlan {
    pub routes: Vec<Vec<usize>>,
}

impl RoutePlan {
    pub fn new(routes: Vec<Vec<usize>>) -> Self {
        Self { routes }
    }

    pub fn vehicles(&self) -> usize {
        self.routes.len()
    }

    pub fn prune_empty(&mut self) {
        self.routes.retain(|r| !r.is_empty());
    }

    /// Route index and position of every customer; `None` for the depot slot.
    pub fn positions(&self, customers: usize) -> Vec<Option<(usize, usize)>> {
        let mut pos = vec![None; customers + 1];
        for (ri, r) in self.routes.iter().enumerate() {
            for (pi, &c) in r.iter().enumerate() {
                if c <= customers {
                    pos[c] = Some((ri, pi));
                }
            }
        }
        pos
    }

    /// Every customer `1..=customers` exactly once and no empty route.
    pub fn validate(&self, customers: usize) -> Result<()> {
        let mut seen = vec![false; customers + 1];
        for r in &self.routes {
            if r.is_empty() {
                return Err(Error::Plan("empty route".into()));
            }
            for &c in r {
                if c == 0 || c > customers {
                    return Err(Error::Plan(format!("unknown customer {c}")));
                }
                if seen[c] {
                    return Err(Error::Plan(format!("customer {c} visited twice")));
                }
                seen[c] = true;
            }
        }
        if let Some(missing) = seen.iter().skip(1).position(|s| !s) {
            return Err(Error::Plan(format!("customer {} not visited", missing + 1)));
        }
        Ok(())
    }
}

/// Weights of the scalarised objective
/// `vehicle * vehicles + distance + violation * (tw + cap)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    pub vehicle: f64,
    pub violation: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            vehicle: 1000.0,
            violation: 10_000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedPlan {
    pub plan: RoutePlan,
    pub distance: f64,
    pub vehicles: usize,
    pub tw_violation: f64,
    pub cap_violation: f64,
    pub objective: Objective,
}

impl EvaluatedPlan {
    pub fn feasible(&self) -> bool {
        self.tw_violation == 0.0 && self.cap_violation == 0.0
    }
}

/// Distance, lateness and overload of one route.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RouteCost {
    pub distance: f64,
    pub lateness: f64,
    pub overload: f64,
}

/// Service starts at `max(arrival, ready)`; lateness is
/// `max(0, arrival - due)` summed over customers and the return to the depot.
pub fn route_cost(inst: &Instance, route: &[usize]) -> RouteCost {
    let mut cost = RouteCost::default();
    let mut time = inst.node(0).ready;
    let mut load = 0.0;
    let mut prev = 0;
    for &c in route {
        let node = inst.node(c);
        let arrival = time + inst.dist(prev, c);
        cost.distance += inst.dist(prev, c);
        cost.lateness += (arrival - node.due).max(0.0);
        time = arrival.max(node.ready) + node.service;
        load += node.demand;
        prev = c;
    }
    let back = time + inst.dist(prev, 0);
    cost.distance += inst.dist(prev, 0);
    cost.lateness += (back - inst.node(0).due).max(0.0);
    cost.overload = (load - inst.capacity).max(0.0);
    cost
}

pub fn evaluate_plan(
    inst: &Instance,
    plan: &RoutePlan,
    weights: ObjectiveWeights,
) -> Result<EvaluatedPlan> {
    plan.validate(inst.customers())?;
    Ok(evaluate_unchecked(inst, plan.clone(), weights))
}

/// Evaluation without the visit check, for plans produced by the moves.
pub(crate) fn evaluate_unchecked(
    inst: &Instance,
    plan: RoutePlan,
    weights: ObjectiveWeights,
) -> EvaluatedPlan {
    let (mut distance, mut tw, mut cap) = (0.0, 0.0, 0.0);
    for r in &plan.routes {
        let c = route_cost(inst, r);
        distance += c.distance;
        tw += c.lateness;
        cap += c.overload;
    }
    let vehicles = plan.routes.len();
    let value = weights.vehicle * vehicles as f64 + distance + weights.violation * (tw + cap);
    EvaluatedPlan {
        plan,
        distance,
        vehicles,
        tw_violation: tw,
        cap_violation: cap,
        objective: Objective::new(value).expect("finite instance data gives a finite objective"),
    }
}

/// Randomised time-ordered greedy construction.
///
/// Each route is seeded with one of the three unrouted customers with the
/// earliest due dates, then extended by the nearest customer that keeps the
/// route within capacity and on time. A new route opens when no customer
/// fits. Once `vehicle_limit` routes are open the last route absorbs the
/// rest in nearest-neighbour order, carrying any violations.
pub fn initial_plan(inst: &Instance, rng: &mut RngStream) -> RoutePlan {
    let n = inst.customers();
    let mut unrouted: Vec<usize> = (1..=n).collect();
    let mut routes: Vec<Vec<usize>> = Vec::new();
    let limit = inst.vehicle_limit.max(1);

    while !unrouted.is_empty() {
        let last_vehicle = routes.len() + 1 >= limit;
        unrouted.sort_by(|&a, &b| {
            inst.node(a)
                .due
                .total_cmp(&inst.node(b).due)
                .then(a.cmp(&b))
        });
        let pick = rng.below(unrouted.len().min(3));
        let seed = unrouted.remove(pick);
        let mut route = vec![seed];
        let node = inst.node(seed);
        let mut time = inst.dist(0, seed).max(node.ready) + node.service;
        let mut load = node.demand;

        loop {
            let prev = *route.last().unwrap();
            let candidate = unrouted
                .iter()
                .enumerate()
                .filter(|&(_, &c)| {
                    if last_vehicle {
                        return true;
                    }
                    let nd = inst.node(c);
                    let arrival = time + inst.dist(prev, c);
                    let back = arrival.max(nd.ready) + nd.service + inst.dist(c, 0);
                    load + nd.demand <= inst.capacity
                        && arrival <= nd.due
                        && back <= inst.node(0).due
                })
                .min_by(|(_, &a), (_, &b)| {
                    inst.dist(prev, a)
                        .total_cmp(&inst.dist(prev, b))
                        .then(a.cmp(&b))
                })
                .map(|(i, _)| i);
            let Some(i) = candidate else { break };
            let c = unrouted.remove(i);
            let nd = inst.node(c);
            time = (time + inst.dist(prev, c)).max(nd.ready) + nd.service;
            load += nd.demand;
            route.push(c);
        }
        routes.push(route);
    }
    RoutePlan::new(routes)
}
