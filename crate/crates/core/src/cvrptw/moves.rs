//! Neighbourhood moves forming the CVRPTW operator pool.
//!
//! | op | move |
//! |----|------|
//! | 0 | relocate: one customer to its best position in another route (or a new route) |
//! | 1 | swap: exchange two customers in different routes |
//! | 2 | two-opt*: exchange the tails of two routes |
//! | 3 | or-opt: move a segment of 2-3 customers within or across routes |

use super::instance::Instance;
use super::plan::{evaluate_unchecked, ObjectiveWeights, RoutePlan};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::OperatorId;

pub const NUM_MOVES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Relocate,
    Swap,
    TwoOptStar,
    OrOpt,
}

impl Move {
    pub const ALL: [Move; NUM_MOVES] = [Move::Relocate, Move::Swap, Move::TwoOptStar, Move::OrOpt];

    pub fn from_operator(op: OperatorId) -> Result<Self> {
        Self::ALL
            .get(op.index())
            .copied()
            .ok_or_else(|| Error::Config(format!("CVRPTW has no operator {}", op.index())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveOutcome {
    pub plan: RoutePlan,
    /// False for a null move (no applicable arguments or no effect).
    pub changed: bool,
}

impl MoveOutcome {
    fn from(original: &RoutePlan, mut plan: RoutePlan) -> Self {
        plan.prune_empty();
        let changed = plan != *original;
        Self { plan, changed }
    }

    fn null(original: &RoutePlan) -> Self {
        Self {
            plan: original.clone(),
            changed: false,
        }
    }
}

pub fn apply_move(
    op: OperatorId,
    plan: &RoutePlan,
    inst: &Instance,
    weights: ObjectiveWeights,
    rng: &mut RngStream,
) -> Result<MoveOutcome> {
    Ok(match Move::from_operator(op)? {
        Move::Relocate => relocate(plan, inst, weights, rng),
        Move::Swap => random_swap(plan, rng),
        Move::TwoOptStar => random_two_opt_star(plan, rng),
        Move::OrOpt => random_or_opt(plan, rng),
    })
}

fn relocate(
    plan: &RoutePlan,
    inst: &Instance,
    weights: ObjectiveWeights,
    rng: &mut RngStream,
) -> MoveOutcome {
    let n = inst.customers();
    if n == 0 {
        return MoveOutcome::null(plan);
    }
    let customer = 1 + rng.below(n);
    let Some((from, pos)) = plan.positions(n)[customer] else {
        return MoveOutcome::null(plan);
    };
    let mut base = plan.clone();
    base.routes[from].remove(pos);
    let own_route_survives = !base.routes[from].is_empty();

    let mut best: Option<(f64, RoutePlan)> = None;
    let mut consider = |candidate: RoutePlan| {
        let mut c = candidate;
        c.prune_empty();
        let y = evaluate_unchecked(inst, c.clone(), weights)
            .objective
            .value();
        if best.as_ref().is_none_or(|(b, _)| y < *b) {
            best = Some((y, c));
        }
    };
    for (ri, route) in base.routes.iter().enumerate() {
        if ri == from {
            continue;
        }
        for at in 0..=route.len() {
            let mut c = base.clone();
            c.routes[ri].insert(at, customer);
            consider(c);
        }
    }
    if own_route_survives {
        let mut c = base.clone();
        c.routes.push(vec![customer]);
        consider(c);
    }
    match best {
        Some((_, p)) => MoveOutcome::from(plan, p),
        None => MoveOutcome::null(plan),
    }
}

/// Exchanges the positions of customers `a` and `b`.
pub fn swap_customers(plan: &RoutePlan, a: usize, b: usize) -> RoutePlan {
    let mut out = plan.clone();
    for r in &mut out.routes {
        for c in r.iter_mut() {
            if *c == a {
                *c = b;
            } else if *c == b {
                *c = a;
            }
        }
    }
    out
}

fn random_swap(plan: &RoutePlan, rng: &mut RngStream) -> MoveOutcome {
    if plan.routes.len() < 2 {
        return MoveOutcome::null(plan);
    }
    let (r1, r2) = two_routes(plan, rng);
    let a = plan.routes[r1][rng.below(plan.routes[r1].len())];
    let b = plan.routes[r2][rng.below(plan.routes[r2].len())];
    MoveOutcome::from(plan, swap_customers(plan, a, b))
}

/// Keeps the first `cut1` customers of route `r1` and the first `cut2` of
/// `r2`, then exchanges the remaining tails.
pub fn two_opt_star(plan: &RoutePlan, r1: usize, cut1: usize, r2: usize, cut2: usize) -> RoutePlan {
    let mut out = plan.clone();
    let tail1 = out.routes[r1].split_off(cut1);
    let tail2 = out.routes[r2].split_off(cut2);
    out.routes[r1].extend(tail2);
    out.routes[r2].extend(tail1);
    out
}

fn random_two_opt_star(plan: &RoutePlan, rng: &mut RngStream) -> MoveOutcome {
    if plan.routes.len() < 2 {
        return MoveOutcome::null(plan);
    }
    let (r1, r2) = two_routes(plan, rng);
    let cut1 = rng.below(plan.routes[r1].len() + 1);
    let cut2 = rng.below(plan.routes[r2].len() + 1);
    MoveOutcome::from(plan, two_opt_star(plan, r1, cut1, r2, cut2))
}

/// Removes `len` customers starting at `start` in route `from` and inserts
/// them, in order, at position `at` of route `to` (indexed after removal).
/// `to == routes.len()` opens a new route.
pub fn or_opt(
    plan: &RoutePlan,
    from: usize,
    start: usize,
    len: usize,
    to: usize,
    at: usize,
) -> RoutePlan {
    let mut out = plan.clone();
    let segment: Vec<usize> = out.routes[from].drain(start..start + len).collect();
    if to == out.routes.len() {
        out.routes.push(segment);
    } else {
        let tail = out.routes[to].split_off(at);
        out.routes[to].extend(segment);
        out.routes[to].extend(tail);
    }
    out
}

fn random_or_opt(plan: &RoutePlan, rng: &mut RngStream) -> MoveOutcome {
    let eligible: Vec<usize> = (0..plan.routes.len())
        .filter(|&r| plan.routes[r].len() >= 2)
        .collect();
    if eligible.is_empty() {
        return MoveOutcome::null(plan);
    }
    let from = eligible[rng.below(eligible.len())];
    let route_len = plan.routes[from].len();
    let len = if route_len >= 3 { 2 + rng.below(2) } else { 2 };
    let start = rng.below(route_len - len + 1);
    let to = rng.below(plan.routes.len());
    let remaining = if to == from {
        route_len - len
    } else {
        plan.routes[to].len()
    };
    let at = rng.below(remaining + 1);
    MoveOutcome::from(plan, or_opt(plan, from, start, len, to, at))
}

fn two_routes(plan: &RoutePlan, rng: &mut RngStream) -> (usize, usize) {
    let r1 = rng.below(plan.routes.len());
    let mut r2 = rng.below(plan.routes.len() - 1);
    if r2 >= r1 {
        r2 += 1;
    }
    (r1, r2)
}
