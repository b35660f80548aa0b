#![allow(dead_code)]

use hf_aos::cvrptw::{Instance, ObjectiveWeights, RoutePlan};
use hf_aos::rng::RngStream;
use hf_aos::statebased::{DdqnConfig, QNetwork, StateBasedAos};
use hf_aos::{OperatorId, StateVector, Transition};

// Two-state deterministic MDP. State A = [1, 0], B = [0, 1]. Action 0 pays 1
// in A, action 1 pays 1 in B, everything else pays 0. Either action moves
// A -> B and B -> A.
pub const MDP_GAMMA: f64 = 0.5;
pub const MDP_STEPS: usize = 5000;

pub fn mdp_state(s: usize) -> StateVector {
    StateVector::clamped(if s == 0 {
        vec![1.0, 0.0]
    } else {
        vec![0.0, 1.0]
    })
}

/// Q*(s, a) for the MDP above: V* = 1 / (1 - gamma), a miss costs exactly 1.
pub fn mdp_q_star(s: usize, a: usize) -> f64 {
    let v = 1.0 / (1.0 - MDP_GAMMA);
    if s == a {
        v
    } else {
        v - 1.0
    }
}

pub fn mdp_config() -> DdqnConfig {
    DdqnConfig {
        gamma: MDP_GAMMA,
        ..DdqnConfig::default()
    }
}

pub struct MdpRun {
    pub net: QNetwork,
    pub losses: Vec<f64>,
}

pub fn train_mdp(seed: u64, cfg: DdqnConfig, steps: usize) -> MdpRun {
    let dims = cfg.layer_dims(2, 2);
    let net = QNetwork::random(&dims, &mut RngStream::new(seed, 100)).unwrap();
    let mut agent = StateBasedAos::new(net, cfg, RngStream::new(seed, 101)).unwrap();
    let mut explore = RngStream::new(seed, 102);
    let mut s = 0usize;
    let mut losses = Vec::new();
    for step in 0..steps {
        let eps = cfg.offline_epsilon(step, steps);
        let a = agent
            .select(&mdp_state(s), eps, &mut explore)
            .unwrap()
            .index();
        let r = if a == s { 1.0 } else { 0.0 };
        let next = 1 - s;
        let t = Transition::new(mdp_state(s), OperatorId(a), r, mdp_state(next)).unwrap();
        if let Some(l) = agent.observe(t).unwrap() {
            losses.push(l);
        }
        s = next;
    }
    MdpRun {
        net: agent.into_online(),
        losses,
    }
}

/// Greedy policy optimal in both states and every Q within `tol` of Q*.
pub fn mdp_solved(net: &QNetwork, tol: f64) -> (bool, f64) {
    let mut ok = true;
    let mut worst = 0.0f64;
    for s in 0..2 {
        let q = net.forward(mdp_state(s).as_slice()).unwrap();
        if q[s] <= q[1 - s] {
            ok = false;
        }
        for (a, v) in q.iter().enumerate() {
            worst = worst.max((v - mdp_q_star(s, a)).abs());
        }
    }
    (ok && worst < tol, worst)
}

/// Two-sided signed-rank p by enumerating all 2^n sign flips of the midranks.
pub fn brute_force_wilcoxon_p(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|v| *v != 0.0)
        .collect();
    let n = d.len();
    if n == 0 {
        return 1.0;
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks: Vec<f64> = abs
        .iter()
        .map(|&x| {
            let below = abs.iter().filter(|&&y| y < x).count() as f64;
            let equal = abs.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let total: f64 = ranks.iter().sum();
    let w_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, r)| r)
        .sum();
    let observed = w_plus.min(total - w_plus);
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let wp: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        if wp.min(total - wp) <= observed + 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << n) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanAudit {
    pub distance: f64,
    pub vehicles: usize,
    pub tw_violation: f64,
    pub cap_violation: f64,
    pub objective: f64,
}

/// Recomputes a plan's cost from raw node data. Panics if a customer is
/// missing, repeated, or out of range.
pub fn audit_plan(inst: &Instance, plan: &RoutePlan, w: ObjectiveWeights) -> PlanAudit {
    let n = inst.customers();
    let mut seen = vec![0usize; n + 1];
    for r in &plan.routes {
        for &c in r {
            assert!((1..=n).contains(&c), "customer id {c} out of range");
            seen[c] += 1;
        }
    }
    for (c, &k) in seen.iter().enumerate().skip(1) {
        assert_eq!(k, 1, "customer {c} served {k} times");
    }
    let nodes = inst.nodes();
    let euclid = |a: usize, b: usize| {
        ((nodes[a].x - nodes[b].x).powi(2) + (nodes[a].y - nodes[b].y).powi(2)).sqrt()
    };
    let mut audit = PlanAudit {
        distance: 0.0,
        vehicles: 0,
        tw_violation: 0.0,
        cap_violation: 0.0,
        objective: 0.0,
    };
    for r in plan.routes.iter().filter(|r| !r.is_empty()) {
        audit.vehicles += 1;
        let mut t = 0.0f64;
        let mut load = 0.0;
        let mut prev = 0usize;
        for &c in r.iter().chain(std::iter::once(&0usize)) {
            let leg = euclid(prev, c);
            audit.distance += leg;
            t = (t + leg).max(nodes[c].ready);
            audit.tw_violation += (t - nodes[c].due).max(0.0);
            t += nodes[c].service;
            load += nodes[c].demand;
            prev = c;
        }
        audit.cap_violation += (load - inst.capacity).max(0.0);
    }
    audit.objective = w.vehicle * audit.vehicles as f64
        + audit.distance
        + w.violation * (audit.tw_violation + audit.cap_violation);
    audit
}
