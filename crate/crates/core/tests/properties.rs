use proptest::prelude::*;

use hf_aos::benchmarks::make_function;
use hf_aos::cvrptw::{evaluate_plan, initial_plan, Instance, Node, ObjectiveWeights, RoutePlan};
use hf_aos::de::{DeConfig, DeHost};
use hf_aos::harness::{exact_p, normal_p, signed_ranks};
use hf_aos::rng::{streams, RngStream};
use hf_aos::statebased::{DdqnConfig, QNetwork, ReplayBuffer};
use hf_aos::{
    AosMode, DecisionPolicy, HybridController, IterationLog, OperatorId, PolicyMode, SearchHost,
    StateVector, Transition,
};

fn de_host(func: &str, dim: usize, budget: usize, seed: u64) -> DeHost {
    let f = make_function(func, dim, Some(seed)).unwrap();
    let cfg = DeConfig {
        pop_size: 10,
        budget,
        ..DeConfig::default()
    };
    DeHost::new(
        f,
        cfg,
        &mut RngStream::new(seed, streams::INIT),
        RngStream::new(seed, streams::ENGINE),
    )
    .unwrap()
}

fn small_model(seed: u64) -> QNetwork {
    let cfg = DdqnConfig::default();
    let k = 4;
    let dims = cfg.layer_dims(hf_aos::statebased::feature_dim(k), k);
    QNetwork::random(&dims, &mut RngStream::new(seed, 77)).unwrap()
}

fn quick_ddqn() -> DdqnConfig {
    DdqnConfig {
        warmup: 16,
        batch_size: 8,
        target_sync_every: 20,
        ..DdqnConfig::default()
    }
}

fn run_logs(
    mode: AosMode,
    policy: Option<PolicyMode>,
    seed: u64,
    budget: usize,
) -> Vec<IterationLog> {
    let mut ctrl =
        HybridController::new(mode, 4, Some(small_model(seed)), quick_ddqn(), seed).unwrap();
    if let Some(p) = policy {
        ctrl.set_policy(DecisionPolicy::with_mode(p));
    }
    let mut host = de_host("rastrigin", 3, budget, seed);
    ctrl.run(&mut host).unwrap().log
}

fn grid_instance(n: usize, seed: u64) -> Instance {
    let mut rng = RngStream::new(seed, 0);
    let mut nodes = vec![Node {
        id: 0,
        x: 50.0,
        y: 50.0,
        demand: 0.0,
        ready: 0.0,
        due: 1000.0,
        service: 0.0,
    }];
    for id in 1..=n {
        let ready = rng.uniform_in(0.0, 400.0);
        nodes.push(Node {
            id,
            x: rng.uniform_in(0.0, 100.0),
            y: rng.uniform_in(0.0, 100.0),
            demand: rng.uniform_in(1.0, 30.0),
            ready,
            due: ready + rng.uniform_in(20.0, 200.0),
            service: 10.0,
        });
    }
    Instance::new("grid".into(), n, 100.0, nodes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn best_so_far_never_increases(seed in any::<u64>(), mode in prop::sample::select(vec![AosMode::Hf, AosMode::Sl, AosMode::Random])) {
        let log = run_logs(mode, None, seed, 300);
        prop_assert!(!log.is_empty());
        for w in log.windows(2) {
            prop_assert!(w[1].best_so_far <= w[0].best_so_far);
        }
    }

    #[test]
    fn equal_seeds_give_identical_logs(seed in any::<u64>()) {
        prop_assert_eq!(run_logs(AosMode::Hf, None, seed, 250), run_logs(AosMode::Hf, None, seed, 250));
    }

    #[test]
    fn fixed_policy_equals_no_adaptation_mode(seed in any::<u64>(), q in 0.1f64..0.5) {
        let a = run_logs(AosMode::Hf, Some(PolicyMode::Fixed(q)), seed, 250);
        let b = run_logs(AosMode::HfNa(q), None, seed, 250);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn consecutive_improvements_follow_closed_form(prefix in prop::collection::vec(any::<bool>(), 0..40), k in 0u32..30) {
        let mut pol = DecisionPolicy::with_mode(PolicyMode::Adaptive);
        for imp in prefix {
            pol.adjust(imp);
        }
        let p0 = pol.p();
        for _ in 0..k {
            pol.adjust(true);
        }
        let expected = 0.5 - (0.5 - p0) * 0.5f64.powi(k as i32);
        prop_assert!((pol.p() - expected).abs() < 1e-12);
    }

    #[test]
    fn de_population_stays_in_bounds(seed in any::<u64>(), func in prop::sample::select(vec!["schwefel_1_2", "zakharov", "levy"])) {
        let mut host = de_host(func, 4, 400, seed);
        let (lo, hi) = host.function().bounds();
        let mut rng = RngStream::new(seed, 9);
        let mut best = host.best();
        while !host.exhausted() {
            host.apply(OperatorId(rng.below(4))).unwrap();
            prop_assert!(host.best() <= best);
            best = host.best();
            for m in &host.population().members {
                prop_assert!(m.iter().all(|v| (lo..=hi).contains(v)));
            }
        }
        prop_assert_eq!(host.used(), 400);
    }

    #[test]
    fn benchmark_evaluation_is_pure(seed in any::<u64>(), x in prop::collection::vec(-700.0f64..700.0, 6)) {
        for name in ["sphere", "rosenbrock", "rastrigin", "ackley", "griewank", "schwefel_1_2", "levy", "zakharov", "styblinski_tang", "schaffer_f7"] {
            let f = make_function(name, 6, Some(seed)).unwrap();
            let a = f.evaluate(&x).unwrap();
            prop_assert_eq!(a, f.evaluate(&x).unwrap());
            prop_assert!(a.value() >= -1e-9, "{} below its minimum: {}", name, a);
        }
    }

    #[test]
    fn plan_cost_ignores_route_order(seed in any::<u64>(), rotate in 0usize..10) {
        let inst = grid_instance(15, seed);
        let w = ObjectiveWeights::default();
        let plan = initial_plan(&inst, &mut RngStream::new(seed, 1));
        let mut routes = plan.routes.clone();
        routes.reverse();
        let len = routes.len();
        routes.rotate_left(rotate % len);
        let a = evaluate_plan(&inst, &plan, w).unwrap();
        let b = evaluate_plan(&inst, &RoutePlan::new(routes), w).unwrap();
        prop_assert!((a.distance - b.distance).abs() < 1e-9);
        prop_assert!((a.tw_violation - b.tw_violation).abs() < 1e-9);
        prop_assert!((a.cap_violation - b.cap_violation).abs() < 1e-9);
        prop_assert_eq!(a.vehicles, b.vehicles);
    }

    #[test]
    fn replay_keeps_the_last_capacity_transitions(cap in 1usize..40, extra in 0usize..60) {
        let mut buf = ReplayBuffer::new(cap);
        let sv = StateVector::clamped(vec![0.0]);
        let total = cap + extra;
        for i in 0..total {
            buf.push(Transition::new(sv.clone(), OperatorId(0), i as f64, sv.clone()).unwrap());
        }
        let kept: Vec<f64> = buf.iter().map(|t| t.reward).collect();
        let expected: Vec<f64> = (extra..total).map(|i| i as f64).collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn normal_approximation_tracks_exact_p(n in 10usize..=12, seed in any::<u64>()) {
        // Distinct magnitudes, so no ties.
        let mut rng = RngStream::new(seed, 0);
        let mut mags: Vec<f64> = (1..=n).map(|i| i as f64 + rng.uniform_in(0.0, 0.5)).collect();
        for i in (1..n).rev() {
            mags.swap(i, rng.below(i + 1));
        }
        let diffs: Vec<f64> = mags.iter().map(|m| if rng.uniform() < 0.5 { -m } else { *m }).collect();
        let ranked = signed_ranks(&diffs);
        let ranks: Vec<f64> = ranked.iter().map(|(r, _)| *r).collect();
        let w_plus: f64 = ranked.iter().filter(|(_, pos)| *pos).map(|(r, _)| r).sum();
        let w = w_plus.min(ranks.iter().sum::<f64>() - w_plus);
        let (e, a) = (exact_p(&ranks, w), normal_p(&ranks, w));
        prop_assert!((e - a).abs() <= 0.02, "n={} W={} exact {} normal {}", n, w, e, a);
    }
}
