//! Trial execution and offline training.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ProblemSpec};
use crate::benchmarks::make_function;
use crate::cvrptw::{EvaluatedPlan, Instance, LocalSearchHost, ObjectiveWeights, NUM_MOVES};
use crate::de::{DeConfig, DeHost, NUM_STRATEGIES};
use crate::error::{Error, Result};
use crate::hybrid::{AosMode, HybridController, SearchHost};
use crate::rng::{streams, RngStream};
use crate::statebased::{feature_dim, load_model, save_model, DdqnConfig, QNetwork, StateBasedAos};
use crate::stateless::StatelessAos;
use crate::types::{Domain, Objective};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "HF_AOS_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub problem: String,
    pub mode: String,
    pub trial: usize,
    pub best: f64,
    pub evals: usize,
    pub seconds: f64,
}

/// A trial's summary plus the final CVRPTW plan when applicable.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub result: TrialResult,
    pub initial_best: Objective,
    pub plan: Option<EvaluatedPlan>,
}

/// A problem ready to host runs.
#[derive(Debug, Clone)]
pub enum LoadedProblem {
    Real {
        id: String,
        func: crate::benchmarks::RealFunction,
    },
    Routing {
        id: String,
        inst: Instance,
    },
}

impl LoadedProblem {
    pub fn load(spec: &ProblemSpec) -> Result<Self> {
        Ok(match spec {
            ProblemSpec::Function {
                function,
                dim,
                shift_seed,
            } => LoadedProblem::Real {
                id: spec.id(),
                func: make_function(function, *dim, *shift_seed)?,
            },
            ProblemSpec::Instance { instance } => LoadedProblem::Routing {
                id: spec.id(),
                inst: Instance::load(instance)?,
            },
        })
    }

    pub fn id(&self) -> &str {
        match self {
            LoadedProblem::Real { id, .. } | LoadedProblem::Routing { id, .. } => id,
        }
    }

    pub fn k_ops(&self) -> usize {
        match self {
            LoadedProblem::Real { .. } => NUM_STRATEGIES,
            LoadedProblem::Routing { .. } => NUM_MOVES,
        }
    }
}

/// Settings shared by every run of one experiment.
#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub budget: usize,
    pub de: DeConfig,
    pub weights: ObjectiveWeights,
    pub ddqn: DdqnConfig,
}

impl RunSettings {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            budget: cfg.budget,
            de: cfg.de_config(),
            weights: cfg.objective_weights(),
            ddqn: cfg.ddqn,
        }
    }
}

/// Builds the host for `seed` and hands it to `f`. The initial solution only
/// depends on the problem and the seed, never on the controller.
fn with_host<T>(
    problem: &LoadedProblem,
    s: &RunSettings,
    seed: u64,
    f: impl FnOnce(&mut dyn SearchHost) -> Result<T>,
) -> Result<(T, Option<EvaluatedPlan>)> {
    let mut init = RngStream::new(seed, streams::INIT);
    let engine = RngStream::new(seed, streams::ENGINE);
    match problem {
        LoadedProblem::Real { func, .. } => {
            let mut host = DeHost::new(
                func.clone(),
                DeConfig {
                    budget: s.budget,
                    ..s.de
                },
                &mut init,
                engine,
            )?;
            Ok((f(&mut host)?, None))
        }
        LoadedProblem::Routing { inst, .. } => {
            let mut host = LocalSearchHost::new(inst, s.weights, s.budget, &mut init, engine)?;
            let out = f(&mut host)?;
            Ok((out, Some(host.into_best())))
        }
    }
}

/// One independent run of `mode` on `problem` with trial seed `base + trial`.
pub fn run_trial(
    problem: &LoadedProblem,
    mode: AosMode,
    trial: usize,
    base_seed: u64,
    settings: &RunSettings,
    model: Option<&QNetwork>,
    record_timing: bool,
) -> Result<TrialOutcome> {
    let seed = base_seed.wrapping_add(trial as u64);
    let start = Instant::now();
    let mut ctrl =
        HybridController::new(mode, problem.k_ops(), model.cloned(), settings.ddqn, seed)?;
    let ((run, initial_best), plan) = with_host(problem, settings, seed, |host| {
        let initial = host.best();
        Ok((ctrl.run(host)?, initial))
    })?;
    let seconds = if record_timing {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    Ok(TrialOutcome {
        result: TrialResult {
            problem: problem.id().to_string(),
            mode: mode.to_string(),
            trial,
            best: run.best.value(),
            evals: run.evaluations,
            seconds,
        },
        initial_best,
        plan,
    })
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().map_err(|_| {
            Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))
        })?;
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

fn load_domain_model(path: &Path, domain: Domain) -> Result<QNetwork> {
    let (net, model_domain) = load_model(path)?;
    if model_domain != domain {
        return Err(Error::Config(format!(
            "model was trained for {model_domain}, experiment is {domain}"
        )));
    }
    Ok(net)
}

/// Runs every (problem, mode, trial) combination and returns outcomes
/// sorted by problem, mode and trial in config order.
pub fn evaluate_outcomes(
    cfg: &ExperimentConfig,
    model: Option<&QNetwork>,
) -> Result<Vec<TrialOutcome>> {
    cfg.validate_for_evaluation()?;
    let modes = cfg.modes()?;
    let loaded;
    let model = match model {
        Some(m) => Some(m),
        None if modes.iter().any(|m| m.needs_model()) => {
            let path = cfg
                .model_path
                .as_ref()
                .ok_or_else(|| Error::Config("state-based modes need model_path".into()))?;
            if !path.exists() {
                return Err(Error::Config(format!(
                    "model file {} not found",
                    path.display()
                )));
            }
            loaded = load_domain_model(path, cfg.domain)?;
            Some(&loaded)
        }
        None => None,
    };
    let problems = cfg
        .problems
        .iter()
        .map(LoadedProblem::load)
        .collect::<Result<Vec<_>>>()?;
    let settings = RunSettings::from_config(cfg);

    let mut tasks = Vec::new();
    for (pi, _) in problems.iter().enumerate() {
        for (mi, _) in modes.iter().enumerate() {
            for t in 0..cfg.trials {
                tasks.push((pi, mi, t));
            }
        }
    }
    let pool = thread_pool()?;
    let mut outcomes: Vec<((usize, usize, usize), TrialOutcome)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(pi, mi, t)| {
                run_trial(
                    &problems[pi],
                    modes[mi],
                    t,
                    cfg.seed,
                    &settings,
                    model,
                    cfg.record_timing,
                )
                .map(|o| ((pi, mi, t), o))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    outcomes.sort_by_key(|(k, _)| *k);
    Ok(outcomes.into_iter().map(|(_, o)| o).collect())
}

pub fn evaluate(cfg: &ExperimentConfig, model: Option<&QNetwork>) -> Result<Vec<TrialResult>> {
    Ok(evaluate_outcomes(cfg, model)?
        .into_iter()
        .map(|o| o.result)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLoss {
    pub episode: usize,
    pub problem: String,
    pub steps: usize,
    pub updates: usize,
    pub mean_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingReport {
    pub net: QNetwork,
    pub domain: Domain,
    pub episodes: Vec<EpisodeLoss>,
    /// Every gradient-step loss in order.
    pub losses: Vec<f64>,
}

/// Round-robin episodes over the configured problems with the state-based
/// module alone, epsilon decaying over the first part of all steps.
pub fn offline_train(cfg: &ExperimentConfig) -> Result<TrainingReport> {
    cfg.validate_common()?;
    if cfg.episodes == 0 {
        return Err(Error::Config("episodes must be at least 1".into()));
    }
    let problems = cfg
        .problems
        .iter()
        .map(LoadedProblem::load)
        .collect::<Result<Vec<_>>>()?;
    let settings = RunSettings::from_config(cfg);
    let k = problems[0].k_ops();
    let dims = cfg.ddqn.layer_dims(feature_dim(k), k);
    let net = QNetwork::random(
        &dims,
        &mut RngStream::new(cfg.seed, streams::LEARNING + 100),
    )?;
    let mut agent = Some(StateBasedAos::new(
        net,
        cfg.ddqn,
        RngStream::new(cfg.seed, streams::LEARNING),
    )?);

    let steps_per_episode = match cfg.domain {
        Domain::Real => cfg.budget.saturating_sub(settings.de.pop_size),
        Domain::Cvrptw => cfg.budget,
    };
    let total = steps_per_episode * cfg.episodes;
    let mut global = 0usize;
    let mut episodes = Vec::with_capacity(cfg.episodes);
    let mut losses = Vec::new();

    for e in 0..cfg.episodes {
        let problem = &problems[e % problems.len()];
        let seed = cfg.seed.wrapping_add(e as u64);
        let mut ctrl = HybridController::from_parts(
            AosMode::SbU,
            StatelessAos::with_defaults(k)?,
            agent.take(),
            seed,
        )?;
        let before = losses.len();
        let (steps, _) = with_host(problem, &settings, seed, |host| {
            ctrl.begin(host)?;
            let mut steps = 0;
            while !host.exhausted() {
                ctrl.set_epsilon(cfg.ddqn.offline_epsilon(global, total));
                if let (_, Some(l)) = ctrl.step(host)? {
                    losses.push(l);
                }
                global += 1;
                steps += 1;
            }
            Ok(steps)
        })?;
        let ep = &losses[before..];
        episodes.push(EpisodeLoss {
            episode: e,
            problem: problem.id().to_string(),
            steps,
            updates: ep.len(),
            mean_loss: if ep.is_empty() {
                0.0
            } else {
                ep.iter().sum::<f64>() / ep.len() as f64
            },
        });
        agent = ctrl.into_statebased();
    }
    let net = agent
        .expect("agent returned after each episode")
        .into_online();
    Ok(TrainingReport {
        net,
        domain: cfg.domain,
        episodes,
        losses,
    })
}

/// Trains and writes the model plus a per-episode loss CSV next to it.
pub fn train_to_file(cfg: &ExperimentConfig, out: &Path) -> Result<TrainingReport> {
    let report = offline_train(cfg)?;
    save_model(&report.net, report.domain, out)?;
    let loss_path = out.with_file_name(format!(
        "{}_loss.csv",
        out.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".into())
    ));
    let mut w = csv::Writer::from_path(loss_path)?;
    for e in &report.episodes {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(report)
}
