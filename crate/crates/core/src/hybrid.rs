//! The hybrid controller: each operator application is delegated to the
//! stateless module with probability `p` and to the state-based module
//! otherwise. Both modules learn from every outcome, and `p` is averaged
//! toward `p_u` after an improvement and toward `p_l` otherwise.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::{streams, RngStream};
use crate::statebased::{reward, DdqnConfig, FeatureTracker, QNetwork, Snapshot, StateBasedAos};
use crate::stateless::{assign_credit, PursuitParams, StatelessAos};
use crate::types::{
    improvement, IterationLog, ModuleKind, Objective, OperatorId, StateVector, Transition,
};

/// Result of applying one operator inside a host meta-heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Objective of the solution the operator was applied to.
    pub y_before: Objective,
    /// Objective of the generated solution.
    pub y_after: Objective,
    pub new_global_best: bool,
}

/// A meta-heuristic that exposes its operator pool to the controller.
pub trait SearchHost {
    fn k_ops(&self) -> usize;
    /// Total budget in the host's unit (evaluations or moves).
    fn budget(&self) -> usize;
    fn used(&self) -> usize;
    fn best(&self) -> Objective;
    fn snapshot(&self) -> Snapshot;
    fn apply(&mut self, op: OperatorId) -> Result<StepOutcome>;

    fn exhausted(&self) -> bool {
        self.used() >= self.budget()
    }
}

/// Controller configurations compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AosMode {
    /// Adaptive `p`, online state-based updates.
    Hf,
    /// Adaptive `p`, state-based model frozen.
    HfNu,
    /// Fixed `p`, online state-based updates.
    HfNa(f64),
    /// Stateless module only.
    Sl,
    /// State-based module only, frozen.
    Sb,
    /// State-based module only, updated online.
    SbU,
    /// Uniform operator choice.
    Random,
}

impl AosMode {
    pub fn needs_model(self) -> bool {
        !matches!(self, AosMode::Sl | AosMode::Random)
    }

    pub fn online_update(self) -> bool {
        matches!(self, AosMode::Hf | AosMode::HfNa(_) | AosMode::SbU)
    }

    fn policy_mode(self) -> PolicyMode {
        match self {
            AosMode::Hf | AosMode::HfNu => PolicyMode::Adaptive,
            AosMode::HfNa(q) => PolicyMode::Fixed(q),
            AosMode::Sl | AosMode::Random => PolicyMode::StatelessOnly,
            AosMode::Sb | AosMode::SbU => PolicyMode::StateBasedOnly,
        }
    }
}

impl fmt::Display for AosMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AosMode::Hf => f.write_str("hf"),
            AosMode::HfNu => f.write_str("hf-nu"),
            AosMode::HfNa(p) => write!(f, "hf-na:{p}"),
            AosMode::Sl => f.write_str("sl"),
            AosMode::Sb => f.write_str("sb"),
            AosMode::SbU => f.write_str("sb-u"),
            AosMode::Random => f.write_str("random"),
        }
    }
}

impl FromStr for AosMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hf" => AosMode::Hf,
            "hf-nu" => AosMode::HfNu,
            "sl" => AosMode::Sl,
            "sb" => AosMode::Sb,
            "sb-u" => AosMode::SbU,
            "random" => AosMode::Random,
            _ => {
                let p = s
                    .strip_prefix("hf-na:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| Error::Name(format!("aos mode {s:?}")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Config(format!(
                        "hf-na probability {p} outside [0,1]"
                    )));
                }
                AosMode::HfNa(p)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyMode {
    Adaptive,
    Fixed(f64),
    StatelessOnly,
    StateBasedOnly,
}

/// Probability of handing the next choice to the stateless module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionPolicy {
    p: f64,
    p_u: f64,
    p_l: f64,
    mode: PolicyMode,
}

impl DecisionPolicy {
    pub const DEFAULT_P_U: f64 = 0.5;
    pub const DEFAULT_P_L: f64 = 0.1;

    /// Starts at `p = p_u`.
    pub fn new(p_u: f64, p_l: f64, mode: PolicyMode) -> Result<Self> {
        if !(0.0 < p_l && p_l < p_u && p_u < 1.0) {
            return Err(Error::Config(format!(
                "need 0 < p_l < p_u < 1, got p_l={p_l}, p_u={p_u}"
            )));
        }
        if let PolicyMode::Fixed(q) = mode {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::Config(format!(
                    "fixed probability {q} outside [0,1]"
                )));
            }
        }
        Ok(Self {
            p: p_u,
            p_u,
            p_l,
            mode,
        })
    }

    pub fn with_mode(mode: PolicyMode) -> Self {
        Self::new(Self::DEFAULT_P_U, Self::DEFAULT_P_L, mode).expect("default bounds are valid")
    }

    pub fn mode(&self) -> PolicyMode {
        self.mode
    }

    /// The adaptive `p` (meaningful in adaptive mode only).
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.p_l, self.p_u)
    }

    /// Probability actually used for the stateless module.
    pub fn stateless_probability(&self) -> f64 {
        match self.mode {
            PolicyMode::Adaptive => self.p,
            PolicyMode::Fixed(q) => q,
            PolicyMode::StatelessOnly => 1.0,
            PolicyMode::StateBasedOnly => 0.0,
        }
    }

    /// `u` is a uniform draw in `[0, 1)`.
    pub fn choose_module(&self, u: f64) -> ModuleKind {
        if u < self.stateless_probability() {
            ModuleKind::Stateless
        } else {
            ModuleKind::StateBased
        }
    }

    /// Averages `p` toward `p_u` on improvement, toward `p_l` otherwise.
    /// No-op outside adaptive mode.
    pub fn adjust(&mut self, improved: bool) {
        if self.mode == PolicyMode::Adaptive {
            let bound = if improved { self.p_u } else { self.p_l };
            self.p = (self.p + bound) / 2.0;
        }
    }
}

/// Everything a finished run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Objective,
    pub evaluations: usize,
    pub log: Vec<IterationLog>,
}

#[derive(Debug, Clone)]
pub struct HybridController {
    mode: AosMode,
    policy: DecisionPolicy,
    stateless: StatelessAos,
    statebased: Option<StateBasedAos>,
    online_update: bool,
    epsilon: f64,
    tracker: FeatureTracker,
    state: Option<StateVector>,
    module_rng: RngStream,
    op_rng: RngStream,
    t: usize,
}

impl HybridController {
    /// Builds a controller for `k` operators. `model` is required by every
    /// mode that consults the state-based module.
    pub fn new(
        mode: AosMode,
        k: usize,
        model: Option<QNetwork>,
        cfg: DdqnConfig,
        seed: u64,
    ) -> Result<Self> {
        let statebased = match (mode.needs_model(), model) {
            (true, None) => {
                return Err(Error::Config(format!("mode {mode} needs a trained model")))
            }
            (true, Some(net)) => Some(StateBasedAos::new(
                net,
                cfg,
                RngStream::new(seed, streams::LEARNING),
            )?),
            (false, _) => None,
        };
        Self::from_parts(
            mode,
            StatelessAos::new(k, PursuitParams::default())?,
            statebased,
            seed,
        )
    }

    /// Builds from existing modules, e.g. to continue training an agent
    /// across episodes.
    pub fn from_parts(
        mode: AosMode,
        stateless: StatelessAos,
        statebased: Option<StateBasedAos>,
        seed: u64,
    ) -> Result<Self> {
        let k = stateless.k();
        if let Some(sb) = &statebased {
            if sb.k() != k {
                return Err(Error::Config(format!(
                    "stateless K={k} but state-based K={}",
                    sb.k()
                )));
            }
            if sb.online().input_dim() != crate::statebased::feature_dim(k) {
                return Err(Error::Dimension(format!(
                    "model expects {} features, controller produces {}",
                    sb.online().input_dim(),
                    crate::statebased::feature_dim(k)
                )));
            }
        } else if mode.needs_model() {
            return Err(Error::Config(format!("mode {mode} needs a trained model")));
        }
        let epsilon = statebased.as_ref().map_or(0.0, |s| s.config().eps_online);
        Ok(Self {
            mode,
            policy: DecisionPolicy::with_mode(mode.policy_mode()),
            stateless,
            statebased,
            online_update: mode.online_update(),
            epsilon,
            tracker: FeatureTracker::new(k),
            state: None,
            module_rng: RngStream::new(seed, streams::MODULE),
            op_rng: RngStream::new(seed, streams::OPERATOR),
            t: 0,
        })
    }

    pub fn mode(&self) -> AosMode {
        self.mode
    }

    pub fn policy(&self) -> &DecisionPolicy {
        &self.policy
    }

    pub fn set_policy(&mut self, policy: DecisionPolicy) {
        self.policy = policy;
    }

    pub fn stateless(&self) -> &StatelessAos {
        &self.stateless
    }

    pub fn statebased(&self) -> Option<&StateBasedAos> {
        self.statebased.as_ref()
    }

    pub fn into_statebased(self) -> Option<StateBasedAos> {
        self.statebased
    }

    pub fn online_update(&self) -> bool {
        self.online_update
    }

    pub fn set_online_update(&mut self, on: bool) {
        self.online_update = on;
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Exploration rate used by the state-based module.
    pub fn set_epsilon(&mut self, eps: f64) {
        self.epsilon = eps;
    }

    pub fn k(&self) -> usize {
        self.stateless.k()
    }

    /// Extracts the initial state; called implicitly by the first step.
    pub fn begin(&mut self, host: &dyn SearchHost) -> Result<()> {
        if host.k_ops() != self.k() {
            return Err(Error::Config(format!(
                "host has {} operators, controller {}",
                host.k_ops(),
                self.k()
            )));
        }
        self.state = Some(self.tracker.extract(&host.snapshot()));
        Ok(())
    }

    /// One operator application with both module updates and the `p` update.
    pub fn step(&mut self, host: &mut dyn SearchHost) -> Result<(IterationLog, Option<f64>)> {
        if self.state.is_none() {
            self.begin(host)?;
        }
        let s_prev = self.state.take().expect("state initialised");

        // Exactly one module draw per step keeps modes comparable.
        let u = self.module_rng.uniform();
        let module = if self.mode == AosMode::Random {
            ModuleKind::Uniform
        } else {
            self.policy.choose_module(u)
        };
        let op = match module {
            ModuleKind::Stateless => self.stateless.sample_operator(&mut self.op_rng),
            ModuleKind::StateBased => {
                let sb = self
                    .statebased
                    .as_ref()
                    .ok_or_else(|| Error::Config("no state-based module".into()))?;
                sb.select(&s_prev, self.epsilon, &mut self.op_rng)?
            }
            ModuleKind::Uniform => OperatorId(self.op_rng.below(self.k())),
        };

        let out = host.apply(op)?;
        let credit = assign_credit(out.y_before, out.y_after);
        self.stateless.record(op, credit);

        let improved = improvement(out.y_before, out.y_after);
        let best = host.best();
        self.tracker
            .observe(op, credit, improved, out.y_after, best);
        let s_new = self.tracker.extract(&host.snapshot());
        let r = reward(out.y_before, out.y_after, out.new_global_best);

        let mut loss = None;
        if self.online_update {
            if let Some(sb) = self.statebased.as_mut() {
                loss = sb.observe(Transition::new(s_prev, op, r, s_new.clone())?)?;
            }
        }

        self.policy.adjust(improved);
        self.state = Some(s_new);
        self.t += 1;
        let log = IterationLog {
            t: self.t,
            module_used: module,
            op,
            y_before: out.y_before,
            y_after: out.y_after,
            credit,
            reward: r,
            p_after: self.policy.stateless_probability(),
            best_so_far: best,
        };
        Ok((log, loss))
    }

    /// Runs until the host's budget is spent.
    pub fn run(&mut self, host: &mut dyn SearchHost) -> Result<RunResult> {
        if host.budget() == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        self.begin(host)?;
        let mut log = Vec::new();
        while !host.exhausted() {
            log.push(self.step(host)?.0);
        }
        Ok(RunResult {
            best: host.best(),
            evaluations: host.used(),
            log,
        })
    }
}
