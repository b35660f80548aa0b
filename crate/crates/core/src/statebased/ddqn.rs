//! Double-DQN training of the state-based module.

use serde::{Deserialize, Serialize};

use super::network::{argmax, QNetwork};
use super::replay::ReplayBuffer;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{OperatorId, StateVector, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DdqnConfig {
    pub gamma: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub target_sync_every: usize,
    pub buffer_capacity: usize,
    /// Transitions stored before the first gradient step.
    pub warmup: usize,
    pub hidden: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Fraction of offline steps over which epsilon decays linearly.
    pub eps_decay_fraction: f64,
    pub eps_online: f64,
}

impl Default for DdqnConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            learning_rate: 1e-3,
            batch_size: 64,
            target_sync_every: 500,
            buffer_capacity: 20_000,
            warmup: 500,
            hidden: 32,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay_fraction: 0.2,
            eps_online: 0.05,
        }
    }
}

impl DdqnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Config(format!(
                "gamma must lie in [0,1), got {}",
                self.gamma
            )));
        }
        if self.batch_size == 0 || self.batch_size > self.buffer_capacity {
            return Err(Error::Config(
                "batch_size must be in 1..=buffer_capacity".into(),
            ));
        }
        if self.target_sync_every == 0 || self.hidden == 0 {
            return Err(Error::Config(
                "target_sync_every and hidden must be positive".into(),
            ));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        for e in [self.eps_start, self.eps_end, self.eps_online] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Config(format!("epsilon {e} outside [0,1]")));
            }
        }
        Ok(())
    }

    /// Offline exploration rate after `step` of `total` steps.
    pub fn offline_epsilon(&self, step: usize, total: usize) -> f64 {
        let horizon = (self.eps_decay_fraction * total as f64).max(1.0);
        let frac = (step as f64 / horizon).min(1.0);
        self.eps_start + (self.eps_end - self.eps_start) * frac
    }

    /// Layer widths for a given feature size and operator count.
    pub fn layer_dims(&self, feature_dim: usize, k: usize) -> [usize; 4] {
        [feature_dim, self.hidden, self.hidden, k]
    }
}

/// Bootstrap targets `r + gamma * Q_target(s', argmax_a Q_online(s', a))`.
pub fn ddqn_targets(
    online: &QNetwork,
    target: &QNetwork,
    batch: &[&Transition],
    gamma: f64,
) -> Result<Vec<f64>> {
    batch
        .iter()
        .map(|t| {
            if gamma == 0.0 {
                return Ok(t.reward);
            }
            let s_next = t.next_state.as_slice();
            let a_star = argmax(&online.forward(s_next)?);
            Ok(t.reward + gamma * target.forward(s_next)?[a_star])
        })
        .collect()
}

/// One gradient step of the online network on the squared Double-DQN error of
/// the taken actions. Returns the pre-step loss. `target` is not modified.
pub fn ddqn_update(
    online: &mut QNetwork,
    target: &QNetwork,
    batch: &[&Transition],
    gamma: f64,
    learning_rate: f64,
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::Config("empty training batch".into()));
    }
    if !online.same_shape(target) {
        return Err(Error::Dimension(format!(
            "online {:?} vs target {:?}",
            online.dims(),
            target.dims()
        )));
    }
    let targets = ddqn_targets(online, target, batch, gamma)?;
    let inputs: Vec<&[f64]> = batch.iter().map(|t| t.state.as_slice()).collect();
    let actions: Vec<usize> = batch.iter().map(|t| t.action.index()).collect();
    let (loss, grads) = online.loss_and_gradient(&inputs, &actions, &targets)?;
    online.apply_gradient(&grads, learning_rate);
    Ok(loss)
}

/// Epsilon-greedy choice. Draws one uniform, plus one index when exploring.
pub fn select_epsilon_greedy(
    net: &QNetwork,
    s: &StateVector,
    eps: f64,
    rng: &mut RngStream,
) -> Result<OperatorId> {
    let q = net.forward(s.as_slice())?;
    if rng.uniform() < eps {
        Ok(OperatorId(rng.below(q.len())))
    } else {
        Ok(OperatorId(argmax(&q)))
    }
}

/// Online and target networks, replay memory, and learning schedule.
#[derive(Debug, Clone)]
pub struct StateBasedAos {
    online: QNetwork,
    target: QNetwork,
    buffer: ReplayBuffer,
    cfg: DdqnConfig,
    updates: usize,
    rng: RngStream,
}

impl StateBasedAos {
    pub fn new(net: QNetwork, cfg: DdqnConfig, rng: RngStream) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            target: net.clone(),
            online: net,
            buffer: ReplayBuffer::new(cfg.buffer_capacity),
            cfg,
            updates: 0,
            rng,
        })
    }

    pub fn online(&self) -> &QNetwork {
        &self.online
    }

    pub fn target(&self) -> &QNetwork {
        &self.target
    }

    pub fn into_online(self) -> QNetwork {
        self.online
    }

    pub fn config(&self) -> &DdqnConfig {
        &self.cfg
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn k(&self) -> usize {
        self.online.output_dim()
    }

    pub fn select(&self, s: &StateVector, eps: f64, rng: &mut RngStream) -> Result<OperatorId> {
        select_epsilon_greedy(&self.online, s, eps, rng)
    }

    pub fn sync_target(&mut self) {
        self.target = self.online.clone();
    }

    /// Drops stored experience, keeping the networks.
    pub fn reset_buffer(&mut self) {
        self.buffer.clear();
    }

    /// Stores a transition and, once past warmup, takes one gradient step on a
    /// sampled batch. Returns the loss when a step was taken.
    pub fn observe(&mut self, t: Transition) -> Result<Option<f64>> {
        if t.state.len() != self.online.input_dim() || t.action.index() >= self.k() {
            return Err(Error::Dimension(format!(
                "transition (state {}, action {}) does not fit network {:?}",
                t.state.len(),
                t.action.index(),
                self.online.dims()
            )));
        }
        self.buffer.push(t);
        if self.buffer.len() < self.cfg.warmup.max(1) {
            return Ok(None);
        }
        let batch = self.buffer.sample(self.cfg.batch_size, &mut self.rng);
        let loss = ddqn_update(
            &mut self.online,
            &self.target,
            &batch,
            self.cfg.gamma,
            self.cfg.learning_rate,
        )?;
        self.updates += 1;
        if self.updates.is_multiple_of(self.cfg.target_sync_every) {
            self.target = self.online.clone();
        }
        Ok(Some(loss))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statebased::network::Dense;

    fn sv(v: &[f64]) -> StateVector {
        StateVector::clamped(v.to_vec())
    }

    fn tr(s: &[f64], a: usize, r: f64, s2: &[f64]) -> Transition {
        Transition::new(sv(s), OperatorId(a), r, sv(s2)).unwrap()
    }

    #[test]
    fn myopic_target_is_reward() {
        let mut rng = RngStream::new(1, 0);
        let online = QNetwork::random(&[2, 4, 2], &mut rng).unwrap();
        let target = QNetwork::random(&[2, 4, 2], &mut rng).unwrap();
        let t = tr(&[0.1, 0.2], 0, 1.0, &[0.9, 0.3]);
        assert_eq!(
            ddqn_targets(&online, &target, &[&t], 0.0).unwrap(),
            vec![1.0]
        );
    }

    #[test]
    fn double_dqn_decoupling() {
        // Online prefers action 1 at s'; target values (5, 2). Target = 1 + 0.99 * 2.
        let online = QNetwork::from_layers(vec![Dense {
            rows: 2,
            cols: 1,
            weights: vec![0.0, 0.0],
            bias: vec![0.0, 1.0],
        }])
        .unwrap();
        let target = QNetwork::from_layers(vec![Dense {
            rows: 2,
            cols: 1,
            weights: vec![0.0, 0.0],
            bias: vec![5.0, 2.0],
        }])
        .unwrap();
        let t = tr(&[0.5], 0, 1.0, &[0.5]);
        let y = ddqn_targets(&online, &target, &[&t], 0.99).unwrap();
        assert!((y[0] - 2.98).abs() < 1e-12);
    }

    #[test]
    fn zero_error_leaves_parameters() {
        let mut online = QNetwork::from_layers(vec![Dense {
            rows: 2,
            cols: 1,
            weights: vec![1.0, 0.0],
            bias: vec![0.0, 0.0],
        }])
        .unwrap();
        let target = online.clone();
        // Q(s=1, a=0) = 1 = r with gamma 0.
        let t = tr(&[1.0], 0, 1.0, &[0.0]);
        let before = online.clone();
        let loss = ddqn_update(&mut online, &target, &[&t], 0.0, 0.1).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(online, before);
    }

    #[test]
    fn update_leaves_target_untouched() {
        let mut rng = RngStream::new(2, 0);
        let mut online = QNetwork::random(&[2, 4, 2], &mut rng).unwrap();
        let target = online.clone();
        let t = tr(&[0.3, 0.4], 1, 1.0, &[0.1, 0.1]);
        ddqn_update(&mut online, &target, &[&t], 0.9, 0.1).unwrap();
        assert_ne!(online, target);
    }

    #[test]
    fn shape_mismatch() {
        let mut rng = RngStream::new(2, 0);
        let mut online = QNetwork::random(&[2, 4, 2], &mut rng).unwrap();
        let target = QNetwork::random(&[2, 3, 2], &mut rng).unwrap();
        let t = tr(&[0.3, 0.4], 1, 1.0, &[0.1, 0.1]);
        assert!(matches!(
            ddqn_update(&mut online, &target, &[&t], 0.9, 0.1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn epsilon_greedy_rules() {
        let net = QNetwork::from_layers(vec![Dense {
            rows: 4,
            cols: 1,
            weights: vec![0.0; 4],
            bias: vec![0.1, 0.9, 0.9, 0.2],
        }])
        .unwrap();
        let mut rng = RngStream::new(3, 0);
        assert_eq!(
            select_epsilon_greedy(&net, &sv(&[0.0]), 0.0, &mut rng).unwrap(),
            OperatorId(1)
        );
        let zero = QNetwork::zeros(&[1, 4]).unwrap();
        assert_eq!(
            select_epsilon_greedy(&zero, &sv(&[0.0]), 0.0, &mut rng).unwrap(),
            OperatorId(0)
        );
        let mut counts = [0usize; 4];
        for _ in 0..40_000 {
            counts[select_epsilon_greedy(&net, &sv(&[0.0]), 1.0, &mut rng)
                .unwrap()
                .index()] += 1;
        }
        for c in counts {
            assert!((c as f64 / 40_000.0 - 0.25).abs() < 0.015, "{counts:?}");
        }
    }

    #[test]
    fn sync_semantics() {
        let mut rng = RngStream::new(4, 0);
        let net = QNetwork::random(&[2, 3, 2], &mut rng).unwrap();
        let cfg = DdqnConfig {
            warmup: 1,
            batch_size: 1,
            ..Default::default()
        };
        let mut agent = StateBasedAos::new(net, cfg, RngStream::new(4, 5)).unwrap();
        agent.observe(tr(&[0.5, 0.5], 0, 1.0, &[0.2, 0.2])).unwrap();
        assert_ne!(agent.online(), agent.target());
        agent.sync_target();
        assert_eq!(agent.online(), agent.target());
        let snapshot = agent.target().clone();
        agent.sync_target();
        assert_eq!(agent.target(), &snapshot);
        let x = [0.3, 0.7];
        assert_eq!(
            agent.online().forward(&x).unwrap(),
            agent.target().forward(&x).unwrap()
        );
        agent.observe(tr(&[0.5, 0.5], 1, 1.0, &[0.2, 0.2])).unwrap();
        assert_eq!(agent.target(), &snapshot);
    }

    #[test]
    fn warmup_defers_training() {
        let net = QNetwork::zeros(&[1, 2]).unwrap();
        let cfg = DdqnConfig {
            warmup: 3,
            batch_size: 2,
            ..Default::default()
        };
        let mut agent = StateBasedAos::new(net, cfg, RngStream::new(0, 0)).unwrap();
        assert_eq!(agent.observe(tr(&[0.0], 0, 1.0, &[0.0])).unwrap(), None);
        assert_eq!(agent.observe(tr(&[0.0], 0, 1.0, &[0.0])).unwrap(), None);
        assert!(agent.observe(tr(&[0.0], 0, 1.0, &[0.0])).unwrap().is_some());
        assert_eq!(agent.updates(), 1);
    }

    #[test]
    fn epsilon_schedule() {
        let cfg = DdqnConfig::default();
        assert_eq!(cfg.offline_epsilon(0, 1000), 1.0);
        assert!((cfg.offline_epsilon(100, 1000) - 0.525).abs() < 1e-12);
        assert!((cfg.offline_epsilon(200, 1000) - 0.05).abs() < 1e-12);
        assert!((cfg.offline_epsilon(900, 1000) - 0.05).abs() < 1e-12);
    }
}
