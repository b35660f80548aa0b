//! State-based operator selection: features, Q-network, replay and Double-DQN.

pub mod ddqn;
pub mod features;
pub mod network;
pub mod replay;

pub use ddqn::{ddqn_targets, ddqn_update, select_epsilon_greedy, DdqnConfig, StateBasedAos};
pub use features::{feature_dim, FeatureTracker, Snapshot, WINDOW};
pub use network::{load_model, save_model, Dense, Gradients, ModelFile, QNetwork};
pub use replay::ReplayBuffer;

use crate::stateless::CREDIT_EPS;
use crate::types::Objective;

/// Bonus added to the reward when a step sets a new global best.
pub const GLOBAL_BEST_BONUS: f64 = 0.5;

/// Improvement-rate reward, clamped to `[0, 1]`, plus a bonus for a new
/// global best.
pub fn reward(y_prev: Objective, y_new: Objective, new_global_best: bool) -> f64 {
    let rate = (y_prev.value() - y_new.value()) / y_prev.value().abs().max(CREDIT_EPS);
    rate.clamp(0.0, 1.0)
        + if new_global_best {
            GLOBAL_BEST_BONUS
        } else {
            0.0
        }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(v: f64) -> Objective {
        Objective::new(v).unwrap()
    }

    #[test]
    fn reward_examples() {
        assert!((reward(obj(10.0), obj(8.0), false) - 0.2).abs() < 1e-15);
        assert!((reward(obj(10.0), obj(8.0), true) - 0.7).abs() < 1e-15);
        assert_eq!(reward(obj(10.0), obj(12.0), false), 0.0);
    }
}
