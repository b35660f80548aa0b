//! Domain-neutral value types shared by the engines and the controller.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an operator in a pool of `K` operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OperatorId(pub usize);

impl OperatorId {
    pub fn new(index: usize, k: usize) -> Result<Self> {
        if index < k {
            Ok(Self(index))
        } else {
            Err(Error::Config(format!(
                "operator {index} outside pool of {k}"
            )))
        }
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// A finite objective value. Lower is better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Objective(f64);

impl Objective {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::Config(format!(
                "objective must be finite, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Objective {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Objective::new(v)
    }
}

impl From<Objective> for f64 {
    fn from(o: Objective) -> f64 {
        o.0
    }
}

impl Eq for Objective {}

impl PartialOrd for Objective {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Objective {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Strict improvement test used by the decision-probability update.
/// Ties are not improvements.
pub fn improvement(y_prev: Objective, y_new: Objective) -> bool {
    y_new.0 < y_prev.0
}

/// Search-state features, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    /// Clamps every entry into `[0, 1]`; non-finite entries become 0.
    pub fn clamped(mut features: Vec<f64>) -> Self {
        for f in &mut features {
            *f = if f.is_finite() {
                f.clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        Self(features)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// One `(s, a, r, s')` experience for the state-based module.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: StateVector,
    pub action: OperatorId,
    pub reward: f64,
    pub next_state: StateVector,
}

impl Transition {
    pub fn new(
        state: StateVector,
        action: OperatorId,
        reward: f64,
        next_state: StateVector,
    ) -> Result<Self> {
        if !reward.is_finite() || reward < 0.0 {
            return Err(Error::Config(format!(
                "reward must be finite and >= 0, got {reward}"
            )));
        }
        if state.len() != next_state.len() {
            return Err(Error::Dimension(format!(
                "state lengths differ: {} vs {}",
                state.len(),
                next_state.len()
            )));
        }
        Ok(Self {
            state,
            action,
            reward,
            next_state,
        })
    }
}

/// Problem family a model or experiment belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Real,
    Cvrptw,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Real => "real",
            Domain::Cvrptw => "cvrptw",
        })
    }
}

/// Which AOS module picked the operator in a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModuleKind {
    Stateless,
    StateBased,
    /// Uniform random choice, bypassing both modules.
    Uniform,
}

/// Per-step record of a controlled run. `credit` doubles as the
/// `(operator, credit)` record of the stateless module.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    pub t: usize,
    pub module_used: ModuleKind,
    pub op: OperatorId,
    pub y_before: Objective,
    pub y_after: Objective,
    pub credit: f64,
    pub reward: f64,
    pub p_after: f64,
    pub best_so_far: Objective,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(v: f64) -> Objective {
        Objective::new(v).unwrap()
    }

    #[test]
    fn strict_improvement() {
        assert!(improvement(obj(10.0), obj(8.0)));
        assert!(!improvement(obj(10.0), obj(10.0)));
        assert!(improvement(obj(-3.0), obj(-5.0)));
    }

    #[test]
    fn nan_rejected() {
        assert!(Objective::new(f64::NAN).is_err());
        assert!(Objective::new(f64::INFINITY).is_err());
    }

    #[test]
    fn operator_bounds() {
        assert!(OperatorId::new(3, 4).is_ok());
        assert!(OperatorId::new(4, 4).is_err());
    }

    #[test]
    fn state_clamping() {
        let s = StateVector::clamped(vec![-1.0, 0.5, 2.0, f64::NAN]);
        assert_eq!(s.as_slice(), &[0.0, 0.5, 1.0, 0.0]);
    }

    #[test]
    fn transition_rejects_negative_reward() {
        let s = StateVector::clamped(vec![0.0; 2]);
        assert!(Transition::new(s.clone(), OperatorId(0), -0.1, s.clone()).is_err());
        let short = StateVector::clamped(vec![0.0; 1]);
        assert!(Transition::new(s, OperatorId(0), 0.0, short).is_err());
    }
}
