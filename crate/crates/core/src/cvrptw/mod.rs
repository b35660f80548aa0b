//! Capacitated vehicle routing with time windows.

pub mod instance;
pub mod moves;
pub mod plan;
pub mod search;

pub use instance::{parse_solomon, Instance, Node};
pub use moves::{apply_move, or_opt, swap_customers, two_opt_star, Move, MoveOutcome, NUM_MOVES};
pub use plan::{
    evaluate_plan, initial_plan, route_cost, EvaluatedPlan, ObjectiveWeights, RouteCost, RoutePlan,
};
pub use search::LocalSearchHost;
