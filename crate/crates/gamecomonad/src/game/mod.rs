//! Spoiler-Duplicator games over the cube of injectivity, surjectivity and
//! negation flags, decided by back-and-forth refinement.

mod engine;
pub mod oracle;
mod strategy;
mod system;
mod trace;
mod variant;

pub use engine::{
    canonical_system, duplicator_wins, initial_system, monotonicity_violations, verdict_cube, ForthWitness, Game,
    Verdict, Violation,
};
pub use oracle::{solve_by_position_graph, PositionGraph};
pub use strategy::{PositionalStrategy, StrategyDefect};
pub use system::BackAndForthSystem;
pub use trace::{elimination_trace, replay_trace, trace_to_json, Certificate, Hall, TraceEntry};
pub use variant::GameVariant;
