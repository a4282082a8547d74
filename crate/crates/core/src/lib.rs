//! Opinion diffusion over a trust network with strategic disclosure.
//!
//! Agents hold binary opinions on a set of issues and may reveal or hide
//! each opinion. Revealed opinions diffuse along a directed trust network
//! through per-agent aggregation (unanimity by default). Goals are written
//! in a two-layer language: a state layer with belief/visibility atoms and
//! a knowledge operator, under a temporal layer with next/until. The crate
//! provides
//!
//! * the finite-state model ([`model`]),
//! * the deterministic dynamics and lasso generation ([`diffusion`]),
//! * the goal language: parser, exact evaluation over lassos, and the
//!   rewriting that eliminates the knowledge operator ([`logic`]),
//! * pure-LTL encodings of states, strategies and the unanimous update
//!   for export to external tools ([`encoding`]),
//! * solution-concept checkers: winning strategies, weak dominance, best
//!   response and Nash membership over enumerable strategy families
//!   ([`analysis`]).

pub mod analysis;
pub mod diffusion;
pub mod encoding;
pub mod logic;
pub mod model;

pub use analysis::{
    class_key, controls, Analyzer, AnalysisError, Budget, ClassKey, InfluenceGame, Strategy,
    StrategyFamily, StrategyProfile, Verdict,
};
pub use diffusion::{
    transition, unanimous_update, Action, AggregationRule, DiffusionError, JointAction, Lasso,
    Majority, Rules, Unanimous,
};
pub use logic::{eval, eval_state, nnf, parse, reduce, ParseError, StateFormula, TemporalFormula};
pub use model::{
    indistinguishable, AgentId, InfluenceNetwork, IssueId, ModelError, Names, OpinionVector,
    PublicOpinion, Space, State, VisibilityVector,
};

/// Default ceiling on enumerated state spaces (2^24 states).
pub const DEFAULT_STATE_LIMIT: u64 = 1 << 24;
