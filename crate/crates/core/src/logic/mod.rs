//! The goal language: a state layer (belief and visibility atoms, boolean
//! connectives, a per-agent knowledge operator) under a temporal layer
//! (next, until, and the derived eventually/henceforth). Knowledge never
//! scopes over a temporal operator.

pub(crate) mod ast;
pub(crate) mod eval;
mod parser;
mod reduce;

pub use ast::{size, state_size, StateFormula, TemporalFormula};
pub use eval::{eval, eval_state};
pub use parser::{parse, parse_formula_file, parse_interning, ParseError, ParseErrorKind};
pub use reduce::{nnf, reduce, reduce_state, ReduceError};
