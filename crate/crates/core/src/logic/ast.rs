//! Formula trees and their concrete-syntax rendering.

use std::fmt;

use crate::model::{AgentId, IssueId, Names};

/// State-layer formulas: what holds *now*. `Know(i, a)` asserts that `a`
/// holds at every state the agent cannot tell apart from the current one.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum StateFormula {
    True,
    False,
    /// Agent holds the opinion that the issue is true.
    Bel(AgentId, IssueId),
    /// Agent currently shows her opinion on the issue.
    Vis(AgentId, IssueId),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    Or(Box<StateFormula>, Box<StateFormula>),
    Know(AgentId, Box<StateFormula>),
}

/// Temporal-layer formulas over an infinite run. `State` lifts a state
/// formula to the current position.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TemporalFormula {
    State(StateFormula),
    Not(Box<TemporalFormula>),
    And(Box<TemporalFormula>, Box<TemporalFormula>),
    Or(Box<TemporalFormula>, Box<TemporalFormula>),
    Implies(Box<TemporalFormula>, Box<TemporalFormula>),
    Next(Box<TemporalFormula>),
    Until(Box<TemporalFormula>, Box<TemporalFormula>),
    Eventually(Box<TemporalFormula>),
    Henceforth(Box<TemporalFormula>),
}

impl StateFormula {
    pub fn not(f: StateFormula) -> StateFormula {
        StateFormula::Not(Box::new(f))
    }

    pub fn and(a: StateFormula, b: StateFormula) -> StateFormula {
        StateFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: StateFormula, b: StateFormula) -> StateFormula {
        StateFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn know(agent: AgentId, f: StateFormula) -> StateFormula {
        StateFormula::Know(agent, Box::new(f))
    }

    pub fn contains_know(&self) -> bool {
        match self {
            StateFormula::True | StateFormula::False => false,
            StateFormula::Bel(..) | StateFormula::Vis(..) => false,
            StateFormula::Not(a) => a.contains_know(),
            StateFormula::And(a, b) | StateFormula::Or(a, b) => {
                a.contains_know() || b.contains_know()
            }
            StateFormula::Know(..) => true,
        }
    }

    /// A (possibly negated) belief or visibility atom.
    pub fn is_literal(&self) -> bool {
        match self {
            StateFormula::Bel(..) | StateFormula::Vis(..) => true,
            StateFormula::Not(a) => matches!(**a, StateFormula::Bel(..) | StateFormula::Vis(..)),
            _ => false,
        }
    }

    pub fn display<'a>(&'a self, names: &'a Names) -> impl fmt::Display + 'a {
        StateDisplay { f: self, names }
    }
}

impl TemporalFormula {
    pub fn lift(f: StateFormula) -> TemporalFormula {
        TemporalFormula::State(f)
    }

    // The boolean constructors keep lifted state formulas maximal: a
    // boolean combination of state formulas is itself a state formula.
    // Everything that builds formulas programmatically then agrees with
    // the parser on one canonical tree, and printing round-trips.

    pub fn not(f: TemporalFormula) -> TemporalFormula {
        match f {
            TemporalFormula::State(a) => TemporalFormula::State(StateFormula::not(a)),
            other => TemporalFormula::Not(Box::new(other)),
        }
    }

    pub fn and(a: TemporalFormula, b: TemporalFormula) -> TemporalFormula {
        match (a, b) {
            (TemporalFormula::State(x), TemporalFormula::State(y)) => {
                TemporalFormula::State(StateFormula::and(x, y))
            }
            (a, b) => TemporalFormula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: TemporalFormula, b: TemporalFormula) -> TemporalFormula {
        match (a, b) {
            (TemporalFormula::State(x), TemporalFormula::State(y)) => {
                TemporalFormula::State(StateFormula::or(x, y))
            }
            (a, b) => TemporalFormula::Or(Box::new(a), Box::new(b)),
        }
    }

    /// Implication; over two state formulas it desugars to `!a | b`, the
    /// same shape the parser produces.
    pub fn implies(a: TemporalFormula, b: TemporalFormula) -> TemporalFormula {
        match (a, b) {
            (TemporalFormula::State(x), TemporalFormula::State(y)) => {
                TemporalFormula::State(StateFormula::or(StateFormula::not(x), y))
            }
            (a, b) => TemporalFormula::Implies(Box::new(a), Box::new(b)),
        }
    }

    pub fn next(f: TemporalFormula) -> TemporalFormula {
        TemporalFormula::Next(Box::new(f))
    }

    pub fn until(a: TemporalFormula, b: TemporalFormula) -> TemporalFormula {
        TemporalFormula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: TemporalFormula) -> TemporalFormula {
        TemporalFormula::Eventually(Box::new(f))
    }

    pub fn henceforth(f: TemporalFormula) -> TemporalFormula {
        TemporalFormula::Henceforth(Box::new(f))
    }

    pub fn contains_know(&self) -> bool {
        match self {
            TemporalFormula::State(a) => a.contains_know(),
            TemporalFormula::Not(a)
            | TemporalFormula::Next(a)
            | TemporalFormula::Eventually(a)
            | TemporalFormula::Henceforth(a) => a.contains_know(),
            TemporalFormula::And(a, b)
            | TemporalFormula::Or(a, b)
            | TemporalFormula::Implies(a, b)
            | TemporalFormula::Until(a, b) => a.contains_know() || b.contains_know(),
        }
    }

    /// Nesting depth of `Next` when the formula uses no other temporal
    /// operator; `None` if it mentions until/eventually/henceforth.
    pub fn next_depth(&self) -> Option<usize> {
        match self {
            TemporalFormula::State(_) => Some(0),
            TemporalFormula::Not(a) => a.next_depth(),
            TemporalFormula::And(a, b)
            | TemporalFormula::Or(a, b)
            | TemporalFormula::Implies(a, b) => Some(a.next_depth()?.max(b.next_depth()?)),
            TemporalFormula::Next(a) => Some(1 + a.next_depth()?),
            TemporalFormula::Until(..)
            | TemporalFormula::Eventually(..)
            | TemporalFormula::Henceforth(..) => None,
        }
    }

    pub fn display<'a>(&'a self, names: &'a Names) -> impl fmt::Display + 'a {
        TemporalDisplay { f: self, names }
    }
}

/// Node count of a state formula.
pub fn state_size(f: &StateFormula) -> usize {
    match f {
        StateFormula::True | StateFormula::False => 1,
        StateFormula::Bel(..) | StateFormula::Vis(..) => 1,
        StateFormula::Not(a) | StateFormula::Know(_, a) => 1 + state_size(a),
        StateFormula::And(a, b) | StateFormula::Or(a, b) => 1 + state_size(a) + state_size(b),
    }
}

/// Node count of a temporal formula.
pub fn size(f: &TemporalFormula) -> usize {
    match f {
        TemporalFormula::State(a) => state_size(a),
        TemporalFormula::Not(a)
        | TemporalFormula::Next(a)
        | TemporalFormula::Eventually(a)
        | TemporalFormula::Henceforth(a) => 1 + size(a),
        TemporalFormula::And(a, b)
        | TemporalFormula::Or(a, b)
        | TemporalFormula::Implies(a, b)
        | TemporalFormula::Until(a, b) => 1 + size(a) + size(b),
    }
}

// Rendering. Binding strength, loosest to tightest: -> (right assoc),
// |, &, U (left assoc), prefix (!, X, F, G, K[..]), atoms. A child is
// parenthesized when its level is below what its context requires.
const LVL_IMPLIES: u8 = 1;
const LVL_OR: u8 = 2;
const LVL_AND: u8 = 3;
const LVL_UNTIL: u8 = 4;
const LVL_PREFIX: u8 = 5;
const LVL_ATOM: u8 = 6;

pub(crate) trait AtomRenderer {
    fn atom(&self, f: &mut fmt::Formatter<'_>, kind: AtomKind, a: AgentId, p: IssueId)
        -> fmt::Result;
    fn agent(&self, f: &mut fmt::Formatter<'_>, a: AgentId) -> fmt::Result;
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum AtomKind {
    Bel,
    Vis,
}

pub(crate) struct NamedAtoms<'a>(pub &'a Names);

impl AtomRenderer for NamedAtoms<'_> {
    fn atom(
        &self,
        f: &mut fmt::Formatter<'_>,
        kind: AtomKind,
        a: AgentId,
        p: IssueId,
    ) -> fmt::Result {
        let tag = match kind {
            AtomKind::Bel => "B",
            AtomKind::Vis => "V",
        };
        write!(f, "{}[{},{}]", tag, self.0.agent_name(a), self.0.issue_name(p))
    }

    fn agent(&self, f: &mut fmt::Formatter<'_>, a: AgentId) -> fmt::Result {
        write!(f, "{}", self.0.agent_name(a))
    }
}

pub(crate) fn fmt_state(
    f: &mut fmt::Formatter<'_>,
    node: &StateFormula,
    atoms: &dyn AtomRenderer,
    min_level: u8,
) -> fmt::Result {
    let level = match node {
        StateFormula::True | StateFormula::False => LVL_ATOM,
        StateFormula::Bel(..) | StateFormula::Vis(..) => LVL_ATOM,
        StateFormula::Not(..) | StateFormula::Know(..) => LVL_PREFIX,
        StateFormula::And(..) => LVL_AND,
        StateFormula::Or(..) => LVL_OR,
    };
    let parens = level < min_level;
    if parens {
        write!(f, "(")?;
    }
    match node {
        StateFormula::True => write!(f, "true")?,
        StateFormula::False => write!(f, "false")?,
        StateFormula::Bel(a, p) => atoms.atom(f, AtomKind::Bel, *a, *p)?,
        StateFormula::Vis(a, p) => atoms.atom(f, AtomKind::Vis, *a, *p)?,
        StateFormula::Not(x) => {
            write!(f, "!")?;
            fmt_state(f, x, atoms, LVL_PREFIX)?;
        }
        StateFormula::Know(a, x) => {
            write!(f, "K[")?;
            atoms.agent(f, *a)?;
            write!(f, "] ")?;
            fmt_state(f, x, atoms, LVL_PREFIX)?;
        }
        StateFormula::And(x, y) => {
            fmt_state(f, x, atoms, LVL_AND)?;
            write!(f, " & ")?;
            fmt_state(f, y, atoms, LVL_AND + 1)?;
        }
        StateFormula::Or(x, y) => {
            fmt_state(f, x, atoms, LVL_OR)?;
            write!(f, " | ")?;
            fmt_state(f, y, atoms, LVL_OR + 1)?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

pub(crate) fn fmt_temporal(
    f: &mut fmt::Formatter<'_>,
    node: &TemporalFormula,
    atoms: &dyn AtomRenderer,
    min_level: u8,
) -> fmt::Result {
    if let TemporalFormula::State(inner) = node {
        return fmt_state(f, inner, atoms, min_level);
    }
    let level = match node {
        TemporalFormula::State(..) => unreachable!(),
        TemporalFormula::Not(..)
        | TemporalFormula::Next(..)
        | TemporalFormula::Eventually(..)
        | TemporalFormula::Henceforth(..) => LVL_PREFIX,
        TemporalFormula::And(..) => LVL_AND,
        TemporalFormula::Or(..) => LVL_OR,
        TemporalFormula::Implies(..) => LVL_IMPLIES,
        TemporalFormula::Until(..) => LVL_UNTIL,
    };
    let parens = level < min_level;
    if parens {
        write!(f, "(")?;
    }
    match node {
        TemporalFormula::State(..) => unreachable!(),
        TemporalFormula::Not(x) => {
            write!(f, "!")?;
            fmt_temporal(f, x, atoms, LVL_PREFIX)?;
        }
        TemporalFormula::Next(x) => {
            write!(f, "X ")?;
            fmt_temporal(f, x, atoms, LVL_PREFIX)?;
        }
        TemporalFormula::Eventually(x) => {
            write!(f, "F ")?;
            fmt_temporal(f, x, atoms, LVL_PREFIX)?;
        }
        TemporalFormula::Henceforth(x) => {
            write!(f, "G ")?;
            fmt_temporal(f, x, atoms, LVL_PREFIX)?;
        }
        TemporalFormula::And(x, y) => {
            fmt_temporal(f, x, atoms, LVL_AND)?;
            write!(f, " & ")?;
            fmt_temporal(f, y, atoms, LVL_AND + 1)?;
        }
        TemporalFormula::Or(x, y) => {
            fmt_temporal(f, x, atoms, LVL_OR)?;
            write!(f, " | ")?;
            fmt_temporal(f, y, atoms, LVL_OR + 1)?;
        }
        TemporalFormula::Implies(x, y) => {
            fmt_temporal(f, x, atoms, LVL_IMPLIES + 1)?;
            write!(f, " -> ")?;
            fmt_temporal(f, y, atoms, LVL_IMPLIES)?;
        }
        TemporalFormula::Until(x, y) => {
            fmt_temporal(f, x, atoms, LVL_UNTIL)?;
            write!(f, " U ")?;
            fmt_temporal(f, y, atoms, LVL_UNTIL + 1)?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

struct StateDisplay<'a> {
    f: &'a StateFormula,
    names: &'a Names,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_state(f, self.f, &NamedAtoms(self.names), 0)
    }
}

struct TemporalDisplay<'a> {
    f: &'a TemporalFormula,
    names: &'a Names,
}

impl fmt::Display for TemporalDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_temporal(f, self.f, &NamedAtoms(self.names), 0)
    }
}
