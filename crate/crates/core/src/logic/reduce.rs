//! Rewriting the knowledge operator away.
//!
//! Over these models knowledge validates, for literals:
//!   K_i B_i p   <-> B_i p              K_i !B_i p  <-> !B_i p
//!   K_i B_j p   <-> B_j p & V_j p      K_i !B_j p  <-> !B_j p & V_j p   (i != j)
//!   K_i V_j p   <-> V_j p              K_i !V_j p  <-> !V_j p
//! and K distributes over conjunction unconditionally. It does NOT
//! distribute over arbitrary disjunctions: the other agents' hidden
//! opinion cells range over every combination inside an information
//! class, so K_i(B_j p | !B_j p) is true while neither disjunct is known.
//! What does hold is the clause law: for a disjunction of literals with
//! no complementary pair, knowing the clause is knowing some literal of
//! it (a clause misses any class member unless one literal is invariant
//! across the class). Elimination therefore puts the body in conjunctive
//! normal form, drops tautological clauses, distributes over the
//! conjunction, and rewrites each clause literal by literal. Directly
//! nested operators collapse first (K_i K_i a <-> K_i a;
//! K_i K_j K_i a <-> K_j K_i a for i != j, a knowledge-free), and inner
//! operators are eliminated before outer ones, so clause bodies are
//! always knowledge-free.

use thiserror::Error;

use crate::logic::ast::{StateFormula, TemporalFormula};
use crate::model::{AgentId, IssueId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("negation normal form is defined only for knowledge-free formulas")]
    KnowInNnf,
}

/// Pushes negations down to the atoms of a knowledge-free state formula.
pub fn nnf(f: &StateFormula) -> Result<StateFormula, ReduceError> {
    if f.contains_know() {
        return Err(ReduceError::KnowInNnf);
    }
    Ok(nnf_pos(f))
}

fn nnf_pos(f: &StateFormula) -> StateFormula {
    match f {
        StateFormula::True | StateFormula::False => f.clone(),
        StateFormula::Bel(..) | StateFormula::Vis(..) => f.clone(),
        StateFormula::Not(x) => nnf_neg(x),
        StateFormula::And(x, y) => StateFormula::and(nnf_pos(x), nnf_pos(y)),
        StateFormula::Or(x, y) => StateFormula::or(nnf_pos(x), nnf_pos(y)),
        StateFormula::Know(..) => unreachable!("checked knowledge-free"),
    }
}

fn nnf_neg(f: &StateFormula) -> StateFormula {
    match f {
        StateFormula::True => StateFormula::False,
        StateFormula::False => StateFormula::True,
        StateFormula::Bel(..) | StateFormula::Vis(..) => StateFormula::not(f.clone()),
        StateFormula::Not(x) => nnf_pos(x),
        StateFormula::And(x, y) => StateFormula::or(nnf_neg(x), nnf_neg(y)),
        StateFormula::Or(x, y) => StateFormula::and(nnf_neg(x), nnf_neg(y)),
        StateFormula::Know(..) => unreachable!("checked knowledge-free"),
    }
}

/// Collapses directly nested knowledge operators where the collapse laws
/// apply, bounding the modal depth before elimination.
fn collapse(f: &StateFormula) -> StateFormula {
    match f {
        StateFormula::True | StateFormula::False => f.clone(),
        StateFormula::Bel(..) | StateFormula::Vis(..) => f.clone(),
        StateFormula::Not(x) => StateFormula::not(collapse(x)),
        StateFormula::And(x, y) => StateFormula::and(collapse(x), collapse(y)),
        StateFormula::Or(x, y) => StateFormula::or(collapse(x), collapse(y)),
        StateFormula::Know(i, body) => {
            let body = collapse(body);
            match &body {
                // K_i K_i a -> K_i a
                StateFormula::Know(j, _) if j == i => body,
                // K_i K_j K_i a -> K_j K_i a, a knowledge-free
                StateFormula::Know(j, inner) if j != i => match inner.as_ref() {
                    StateFormula::Know(l, a) if l == i && !a.contains_know() => body,
                    _ => StateFormula::know(*i, body),
                },
                _ => StateFormula::know(*i, body),
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum AtomRef {
    Bel(AgentId, IssueId),
    Vis(AgentId, IssueId),
}

type Literal = (AtomRef, bool);
type Clause = Vec<Literal>;

/// Conjunctive normal form of a knowledge-free formula in NNF. An empty
/// clause list is truth, an empty clause is falsity. Tautological clauses
/// (a complementary literal pair) are dropped, duplicate literals and
/// clauses merged.
fn to_cnf(body: &StateFormula) -> Vec<Clause> {
    fn clauses(body: &StateFormula) -> Vec<Clause> {
        match body {
            StateFormula::True => vec![],
            StateFormula::False => vec![vec![]],
            StateFormula::Bel(a, p) => vec![vec![(AtomRef::Bel(*a, *p), true)]],
            StateFormula::Vis(a, p) => vec![vec![(AtomRef::Vis(*a, *p), true)]],
            StateFormula::Not(inner) => match inner.as_ref() {
                StateFormula::Bel(a, p) => vec![vec![(AtomRef::Bel(*a, *p), false)]],
                StateFormula::Vis(a, p) => vec![vec![(AtomRef::Vis(*a, *p), false)]],
                _ => unreachable!("negation below an atom in nnf"),
            },
            StateFormula::And(x, y) => {
                let mut out = clauses(x);
                out.extend(clauses(y));
                out
            }
            StateFormula::Or(x, y) => {
                let left = clauses(x);
                let right = clauses(y);
                let mut out = Vec::with_capacity(left.len() * right.len());
                for cl in &left {
                    for cr in &right {
                        let mut joined = cl.clone();
                        joined.extend(cr.iter().copied());
                        out.push(joined);
                    }
                }
                out
            }
            StateFormula::Know(..) => unreachable!("knowledge-free body"),
        }
    }
    let mut out: Vec<Clause> = Vec::new();
    'next: for mut clause in clauses(body) {
        let mut kept: Clause = Vec::new();
        for lit in clause.drain(..) {
            if kept.contains(&(lit.0, !lit.1)) {
                continue 'next; // tautological clause
            }
            if !kept.contains(&lit) {
                kept.push(lit);
            }
        }
        if !out.contains(&kept) {
            out.push(kept);
        }
    }
    out
}

fn literal_formula((atom, sign): Literal) -> StateFormula {
    let base = match atom {
        AtomRef::Bel(a, p) => StateFormula::Bel(a, p),
        AtomRef::Vis(a, p) => StateFormula::Vis(a, p),
    };
    if sign {
        base
    } else {
        StateFormula::not(base)
    }
}

/// `K_i l` for a single literal: knowledge of a foreign opinion needs the
/// opinion shown; everything else passes through.
fn know_literal(i: AgentId, lit: Literal) -> StateFormula {
    match lit.0 {
        AtomRef::Bel(j, p) if j != i => {
            StateFormula::and(literal_formula(lit), StateFormula::Vis(j, p))
        }
        _ => literal_formula(lit),
    }
}

/// `K_i` over a non-tautological clause: some literal of the clause must
/// hold invariantly across the information class, because the hidden
/// cells of the others range over every combination.
fn know_clause(i: AgentId, clause: &Clause) -> StateFormula {
    let mut lits = clause.iter().copied();
    let first = match lits.next() {
        Some(lit) => know_literal(i, lit),
        None => return StateFormula::False,
    };
    lits.fold(first, |acc, lit| StateFormula::or(acc, know_literal(i, lit)))
}

/// `K_i body` for a knowledge-free `body`: conjunctive normal form, then
/// the operator distributes over the conjunction and each clause reduces
/// literal by literal.
fn apply_know(i: AgentId, body: &StateFormula) -> StateFormula {
    debug_assert!(!body.contains_know());
    let cnf = to_cnf(&nnf_pos(body));
    let mut clauses = cnf.iter().map(|c| know_clause(i, c));
    let first = match clauses.next() {
        Some(f) => f,
        None => return StateFormula::True,
    };
    clauses.fold(first, |acc, f| StateFormula::and(acc, f))
}

/// Eliminates every knowledge operator from a state formula, innermost
/// first, preserving truth at every state.
pub fn reduce_state(f: &StateFormula) -> StateFormula {
    fn eliminate(f: &StateFormula) -> StateFormula {
        match f {
            StateFormula::True | StateFormula::False => f.clone(),
            StateFormula::Bel(..) | StateFormula::Vis(..) => f.clone(),
            StateFormula::Not(x) => StateFormula::not(eliminate(x)),
            StateFormula::And(x, y) => StateFormula::and(eliminate(x), eliminate(y)),
            StateFormula::Or(x, y) => StateFormula::or(eliminate(x), eliminate(y)),
            StateFormula::Know(i, body) => apply_know(*i, &eliminate(body)),
        }
    }
    eliminate(&collapse(f))
}

/// Eliminates every knowledge operator from a goal. Derived temporal
/// operators are left as written; only state subformulas change.
pub fn reduce(f: &TemporalFormula) -> TemporalFormula {
    match f {
        TemporalFormula::State(a) => TemporalFormula::State(reduce_state(a)),
        TemporalFormula::Not(a) => TemporalFormula::not(reduce(a)),
        TemporalFormula::And(a, b) => TemporalFormula::and(reduce(a), reduce(b)),
        TemporalFormula::Or(a, b) => TemporalFormula::or(reduce(a), reduce(b)),
        TemporalFormula::Implies(a, b) => TemporalFormula::implies(reduce(a), reduce(b)),
        TemporalFormula::Next(a) => TemporalFormula::next(reduce(a)),
        TemporalFormula::Until(a, b) => TemporalFormula::until(reduce(a), reduce(b)),
        TemporalFormula::Eventually(a) => TemporalFormula::eventually(reduce(a)),
        TemporalFormula::Henceforth(a) => TemporalFormula::henceforth(reduce(a)),
    }
}
