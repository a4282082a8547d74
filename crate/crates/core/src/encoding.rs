//! Pure-LTL encodings of states, actions, strategies and the unanimous
//! update, plus a plain-text export format for external LTL tools.
//!
//! Propositions are named `b_<agent>_<issue>` and `v_<agent>_<issue>`;
//! a sidecar table maps each name back to its (kind, agent, issue) triple.
//! The strategy encoding ranges over the whole state space and is guarded
//! by the same enumeration ceiling as every other exhaustive operation.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::analysis::{Strategy, StrategyProfile};
use crate::diffusion::Action;
use crate::logic::ast::{fmt_temporal, AtomKind, AtomRenderer};
use crate::logic::{ParseError, StateFormula, TemporalFormula};
use crate::model::{AgentId, InfluenceNetwork, IssueId, ModelError, Names, Space, State};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("agent {agent} has no influencers; the update encoding ranges over influenced agents only")]
    NoInfluencers { agent: usize },
    #[error("proposition name `{name}` is claimed by two different atoms; rename agents or issues")]
    NameCollision { name: String },
    #[error("the update encoding covers unanimous aggregation only")]
    NotUnanimous,
}

/// Whether an update encoding constrains the positive or the negated
/// belief atom of its agent and issue.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Polarity {
    Positive,
    Negative,
}

/// Bijective table between proposition names and (kind, agent, issue).
#[derive(Clone, Debug)]
pub struct PropTable {
    names: Names,
    by_name: HashMap<String, (AtomKind, AgentId, IssueId)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PropKind {
    Belief,
    Visibility,
}

pub fn prop_name(names: &Names, kind: PropKind, a: AgentId, p: IssueId) -> String {
    let tag = match kind {
        PropKind::Belief => "b",
        PropKind::Visibility => "v",
    };
    format!("{}_{}_{}", tag, names.agent_name(a), names.issue_name(p))
}

impl PropTable {
    /// Builds the table, rejecting name collisions (possible when agent or
    /// issue names themselves contain underscores).
    pub fn new(space: &Space, names: &Names) -> Result<PropTable, EncodeError> {
        let mut by_name = HashMap::new();
        for a in space.agents() {
            for p in space.issues() {
                for (kind, ak) in
                    [(PropKind::Belief, AtomKind::Bel), (PropKind::Visibility, AtomKind::Vis)]
                {
                    let name = prop_name(names, kind, a, p);
                    if by_name.insert(name.clone(), (ak, a, p)).is_some() {
                        return Err(EncodeError::NameCollision { name });
                    }
                }
            }
        }
        Ok(PropTable { names: names.clone(), by_name })
    }

    pub fn lookup(&self, name: &str) -> Option<(PropKind, AgentId, IssueId)> {
        self.by_name.get(name).map(|(k, a, p)| {
            let kind = match k {
                AtomKind::Bel => PropKind::Belief,
                AtomKind::Vis => PropKind::Visibility,
            };
            (kind, *a, *p)
        })
    }

    /// Sidecar text: one `name kind agent issue` line per proposition,
    /// beliefs first, agent-major.
    pub fn mapping_text(&self, space: &Space) -> String {
        let mut out = String::new();
        for (kind, tag) in [(PropKind::Belief, "bel"), (PropKind::Visibility, "vis")] {
            for a in space.agents() {
                for p in space.issues() {
                    out.push_str(&format!(
                        "{} {} {} {}\n",
                        prop_name(&self.names, kind, a, p),
                        tag,
                        self.names.agent_name(a),
                        self.names.issue_name(p),
                    ));
                }
            }
        }
        out
    }
}

struct PropAtoms<'a>(&'a Names);

impl AtomRenderer for PropAtoms<'_> {
    fn atom(
        &self,
        f: &mut fmt::Formatter<'_>,
        kind: AtomKind,
        a: AgentId,
        p: IssueId,
    ) -> fmt::Result {
        let kind = match kind {
            AtomKind::Bel => PropKind::Belief,
            AtomKind::Vis => PropKind::Visibility,
        };
        write!(f, "{}", prop_name(self.0, kind, a, p))
    }

    fn agent(&self, f: &mut fmt::Formatter<'_>, a: AgentId) -> fmt::Result {
        write!(f, "{}", self.0.agent_name(a))
    }
}

/// A formula over the `b_*`/`v_*` propositions together with its table.
#[derive(Clone, Debug)]
pub struct LtlDocument {
    pub table: PropTable,
    pub formula: TemporalFormula,
}

impl LtlDocument {
    /// Deterministic single-line rendering with operators `X U F G & | ! ->`.
    pub fn export(&self) -> String {
        struct Render<'a>(&'a TemporalFormula, &'a Names);
        impl fmt::Display for Render<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt_temporal(f, self.0, &PropAtoms(self.1), 0)
            }
        }
        format!("{}", Render(&self.formula, &self.table.names))
    }
}

/// Parses text in the export format back against a proposition table.
/// `export` followed by `parse_exported` is the identity on formulas
/// produced by this module.
pub fn parse_exported(text: &str, table: &PropTable) -> Result<TemporalFormula, ParseError> {
    exported::parse(text, table)
}

mod exported {
    //! Recursive-descent parser for the export format. Mirrors the goal
    //! grammar exactly, with propositions as plain identifiers.

    use super::{PropKind, PropTable};
    use crate::logic::{ParseError, ParseErrorKind, StateFormula, TemporalFormula};

    struct P<'a> {
        toks: Vec<(String, usize)>,
        at: usize,
        end: usize,
        table: &'a PropTable,
    }

    pub fn parse(text: &str, table: &PropTable) -> Result<TemporalFormula, ParseError> {
        let mut toks = Vec::new();
        let mut chars = text.char_indices().peekable();
        while let Some((pos, c)) = chars.next() {
            match c {
                ' ' | '\t' | '\r' | '\n' => {}
                '(' | ')' | '!' | '&' | '|' => toks.push((c.to_string(), pos)),
                '-' => match chars.next() {
                    Some((_, '>')) => toks.push(("->".to_string(), pos)),
                    _ => return Err(ParseError { pos, kind: ParseErrorKind::UnexpectedChar('-') }),
                },
                c if c.is_alphanumeric() || c == '_' => {
                    let mut w = c.to_string();
                    while let Some((_, d)) = chars.peek() {
                        if d.is_alphanumeric() || *d == '_' {
                            w.push(*d);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    toks.push((w, pos));
                }
                other => {
                    return Err(ParseError { pos, kind: ParseErrorKind::UnexpectedChar(other) })
                }
            }
        }
        let mut p = P { toks, at: 0, end: text.len(), table };
        let f = p.implies()?;
        if p.at != p.toks.len() {
            return Err(ParseError { pos: p.pos(), kind: ParseErrorKind::TrailingInput });
        }
        Ok(f)
    }

    impl P<'_> {
        fn pos(&self) -> usize {
            self.toks.get(self.at).map(|t| t.1).unwrap_or(self.end)
        }

        fn peek(&self) -> Option<&str> {
            self.toks.get(self.at).map(|t| t.0.as_str())
        }

        fn bump(&mut self) -> Option<(String, usize)> {
            let t = self.toks.get(self.at).cloned();
            self.at += 1;
            t
        }

        fn implies(&mut self) -> Result<TemporalFormula, ParseError> {
            let lhs = self.or()?;
            if self.peek() == Some("->") {
                self.bump();
                let rhs = self.implies()?;
                Ok(TemporalFormula::implies(lhs, rhs))
            } else {
                Ok(lhs)
            }
        }

        fn or(&mut self) -> Result<TemporalFormula, ParseError> {
            let mut lhs = self.and()?;
            while self.peek() == Some("|") {
                self.bump();
                lhs = TemporalFormula::or(lhs, self.and()?);
            }
            Ok(lhs)
        }

        fn and(&mut self) -> Result<TemporalFormula, ParseError> {
            let mut lhs = self.until()?;
            while self.peek() == Some("&") {
                self.bump();
                lhs = TemporalFormula::and(lhs, self.until()?);
            }
            Ok(lhs)
        }

        fn until(&mut self) -> Result<TemporalFormula, ParseError> {
            let mut lhs = self.prefix()?;
            while self.peek() == Some("U") {
                self.bump();
                lhs = TemporalFormula::until(lhs, self.prefix()?);
            }
            Ok(lhs)
        }

        fn prefix(&mut self) -> Result<TemporalFormula, ParseError> {
            match self.peek() {
                Some("!") => {
                    self.bump();
                    Ok(TemporalFormula::not(self.prefix()?))
                }
                Some("X") => {
                    self.bump();
                    Ok(TemporalFormula::next(self.prefix()?))
                }
                Some("F") => {
                    self.bump();
                    Ok(TemporalFormula::eventually(self.prefix()?))
                }
                Some("G") => {
                    self.bump();
                    Ok(TemporalFormula::henceforth(self.prefix()?))
                }
                _ => self.atom(),
            }
        }

        fn atom(&mut self) -> Result<TemporalFormula, ParseError> {
            let pos = self.pos();
            match self.bump() {
                Some((w, _)) if w == "(" => {
                    let inner = self.implies()?;
                    match self.bump() {
                        Some((w, _)) if w == ")" => Ok(inner),
                        _ => Err(ParseError {
                            pos: self.pos(),
                            kind: ParseErrorKind::Expected("`)`"),
                        }),
                    }
                }
                Some((w, _)) if w == "true" => Ok(TemporalFormula::lift(StateFormula::True)),
                Some((w, _)) if w == "false" => Ok(TemporalFormula::lift(StateFormula::False)),
                Some((w, pos)) => match self.table.lookup(&w) {
                    Some((PropKind::Belief, a, p)) => {
                        Ok(TemporalFormula::lift(StateFormula::Bel(a, p)))
                    }
                    Some((PropKind::Visibility, a, p)) => {
                        Ok(TemporalFormula::lift(StateFormula::Vis(a, p)))
                    }
                    None => Err(ParseError { pos, kind: ParseErrorKind::ExpectedFormula }),
                },
                None => Err(ParseError { pos, kind: ParseErrorKind::UnexpectedEnd }),
            }
        }
    }
}

/// The conjunction of signed belief and visibility literals that is true
/// exactly at `s`: one pair per (agent, issue) cell, agent-major.
pub fn state_characteristic(space: &Space, s: State) -> StateFormula {
    let mut conjuncts = Vec::new();
    for a in space.agents() {
        for p in space.issues() {
            let bel = StateFormula::Bel(a, p);
            conjuncts.push(if s.belief(space, a, p) { bel } else { StateFormula::not(bel) });
            let vis = StateFormula::Vis(a, p);
            conjuncts.push(if s.visible(space, a, p) { vis } else { StateFormula::not(vis) });
        }
    }
    conjoin_state(conjuncts)
}

fn conjoin_state(mut parts: Vec<StateFormula>) -> StateFormula {
    let mut acc = parts.remove(0);
    for part in parts {
        acc = StateFormula::and(acc, part);
    }
    acc
}

fn conjoin(parts: Vec<TemporalFormula>) -> TemporalFormula {
    let mut iter = parts.into_iter();
    let first = match iter.next() {
        Some(f) => f,
        None => return TemporalFormula::lift(StateFormula::True),
    };
    iter.fold(first, TemporalFormula::and)
}

fn disjoin(parts: Vec<TemporalFormula>) -> TemporalFormula {
    let mut iter = parts.into_iter();
    let first = match iter.next() {
        Some(f) => f,
        None => return TemporalFormula::lift(StateFormula::False),
    };
    iter.fold(first, TemporalFormula::or)
}

/// What taking an action promises about the next instant: revealing makes
/// the visibility atom true, hiding makes it false, skipping promises
/// nothing.
pub fn action_effect(agent: AgentId, action: Action) -> TemporalFormula {
    match action {
        Action::Skip => TemporalFormula::lift(StateFormula::True),
        Action::Reveal(p) => TemporalFormula::next(TemporalFormula::lift(StateFormula::Vis(agent, p))),
        Action::Hide(p) => TemporalFormula::next(TemporalFormula::lift(StateFormula::not(
            StateFormula::Vis(agent, p),
        ))),
    }
}

/// One agent's strategy as a formula: at every state, the action the
/// strategy picks there takes effect at the next instant. The conjunction
/// ranges over the whole state space, guarded by `limit`.
pub fn strategy_encoding(
    space: &Space,
    agent: AgentId,
    strategy: &Strategy,
    limit: u64,
) -> Result<TemporalFormula, EncodeError> {
    let mut conjuncts = Vec::new();
    for s in space.enumerate_states(limit)? {
        let antecedent = TemporalFormula::lift(state_characteristic(space, s));
        let consequent = action_effect(agent, strategy.action(space, agent, s));
        conjuncts.push(TemporalFormula::implies(antecedent, consequent));
    }
    Ok(conjoin(conjuncts))
}

/// A whole profile: the conjunction of every agent's strategy encoding.
pub fn profile_encoding(
    space: &Space,
    profile: &StrategyProfile,
    limit: u64,
) -> Result<TemporalFormula, EncodeError> {
    let mut parts = Vec::new();
    for a in space.agents() {
        parts.push(strategy_encoding(space, a, profile.strategy(a), limit)?);
    }
    Ok(conjoin(parts))
}

/// The unanimity update for one agent, issue and polarity, as a
/// biconditional: the (possibly negated) belief atom holds next iff
///   - every influencer hides the issue next and the agent already holds
///     that value, or
///   - some influencer shows the issue next and every influencer showing
///     it next currently states the value, or
///   - two influencers showing it next currently disagree and the agent
///     already holds the value.
/// Visibility atoms sit under X because actions take one step, while the
/// stated values are read from the current instant.
pub fn unanimity_encoding(
    net: &InfluenceNetwork,
    agent: AgentId,
    issue: IssueId,
    polarity: Polarity,
) -> Result<TemporalFormula, EncodeError> {
    let influencers = net.influencers(agent);
    if influencers.is_empty() {
        return Err(EncodeError::NoInfluencers { agent: agent.index() });
    }
    let signed = |a: AgentId| -> TemporalFormula {
        let atom = StateFormula::Bel(a, issue);
        TemporalFormula::lift(match polarity {
            Polarity::Positive => atom,
            Polarity::Negative => StateFormula::not(atom),
        })
    };
    let signed_opposite = |a: AgentId| -> TemporalFormula {
        let atom = StateFormula::Bel(a, issue);
        TemporalFormula::lift(match polarity {
            Polarity::Positive => StateFormula::not(atom),
            Polarity::Negative => atom,
        })
    };
    let shows_next = |a: AgentId| -> TemporalFormula {
        TemporalFormula::next(TemporalFormula::lift(StateFormula::Vis(a, issue)))
    };
    let hides_next = |a: AgentId| -> TemporalFormula {
        TemporalFormula::next(TemporalFormula::lift(StateFormula::not(StateFormula::Vis(
            a, issue,
        ))))
    };

    let all_hidden = conjoin(influencers.iter().map(|j| hides_next(*j)).collect());
    let keep_silent = TemporalFormula::and(all_hidden, signed(agent));

    let someone_shows = disjoin(influencers.iter().map(|j| shows_next(*j)).collect());
    let all_showing_agree = conjoin(
        influencers.iter().map(|j| TemporalFormula::implies(shows_next(*j), signed(*j))).collect(),
    );
    let adopt_unanimous = TemporalFormula::and(someone_shows, all_showing_agree);

    let mut disagreements = Vec::new();
    for j in influencers {
        for z in influencers {
            disagreements.push(TemporalFormula::and(
                TemporalFormula::and(
                    TemporalFormula::and(shows_next(*j), shows_next(*z)),
                    signed(*j),
                ),
                signed_opposite(*z),
            ));
        }
    }
    let keep_on_disagreement = TemporalFormula::and(disjoin(disagreements), signed(agent));

    let lhs = TemporalFormula::next(signed(agent));
    let rhs = disjoin(vec![keep_silent, adopt_unanimous, keep_on_disagreement]);
    Ok(TemporalFormula::and(
        TemporalFormula::implies(lhs.clone(), rhs.clone()),
        TemporalFormula::implies(rhs, lhs),
    ))
}

/// The whole transition process under unanimous aggregation: both
/// polarities for every influenced agent and every issue. Agents without
/// influencers keep their beliefs implicitly and are not constrained.
pub fn transition_encoding(
    space: &Space,
    net: &InfluenceNetwork,
) -> Result<TemporalFormula, EncodeError> {
    let mut parts = Vec::new();
    for a in space.agents() {
        if net.influencers(a).is_empty() {
            continue;
        }
        for p in space.issues() {
            parts.push(unanimity_encoding(net, a, p, Polarity::Positive)?);
            parts.push(unanimity_encoding(net, a, p, Polarity::Negative)?);
        }
    }
    Ok(conjoin(parts))
}
