//! Concrete syntax for goals.
//!
//! Atoms are `B[agent,issue]` and `V[agent,issue]`, constants `true` and
//! `false`. Operators, loosest to tightest: `->` (right associative), `|`,
//! `&`, `U` (left associative), then the prefixes `!`, `X`, `F`, `G`,
//! `K[agent]`, with parentheses as usual. The knowledge operator accepts
//! no temporal operator anywhere beneath it.

use std::fmt;

use thiserror::Error;

use crate::logic::ast::{StateFormula, TemporalFormula};
use crate::model::{AgentId, IssueId, Names};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at offset {pos}: {kind}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    ExpectedFormula,
    Expected(&'static str),
    UnknownAgent(String),
    UnknownIssue(String),
    TemporalUnderKnow,
    TrailingInput,
    UnexpectedEnd,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{}`", c),
            ParseErrorKind::ExpectedFormula => write!(f, "expected a formula"),
            ParseErrorKind::Expected(what) => write!(f, "expected {}", what),
            ParseErrorKind::UnknownAgent(n) => write!(f, "unknown agent name `{}`", n),
            ParseErrorKind::UnknownIssue(n) => write!(f, "unknown issue name `{}`", n),
            ParseErrorKind::TemporalUnderKnow => {
                write!(f, "temporal operator inside the scope of K")
            }
            ParseErrorKind::TrailingInput => write!(f, "trailing input after formula"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LPar,
    RPar,
    LBrack,
    RBrack,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Word(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut offsets = Vec::with_capacity(bytes.len());
    {
        let mut off = 0;
        for c in &bytes {
            offsets.push(off);
            off += c.len_utf8();
        }
    }
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k];
        let pos = offsets[k];
        match c {
            ' ' | '\t' | '\r' | '\n' => k += 1,
            '(' => {
                out.push(Spanned { tok: Tok::LPar, pos });
                k += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RPar, pos });
                k += 1;
            }
            '[' => {
                out.push(Spanned { tok: Tok::LBrack, pos });
                k += 1;
            }
            ']' => {
                out.push(Spanned { tok: Tok::RBrack, pos });
                k += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, pos });
                k += 1;
            }
            '!' => {
                out.push(Spanned { tok: Tok::Bang, pos });
                k += 1;
            }
            '&' => {
                out.push(Spanned { tok: Tok::Amp, pos });
                k += 1;
            }
            '|' => {
                out.push(Spanned { tok: Tok::Pipe, pos });
                k += 1;
            }
            '-' => {
                if bytes.get(k + 1) == Some(&'>') {
                    out.push(Spanned { tok: Tok::Arrow, pos });
                    k += 2;
                } else {
                    return Err(ParseError { pos, kind: ParseErrorKind::UnexpectedChar('-') });
                }
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = k;
                while k < bytes.len() && (bytes[k].is_alphanumeric() || bytes[k] == '_') {
                    k += 1;
                }
                let word: String = bytes[start..k].iter().collect();
                out.push(Spanned { tok: Tok::Word(word), pos });
            }
            other => return Err(ParseError { pos, kind: ParseErrorKind::UnexpectedChar(other) }),
        }
    }
    Ok(out)
}

/// Name resolution: strict against a fixed table, or interning for
/// stand-alone rewriting where no game fixes the agent set.
enum Resolve<'a> {
    Strict(&'a Names),
    Intern(&'a mut Names),
}

impl Resolve<'_> {
    fn agent(&mut self, name: &str, pos: usize) -> Result<AgentId, ParseError> {
        match self {
            Resolve::Strict(names) => names.agent_named(name).map_err(|_| ParseError {
                pos,
                kind: ParseErrorKind::UnknownAgent(name.to_string()),
            }),
            Resolve::Intern(names) => Ok(names.intern_agent(name)),
        }
    }

    fn issue(&mut self, name: &str, pos: usize) -> Result<IssueId, ParseError> {
        match self {
            Resolve::Strict(names) => names.issue_named(name).map_err(|_| ParseError {
                pos,
                kind: ParseErrorKind::UnknownIssue(name.to_string()),
            }),
            Resolve::Intern(names) => Ok(names.intern_issue(name)),
        }
    }
}

/// Parse tree before the two layers are separated; temporal nodes remember
/// where their operator sits so layer violations can point at it.
enum Raw {
    True,
    False,
    Bel(AgentId, IssueId),
    Vis(AgentId, IssueId),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    Know(AgentId, Box<Raw>),
    Next(usize, Box<Raw>),
    Until(usize, Box<Raw>, Box<Raw>),
    Eventually(usize, Box<Raw>),
    Henceforth(usize, Box<Raw>),
}

fn first_temporal(raw: &Raw) -> Option<usize> {
    match raw {
        Raw::True | Raw::False | Raw::Bel(..) | Raw::Vis(..) => None,
        Raw::Not(a) | Raw::Know(_, a) => first_temporal(a),
        Raw::And(a, b) | Raw::Or(a, b) | Raw::Implies(a, b) => {
            first_temporal(a).or_else(|| first_temporal(b))
        }
        Raw::Next(pos, _) | Raw::Eventually(pos, _) | Raw::Henceforth(pos, _) => Some(*pos),
        Raw::Until(pos, a, _) => first_temporal(a).or(Some(*pos)),
    }
}

/// Temporal-free subtree to a state formula; implication is desugared.
fn to_state(raw: &Raw) -> StateFormula {
    match raw {
        Raw::True => StateFormula::True,
        Raw::False => StateFormula::False,
        Raw::Bel(a, p) => StateFormula::Bel(*a, *p),
        Raw::Vis(a, p) => StateFormula::Vis(*a, *p),
        Raw::Not(a) => StateFormula::not(to_state(a)),
        Raw::And(a, b) => StateFormula::and(to_state(a), to_state(b)),
        Raw::Or(a, b) => StateFormula::or(to_state(a), to_state(b)),
        Raw::Implies(a, b) => StateFormula::or(StateFormula::not(to_state(a)), to_state(b)),
        Raw::Know(i, a) => StateFormula::know(*i, to_state(a)),
        _ => unreachable!("temporal node in state lowering"),
    }
}

/// Separates the layers, lifting maximal temporal-free subtrees into the
/// state layer and rejecting temporal operators under K.
fn lower(raw: &Raw) -> Result<TemporalFormula, ParseError> {
    if first_temporal(raw).is_none() {
        return Ok(TemporalFormula::State(to_state(raw)));
    }
    match raw {
        Raw::Know(_, body) => Err(ParseError {
            pos: first_temporal(body).expect("know node classified as temporal"),
            kind: ParseErrorKind::TemporalUnderKnow,
        }),
        Raw::Not(a) => Ok(TemporalFormula::not(lower(a)?)),
        Raw::And(a, b) => Ok(TemporalFormula::and(lower(a)?, lower(b)?)),
        Raw::Or(a, b) => Ok(TemporalFormula::or(lower(a)?, lower(b)?)),
        Raw::Implies(a, b) => Ok(TemporalFormula::implies(lower(a)?, lower(b)?)),
        Raw::Next(_, a) => Ok(TemporalFormula::next(lower(a)?)),
        Raw::Until(_, a, b) => Ok(TemporalFormula::until(lower(a)?, lower(b)?)),
        Raw::Eventually(_, a) => Ok(TemporalFormula::eventually(lower(a)?)),
        Raw::Henceforth(_, a) => Ok(TemporalFormula::henceforth(lower(a)?)),
        _ => unreachable!("atom classified as temporal"),
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    at: usize,
    end: usize,
    resolve: Resolve<'a>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|s| &s.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|s| s.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<usize, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(s) if s.tok == tok => Ok(s.pos),
            _ => Err(ParseError { pos, kind: ParseErrorKind::Expected(what) }),
        }
    }

    fn word(&mut self, what: &'static str) -> Result<(String, usize), ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Spanned { tok: Tok::Word(w), pos }) => Ok((w, pos)),
            _ => Err(ParseError { pos, kind: ParseErrorKind::Expected(what) }),
        }
    }

    fn implies(&mut self) -> Result<Raw, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.implies()?;
            Ok(Raw::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let rhs = self.and()?;
            lhs = Raw::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.until()?;
            lhs = Raw::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Word(w)) => Some(w.as_str()),
            _ => None,
        }
    }

    fn until(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.prefix()?;
        while self.peek_word() == Some("U") {
            let pos = self.pos();
            self.bump();
            let rhs = self.prefix()?;
            lhs = Raw::Until(pos, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Raw, ParseError> {
        let pos = self.pos();
        if self.peek() == Some(&Tok::Bang) {
            self.bump();
            return Ok(Raw::Not(Box::new(self.prefix()?)));
        }
        match self.peek_word() {
            Some("X") => {
                self.bump();
                Ok(Raw::Next(pos, Box::new(self.prefix()?)))
            }
            Some("F") => {
                self.bump();
                Ok(Raw::Eventually(pos, Box::new(self.prefix()?)))
            }
            Some("G") => {
                self.bump();
                Ok(Raw::Henceforth(pos, Box::new(self.prefix()?)))
            }
            Some("K") => {
                self.bump();
                self.expect(Tok::LBrack, "`[` after K")?;
                let (name, npos) = self.word("agent name")?;
                let agent = self.resolve.agent(&name, npos)?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(Raw::Know(agent, Box::new(self.prefix()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Raw, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Spanned { tok: Tok::LPar, .. }) => {
                let inner = self.implies()?;
                self.expect(Tok::RPar, "`)`")?;
                Ok(inner)
            }
            Some(Spanned { tok: Tok::Word(w), .. }) => match w.as_str() {
                "true" => Ok(Raw::True),
                "false" => Ok(Raw::False),
                "B" | "V" => {
                    self.expect(Tok::LBrack, "`[` after atom tag")?;
                    let (agent, apos) = self.word("agent name")?;
                    let agent = self.resolve.agent(&agent, apos)?;
                    self.expect(Tok::Comma, "`,`")?;
                    let (issue, ipos) = self.word("issue name")?;
                    let issue = self.resolve.issue(&issue, ipos)?;
                    self.expect(Tok::RBrack, "`]`")?;
                    if w == "B" {
                        Ok(Raw::Bel(agent, issue))
                    } else {
                        Ok(Raw::Vis(agent, issue))
                    }
                }
                _ => Err(ParseError { pos, kind: ParseErrorKind::ExpectedFormula }),
            },
            Some(_) => Err(ParseError { pos, kind: ParseErrorKind::ExpectedFormula }),
            None => Err(ParseError { pos, kind: ParseErrorKind::UnexpectedEnd }),
        }
    }
}

fn parse_with(text: &str, resolve: Resolve) -> Result<TemporalFormula, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, at: 0, end: text.len(), resolve };
    let raw = parser.implies()?;
    if parser.at != parser.toks.len() {
        return Err(ParseError { pos: parser.pos(), kind: ParseErrorKind::TrailingInput });
    }
    lower(&raw)
}

/// Parses one formula against a fixed name table; unknown names are errors.
pub fn parse(text: &str, names: &Names) -> Result<TemporalFormula, ParseError> {
    parse_with(text, Resolve::Strict(names))
}

/// Parses one formula, registering unseen agent/issue names as it goes.
/// Suited to stand-alone rewriting where no game fixes the universe.
pub fn parse_interning(text: &str, names: &mut Names) -> Result<TemporalFormula, ParseError> {
    parse_with(text, Resolve::Intern(names))
}

/// Parses a formula file: UTF-8 text, one formula per line, `#` starts a
/// comment, blank lines ignored. Errors carry the 1-based line number.
pub fn parse_formula_file(
    text: &str,
    names: &Names,
) -> Result<Vec<TemporalFormula>, (usize, ParseError)> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse(line, names).map_err(|e| (k + 1, e))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::ast::{StateFormula as S, TemporalFormula as T};
    use crate::model::Space;

    fn names3() -> Names {
        Names::new(
            vec!["i".into(), "j".into(), "k".into()],
            vec!["p".into()],
        )
        .unwrap()
    }

    fn ids(names: &Names) -> (AgentId, AgentId, AgentId, IssueId) {
        (
            names.agent_named("i").unwrap(),
            names.agent_named("j").unwrap(),
            names.agent_named("k").unwrap(),
            names.issue_named("p").unwrap(),
        )
    }

    #[test]
    fn parses_eventual_knowledge_example() {
        let names = names3();
        let (i, _, k, p) = ids(&names);
        let got = parse("F (K[k] (B[i,p] & V[i,p]))", &names).unwrap();
        let want = T::eventually(T::lift(S::know(
            k,
            S::and(S::Bel(i, p), S::Vis(i, p)),
        )));
        assert_eq!(got, want);
    }

    #[test]
    fn rejects_temporal_under_know_with_position() {
        let names = names3();
        let err = parse("K[i] X B[j,p]", &names).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::TemporalUnderKnow);
        assert_eq!(err.pos, 5); // the offset of `X`
    }

    #[test]
    fn parses_derived_operators_and_implication() {
        let names = Names::new(vec!["1".into(), "2".into()], vec!["p".into()]).unwrap();
        let a1 = names.agent_named("1").unwrap();
        let a2 = names.agent_named("2").unwrap();
        let p = names.issue_named("p").unwrap();
        let got = parse("G (B[1,p] -> X B[2,p])", &names).unwrap();
        let want = T::henceforth(T::implies(
            T::lift(S::Bel(a1, p)),
            T::next(T::lift(S::Bel(a2, p))),
        ));
        assert_eq!(got, want);
    }

    #[test]
    fn until_is_left_associative_and_binds_tighter_than_and() {
        let names = names3();
        let (i, j, k, p) = ids(&names);
        let got = parse("B[i,p] U B[j,p] U B[k,p]", &names).unwrap();
        let want = T::until(
            T::until(T::lift(S::Bel(i, p)), T::lift(S::Bel(j, p))),
            T::lift(S::Bel(k, p)),
        );
        assert_eq!(got, want);
        let got = parse("X B[i,p] & X B[j,p] U V[k,p]", &names).unwrap();
        let want = T::and(
            T::next(T::lift(S::Bel(i, p))),
            T::until(T::next(T::lift(S::Bel(j, p))), T::lift(S::Vis(k, p))),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn state_implication_is_desugared() {
        let names = names3();
        let (i, j, _, p) = ids(&names);
        let got = parse("K[j] (B[i,p] -> V[i,p])", &names).unwrap();
        let want = T::lift(S::know(
            j,
            S::or(S::not(S::Bel(i, p)), S::Vis(i, p)),
        ));
        assert_eq!(got, want);
    }

    #[test]
    fn unknown_names_are_positioned_errors() {
        let names = names3();
        let err = parse("B[zoe,p]", &names).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownAgent("zoe".into()));
        assert_eq!(err.pos, 2);
        let err = parse("F V[i,q]", &names).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIssue("q".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let names = names3();
        let err = parse("B[i,p] &", &names).unwrap_err();
        assert_eq!(err.pos, 8);
        let err = parse("B[i,p] ) ", &names).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::TrailingInput);
        let err = parse("B[i,p] @ B[j,p]", &names).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('@'));
    }

    #[test]
    fn interning_registers_new_names() {
        let sp = Space::new(1, 1).unwrap();
        let mut names = Names::numeric(&sp);
        let f = parse_interning("K[ann] B[bob,q]", &mut names).unwrap();
        assert!(names.agent_named("ann").is_ok());
        assert!(names.issue_named("q").is_ok());
        assert!(matches!(f, T::State(_)));
    }

    #[test]
    fn formula_files_skip_comments_and_count_lines() {
        let names = names3();
        let text = "# goals\nB[i,p] & V[i,p]\n\nF B[j,p] # eventually\n";
        let fs = parse_formula_file(text, &names).unwrap();
        assert_eq!(fs.len(), 2);
        let err = parse_formula_file("B[i,p]\nB[zoe,p]\n", &names).unwrap_err();
        assert_eq!(err.0, 2);
    }

    #[test]
    fn print_then_parse_is_identity_on_examples() {
        let names = names3();
        for text in [
            "F (K[k] (B[i,p] & V[i,p]))",
            "G (B[i,p] -> X B[j,p])",
            "B[i,p] U B[j,p] U B[k,p]",
            "!(B[i,p] | V[j,p]) & K[i] !B[k,p]",
            "true U (false | X V[k,p])",
        ] {
            let f = parse(text, &names).unwrap();
            let printed = f.display(&names).to_string();
            let again = parse(&printed, &names).unwrap();
            assert_eq!(f, again, "printing `{}` as `{}` broke the tree", text, printed);
        }
    }
}
