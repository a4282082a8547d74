//! Agents, issues, opinions, visibility, states and the trust network.
//!
//! A state packs, for every (agent, issue) pair, one belief bit and one
//! visibility bit. Everything is immutable after construction and `Copy`,
//! so the full state space for small games enumerates cheaply.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("need at least one agent and one issue")]
    EmptySpace,
    #[error("{agents} agents x {issues} issues exceeds the packed-state capacity (32 bits)")]
    TooManyBits { agents: usize, issues: usize },
    #[error("unknown agent index {index} (space has {count} agents)")]
    UnknownAgent { index: usize, count: usize },
    #[error("unknown issue index {index} (space has {count} issues)")]
    UnknownIssue { index: usize, count: usize },
    #[error("reflexive influence edge on agent {agent}")]
    ReflexiveEdge { agent: usize },
    #[error("state space of 2^{bits} states exceeds the enumeration limit of {limit}")]
    SpaceTooLarge { bits: u32, limit: u64 },
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("unknown {kind} name `{name}`")]
    UnknownName { kind: &'static str, name: String },
}

/// Index of an agent in the fixed agent set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AgentId(pub usize);

/// Index of an issue in the fixed issue set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct IssueId(pub usize);

impl AgentId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl IssueId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// The dimensions of a game: `agents x issues`, fixed for its lifetime.
///
/// Bit `agent * issues + issue` addresses one (agent, issue) cell of the
/// packed belief and visibility words.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Space {
    agents: usize,
    issues: usize,
}

impl Space {
    pub fn new(agents: usize, issues: usize) -> Result<Space, ModelError> {
        if agents == 0 || issues == 0 {
            return Err(ModelError::EmptySpace);
        }
        if agents.saturating_mul(issues) > 32 {
            return Err(ModelError::TooManyBits { agents, issues });
        }
        Ok(Space { agents, issues })
    }

    pub fn agent_count(&self) -> usize {
        self.agents
    }

    pub fn issue_count(&self) -> usize {
        self.issues
    }

    pub fn agent(&self, index: usize) -> Result<AgentId, ModelError> {
        if index < self.agents {
            Ok(AgentId(index))
        } else {
            Err(ModelError::UnknownAgent { index, count: self.agents })
        }
    }

    pub fn issue(&self, index: usize) -> Result<IssueId, ModelError> {
        if index < self.issues {
            Ok(IssueId(index))
        } else {
            Err(ModelError::UnknownIssue { index, count: self.issues })
        }
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents).map(AgentId)
    }

    pub fn issues(&self) -> impl Iterator<Item = IssueId> {
        (0..self.issues).map(IssueId)
    }

    pub(crate) fn bit(&self, agent: AgentId, issue: IssueId) -> u32 {
        debug_assert!(agent.0 < self.agents && issue.0 < self.issues);
        (agent.0 * self.issues + issue.0) as u32
    }

    /// Mask selecting every issue bit of one agent.
    pub(crate) fn agent_mask(&self, agent: AgentId) -> u32 {
        let row = (1u32 << self.issues) - 1;
        row << (agent.0 * self.issues)
    }

    pub(crate) fn full_mask(&self) -> u32 {
        let bits = self.agents * self.issues;
        if bits == 32 {
            u32::MAX
        } else {
            (1u32 << bits) - 1
        }
    }

    /// Number of bits in one state (belief word plus visibility word).
    pub fn state_bits(&self) -> u32 {
        2 * (self.agents * self.issues) as u32
    }

    pub fn state_count(&self) -> u128 {
        1u128 << self.state_bits()
    }

    /// All states in canonical order (belief word major, visibility minor).
    /// Refuses spaces above `limit` states.
    pub fn enumerate_states(&self, limit: u64) -> Result<impl Iterator<Item = State>, ModelError> {
        if self.state_count() > limit as u128 {
            return Err(ModelError::SpaceTooLarge { bits: self.state_bits(), limit });
        }
        let cells = (self.agents * self.issues) as u32;
        let words = 1u64 << cells;
        Ok((0..words).flat_map(move |bel| {
            (0..words).map(move |vis| State { bel: bel as u32, vis: vis as u32 })
        }))
    }

    /// Canonical index of a state, inverse of [`Space::state_at`].
    pub fn state_index(&self, s: State) -> u64 {
        let cells = (self.agents * self.issues) as u32;
        ((s.bel as u64) << cells) | s.vis as u64
    }

    pub fn state_at(&self, index: u64) -> State {
        let cells = (self.agents * self.issues) as u32;
        let mask = (1u64 << cells) - 1;
        State { bel: (index >> cells) as u32 & mask as u32, vis: (index & mask) as u32 }
    }
}

/// One agent's 0/1 stance on every issue.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct OpinionVector {
    pub(crate) bits: u32,
}

impl OpinionVector {
    pub fn get(&self, issue: IssueId) -> bool {
        self.bits >> issue.0 & 1 == 1
    }

    pub(crate) fn set(&mut self, issue: IssueId, value: bool) {
        if value {
            self.bits |= 1 << issue.0;
        } else {
            self.bits &= !(1 << issue.0);
        }
    }
}

/// One agent's per-issue shown/hidden flags.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct VisibilityVector {
    pub(crate) bits: u32,
}

impl VisibilityVector {
    pub fn get(&self, issue: IssueId) -> bool {
        self.bits >> issue.0 & 1 == 1
    }
}

/// What the rest of the society sees of one agent: the stated value where
/// the issue is shown, nothing where it is hidden.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PublicOpinion {
    vals: u32,
    shown: u32,
}

impl PublicOpinion {
    /// `Some(value)` if the agent shows her opinion on `issue`, `None` otherwise.
    pub fn get(&self, issue: IssueId) -> Option<bool> {
        if self.shown >> issue.0 & 1 == 1 {
            Some(self.vals >> issue.0 & 1 == 1)
        } else {
            None
        }
    }
}

/// A complete configuration: every agent's private opinions plus every
/// agent's visibility flags.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct State {
    pub(crate) bel: u32,
    pub(crate) vis: u32,
}

impl State {
    pub fn from_fn(
        space: &Space,
        mut belief: impl FnMut(AgentId, IssueId) -> bool,
        mut visible: impl FnMut(AgentId, IssueId) -> bool,
    ) -> State {
        let mut bel = 0u32;
        let mut vis = 0u32;
        for a in space.agents() {
            for p in space.issues() {
                let bit = space.bit(a, p);
                if belief(a, p) {
                    bel |= 1 << bit;
                }
                if visible(a, p) {
                    vis |= 1 << bit;
                }
            }
        }
        State { bel, vis }
    }

    pub fn belief(&self, space: &Space, agent: AgentId, issue: IssueId) -> bool {
        self.bel >> space.bit(agent, issue) & 1 == 1
    }

    pub fn visible(&self, space: &Space, agent: AgentId, issue: IssueId) -> bool {
        self.vis >> space.bit(agent, issue) & 1 == 1
    }

    pub fn with_belief(mut self, space: &Space, agent: AgentId, issue: IssueId, v: bool) -> State {
        let bit = space.bit(agent, issue);
        if v {
            self.bel |= 1 << bit;
        } else {
            self.bel &= !(1 << bit);
        }
        self
    }

    pub fn with_visibility(
        mut self,
        space: &Space,
        agent: AgentId,
        issue: IssueId,
        v: bool,
    ) -> State {
        let bit = space.bit(agent, issue);
        if v {
            self.vis |= 1 << bit;
        } else {
            self.vis &= !(1 << bit);
        }
        self
    }

    pub fn opinions(&self, space: &Space, agent: AgentId) -> OpinionVector {
        OpinionVector { bits: self.bel >> (agent.0 * space.issues) & ((1 << space.issues) - 1) }
    }

    pub fn visibility(&self, space: &Space, agent: AgentId) -> VisibilityVector {
        VisibilityVector { bits: self.vis >> (agent.0 * space.issues) & ((1 << space.issues) - 1) }
    }

    /// The opinion of `agent` as shown to everyone else: her stated value
    /// on issues she makes visible, nothing elsewhere.
    pub fn public_opinion(&self, space: &Space, agent: AgentId) -> PublicOpinion {
        let shift = agent.0 * space.issues;
        let row = (1u32 << space.issues) - 1;
        let shown = self.vis >> shift & row;
        PublicOpinion { vals: self.bel >> shift & row & shown, shown }
    }
}

/// Two states look the same to `agent` iff her own opinions agree, all
/// visibility flags agree, and every other agent's *shown* opinions agree.
pub fn indistinguishable(space: &Space, s: State, t: State, agent: AgentId) -> bool {
    let own = space.agent_mask(agent);
    if s.vis != t.vis || (s.bel ^ t.bel) & own != 0 {
        return false;
    }
    let shown_others = s.vis & !own;
    (s.bel ^ t.bel) & shown_others == 0
}

/// All states `agent` cannot tell apart from `s`: every combination of the
/// other agents' hidden opinion bits. Yields `2^h` states where `h` counts
/// hidden (other agent, issue) cells.
pub fn indistinguishability_class(
    space: &Space,
    s: State,
    agent: AgentId,
) -> impl Iterator<Item = State> {
    let own = space.agent_mask(agent);
    let free = !s.vis & !own & space.full_mask();
    let free_bits: Vec<u32> = (0..32).filter(|b| free >> b & 1 == 1).collect();
    let count = 1u64 << free_bits.len();
    let base = s.bel & !free;
    let vis = s.vis;
    (0..count).map(move |combo| {
        let mut bel = base;
        for (k, bit) in free_bits.iter().enumerate() {
            if combo >> k & 1 == 1 {
                bel |= 1 << bit;
            }
        }
        State { bel, vis }
    })
}

/// Directed irreflexive trust graph; an edge (i, j) makes j listen to i.
#[derive(Clone, Debug)]
pub struct InfluenceNetwork {
    agents: usize,
    influencers: Vec<Vec<AgentId>>,
}

impl InfluenceNetwork {
    /// Builds the network, deduplicating edges. A reflexive edge is a hard
    /// input error.
    pub fn new(
        space: &Space,
        edges: impl IntoIterator<Item = (AgentId, AgentId)>,
    ) -> Result<InfluenceNetwork, ModelError> {
        let n = space.agent_count();
        let mut influencers = vec![Vec::new(); n];
        for (from, to) in edges {
            if from == to {
                return Err(ModelError::ReflexiveEdge { agent: from.0 });
            }
            debug_assert!(from.0 < n && to.0 < n);
            if !influencers[to.0].contains(&from) {
                influencers[to.0].push(from);
            }
        }
        for inf in &mut influencers {
            inf.sort();
        }
        Ok(InfluenceNetwork { agents: n, influencers })
    }

    pub fn complete(space: &Space) -> InfluenceNetwork {
        let n = space.agent_count();
        let influencers = (0..n)
            .map(|j| (0..n).filter(|i| *i != j).map(AgentId).collect())
            .collect();
        InfluenceNetwork { agents: n, influencers }
    }

    pub fn agent_count(&self) -> usize {
        self.agents
    }

    /// In-neighbours of `agent`: who she listens to.
    pub fn influencers(&self, agent: AgentId) -> &[AgentId] {
        &self.influencers[agent.0]
    }

    /// All edges (from, to), sorted.
    pub fn edges(&self) -> Vec<(AgentId, AgentId)> {
        let mut out = Vec::new();
        for (to, infs) in self.influencers.iter().enumerate() {
            for from in infs {
                out.push((*from, AgentId(to)));
            }
        }
        out.sort();
        out
    }
}

/// Influencers of `agent` that currently show their opinion on `issue`.
pub fn active_influencers(
    space: &Space,
    state: State,
    net: &InfluenceNetwork,
    agent: AgentId,
    issue: IssueId,
) -> Vec<AgentId> {
    net.influencers(agent)
        .iter()
        .copied()
        .filter(|j| state.visible(space, *j, issue))
        .collect()
}

/// Agent and issue names. Internally everything is an index; names exist
/// only at the I/O boundary (files, formulas, reports).
#[derive(Clone, Debug)]
pub struct Names {
    agents: Vec<String>,
    issues: Vec<String>,
}

impl Names {
    pub fn new(agents: Vec<String>, issues: Vec<String>) -> Result<Names, ModelError> {
        for (kind, list) in [("agent", &agents), ("issue", &issues)] {
            for (k, name) in list.iter().enumerate() {
                if list[..k].contains(name) {
                    return Err(ModelError::DuplicateName { kind, name: name.clone() });
                }
            }
        }
        Ok(Names { agents, issues })
    }

    /// Default names for tests and ad-hoc games: agents "1".."n", issues
    /// "p", "q", ... .
    pub fn numeric(space: &Space) -> Names {
        let agents = (1..=space.agent_count()).map(|i| i.to_string()).collect();
        let letters = ["p", "q", "r", "s", "t", "u", "v", "w"];
        let issues = (0..space.issue_count())
            .map(|k| {
                letters
                    .get(k)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("p{}", k + 1))
            })
            .collect();
        Names { agents, issues }
    }

    pub fn space(&self) -> Result<Space, ModelError> {
        Space::new(self.agents.len(), self.issues.len())
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn issue_count(&self) -> usize {
        self.issues.len()
    }

    pub fn agent_named(&self, name: &str) -> Result<AgentId, ModelError> {
        self.agents
            .iter()
            .position(|a| a == name)
            .map(AgentId)
            .ok_or_else(|| ModelError::UnknownName { kind: "agent", name: name.to_string() })
    }

    pub fn issue_named(&self, name: &str) -> Result<IssueId, ModelError> {
        self.issues
            .iter()
            .position(|p| p == name)
            .map(IssueId)
            .ok_or_else(|| ModelError::UnknownName { kind: "issue", name: name.to_string() })
    }

    pub fn agent_name(&self, agent: AgentId) -> &str {
        &self.agents[agent.0]
    }

    pub fn issue_name(&self, issue: IssueId) -> &str {
        &self.issues[issue.0]
    }

    /// Looks a name up, registering it if absent. Used when parsing formulas
    /// without a surrounding game (pure rewriting has no fixed agent set).
    pub fn intern_agent(&mut self, name: &str) -> AgentId {
        match self.agents.iter().position(|a| a == name) {
            Some(k) => AgentId(k),
            None => {
                self.agents.push(name.to_string());
                AgentId(self.agents.len() - 1)
            }
        }
    }

    pub fn intern_issue(&mut self, name: &str) -> IssueId {
        match self.issues.iter().position(|p| p == name) {
            Some(k) => IssueId(k),
            None => {
                self.issues.push(name.to_string());
                IssueId(self.issues.len() - 1)
            }
        }
    }
}

impl fmt::Display for PublicOpinion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut bit = 0;
        let mut rest = self.shown | self.vals;
        while rest != 0 {
            match self.get(IssueId(bit)) {
                Some(true) => write!(f, "1")?,
                Some(false) => write!(f, "0")?,
                None => write!(f, "?")?,
            }
            rest >>= 1;
            bit += 1;
        }
        Ok(())
    }
}
