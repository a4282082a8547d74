//! Influence games, state-based strategies and solution-concept checkers.
//!
//! Strategies map indistinguishability classes to actions, so uniformity
//! across states an agent cannot tell apart holds by construction. The
//! checkers quantify over explicit strategy families (constant strategies,
//! the full class-to-action space, or user-given tables) under a budget on
//! candidates per quantifier, and report every verdict together with the
//! family it was decided over plus a replayable witness when the answer is
//! negative. An orthogonal bounded search plays unconstrained adversaries
//! move by move; a win against those implies a win against every family.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::diffusion::{
    induced_lasso, transition, Action, DiffusionError, JointAction, Lasso, Rules,
};
use crate::logic::eval::eval_states;
use crate::logic::{eval, TemporalFormula};
use crate::model::{
    indistinguishability_class, AgentId, InfluenceNetwork, IssueId, ModelError, Names, Space,
    State,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error("{what} spans {size} candidates, over the budget of {budget}")]
    BudgetExceeded { what: &'static str, size: u128, budget: u64 },
    #[error("bounded search exceeded horizon {horizon} before closing a lasso")]
    HorizonExceeded { horizon: usize },
    #[error("profile has {got} strategies, the game has {expected} agents")]
    ProfileLength { expected: usize, got: usize },
}

/// Cap on candidates examined per quantifier (per opponent sweep, per
/// alternative sweep). Exceeding it is a hard error, never a silent
/// truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(1 << 24)
    }
}

/// A game: agents and issues, trust network, per-agent aggregation, an
/// initial state and one goal per agent.
#[derive(Clone, Debug)]
pub struct InfluenceGame {
    pub names: Names,
    pub space: Space,
    pub net: InfluenceNetwork,
    pub rules: Rules,
    pub initial: State,
    pub goals: Vec<TemporalFormula>,
}

impl InfluenceGame {
    pub fn new(
        names: Names,
        net: InfluenceNetwork,
        rules: Rules,
        initial: State,
        goals: Vec<TemporalFormula>,
    ) -> Result<InfluenceGame, AnalysisError> {
        let space = names.space()?;
        if goals.len() != space.agent_count() {
            return Err(AnalysisError::ProfileLength {
                expected: space.agent_count(),
                got: goals.len(),
            });
        }
        Ok(InfluenceGame { names, space, net, rules, initial, goals })
    }

    pub fn goal(&self, agent: AgentId) -> &TemporalFormula {
        &self.goals[agent.index()]
    }
}

/// What one agent can observe of a state: her own opinions, everyone's
/// visibility flags, and the others' shown opinions. Two states carry the
/// same key exactly when she cannot tell them apart.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ClassKey {
    own_beliefs: u32,
    visibility: u32,
    shown_others: u32,
}

pub fn class_key(space: &Space, s: State, agent: AgentId) -> ClassKey {
    let own = space.agent_mask(agent);
    ClassKey {
        own_beliefs: s.bel & own,
        visibility: s.vis,
        shown_others: s.bel & s.vis & !own & space.full_mask(),
    }
}

/// A state-based strategy. Every variant reads only the class key of the
/// state, so equal observations always get equal actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// The same action everywhere.
    Constant(Action),
    /// Branch on the agent's own current opinion about one issue.
    OwnBelief { issue: IssueId, if_true: Action, if_false: Action },
    /// Explicit per-class entries with a default for unlisted classes.
    Table { entries: Vec<(ClassKey, Action)>, default: Action },
}

impl Strategy {
    pub fn action(&self, space: &Space, agent: AgentId, s: State) -> Action {
        match self {
            Strategy::Constant(a) => *a,
            Strategy::OwnBelief { issue, if_true, if_false } => {
                if s.belief(space, agent, *issue) {
                    *if_true
                } else {
                    *if_false
                }
            }
            Strategy::Table { entries, default } => {
                let key = class_key(space, s, agent);
                entries.iter().find(|(k, _)| *k == key).map(|(_, a)| *a).unwrap_or(*default)
            }
        }
    }

    pub fn describe(&self, names: &Names) -> String {
        match self {
            Strategy::Constant(a) => format!("always {}", a.render(names)),
            Strategy::OwnBelief { issue, if_true, if_false } => format!(
                "if own opinion on {} then {} else {}",
                names.issue_name(*issue),
                if_true.render(names),
                if_false.render(names)
            ),
            Strategy::Table { entries, default } => {
                format!("table with {} entries, default {}", entries.len(), default.render(names))
            }
        }
    }
}

/// One strategy per agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyProfile(Vec<Strategy>);

impl StrategyProfile {
    pub fn new(strategies: Vec<Strategy>) -> StrategyProfile {
        StrategyProfile(strategies)
    }

    pub fn strategy(&self, agent: AgentId) -> &Strategy {
        &self.0[agent.index()]
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with_strategy(&self, agent: AgentId, strategy: Strategy) -> StrategyProfile {
        let mut out = self.clone();
        out.0[agent.index()] = strategy;
        out
    }

    pub fn joint_action(&self, space: &Space, s: State) -> JointAction {
        JointAction(
            space.agents().map(|a| self.0[a.index()].action(space, a, s)).collect(),
        )
    }

    /// The run this profile generates from `start`, as a lasso.
    pub fn induced_lasso(
        &self,
        game: &InfluenceGame,
        start: State,
        limit: u64,
    ) -> Result<Lasso, AnalysisError> {
        if self.0.len() != game.space.agent_count() {
            return Err(AnalysisError::ProfileLength {
                expected: game.space.agent_count(),
                got: self.0.len(),
            });
        }
        let lasso = induced_lasso(
            &game.space,
            start,
            &game.net,
            &game.rules,
            |s| self.joint_action(&game.space, s),
            limit,
        )?;
        Ok(lasso)
    }
}

/// Per-agent goal satisfaction on the run the profile induces from `start`.
pub fn satisfaction(
    game: &InfluenceGame,
    profile: &StrategyProfile,
    start: State,
    limit: u64,
) -> Result<Vec<bool>, AnalysisError> {
    let lasso = profile.induced_lasso(game, start, limit)?;
    Ok(game.goals.iter().map(|g| eval(&game.space, g, &lasso, 0)).collect())
}

/// `controller` controls `target` when the influencers of `target` are
/// non-empty and each is the controller or already controlled; closed
/// under least fixpoint.
pub fn controls(net: &InfluenceNetwork, controller: AgentId, target: AgentId) -> bool {
    debug_assert_ne!(controller, target);
    let n = net.agent_count();
    let mut controlled = vec![false; n];
    loop {
        let mut changed = false;
        for j in 0..n {
            if j == controller.index() || controlled[j] {
                continue;
            }
            let inf = net.influencers(crate::model::AgentId(j));
            if !inf.is_empty()
                && inf.iter().all(|k| *k == controller || controlled[k.index()])
            {
                controlled[j] = true;
                changed = true;
            }
        }
        if !changed {
            return controlled[target.index()];
        }
    }
}

/// The strategy families the checkers can quantify over.
#[derive(Clone, Debug)]
pub enum StrategyFamily {
    /// The `2m + 1` constant strategies.
    Constant,
    /// Every map from the agent's indistinguishability classes to actions.
    Full,
    /// An explicit list.
    Table(Vec<Strategy>),
}

impl StrategyFamily {
    pub fn describe(&self) -> String {
        match self {
            StrategyFamily::Constant => "constant".to_string(),
            StrategyFamily::Full => "full".to_string(),
            StrategyFamily::Table(list) => format!("table({})", list.len()),
        }
    }
}

/// Outcome of one quantified check: the answer, the family it was decided
/// over, how many candidates were examined, and a replayable witness when
/// the answer calls for one.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub holds: bool,
    pub family: String,
    pub examined: u64,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub enum Witness {
    /// Opponent strategies (paired with their agents) and the initial state
    /// under which the checked strategy misses its goal.
    Opponents { opponents: Vec<(AgentId, Strategy)>, initial: State },
    /// Opponents under which the alternative meets the goal while the
    /// checked strategy misses it, from the given initial state.
    Dominance {
        opponents: Vec<(AgentId, Strategy)>,
        alternative: Strategy,
        initial: State,
    },
    /// A deviation that strictly improves the agent's worst-case outcome;
    /// `failing` is a class state where the original strategy misses.
    Deviation { agent: AgentId, strategy: Strategy, failing: State },
    /// A profile witnessing coherence.
    Profile(StrategyProfile),
}

// ---------------------------------------------------------------------------
// Enumerated state space

/// Dense tables over an enumerated state space: per-agent class indices and
/// (for small products) a successor table over joint-action codes.
pub struct SpaceIndex {
    state_count: usize,
    action_base: usize,
    ja_count: u64,
    /// [agent][state index] -> class index.
    classes: Vec<Vec<u32>>,
    /// [agent][class index] -> representative state index (first seen).
    reps: Vec<Vec<u32>>,
    /// successor[state * ja_count + ja] when small enough to precompute.
    table: Option<Vec<u32>>,
}

const TRANSITION_TABLE_CAP: u64 = 1 << 22;

impl SpaceIndex {
    pub fn build(game: &InfluenceGame, limit: u64) -> Result<SpaceIndex, AnalysisError> {
        let space = &game.space;
        let states: Vec<State> = space.enumerate_states(limit)?.collect();
        let state_count = states.len();
        let action_base = Action::count(space);
        let ja_count = (action_base as u64).pow(space.agent_count() as u32);

        let mut classes = Vec::new();
        let mut reps = Vec::new();
        for agent in space.agents() {
            let mut ids: HashMap<ClassKey, u32> = HashMap::new();
            let mut per_state = Vec::with_capacity(state_count);
            let mut agent_reps = Vec::new();
            for (k, s) in states.iter().enumerate() {
                let key = class_key(space, *s, agent);
                let next_id = ids.len() as u32;
                let id = *ids.entry(key).or_insert(next_id);
                if id == next_id {
                    agent_reps.push(k as u32);
                }
                per_state.push(id);
            }
            classes.push(per_state);
            reps.push(agent_reps);
        }

        let table = if (state_count as u64).saturating_mul(ja_count) <= TRANSITION_TABLE_CAP {
            let mut table = vec![0u32; state_count * ja_count as usize];
            for (k, s) in states.iter().enumerate() {
                for ja in 0..ja_count {
                    let joint = decode_joint(space, action_base, ja);
                    let next = transition(space, *s, &joint, &game.net, &game.rules);
                    table[k * ja_count as usize + ja as usize] =
                        space.state_index(next) as u32;
                }
            }
            Some(table)
        } else {
            None
        };

        Ok(SpaceIndex { state_count, action_base, ja_count, classes, reps, table })
    }

    pub fn class_count(&self, agent: AgentId) -> usize {
        self.reps[agent.index()].len()
    }

    pub fn class_of(&self, agent: AgentId, state_index: u32) -> u32 {
        self.classes[agent.index()][state_index as usize]
    }

    fn successor(&self, game: &InfluenceGame, state_index: u32, ja: u64) -> u32 {
        match &self.table {
            Some(table) => table[state_index as usize * self.ja_count as usize + ja as usize],
            None => {
                let space = &game.space;
                let s = space.state_at(state_index as u64);
                let joint = decode_joint(space, self.action_base, ja);
                space.state_index(transition(space, s, &joint, &game.net, &game.rules)) as u32
            }
        }
    }
}

fn decode_joint(space: &Space, base: usize, ja: u64) -> JointAction {
    let mut code = ja;
    let actions = space
        .agents()
        .map(|_| {
            let a = Action::from_code(space, (code % base as u64) as usize);
            code /= base as u64;
            a
        })
        .collect();
    JointAction(actions)
}

// ---------------------------------------------------------------------------
// Family enumeration

enum HandleKind<'a> {
    Constant,
    Dense,
    List(&'a [Strategy]),
}

/// One agent's slice of a quantifier: a family made enumerable.
struct FamilyHandle<'a> {
    agent: AgentId,
    size: u128,
    kind: HandleKind<'a>,
}

impl<'a> FamilyHandle<'a> {
    fn new(
        idx: &SpaceIndex,
        space: &Space,
        agent: AgentId,
        family: &'a StrategyFamily,
    ) -> FamilyHandle<'a> {
        match family {
            StrategyFamily::Constant => FamilyHandle {
                agent,
                size: Action::count(space) as u128,
                kind: HandleKind::Constant,
            },
            StrategyFamily::Full => {
                let classes = idx.class_count(agent) as u32;
                FamilyHandle {
                    agent,
                    size: (Action::count(space) as u128).saturating_pow(classes),
                    kind: HandleKind::Dense,
                }
            }
            StrategyFamily::Table(list) => {
                FamilyHandle { agent, size: list.len() as u128, kind: HandleKind::List(list) }
            }
        }
    }

    /// Per-state action codes of candidate `ordinal`.
    fn compile(&self, game: &InfluenceGame, idx: &SpaceIndex, ordinal: u128) -> Vec<u16> {
        let base = idx.action_base as u128;
        match &self.kind {
            HandleKind::Constant => vec![ordinal as u16; idx.state_count],
            HandleKind::Dense => {
                let classes = &idx.classes[self.agent.index()];
                let digits: Vec<u16> = {
                    let mut out = Vec::with_capacity(idx.reps[self.agent.index()].len());
                    let mut left = ordinal;
                    for _ in 0..idx.reps[self.agent.index()].len() {
                        out.push((left % base) as u16);
                        left /= base;
                    }
                    out
                };
                classes.iter().map(|c| digits[*c as usize]).collect()
            }
            HandleKind::List(list) => {
                compile_strategy(game, idx, self.agent, &list[ordinal as usize])
            }
        }
    }

    /// The candidate as a plain strategy value, for witnesses.
    fn materialize(&self, game: &InfluenceGame, idx: &SpaceIndex, ordinal: u128) -> Strategy {
        match &self.kind {
            HandleKind::Constant => {
                Strategy::Constant(Action::from_code(&game.space, ordinal as usize))
            }
            HandleKind::Dense => {
                let base = idx.action_base as u128;
                let mut left = ordinal;
                let mut entries = Vec::new();
                for rep in &idx.reps[self.agent.index()] {
                    let code = (left % base) as usize;
                    left /= base;
                    let state = game.space.state_at(*rep as u64);
                    entries.push((
                        class_key(&game.space, state, self.agent),
                        Action::from_code(&game.space, code),
                    ));
                }
                Strategy::Table { entries, default: Action::Skip }
            }
            HandleKind::List(list) => list[ordinal as usize].clone(),
        }
    }
}

fn compile_strategy(
    game: &InfluenceGame,
    idx: &SpaceIndex,
    agent: AgentId,
    strategy: &Strategy,
) -> Vec<u16> {
    (0..idx.state_count as u64)
        .map(|k| {
            let s = game.space.state_at(k);
            strategy.action(&game.space, agent, s).code(&game.space) as u16
        })
        .collect()
}

/// The joint quantifier over several agents' families; ordinals are mixed
/// radix with the lowest-indexed agent varying fastest, which fixes the
/// canonical witness order.
struct JointFamily<'a> {
    handles: Vec<FamilyHandle<'a>>,
    total: u128,
}

impl<'a> JointFamily<'a> {
    fn new(
        idx: &SpaceIndex,
        space: &Space,
        members: impl Iterator<Item = (AgentId, &'a StrategyFamily)>,
        what: &'static str,
        budget: Budget,
    ) -> Result<JointFamily<'a>, AnalysisError> {
        let handles: Vec<FamilyHandle> =
            members.map(|(a, f)| FamilyHandle::new(idx, space, a, f)).collect();
        let total = handles.iter().map(|h| h.size).product();
        if total > budget.0 as u128 {
            return Err(AnalysisError::BudgetExceeded { what, size: total, budget: budget.0 });
        }
        Ok(JointFamily { handles, total })
    }

    fn decode(&self, k: u128) -> Vec<u128> {
        let mut out = Vec::with_capacity(self.handles.len());
        let mut left = k;
        for h in &self.handles {
            out.push(left % h.size.max(1));
            left /= h.size.max(1);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// The enumerative checkers

/// Checker over an enumerated state space; build once per game and reuse
/// across queries.
pub struct Analyzer<'g> {
    game: &'g InfluenceGame,
    idx: SpaceIndex,
    budget: Budget,
}

impl<'g> Analyzer<'g> {
    pub fn new(
        game: &'g InfluenceGame,
        budget: Budget,
        state_limit: u64,
    ) -> Result<Analyzer<'g>, AnalysisError> {
        let idx = SpaceIndex::build(game, state_limit)?;
        Ok(Analyzer { game, idx, budget })
    }

    pub fn index(&self) -> &SpaceIndex {
        &self.idx
    }

    fn initial_indices(&self, agent: AgentId, uniform: bool) -> Vec<u32> {
        let space = &self.game.space;
        if uniform {
            indistinguishability_class(space, self.game.initial, agent)
                .map(|s| space.state_index(s) as u32)
                .collect()
        } else {
            vec![space.state_index(self.game.initial) as u32]
        }
    }

    /// Runs the joint codes from `start` until the run cycles and evaluates
    /// `goal` at time zero.
    fn run_and_eval(&self, start: u32, codes: &[&[u16]], goal: &TemporalFormula) -> bool {
        let base = self.idx.action_base as u64;
        let mut indices = vec![start];
        // Position of each state on the current run; the space is small by
        // construction, so a dense array beats hashing.
        let mut seen = vec![u32::MAX; self.idx.state_count];
        seen[start as usize] = 0;
        let mut current = start;
        let cycle_start = loop {
            let mut ja = 0u64;
            let mut scale = 1u64;
            for agent_codes in codes {
                ja += agent_codes[current as usize] as u64 * scale;
                scale *= base;
            }
            let next = self.idx.successor(self.game, current, ja);
            if seen[next as usize] != u32::MAX {
                break seen[next as usize] as usize;
            }
            seen[next as usize] = indices.len() as u32;
            indices.push(next);
            current = next;
        };
        let states: Vec<State> =
            indices.iter().map(|k| self.game.space.state_at(*k as u64)).collect();
        eval_states(&self.game.space, goal, &states, cycle_start, 0)
    }

    fn opponents_of<'f>(
        &self,
        agent: AgentId,
        family: &'f StrategyFamily,
        what: &'static str,
    ) -> Result<JointFamily<'f>, AnalysisError> {
        JointFamily::new(
            &self.idx,
            &self.game.space,
            self.game.space.agents().filter(|a| *a != agent).map(|a| (a, family)),
            what,
            self.budget,
        )
    }

    /// Lays the compiled code slices out in agent order: the focal agent's
    /// codes in her slot, opponents in theirs.
    fn arrange<'c>(
        &self,
        agent: AgentId,
        focal: &'c [u16],
        opponents: &'c [Vec<u16>],
    ) -> Vec<&'c [u16]> {
        let mut slots: Vec<&[u16]> = Vec::with_capacity(self.game.space.agent_count());
        let mut opp = opponents.iter();
        for a in self.game.space.agents() {
            if a == agent {
                slots.push(focal);
            } else {
                slots.push(opp.next().expect("one opponent slice per other agent"));
            }
        }
        slots
    }

    /// Does `strategy` meet the agent's goal against every opponent profile
    /// in the family (and, with `uniform`, from every state in the agent's
    /// information class of the initial state)?
    pub fn is_winning(
        &self,
        agent: AgentId,
        strategy: &Strategy,
        opponents: &StrategyFamily,
        uniform: bool,
    ) -> Result<Verdict, AnalysisError> {
        let joint = self.opponents_of(agent, opponents, "opponent profiles")?;
        let focal = compile_strategy(self.game, &self.idx, agent, strategy);
        let initials = self.initial_indices(agent, uniform);
        let goal = self.game.goal(agent);

        let found = (0..joint.total as usize).into_par_iter().with_min_len(512).find_first(|k| {
            let ordinals = joint.decode(*k as u128);
            let opp: Vec<Vec<u16>> = joint
                .handles
                .iter()
                .zip(&ordinals)
                .map(|(h, o)| h.compile(self.game, &self.idx, *o))
                .collect();
            let slots = self.arrange(agent, &focal, &opp);
            initials.iter().any(|s0| !self.run_and_eval(*s0, &slots, goal))
        });

        Ok(match found {
            None => Verdict {
                holds: true,
                family: opponents.describe(),
                examined: joint.total as u64,
                witness: None,
            },
            Some(k) => {
                let ordinals = joint.decode(k as u128);
                let opp: Vec<(AgentId, Strategy)> = joint
                    .handles
                    .iter()
                    .zip(&ordinals)
                    .map(|(h, o)| (h.agent, h.materialize(self.game, &self.idx, *o)))
                    .collect();
                let compiled: Vec<Vec<u16>> = joint
                    .handles
                    .iter()
                    .zip(&ordinals)
                    .map(|(h, o)| h.compile(self.game, &self.idx, *o))
                    .collect();
                let slots = self.arrange(agent, &focal, &compiled);
                let initial = initials
                    .iter()
                    .copied()
                    .find(|s0| !self.run_and_eval(*s0, &slots, goal))
                    .expect("witness revalidates");
                Verdict {
                    holds: false,
                    family: opponents.describe(),
                    examined: k as u64 + 1,
                    witness: Some(Witness::Opponents {
                        opponents: opp,
                        initial: self.game.space.state_at(initial as u64),
                    }),
                }
            }
        })
    }

    /// Is `strategy` never strictly beaten: against every opponent profile
    /// and every alternative, if the alternative meets the goal then so
    /// does `strategy` (per initial state in the class when `uniform`).
    pub fn is_weakly_dominant(
        &self,
        agent: AgentId,
        strategy: &Strategy,
        family: &StrategyFamily,
        uniform: bool,
    ) -> Result<Verdict, AnalysisError> {
        let opponents = self.opponents_of(agent, family, "opponent profiles")?;
        let alternatives = JointFamily::new(
            &self.idx,
            &self.game.space,
            std::iter::once((agent, family)),
            "alternative strategies",
            self.budget,
        )?;
        let focal = compile_strategy(self.game, &self.idx, agent, strategy);
        let initials = self.initial_indices(agent, uniform);
        let goal = self.game.goal(agent);

        let check = |k: u64| -> Option<(u128, u32)> {
            let ordinals = opponents.decode(k as u128);
            let opp: Vec<Vec<u16>> = opponents
                .handles
                .iter()
                .zip(&ordinals)
                .map(|(h, o)| h.compile(self.game, &self.idx, *o))
                .collect();
            let slots = self.arrange(agent, &focal, &opp);
            for s0 in &initials {
                if self.run_and_eval(*s0, &slots, goal) {
                    continue;
                }
                // The checked strategy misses here; any alternative that
                // hits refutes dominance.
                for alt in 0..alternatives.total {
                    let alt_codes =
                        alternatives.handles[0].compile(self.game, &self.idx, alt);
                    let slots = self.arrange(agent, &alt_codes, &opp);
                    if self.run_and_eval(*s0, &slots, goal) {
                        return Some((alt, *s0));
                    }
                }
            }
            None
        };

        let found = (0..opponents.total as usize)
            .into_par_iter()
            .with_min_len(64)
            .find_map_first(|k| check(k as u64).map(|hit| (k as u64, hit)));

        Ok(match found {
            None => Verdict {
                holds: true,
                family: family.describe(),
                examined: opponents.total as u64,
                witness: None,
            },
            Some((k, (alt, s0))) => {
                let ordinals = opponents.decode(k as u128);
                let opp: Vec<(AgentId, Strategy)> = opponents
                    .handles
                    .iter()
                    .zip(&ordinals)
                    .map(|(h, o)| (h.agent, h.materialize(self.game, &self.idx, *o)))
                    .collect();
                Verdict {
                    holds: false,
                    family: family.describe(),
                    examined: k as u64 + 1,
                    witness: Some(Witness::Dominance {
                        opponents: opp,
                        alternative: alternatives.handles[0].materialize(
                            self.game,
                            &self.idx,
                            alt,
                        ),
                        initial: self.game.space.state_at(s0 as u64),
                    }),
                }
            }
        })
    }

    /// Worst-case goal satisfaction of `agent` over her information class
    /// of the initial state, when she plays `focal` and the others play
    /// `others`.
    fn min_utility(&self, agent: AgentId, focal: &[u16], others: &[Vec<u16>]) -> Option<u32> {
        let goal = self.game.goal(agent);
        let slots = self.arrange(agent, focal, others);
        self.initial_indices(agent, true)
            .into_iter()
            .find(|s0| !self.run_and_eval(*s0, &slots, goal))
    }

    /// Best response in the worst-case sense: no alternative in the family
    /// achieves the goal from every state of the agent's information class
    /// when this strategy fails somewhere in it.
    pub fn is_best_response(
        &self,
        agent: AgentId,
        strategy: &Strategy,
        others: &StrategyProfile,
        family: &StrategyFamily,
    ) -> Result<Verdict, AnalysisError> {
        let opp_codes: Vec<Vec<u16>> = self
            .game
            .space
            .agents()
            .filter(|a| *a != agent)
            .map(|a| compile_strategy(self.game, &self.idx, a, others.strategy(a)))
            .collect();
        let focal = compile_strategy(self.game, &self.idx, agent, strategy);

        let failing = match self.min_utility(agent, &focal, &opp_codes) {
            None => {
                // Goal met from the whole class: nothing can improve on
                // utility one.
                return Ok(Verdict {
                    holds: true,
                    family: family.describe(),
                    examined: 0,
                    witness: None,
                });
            }
            Some(s0) => s0,
        };

        let alternatives = JointFamily::new(
            &self.idx,
            &self.game.space,
            std::iter::once((agent, family)),
            "alternative strategies",
            self.budget,
        )?;

        let found = (0..alternatives.total as usize).into_par_iter().with_min_len(512).find_first(
            |k| {
                let alt = alternatives.handles[0].compile(self.game, &self.idx, *k as u128);
                self.min_utility(agent, &alt, &opp_codes).is_none()
            },
        );

        Ok(match found {
            None => Verdict {
                holds: true,
                family: family.describe(),
                examined: alternatives.total as u64,
                witness: None,
            },
            Some(k) => Verdict {
                holds: false,
                family: family.describe(),
                examined: k as u64 + 1,
                witness: Some(Witness::Deviation {
                    agent,
                    strategy: alternatives.handles[0].materialize(self.game, &self.idx, k as u128),
                    failing: self.game.space.state_at(failing as u64),
                }),
            },
        })
    }

    /// Nash membership: every agent's strategy is a best response to the
    /// rest of the profile. On failure the verdict carries the deviating
    /// agent, the improving strategy, and a class state where the original
    /// missed its goal.
    pub fn is_nash(
        &self,
        profile: &StrategyProfile,
        family: &StrategyFamily,
    ) -> Result<Verdict, AnalysisError> {
        if profile.len() != self.game.space.agent_count() {
            return Err(AnalysisError::ProfileLength {
                expected: self.game.space.agent_count(),
                got: profile.len(),
            });
        }
        let mut examined = 0;
        for agent in self.game.space.agents() {
            let verdict =
                self.is_best_response(agent, profile.strategy(agent), profile, family)?;
            examined += verdict.examined;
            if !verdict.holds {
                return Ok(Verdict { examined, ..verdict });
            }
        }
        Ok(Verdict { holds: true, family: family.describe(), examined, witness: None })
    }

    /// Is some profile in the family able to satisfy `goal` from `start`?
    pub fn is_coherent(
        &self,
        goal: &TemporalFormula,
        start: State,
        family: &StrategyFamily,
    ) -> Result<Verdict, AnalysisError> {
        let joint = JointFamily::new(
            &self.idx,
            &self.game.space,
            self.game.space.agents().map(|a| (a, family)),
            "strategy profiles",
            self.budget,
        )?;
        let start = self.game.space.state_index(start) as u32;

        let found = (0..joint.total as usize).into_par_iter().with_min_len(512).find_first(|k| {
            let ordinals = joint.decode(*k as u128);
            let codes: Vec<Vec<u16>> = joint
                .handles
                .iter()
                .zip(&ordinals)
                .map(|(h, o)| h.compile(self.game, &self.idx, *o))
                .collect();
            let slots: Vec<&[u16]> = codes.iter().map(|c| c.as_slice()).collect();
            self.run_and_eval(start, &slots, goal)
        });

        Ok(match found {
            Some(k) => {
                let ordinals = joint.decode(k as u128);
                let strategies = joint
                    .handles
                    .iter()
                    .zip(&ordinals)
                    .map(|(h, o)| h.materialize(self.game, &self.idx, *o))
                    .collect();
                Verdict {
                    holds: true,
                    family: family.describe(),
                    examined: k as u64 + 1,
                    witness: Some(Witness::Profile(StrategyProfile::new(strategies))),
                }
            }
            None => Verdict {
                holds: false,
                family: family.describe(),
                examined: joint.total as u64,
                witness: None,
            },
        })
    }
}

// ---------------------------------------------------------------------------
// Bounded play search: unconstrained adversaries

/// Verdict of a bounded adversarial search. `holds` means the goal is met
/// on every play, against adversaries free to pick any joint action each
/// step; that implies winning against every state-based family. The
/// witness is a defeating play.
#[derive(Clone, Debug)]
pub struct BoundedVerdict {
    pub holds: bool,
    pub witness: Option<(State, Vec<JointAction>)>,
}

/// Outcome of probing whether any deviation of one agent could improve her
/// worst-case outcome, with the deviator unconstrained (not even required
/// to play uniformly).
#[derive(Clone, Debug)]
pub enum DeviationProbe {
    /// No deviation, however clever, can raise the agent's worst-case
    /// outcome: either her goal already holds from the whole class, or
    /// some class state admits no satisfying play at all.
    NoProfitableDeviation { hopeless: Option<State> },
    /// Unconstrained plays satisfy the goal from every class state; a
    /// uniform strategy may or may not exist, so nothing is certified.
    Inconclusive,
}

struct PlaySearch<'a> {
    game: &'a InfluenceGame,
    /// Fixed agents follow their strategy; `None` marks a free agent whose
    /// actions the search branches over.
    fixed: Vec<Option<&'a Strategy>>,
    goal: &'a TemporalFormula,
    horizon: usize,
}

enum SearchMode {
    AllPlaysSatisfy,
    SomePlaySatisfies,
}

impl PlaySearch<'_> {
    /// In `AllPlaysSatisfy` mode returns Ok(true) when every play meets the
    /// goal and Ok(false) with the defeating play otherwise; in
    /// `SomePlaySatisfies` mode the polarity flips.
    fn search(
        &self,
        start: State,
        mode: &SearchMode,
    ) -> Result<(bool, Option<Vec<JointAction>>), AnalysisError> {
        if let Some(depth) = self.goal.next_depth() {
            if depth > self.horizon {
                return Err(AnalysisError::HorizonExceeded { horizon: self.horizon });
            }
            let mut path = vec![start];
            let mut actions = Vec::new();
            return Ok(self.explore_depth(&mut path, &mut actions, depth, mode));
        }
        let mut path = vec![start];
        let mut positions = HashMap::new();
        positions.insert(start, 0usize);
        let mut actions = Vec::new();
        self.explore_lasso(&mut path, &mut positions, &mut actions, mode)
    }

    fn free_agents(&self) -> Vec<AgentId> {
        self.game
            .space
            .agents()
            .filter(|a| self.fixed[a.index()].is_none())
            .collect()
    }

    fn joint_at(&self, s: State, free_choice: &[usize]) -> JointAction {
        let space = &self.game.space;
        let mut free_iter = free_choice.iter();
        JointAction(
            space
                .agents()
                .map(|a| match self.fixed[a.index()] {
                    Some(strategy) => strategy.action(space, a, s),
                    None => Action::from_code(space, *free_iter.next().unwrap()),
                })
                .collect(),
        )
    }

    fn free_choices(&self) -> Vec<Vec<usize>> {
        let base = Action::count(&self.game.space);
        let free = self.free_agents().len();
        let mut out = Vec::new();
        let total = (base as u64).pow(free as u32);
        for mut k in 0..total {
            let mut choice = Vec::with_capacity(free);
            for _ in 0..free {
                choice.push((k % base as u64) as usize);
                k /= base as u64;
            }
            out.push(choice);
        }
        out
    }

    /// Finite-depth exploration for goals whose only temporal operator is
    /// next: the first `depth + 1` states decide the goal exactly.
    fn explore_depth(
        &self,
        path: &mut Vec<State>,
        actions: &mut Vec<JointAction>,
        depth: usize,
        mode: &SearchMode,
    ) -> (bool, Option<Vec<JointAction>>) {
        if path.len() == depth + 1 {
            let value =
                eval_states(&self.game.space, self.goal, path, path.len() - 1, 0);
            return self.leaf(value, actions, mode);
        }
        for choice in self.free_choices() {
            let current = *path.last().unwrap();
            let joint = self.joint_at(current, &choice);
            let next =
                transition(&self.game.space, current, &joint, &self.game.net, &self.game.rules);
            path.push(next);
            actions.push(joint);
            let (decided, witness) = self.explore_depth(path, actions, depth, mode);
            path.pop();
            actions.pop();
            if decided {
                return (true, witness);
            }
        }
        (false, None)
    }

    /// Lasso exploration for general goals: a play is closed the first time
    /// it revisits a state, which covers every play a state-based profile
    /// can induce.
    fn explore_lasso(
        &self,
        path: &mut Vec<State>,
        positions: &mut HashMap<State, usize>,
        actions: &mut Vec<JointAction>,
        mode: &SearchMode,
    ) -> Result<(bool, Option<Vec<JointAction>>), AnalysisError> {
        for choice in self.free_choices() {
            let current = *path.last().unwrap();
            let joint = self.joint_at(current, &choice);
            let next =
                transition(&self.game.space, current, &joint, &self.game.net, &self.game.rules);
            if let Some(&entry) = positions.get(&next) {
                actions.push(joint);
                let value = eval_states(&self.game.space, self.goal, path, entry, 0);
                let (decided, witness) = self.leaf(value, actions, mode);
                actions.pop();
                if decided {
                    return Ok((true, witness));
                }
                continue;
            }
            // Extending would exceed `horizon` steps without a repeat.
            if path.len() > self.horizon {
                return Err(AnalysisError::HorizonExceeded { horizon: self.horizon });
            }
            path.push(next);
            positions.insert(next, path.len() - 1);
            actions.push(joint);
            let out = self.explore_lasso(path, positions, actions, mode)?;
            actions.pop();
            positions.remove(&next);
            path.pop();
            if out.0 {
                return Ok(out);
            }
        }
        Ok((false, None))
    }

    /// A leaf decides the search when its value settles the quantifier:
    /// a failing play under universal mode, a satisfying one under
    /// existential mode.
    fn leaf(
        &self,
        value: bool,
        actions: &[JointAction],
        mode: &SearchMode,
    ) -> (bool, Option<Vec<JointAction>>) {
        match mode {
            SearchMode::AllPlaysSatisfy if !value => (true, Some(actions.to_vec())),
            SearchMode::SomePlaySatisfies if value => (true, Some(actions.to_vec())),
            _ => (false, None),
        }
    }
}

/// Does `strategy` meet the agent's goal against opponents who may play
/// *any* joint action at every step (not even state-based)? `true` implies
/// winning against every strategy family. Exact for goals built from next
/// only, provided the nesting depth fits in the horizon; for other goals a
/// positive answer is still sound while a negative one is a play defeating
/// the strategy against unconstrained adversaries.
pub fn is_winning_bounded(
    game: &InfluenceGame,
    agent: AgentId,
    strategy: &Strategy,
    horizon: usize,
    uniform: bool,
) -> Result<BoundedVerdict, AnalysisError> {
    let mut fixed: Vec<Option<&Strategy>> = vec![None; game.space.agent_count()];
    fixed[agent.index()] = Some(strategy);
    let search = PlaySearch { game, fixed, goal: game.goal(agent), horizon };
    let initials: Vec<State> = if uniform {
        indistinguishability_class(&game.space, game.initial, agent).collect()
    } else {
        vec![game.initial]
    };
    for start in initials {
        let (decided, witness) = search.search(start, &SearchMode::AllPlaysSatisfy)?;
        if decided {
            return Ok(BoundedVerdict { holds: false, witness: witness.map(|w| (start, w)) });
        }
    }
    Ok(BoundedVerdict { holds: true, witness: None })
}

/// Probes whether any deviation of `agent` from `profile` could raise her
/// worst-case outcome, letting the deviator play arbitrarily while the
/// others keep their strategies.
pub fn deviation_probe(
    game: &InfluenceGame,
    agent: AgentId,
    profile: &StrategyProfile,
    horizon: usize,
    limit: u64,
) -> Result<DeviationProbe, AnalysisError> {
    let class: Vec<State> =
        indistinguishability_class(&game.space, game.initial, agent).collect();
    let mut all_met = true;
    for s in &class {
        let lasso = profile.induced_lasso(game, *s, limit)?;
        if !eval(&game.space, game.goal(agent), &lasso, 0) {
            all_met = false;
            break;
        }
    }
    if all_met {
        return Ok(DeviationProbe::NoProfitableDeviation { hopeless: None });
    }
    let mut fixed: Vec<Option<&Strategy>> = Vec::with_capacity(game.space.agent_count());
    for a in game.space.agents() {
        fixed.push(if a == agent { None } else { Some(profile.strategy(a)) });
    }
    let search = PlaySearch { game, fixed, goal: game.goal(agent), horizon };
    for start in &class {
        let (found, _) = search.search(*start, &SearchMode::SomePlaySatisfies)?;
        if !found {
            // No play of the deviator reaches the goal from here, so the
            // worst case over the class stays at zero for every deviation.
            return Ok(DeviationProbe::NoProfitableDeviation { hopeless: Some(*start) });
        }
    }
    Ok(DeviationProbe::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;
    use crate::model::Names;

    fn state(space: &Space, bel: &[u8], vis: &[u8]) -> State {
        State::from_fn(space, |a, _| bel[a.index()] == 1, |a, _| vis[a.index()] == 1)
    }

    fn game(
        agents: &[&str],
        edges: &[(usize, usize)],
        bel: &[u8],
        vis: &[u8],
        goals: &[&str],
    ) -> InfluenceGame {
        let names = Names::new(
            agents.iter().map(|s| s.to_string()).collect(),
            vec!["p".to_string()],
        )
        .unwrap();
        let space = names.space().unwrap();
        let net = InfluenceNetwork::new(
            &space,
            edges.iter().map(|(i, j)| (AgentId(*i), AgentId(*j))),
        )
        .unwrap();
        let initial = state(&space, bel, vis);
        let goals = goals.iter().map(|g| parse(g, &names).unwrap()).collect();
        InfluenceGame::new(names, net, Rules::unanimous(&space), initial, goals).unwrap()
    }

    fn reveal() -> Strategy {
        Strategy::Constant(Action::Reveal(IssueId(0)))
    }

    fn hide() -> Strategy {
        Strategy::Constant(Action::Hide(IssueId(0)))
    }

    fn skip() -> Strategy {
        Strategy::Constant(Action::Skip)
    }

    /// Show while holding the positive opinion, withdraw otherwise.
    fn show_if_convinced() -> Strategy {
        Strategy::OwnBelief {
            issue: IssueId(0),
            if_true: Action::Reveal(IssueId(0)),
            if_false: Action::Hide(IssueId(0)),
        }
    }

    fn triangle() -> InfluenceGame {
        game(
            &["ann", "bob", "jesse"],
            &[(0, 1), (0, 2), (1, 2)],
            &[1, 0, 0],
            &[0, 0, 0],
            &["F G B[jesse,p]", "true", "true"],
        )
    }

    fn dropped_edge() -> InfluenceGame {
        game(
            &["ann", "bob", "jesse"],
            &[(0, 1), (1, 2)],
            &[1, 0, 0],
            &[0, 0, 0],
            &["F G B[jesse,p]", "true", "true"],
        )
    }

    #[test]
    fn class_keys_match_indistinguishability() {
        let sp = Space::new(3, 1).unwrap();
        let s0 = state(&sp, &[0, 1, 0], &[1, 1, 0]);
        let s1 = state(&sp, &[0, 1, 1], &[1, 1, 0]);
        assert_eq!(class_key(&sp, s0, AgentId(0)), class_key(&sp, s1, AgentId(0)));
        assert_ne!(class_key(&sp, s0, AgentId(2)), class_key(&sp, s1, AgentId(2)));
    }

    #[test]
    fn two_agents_one_issue_have_twelve_classes() {
        let g = game(&["1", "2"], &[(0, 1)], &[0, 0], &[0, 0], &["true", "true"]);
        let idx = SpaceIndex::build(&g, 1 << 24).unwrap();
        assert_eq!(idx.class_count(AgentId(0)), 12);
        assert_eq!(idx.class_count(AgentId(1)), 12);
    }

    #[test]
    fn satisfaction_reports_per_agent_goals() {
        // Mutual influence, both content to spread the positive opinion.
        let g = game(
            &["1", "2"],
            &[(0, 1), (1, 0)],
            &[1, 1],
            &[0, 0],
            &["F X B[2,p]", "F X B[1,p]"],
        );
        let profile =
            StrategyProfile::new(vec![show_if_convinced(), show_if_convinced()]);
        let sat = satisfaction(&g, &profile, g.initial, 1 << 24).unwrap();
        assert_eq!(sat, vec![true, true]);
        // A goal about the present is settled by the initial state alone.
        let g2 = game(&["1", "2"], &[], &[1, 0], &[0, 0], &["B[1,p]", "true"]);
        let sat = satisfaction(&g2, &StrategyProfile::new(vec![skip(), skip()]), g2.initial, 1 << 24)
            .unwrap();
        assert_eq!(sat, vec![true, true]);
    }

    #[test]
    fn constant_reveal_wins_the_triangle() {
        let g = triangle();
        let analyzer = Analyzer::new(&g, Budget::default(), 1 << 24).unwrap();
        let verdict = analyzer
            .is_winning(AgentId(0), &reveal(), &StrategyFamily::Constant, true)
            .unwrap();
        assert!(verdict.holds, "witness: {:?}", verdict.witness);
        // The unconstrained adversary agrees.
        let bounded = is_winning_bounded(&g, AgentId(0), &reveal(), 8, true).unwrap();
        assert!(bounded.holds);
    }

    #[test]
    fn dropping_the_direct_edge_breaks_the_win() {
        let g = dropped_edge();
        let analyzer = Analyzer::new(&g, Budget::default(), 1 << 24).unwrap();
        let verdict = analyzer
            .is_winning(AgentId(0), &reveal(), &StrategyFamily::Constant, false)
            .unwrap();
        assert!(!verdict.holds);
        // Replay the reported witness: the goal indeed fails against it.
        match verdict.witness.unwrap() {
            Witness::Opponents { opponents, initial } => {
                let mut profile = StrategyProfile::new(vec![reveal(), skip(), skip()]);
                for (agent, strategy) in opponents {
                    profile = profile.with_strategy(agent, strategy);
                }
                let sat = satisfaction(&g, &profile, initial, 1 << 24).unwrap();
                assert!(!sat[0]);
            }
            other => panic!("unexpected witness {:?}", other),
        }
        // The intermediary showing the negative opinion until convinced
        // blocks as well, whatever the third agent does.
        let blocker = StrategyFamily::Table(vec![Strategy::OwnBelief {
            issue: IssueId(0),
            if_true: Action::Hide(IssueId(0)),
            if_false: Action::Reveal(IssueId(0)),
        }]);
        let verdict = analyzer.is_winning(AgentId(0), &reveal(), &blocker, false).unwrap();
        assert!(!verdict.holds);
    }

    #[test]
    fn unsatisfiable_goal_has_no_winning_strategy() {
        let g = game(
            &["1", "2"],
            &[(0, 1)],
            &[1, 0],
            &[0, 0],
            &["B[1,p] & !B[1,p]", "true"],
        );
        let analyzer = Analyzer::new(&g, Budget::default(), 1 << 24).unwrap();
        for q in [reveal(), hide(), skip()] {
            assert!(!analyzer
                .is_winning(AgentId(0), &q, &StrategyFamily::Constant, false)
                .unwrap()
                .holds);
        }
    }

    #[test]
    fn bounded_search_is_exact_for_next_bounded_goals() {
        // An uncontrolled influencer can always split the audience.
        let g = game(
            &["ann", "bob", "kay"],
            &[(0, 1), (2, 1)],
            &[1, 0, 0],
            &[0, 0, 0],
            &["X B[bob,p]", "true", "true"],
        );
        for action in Action::all(&g.space) {
            let verdict =
                is_winning_bounded(&g, AgentId(0), &Strategy::Constant(action), 8, false)
                    .unwrap();
            assert!(!verdict.holds, "{:?} should not win", action);
        }
        // With exclusive influence the reveal wins outright.
        let g = game(&["1", "2"], &[(0, 1)], &[1, 0], &[0, 0], &["X B[2,p]", "true"]);
        assert!(is_winning_bounded(&g, AgentId(0), &reveal(), 8, false).unwrap().holds);
        // Horizon zero suffices for a goal about the present.
        let g = game(&["1", "2"], &[(0, 1)], &[1, 0], &[0, 0], &["B[1,p]", "true"]);
        assert!(is_winning_bounded(&g, AgentId(0), &skip(), 0, false).unwrap().holds);
    }

    #[test]
    fn bounded_search_needs_a_large_enough_horizon() {
        // A positive verdict needs every play closed; two steps are not
        // enough room for that in the triangle.
        let g = triangle();
        assert!(matches!(
            is_winning_bounded(&g, AgentId(0), &reveal(), 2, false),
            Err(AnalysisError::HorizonExceeded { horizon: 2 })
        ));
    }

    #[test]
    fn reveal_is_weakly_dominant_without_the_direct_edge() {
        let g = dropped_edge();
        let analyzer = Analyzer::new(&g, Budget::default(), 1 << 24).unwrap();
        let verdict = analyzer
            .is_weakly_dominant(AgentId(0), &reveal(), &StrategyFamily::Constant, true)
            .unwrap();
        assert!(verdict.holds, "witness: {:?}", verdict.witness);
    }

    #[test]
    fn every_strategy_weakly_dominates_under_an_unsatisfiable_goal() {
        let g = game(
            &["1", "2"],
            &[(0, 1)],
            &[1, 0],
            &[0, 0],
            &["B[1,p] & !B[1,p]", "true"],
        );
        let analyzer = Analyzer::new(&g, Budget::default(), 1 << 24).unwrap();
        for q in [reveal(), hide(), skip()] {
            assert!(analyzer
                .is_weakly_dominant(AgentId(0), &q, &StrategyFamily::Constant, false)
                .unwrap()
                .holds);
        }
    }

    #[test]
    fn budget_is_enforced_per_quantifier() {
        let g = triangle();
        let analyzer = Analyzer::new(&g, Budget(1000), 1 << 24).unwrap();
        let err = analyzer
            .is_winning(AgentId(0), &reveal(), &StrategyFamily::Full, false)
            .unwrap_err();
        assert!(matches!(err, AnalysisError::BudgetExceeded { .. }));
    }

    #[test]
    fn best_response_collapses_on_singleton_classes() {
        // Fully visible initial state: the information class is a point.
        let g = game(
            &["1", "2"],
            &[(0, 1), (1, 0)],
            &[1, 0],
            &[1, 1],
            &["F X B[2,p]", "F X B[1,p]"],
        );
        let analyzer = Analyzer::new(&g, Budget::default(), 1 << 24).unwrap();
        let others = StrategyProfile::new(vec![skip(), show_if_convinced()]);
        let verdict = analyzer
            .is_best_response(AgentId(0), &reveal(), &others, &StrategyFamily::Constant)
            .unwrap();
        assert!(verdict.holds);
        // An unreachable goal makes everything a best response.
        let g2 = game(
            &["1", "2"],
            &[(0, 1), (1, 0)],
            &[0, 0],
            &[1, 1],
            &["F X B[2,p]", "true"],
        );
        let analyzer = Analyzer::new(&g2, Budget::default(), 1 << 24).unwrap();
        for q in [reveal(), hide(), skip()] {
            assert!(analyzer
                .is_best_response(AgentId(0), &q, &others, &StrategyFamily::Constant)
                .unwrap()
                .holds);
        }
    }

    #[test]
    fn all_strategies_equal_when_the_goal_ignores_reachable_influence() {
        // No edges at all: nobody moves anybody.
        let g = game(&["1", "2"], &[], &[1, 0], &[0, 0], &["F B[2,p]", "true"]);
        let analyzer = Analyzer::new(&g, Budget::default(), 1 << 24).unwrap();
        let others = StrategyProfile::new(vec![skip(), skip()]);
        for q in [reveal(), hide(), skip()] {
            assert!(analyzer
                .is_best_response(AgentId(0), &q, &others, &StrategyFamily::Full)
                .unwrap()
                .holds);
        }
    }

    #[test]
    fn nash_accepts_trivial_goals_and_reports_deviations() {
        let g = game(
            &["1", "2"],
            &[(0, 1), (1, 0)],
            &[1, 0],
            &[0, 0],
            &["true", "true"],
        );
        let analyzer = Analyzer::new(&g, Budget::default(), 1 << 24).unwrap();
        for profile in [
            StrategyProfile::new(vec![skip(), skip()]),
            StrategyProfile::new(vec![reveal(), hide()]),
        ] {
            assert!(analyzer.is_nash(&profile, &StrategyFamily::Constant).unwrap().holds);
        }
        // Agent 2 wants agent 1 to stay convinced; agent 1 listens to 2.
        // If 2 shows a negative opinion, 1 flips; hiding it would not harm.
        let g2 = game(
            &["1", "2"],
            &[(0, 1), (1, 0)],
            &[1, 0],
            &[1, 1],
            &["true", "G B[1,p]"],
        );
        let analyzer = Analyzer::new(&g2, Budget::default(), 1 << 24).unwrap();
        let profile = StrategyProfile::new(vec![skip(), skip()]);
        let verdict = analyzer.is_nash(&profile, &StrategyFamily::Constant).unwrap();
        assert!(!verdict.holds);
        match verdict.witness.unwrap() {
            Witness::Deviation { agent, strategy, failing } => {
                assert_eq!(agent, AgentId(1));
                // Replaying the deviation improves the worst case to one.
                let improved = profile.with_strategy(agent, strategy);
                for s in
                    indistinguishability_class(&g2.space, g2.initial, agent)
                {
                    assert!(satisfaction(&g2, &improved, s, 1 << 24).unwrap()[1]);
                }
                assert!(!satisfaction(&g2, &profile, failing, 1 << 24).unwrap()[1]);
            }
            other => panic!("unexpected witness {:?}", other),
        }
    }

    #[test]
    fn control_follows_exclusive_influence_paths() {
        let sp = Space::new(3, 1).unwrap();
        let (ann, bob, jesse) = (AgentId(0), AgentId(1), AgentId(2));
        let chain = InfluenceNetwork::new(&sp, [(ann, bob)]).unwrap();
        assert!(controls(&chain, ann, bob));
        let tri =
            InfluenceNetwork::new(&sp, [(ann, bob), (ann, jesse), (bob, jesse)]).unwrap();
        assert!(controls(&tri, ann, jesse));
        let outside =
            InfluenceNetwork::new(&sp, [(ann, bob), (jesse, bob)]).unwrap();
        assert!(!controls(&outside, ann, bob));
    }

    #[test]
    fn coherence_needs_some_profile_to_reach_the_goal() {
        let g = game(&["1", "2"], &[(0, 1)], &[1, 0], &[0, 0], &["true", "true"]);
        let analyzer = Analyzer::new(&g, Budget::default(), 1 << 24).unwrap();
        let sat = parse("B[1,p]", &g.names).unwrap();
        let verdict =
            analyzer.is_coherent(&sat, g.initial, &StrategyFamily::Constant).unwrap();
        assert!(verdict.holds);
        assert!(matches!(verdict.witness, Some(Witness::Profile(_))));
        let contradiction = parse("B[1,p] & !B[1,p]", &g.names).unwrap();
        assert!(!analyzer
            .is_coherent(&contradiction, g.initial, &StrategyFamily::Constant)
            .unwrap()
            .holds);
        // Opinion spread needs the link: agent 2 cannot come to hold the
        // positive opinion of nobody.
        let lonely = game(&["1", "2"], &[], &[1, 0], &[0, 0], &["true", "true"]);
        let analyzer = Analyzer::new(&lonely, Budget::default(), 1 << 24).unwrap();
        let goal = parse("F B[2,p]", &lonely.names).unwrap();
        assert!(!analyzer
            .is_coherent(&goal, lonely.initial, &StrategyFamily::Constant)
            .unwrap()
            .holds);
    }

    #[test]
    fn deviation_probe_certifies_hopeless_classes() {
        // Nobody holds the positive opinion anywhere in the class, so no
        // deviation can ever create one.
        let g = game(
            &["1", "2"],
            &[(0, 1), (1, 0)],
            &[0, 0],
            &[1, 1],
            &["F X B[2,p]", "F X B[1,p]"],
        );
        let profile = StrategyProfile::new(vec![show_if_convinced(), show_if_convinced()]);
        match deviation_probe(&g, AgentId(0), &profile, 8, 1 << 24).unwrap() {
            DeviationProbe::NoProfitableDeviation { hopeless } => {
                assert_eq!(hopeless, Some(g.initial));
            }
            DeviationProbe::Inconclusive => panic!("expected certification"),
        }
        // When the goal already holds from the whole class the probe
        // certifies without searching.
        let g2 = game(
            &["1", "2"],
            &[(0, 1), (1, 0)],
            &[1, 1],
            &[1, 1],
            &["F X B[2,p]", "F X B[1,p]"],
        );
        match deviation_probe(&g2, AgentId(0), &profile, 8, 1 << 24).unwrap() {
            DeviationProbe::NoProfitableDeviation { hopeless } => assert_eq!(hopeless, None),
            DeviationProbe::Inconclusive => panic!("expected certification"),
        }
    }
}
