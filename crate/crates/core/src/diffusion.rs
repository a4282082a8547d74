//! Actions, the deterministic transition function, and lasso generation.
//!
//! A step first applies every agent's reveal/hide/skip action to her own
//! visibility flags, then updates all beliefs simultaneously: each agent
//! aggregates the public opinions of her influencers, where "public" is
//! read against the *old* beliefs and the *new* visibility. Deterministic
//! dynamics on a finite state space must eventually cycle, so the infinite
//! run induced by a state-based policy is represented losslessly as a
//! finite prefix plus a repeating cycle.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{
    AgentId, InfluenceNetwork, IssueId, Names, OpinionVector, PublicOpinion, Space, State,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffusionError {
    #[error("run exceeded the state guard of {limit} steps without closing a cycle")]
    GuardExceeded { limit: u64 },
}

/// One agent's move: change the visibility of a single issue, or do nothing.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Action {
    Skip,
    Reveal(IssueId),
    Hide(IssueId),
}

impl Action {
    /// The `2m + 1` individual actions in canonical order:
    /// skip, reveal p_1..p_m, hide p_1..p_m.
    pub fn all(space: &Space) -> Vec<Action> {
        let mut out = vec![Action::Skip];
        out.extend(space.issues().map(Action::Reveal));
        out.extend(space.issues().map(Action::Hide));
        out
    }

    pub fn count(space: &Space) -> usize {
        2 * space.issue_count() + 1
    }

    pub(crate) fn code(&self, space: &Space) -> usize {
        match self {
            Action::Skip => 0,
            Action::Reveal(p) => 1 + p.index(),
            Action::Hide(p) => 1 + space.issue_count() + p.index(),
        }
    }

    pub(crate) fn from_code(space: &Space, code: usize) -> Action {
        let m = space.issue_count();
        if code == 0 {
            Action::Skip
        } else if code <= m {
            Action::Reveal(IssueId(code - 1))
        } else {
            Action::Hide(IssueId(code - 1 - m))
        }
    }

    pub fn render(&self, names: &Names) -> String {
        match self {
            Action::Skip => "skip".to_string(),
            Action::Reveal(p) => format!("reveal {}", names.issue_name(*p)),
            Action::Hide(p) => format!("hide {}", names.issue_name(*p)),
        }
    }
}

/// One action per agent, applied simultaneously.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct JointAction(pub Vec<Action>);

impl JointAction {
    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn render(&self, names: &Names) -> String {
        let parts: Vec<String> = self.0.iter().map(|a| a.render(names)).collect();
        format!("({})", parts.join(", "))
    }
}

/// How an agent folds her influencers' public opinions into her own.
///
/// The update may depend only on the agent's current opinions and on the
/// public opinions passed in; the active influencers per issue are exactly
/// the entries that express a value there.
pub trait AggregationRule: Send + Sync + fmt::Debug {
    fn update(
        &self,
        space: &Space,
        own: OpinionVector,
        influencer_publics: &[PublicOpinion],
    ) -> OpinionVector;

    fn name(&self) -> &'static str;
}

/// Issue-by-issue unanimity: adopt a value only when every influencer that
/// expresses an opinion on the issue states that same value; keep the own
/// opinion when they are silent or split.
#[derive(Debug, Clone, Copy)]
pub struct Unanimous;

impl AggregationRule for Unanimous {
    fn update(
        &self,
        space: &Space,
        own: OpinionVector,
        influencer_publics: &[PublicOpinion],
    ) -> OpinionVector {
        let mut out = own;
        for p in space.issues() {
            let mut expressed = influencer_publics.iter().filter_map(|pub_op| pub_op.get(p));
            if let Some(first) = expressed.next() {
                if expressed.all(|v| v == first) {
                    out.set(p, first);
                }
            }
        }
        out
    }

    fn name(&self) -> &'static str {
        "unanimous"
    }
}

/// Strict majority among the expressed opinions; ties and silence keep the
/// own opinion.
#[derive(Debug, Clone, Copy)]
pub struct Majority;

impl AggregationRule for Majority {
    fn update(
        &self,
        space: &Space,
        own: OpinionVector,
        influencer_publics: &[PublicOpinion],
    ) -> OpinionVector {
        let mut out = own;
        for p in space.issues() {
            let mut yes = 0usize;
            let mut no = 0usize;
            for pub_op in influencer_publics {
                match pub_op.get(p) {
                    Some(true) => yes += 1,
                    Some(false) => no += 1,
                    None => {}
                }
            }
            if yes > no {
                out.set(p, true);
            } else if no > yes {
                out.set(p, false);
            }
        }
        out
    }

    fn name(&self) -> &'static str {
        "majority"
    }
}

/// Per-agent aggregation rules.
#[derive(Clone, Debug)]
pub struct Rules {
    per_agent: Vec<Arc<dyn AggregationRule>>,
}

impl Rules {
    pub fn unanimous(space: &Space) -> Rules {
        Rules { per_agent: vec![Arc::new(Unanimous); space.agent_count()] }
    }

    pub fn majority(space: &Space) -> Rules {
        Rules { per_agent: vec![Arc::new(Majority); space.agent_count()] }
    }

    pub fn rule(&self, agent: AgentId) -> &dyn AggregationRule {
        self.per_agent[agent.index()].as_ref()
    }

    pub fn all_unanimous(&self) -> bool {
        self.per_agent.iter().all(|r| r.name() == Unanimous.name())
    }
}

/// The unanimity update of a single agent evaluated at `state` as it stands:
/// influencers are heard exactly where they currently show an opinion.
pub fn unanimous_update(
    space: &Space,
    state: State,
    net: &InfluenceNetwork,
    agent: AgentId,
) -> OpinionVector {
    let publics: Vec<PublicOpinion> = net
        .influencers(agent)
        .iter()
        .map(|j| state.public_opinion(space, *j))
        .collect();
    Unanimous.update(space, state.opinions(space, agent), &publics)
}

/// Applies a joint action: visibility first, then the simultaneous belief
/// update. Every agent reads the same public profile, built from the old
/// beliefs and the new visibility.
pub fn transition(
    space: &Space,
    state: State,
    joint: &JointAction,
    net: &InfluenceNetwork,
    rules: &Rules,
) -> State {
    debug_assert_eq!(joint.0.len(), space.agent_count());
    let mut mid = state;
    for (k, action) in joint.0.iter().enumerate() {
        let agent = AgentId(k);
        match action {
            Action::Skip => {}
            Action::Reveal(p) => mid = mid.with_visibility(space, agent, *p, true),
            Action::Hide(p) => mid = mid.with_visibility(space, agent, *p, false),
        }
    }
    // mid now has old beliefs and new visibility; its public profile is the
    // one every agent aggregates from.
    let mut next = mid;
    for agent in space.agents() {
        let publics: Vec<PublicOpinion> = net
            .influencers(agent)
            .iter()
            .map(|j| mid.public_opinion(space, *j))
            .collect();
        let updated = rules.rule(agent).update(space, mid.opinions(space, agent), &publics);
        for p in space.issues() {
            next = next.with_belief(space, agent, p, updated.get(p));
        }
    }
    next
}

/// An ultimately periodic run: `prefix` followed by `cycle` repeated forever.
/// `cycle` is non-empty; the action stored at the last cycle position leads
/// back to the first cycle state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<State>,
    pub cycle: Vec<State>,
    pub prefix_actions: Vec<JointAction>,
    pub cycle_actions: Vec<JointAction>,
}

impl Lasso {
    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Number of stored positions (prefix plus one cycle pass).
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// State at time `k` of the infinite run; positions beyond the stored
    /// window fold back into the cycle.
    pub fn state_at(&self, k: usize) -> State {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn action_at(&self, k: usize) -> &JointAction {
        if k < self.prefix.len() {
            &self.prefix_actions[k]
        } else {
            &self.cycle_actions[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The stored states, prefix then cycle.
    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.prefix.iter().chain(self.cycle.iter()).copied()
    }
}

/// Runs a state-based policy from `start` until a state repeats, then
/// splits the run into prefix and cycle. `limit` bounds the number of steps
/// (the run must cycle within the state count, so hitting the guard means
/// the space was larger than the configured ceiling).
pub fn induced_lasso(
    space: &Space,
    start: State,
    net: &InfluenceNetwork,
    rules: &Rules,
    mut policy: impl FnMut(State) -> JointAction,
    limit: u64,
) -> Result<Lasso, DiffusionError> {
    let mut states = vec![start];
    let mut actions: Vec<JointAction> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    seen.insert(start, 0usize);
    let mut current = start;
    loop {
        if actions.len() as u64 >= limit {
            return Err(DiffusionError::GuardExceeded { limit });
        }
        let joint = policy(current);
        let next = transition(space, current, &joint, net, rules);
        actions.push(joint);
        if let Some(&entry) = seen.get(&next) {
            let prefix = states[..entry].to_vec();
            let cycle = states[entry..].to_vec();
            let prefix_actions = actions[..entry].to_vec();
            let cycle_actions = actions[entry..].to_vec();
            return Ok(Lasso { prefix, cycle, prefix_actions, cycle_actions });
        }
        seen.insert(next, states.len());
        states.push(next);
        current = next;
    }
}

/// One trace line: `t | beliefs | visibility | action`, agent rows in order,
/// each row the issue bits in order.
pub fn trace_line(
    space: &Space,
    names: &Names,
    t: usize,
    state: State,
    action: Option<&JointAction>,
) -> String {
    let rows = |read: &dyn Fn(AgentId, IssueId) -> bool| -> String {
        space
            .agents()
            .map(|a| {
                space
                    .issues()
                    .map(|p| if read(a, p) { '1' } else { '0' })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let bels = rows(&|a, p| state.belief(space, a, p));
    let viss = rows(&|a, p| state.visible(space, a, p));
    let act = match action {
        Some(j) => j.render(names),
        None => "-".to_string(),
    };
    format!("{} | {} | {} | {}", t, bels, viss, act)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Space;

    fn fig_setup() -> (Space, InfluenceNetwork, Rules) {
        let sp = Space::new(3, 1).unwrap();
        let (i, j, k) = (AgentId(0), AgentId(1), AgentId(2));
        let net = InfluenceNetwork::new(&sp, [(j, i), (k, i)]).unwrap();
        let rules = Rules::unanimous(&sp);
        (sp, net, rules)
    }

    fn st(sp: &Space, bel: [u8; 3], vis: [u8; 3]) -> State {
        State::from_fn(sp, |a, _| bel[a.index()] == 1, |a, _| vis[a.index()] == 1)
    }

    fn joint(actions: [Action; 3]) -> JointAction {
        JointAction(actions.to_vec())
    }

    #[test]
    fn unanimous_update_adopts_shared_public_value() {
        let (sp, net, _) = fig_setup();
        // Both influencers of agent 1 publicly state 1.
        let s = st(&sp, [0, 1, 1], [1, 1, 1]);
        let out = unanimous_update(&sp, s, &net, AgentId(0));
        assert!(out.get(IssueId(0)));
    }

    #[test]
    fn unanimous_update_keeps_opinion_without_active_influencers() {
        let (sp, net, _) = fig_setup();
        let s = st(&sp, [0, 1, 1], [1, 0, 0]);
        let out = unanimous_update(&sp, s, &net, AgentId(0));
        assert!(!out.get(IssueId(0)));
    }

    #[test]
    fn unanimous_update_keeps_opinion_under_disagreement() {
        let (sp, net, _) = fig_setup();
        let s = st(&sp, [0, 1, 0], [1, 1, 1]);
        let out = unanimous_update(&sp, s, &net, AgentId(0));
        assert!(!out.get(IssueId(0)));
    }

    #[test]
    fn two_step_golden_trace() {
        let (sp, net, rules) = fig_setup();
        let p = IssueId(0);
        let h0 = st(&sp, [0, 1, 1], [1, 1, 0]);
        let a0 = joint([Action::Skip, Action::Skip, Action::Reveal(p)]);
        let h1 = transition(&sp, h0, &a0, &net, &rules);
        assert_eq!(h1, st(&sp, [1, 1, 1], [1, 1, 1]));
        let a1 = joint([Action::Skip, Action::Hide(p), Action::Skip]);
        let h2 = transition(&sp, h1, &a1, &net, &rules);
        assert_eq!(h2, st(&sp, [1, 1, 1], [1, 0, 1]));
    }

    #[test]
    fn all_skip_is_identity_on_settled_states() {
        let (sp, net, rules) = fig_setup();
        // Influencer j agrees with i, k hidden: nothing moves.
        let s = st(&sp, [1, 1, 0], [1, 1, 0]);
        let skip = joint([Action::Skip, Action::Skip, Action::Skip]);
        assert_eq!(transition(&sp, s, &skip, &net, &rules), s);
    }

    #[test]
    fn majority_follows_larger_camp_and_keeps_on_ties() {
        let sp = Space::new(4, 1).unwrap();
        let net = InfluenceNetwork::new(
            &sp,
            [(AgentId(1), AgentId(0)), (AgentId(2), AgentId(0)), (AgentId(3), AgentId(0))],
        )
        .unwrap();
        let p = IssueId(0);
        let publics = |s: State| -> Vec<PublicOpinion> {
            net.influencers(AgentId(0)).iter().map(|j| s.public_opinion(&sp, *j)).collect()
        };
        // 2 vs 1 for true.
        let s = State::from_fn(&sp, |a, _| a.index() != 3 && a.index() != 0, |_, _| true);
        let own = s.opinions(&sp, AgentId(0));
        assert!(Majority.update(&sp, own, &publics(s)).get(p));
        // 1 vs 1 with one hidden: tie keeps own (false).
        let t = State::from_fn(&sp, |a, _| a.index() == 1, |a, _| a.index() != 3);
        let own = t.opinions(&sp, AgentId(0));
        assert!(!Majority.update(&sp, own, &publics(t)).get(p));
    }

    #[test]
    fn fixed_point_yields_trivial_lasso() {
        let (sp, net, rules) = fig_setup();
        let s = st(&sp, [1, 1, 0], [1, 1, 0]);
        let skip = joint([Action::Skip, Action::Skip, Action::Skip]);
        let lasso = induced_lasso(&sp, s, &net, &rules, |_| skip.clone(), 1 << 24).unwrap();
        assert_eq!(lasso.prefix_len(), 0);
        assert_eq!(lasso.cycle_len(), 1);
        assert_eq!(lasso.cycle[0], s);
    }

    #[test]
    fn scripted_run_settles_into_cycle() {
        let (sp, net, rules) = fig_setup();
        let p = IssueId(0);
        let h0 = st(&sp, [0, 1, 1], [1, 1, 0]);
        let h1 = st(&sp, [1, 1, 1], [1, 1, 1]);
        let h2 = st(&sp, [1, 1, 1], [1, 0, 1]);
        // Reveal/hide exactly as in the two-step golden trace, then skip.
        let policy = move |s: State| {
            if s == h0 {
                joint([Action::Skip, Action::Skip, Action::Reveal(p)])
            } else if s == h1 {
                joint([Action::Skip, Action::Hide(p), Action::Skip])
            } else {
                joint([Action::Skip, Action::Skip, Action::Skip])
            }
        };
        let lasso = induced_lasso(&sp, h0, &net, &rules, policy, 1 << 24).unwrap();
        assert_eq!(lasso.prefix, vec![h0, h1]);
        assert_eq!(lasso.cycle, vec![h2]);
    }

    #[test]
    fn guard_trips_when_limit_is_too_small() {
        let (sp, net, rules) = fig_setup();
        let p = IssueId(0);
        let s = st(&sp, [0, 1, 1], [0, 0, 0]);
        // Alternating reveal/hide walks through several states.
        let policy = move |s: State| {
            if s.visible(&sp, AgentId(1), p) {
                joint([Action::Skip, Action::Hide(p), Action::Reveal(p)])
            } else {
                joint([Action::Skip, Action::Reveal(p), Action::Hide(p)])
            }
        };
        assert!(matches!(
            induced_lasso(&sp, s, &net, &rules, policy, 1),
            Err(DiffusionError::GuardExceeded { limit: 1 })
        ));
    }

    #[test]
    fn trace_line_layout_is_stable() {
        let (sp, _, _) = fig_setup();
        let names = Names::numeric(&sp);
        let h0 = st(&sp, [0, 1, 1], [1, 1, 0]);
        let a = joint([Action::Skip, Action::Skip, Action::Reveal(IssueId(0))]);
        assert_eq!(
            trace_line(&sp, &names, 0, h0, Some(&a)),
            "0 | 0 1 1 | 1 1 0 | (skip, skip, reveal p)"
        );
        assert_eq!(trace_line(&sp, &names, 2, h0, None), "2 | 0 1 1 | 1 1 0 | -");
    }
}
