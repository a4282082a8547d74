//! Shared test tooling: an independent scan-based evaluation oracle and
//! seeded random generators for states, networks, formulas, strategies
//! and whole games.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use influence::analysis::{class_key, InfluenceGame, Strategy, StrategyProfile};
use influence::diffusion::{Action, Lasso, Rules};
use influence::logic::{eval_state, StateFormula, TemporalFormula};
use influence::model::{AgentId, InfluenceNetwork, Names, Space, State};

/// Scan-based evaluation over the lasso's unfolding: until is decided by
/// walking positions forward over a window of prefix plus two cycles,
/// which covers a full period from any stored position. Independent of
/// the labeling evaluator in the crate.
pub fn naive_eval(space: &Space, f: &TemporalFormula, lasso: &Lasso, k: usize) -> bool {
    let window = lasso.prefix_len() + 2 * lasso.cycle_len();
    match f {
        TemporalFormula::State(a) => eval_state(space, a, lasso.state_at(k)),
        TemporalFormula::Not(a) => !naive_eval(space, a, lasso, k),
        TemporalFormula::And(a, b) => {
            naive_eval(space, a, lasso, k) && naive_eval(space, b, lasso, k)
        }
        TemporalFormula::Or(a, b) => {
            naive_eval(space, a, lasso, k) || naive_eval(space, b, lasso, k)
        }
        TemporalFormula::Implies(a, b) => {
            !naive_eval(space, a, lasso, k) || naive_eval(space, b, lasso, k)
        }
        TemporalFormula::Next(a) => naive_eval(space, a, lasso, k + 1),
        TemporalFormula::Until(a, b) => {
            for witness in k..=k + window {
                if naive_eval(space, b, lasso, witness) {
                    return true;
                }
                if !naive_eval(space, a, lasso, witness) {
                    return false;
                }
            }
            false
        }
        TemporalFormula::Eventually(a) => {
            (k..=k + window).any(|t| naive_eval(space, a, lasso, t))
        }
        TemporalFormula::Henceforth(a) => {
            (k..=k + window).all(|t| naive_eval(space, a, lasso, t))
        }
    }
}

pub fn random_state(rng: &mut impl Rng, space: &Space) -> State {
    let cell = |rng: &mut dyn rand::RngCore| {
        (0..space.agent_count())
            .map(|_| (0..space.issue_count()).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    let bel = cell(rng);
    let vis = cell(rng);
    State::from_fn(space, |a, p| bel[a.0][p.0], |a, p| vis[a.0][p.0])
}

pub fn random_network(rng: &mut impl Rng, space: &Space) -> InfluenceNetwork {
    let n = space.agent_count();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(0.5) {
                edges.push((
                    space.agent(i).unwrap(),
                    space.agent(j).unwrap(),
                ));
            }
        }
    }
    InfluenceNetwork::new(space, edges).unwrap()
}

fn random_agent(rng: &mut impl Rng, space: &Space) -> AgentId {
    space.agent(rng.gen_range(0..space.agent_count())).unwrap()
}

pub fn random_action(rng: &mut impl Rng, space: &Space) -> Action {
    *Action::all(space).as_slice().choose(rng).unwrap()
}

fn random_atom(rng: &mut impl Rng, space: &Space) -> StateFormula {
    let a = space.agent(rng.gen_range(0..space.agent_count())).unwrap();
    let p = space.issue(rng.gen_range(0..space.issue_count())).unwrap();
    if rng.gen_bool(0.5) {
        StateFormula::Bel(a, p)
    } else {
        StateFormula::Vis(a, p)
    }
}

pub fn random_state_formula(
    rng: &mut impl Rng,
    space: &Space,
    depth: usize,
    allow_know: bool,
) -> StateFormula {
    if depth == 0 {
        return match rng.gen_range(0..10) {
            0 => StateFormula::True,
            1 => StateFormula::False,
            _ => random_atom(rng, space),
        };
    }
    match rng.gen_range(0..if allow_know { 5 } else { 4 }) {
        0 => random_atom(rng, space),
        1 => StateFormula::not(random_state_formula(rng, space, depth - 1, allow_know)),
        2 => StateFormula::and(
            random_state_formula(rng, space, depth - 1, allow_know),
            random_state_formula(rng, space, depth - 1, allow_know),
        ),
        3 => StateFormula::or(
            random_state_formula(rng, space, depth - 1, allow_know),
            random_state_formula(rng, space, depth - 1, allow_know),
        ),
        _ => StateFormula::know(
            random_agent(rng, space),
            random_state_formula(rng, space, depth - 1, allow_know),
        ),
    }
}

pub fn random_temporal_formula(
    rng: &mut impl Rng,
    space: &Space,
    depth: usize,
    allow_know: bool,
) -> TemporalFormula {
    if depth == 0 {
        return TemporalFormula::lift(random_state_formula(rng, space, 1, allow_know));
    }
    let sub = |rng: &mut _| random_temporal_formula(rng, space, depth - 1, allow_know);
    match rng.gen_range(0..9) {
        0 => TemporalFormula::lift(random_state_formula(rng, space, depth, allow_know)),
        1 => TemporalFormula::not(sub(rng)),
        2 => TemporalFormula::and(sub(rng), sub(rng)),
        3 => TemporalFormula::or(sub(rng), sub(rng)),
        4 => TemporalFormula::implies(sub(rng), sub(rng)),
        5 => TemporalFormula::next(sub(rng)),
        6 => TemporalFormula::until(sub(rng), sub(rng)),
        7 => TemporalFormula::eventually(sub(rng)),
        _ => TemporalFormula::henceforth(sub(rng)),
    }
}

/// All indistinguishability classes of one agent, as keys of canonical
/// representatives.
pub fn all_class_keys(space: &Space, agent: AgentId) -> Vec<influence::analysis::ClassKey> {
    let mut keys = Vec::new();
    for s in space.enumerate_states(1 << 24).unwrap() {
        let key = class_key(space, s, agent);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys
}

/// A uniformly random state-based strategy: an independent random action
/// for every indistinguishability class.
pub fn random_strategy(rng: &mut impl Rng, space: &Space, agent: AgentId) -> Strategy {
    let entries = all_class_keys(space, agent)
        .into_iter()
        .map(|key| (key, random_action(rng, space)))
        .collect();
    Strategy::Table { entries, default: Action::Skip }
}

pub fn random_profile(rng: &mut impl Rng, space: &Space) -> StrategyProfile {
    StrategyProfile::new(
        space.agents().map(|a| random_strategy(rng, space, a)).collect(),
    )
}

/// A random game over numeric names with trivial goals.
pub fn random_game(rng: &mut impl Rng, agents: usize, issues: usize) -> InfluenceGame {
    let space = Space::new(agents, issues).unwrap();
    let names = Names::numeric(&space);
    let net = random_network(rng, &space);
    let initial = random_state(rng, &space);
    let goals = (0..agents).map(|_| TemporalFormula::lift(StateFormula::True)).collect();
    InfluenceGame::new(names, net, Rules::unanimous(&space), initial, goals).unwrap()
}
