//! Exact evaluation: state formulas against a single state, temporal
//! formulas against the infinite unfolding of a lasso.

use crate::diffusion::Lasso;
use crate::logic::ast::{StateFormula, TemporalFormula};
use crate::model::{indistinguishability_class, Space, State};

/// Truth of a state formula at one state. `Know(i, a)` quantifies over the
/// whole indistinguishability class of the state for agent i.
pub fn eval_state(space: &Space, f: &StateFormula, s: State) -> bool {
    match f {
        StateFormula::True => true,
        StateFormula::False => false,
        StateFormula::Bel(a, p) => s.belief(space, *a, *p),
        StateFormula::Vis(a, p) => s.visible(space, *a, *p),
        StateFormula::Not(x) => !eval_state(space, x, s),
        StateFormula::And(x, y) => eval_state(space, x, s) && eval_state(space, y, s),
        StateFormula::Or(x, y) => eval_state(space, x, s) || eval_state(space, y, s),
        StateFormula::Know(i, x) => {
            indistinguishability_class(space, s, *i).all(|t| eval_state(space, x, t))
        }
    }
}

/// Truth of a temporal formula at position `k` of the infinite run the
/// lasso denotes. Positions at or beyond prefix+cycle fold into the cycle.
pub fn eval(space: &Space, f: &TemporalFormula, lasso: &Lasso, k: usize) -> bool {
    let states: Vec<State> = lasso.states().collect();
    let k = fold_position(k, lasso.prefix_len(), lasso.cycle_len());
    labels(space, f, &states, lasso.prefix_len())[k]
}

pub(crate) fn fold_position(k: usize, prefix: usize, cycle: usize) -> usize {
    if k < prefix + cycle {
        k
    } else {
        prefix + (k - prefix) % cycle
    }
}

/// Truth of `f` at position `k` of the run `states[0..cycle_start]` followed
/// by `states[cycle_start..]` repeated forever.
pub(crate) fn eval_states(
    space: &Space,
    f: &TemporalFormula,
    states: &[State],
    cycle_start: usize,
    k: usize,
) -> bool {
    let k = fold_position(k, cycle_start, states.len() - cycle_start);
    labels(space, f, states, cycle_start)[k]
}

/// Bottom-up labeling: the truth value of `f` at every stored position.
/// Until is solved on the cycle by scanning one full period (a witness
/// beyond one period would need the stem condition to survive a whole
/// period without one, which then repeats forever), then propagated
/// right-to-left through the prefix.
fn labels(space: &Space, f: &TemporalFormula, states: &[State], cycle_start: usize) -> Vec<bool> {
    let total = states.len();
    let cycle_len = total - cycle_start;
    debug_assert!(cycle_len > 0);
    let succ = |t: usize| if t + 1 < total { t + 1 } else { cycle_start };
    match f {
        TemporalFormula::State(a) => states.iter().map(|s| eval_state(space, a, *s)).collect(),
        TemporalFormula::Not(a) => {
            let mut v = labels(space, a, states, cycle_start);
            v.iter_mut().for_each(|b| *b = !*b);
            v
        }
        TemporalFormula::And(a, b) => {
            let va = labels(space, a, states, cycle_start);
            let vb = labels(space, b, states, cycle_start);
            va.into_iter().zip(vb).map(|(x, y)| x && y).collect()
        }
        TemporalFormula::Or(a, b) => {
            let va = labels(space, a, states, cycle_start);
            let vb = labels(space, b, states, cycle_start);
            va.into_iter().zip(vb).map(|(x, y)| x || y).collect()
        }
        TemporalFormula::Implies(a, b) => {
            let va = labels(space, a, states, cycle_start);
            let vb = labels(space, b, states, cycle_start);
            va.into_iter().zip(vb).map(|(x, y)| !x || y).collect()
        }
        TemporalFormula::Next(a) => {
            let va = labels(space, a, states, cycle_start);
            (0..total).map(|t| va[succ(t)]).collect()
        }
        TemporalFormula::Until(a, b) => {
            let va = labels(space, a, states, cycle_start);
            let vb = labels(space, b, states, cycle_start);
            let mut v = vec![false; total];
            for t in cycle_start..total {
                // One pass around the cycle visits every position; if the
                // stem survives a full period without a witness the same
                // period repeats forever.
                let mut holds = false;
                let mut pos = t;
                for _ in 0..cycle_len {
                    if vb[pos] {
                        holds = true;
                        break;
                    }
                    if !va[pos] {
                        break;
                    }
                    pos = succ(pos);
                }
                v[t] = holds;
            }
            for t in (0..cycle_start).rev() {
                v[t] = vb[t] || (va[t] && v[t + 1]);
            }
            v
        }
        TemporalFormula::Eventually(a) => {
            let va = labels(space, a, states, cycle_start);
            let mut v = vec![false; total];
            let in_cycle = va[cycle_start..].iter().any(|x| *x);
            for t in cycle_start..total {
                v[t] = in_cycle;
            }
            for t in (0..cycle_start).rev() {
                v[t] = va[t] || v[t + 1];
            }
            v
        }
        TemporalFormula::Henceforth(a) => {
            let va = labels(space, a, states, cycle_start);
            let mut v = vec![false; total];
            let in_cycle = va[cycle_start..].iter().all(|x| *x);
            for t in cycle_start..total {
                v[t] = in_cycle;
            }
            for t in (0..cycle_start).rev() {
                v[t] = va[t] && v[t + 1];
            }
            v
        }
    }
}
