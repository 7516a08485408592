use alloc::vec;
use alloc::vec::Vec;

use super::mdp::max_parity;
use super::qualitative::{almost_sure, QualGame};
use super::{CheckError, ValueVector};
use crate::model::{Player, Strategy};
use crate::product::Product;

const SWITCH_EPS: f64 = 1e-12;
/// Width of a value class in the qualitative step.
const TIGHT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameOptions {
    pub max_iterations: usize,
    /// Largest accepted gap between the value Max can force and the value
    /// Min can hold it to.
    pub tolerance: f64,
}

impl Default for GameOptions {
    fn default() -> Self {
        GameOptions { max_iterations: 10_000, tolerance: 1e-9 }
    }
}

/// Fixes `player`'s choices and, when `co` is set, shifts every priority by
/// one so that the other player's objective becomes the parity objective.
fn fixed(p: &Product, player: Player, choice: &[usize], co: bool) -> Product {
    let sigma = Strategy::new(player, choice.iter().map(|&a| Some(a)).collect());
    let mut q = p.restrict(&[&sigma]).expect("choices cover every state");
    for st in &mut q.states {
        st.owner = Player::Max;
        if co {
            for a in &mut st.actions {
                a.priority += 1;
            }
        }
    }
    q
}

fn q_value(p: &Product, v: &[f64], s: usize, a: usize) -> f64 {
    p.states[s].actions[a].successors.iter().map(|&(pr, t)| pr * v[t]).sum()
}

/// Outcome of the qualitative step on the Bellman-tight game, where random
/// moves leaving the current value class count as a win for Max.
struct Qualitative {
    /// Min states with positive value where Min can stay in the class and
    /// win with positive probability, with the tight action that does it.
    switches: Vec<(usize, usize)>,
    /// Tight almost-sure winning action of Max states with positive value.
    max_choice: Vec<Option<usize>>,
}

fn qualitative(p: &Product, v: &[f64]) -> Qualitative {
    let n = p.len();
    let mut g = QualGame::default();
    for st in &p.states {
        g.add_state(st.owner);
    }
    let sink = g.add_state(Player::Max);
    g.add_action(sink, 1, vec![sink]);
    let mut origin: Vec<(usize, usize)> = vec![(sink, 0)];
    for s in 0..n {
        for (a, act) in p.states[s].actions.iter().enumerate() {
            if (q_value(p, v, s, a) - v[s]).abs() > TIGHT {
                continue;
            }
            let mut succ: Vec<usize> = act.successors.iter().map(|&(_, t)| if (v[t] - v[s]).abs() > TIGHT { sink } else { t }).collect();
            succ.sort_unstable();
            succ.dedup();
            g.add_action(s, act.priority, succ);
            origin.push((s, a));
        }
    }
    let sol = almost_sure(&g);
    let positive = |s: usize| v[s] > TIGHT;
    Qualitative {
        switches: (0..n)
            .filter(|&s| p.states[s].owner == Player::Min && !sol.max_wins[s] && positive(s))
            .map(|s| (s, origin[sol.choice[s]].1))
            .collect(),
        max_choice: (0..n)
            .map(|s| (p.states[s].owner == Player::Max && sol.max_wins[s] && positive(s)).then(|| origin[sol.choice[s]].1))
            .collect(),
    }
}

/// Strategy improvement for Min. Each round solves the MDP left after fixing
/// Min's choices, which bounds the value from above; fixing a Max strategy
/// and solving the co-parity MDP bounds it from below, and the loop stops
/// once the bounds agree. Min switches wherever an action is strictly better
/// against the upper values. When none is, it switches on the states where
/// it can stay in the current value class and win with positive
/// probability; if there are none, Max's tight almost-sure strategy is
/// optimal.
pub fn solve_game_parity(p: &Product, opts: &GameOptions) -> Result<ValueVector, CheckError> {
    let n = p.len();
    let is_min: Vec<bool> = p.states.iter().map(|s| s.owner == Player::Min).collect();
    let mut nu: Vec<usize> = vec![0; n];
    let done = |upper: Vec<f64>, sigma: &[usize], nu: &[usize], round: usize| -> Option<ValueVector> {
        let (co, _) = max_parity(&fixed(p, Player::Max, sigma, true));
        let gap = (0..n).map(|s| upper[s] - (1.0 - co[s])).fold(0.0, f64::max);
        (gap <= opts.tolerance).then(|| ValueVector {
            values: upper,
            max_strategy: Strategy::new(Player::Max, (0..n).map(|s| (!is_min[s]).then_some(sigma[s])).collect()),
            min_strategy: Strategy::new(Player::Min, (0..n).map(|s| is_min[s].then_some(nu[s])).collect()),
            iterations: round,
        })
    };
    for round in 1..=opts.max_iterations {
        let (upper, sigma_restricted) = max_parity(&fixed(p, Player::Min, &nu, false));
        // indices are unchanged on Max states, which keep their whole menu
        let mut sigma: Vec<usize> = (0..n).map(|s| if is_min[s] { 0 } else { sigma_restricted[s] }).collect();
        if let Some(v) = done(upper.clone(), &sigma, &nu, round) {
            return Ok(v);
        }
        let mut changed = false;
        for s in (0..n).filter(|&s| is_min[s]) {
            let k = p.states[s].actions.len();
            let best = (0..k).map(|a| q_value(p, &upper, s, a)).fold(f64::INFINITY, f64::min);
            if best < q_value(p, &upper, s, nu[s]) - SWITCH_EPS {
                nu[s] = (0..k).find(|&a| q_value(p, &upper, s, a) <= best + SWITCH_EPS).unwrap_or(nu[s]);
                changed = true;
            }
        }
        if changed {
            continue;
        }
        let q = qualitative(p, &upper);
        for &(s, a) in &q.switches {
            changed |= nu[s] != a;
            nu[s] = a;
        }
        if changed {
            continue;
        }
        for s in 0..n {
            if let Some(a) = q.max_choice[s] {
                sigma[s] = a;
            }
        }
        return done(upper, &sigma, &nu, round).ok_or(CheckError::NoConvergence { iterations: round });
    }
    Err(CheckError::NoConvergence { iterations: opts.max_iterations })
}
