use alloc::vec;
use alloc::vec::Vec;

use super::{linear, CheckError, ValueVector};
use crate::graph;
use crate::model::{Player, Strategy};
use crate::product::{mecs_within, ActionKind, Product};

const VI_TOLERANCE: f64 = 1e-9;
const VI_MAX_SWEEPS: usize = 100_000;
const IMPROVE_EPS: f64 = 1e-12;

/// An end component in which the largest priority `top` is odd, with a
/// positional strategy that stays inside and takes a `top` action
/// infinitely often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningMec {
    pub states: Vec<usize>,
    pub top: u32,
    /// Action of `states[i]`.
    pub choice: Vec<usize>,
}

/// Winning end components by priority peeling. Every state is treated as
/// controlled by one player.
pub fn winning_mecs(p: &Product) -> Vec<WinningMec> {
    let full: Vec<Vec<bool>> = p.states.iter().map(|s| vec![true; s.actions.len()]).collect();
    let mut out = Vec::new();
    for m in mecs_within(p, &full) {
        let mut mask: Vec<Vec<bool>> = p.states.iter().map(|s| vec![false; s.actions.len()]).collect();
        for (i, &s) in m.states.iter().enumerate() {
            for &a in &m.actions[i] {
                mask[s][a] = true;
            }
        }
        peel(p, &m.states, mask, &mut out);
    }
    out.sort_by(|a, b| a.states.cmp(&b.states));
    out
}

fn peel(p: &Product, states: &[usize], mut mask: Vec<Vec<bool>>, out: &mut Vec<WinningMec>) {
    let prio = |s: usize, a: usize| p.states[s].actions[a].priority;
    let mut top = None;
    for &s in states {
        for a in (0..mask[s].len()).filter(|&a| mask[s][a]) {
            top = top.max(Some(prio(s, a)));
        }
    }
    let Some(top) = top else { return };
    if top % 2 == 1 {
        out.push(WinningMec { states: states.to_vec(), top, choice: sweep(p, states, &mask, top) });
        return;
    }
    for &s in states {
        for a in 0..mask[s].len() {
            if mask[s][a] && prio(s, a) == top {
                mask[s][a] = false;
            }
        }
    }
    for m in mecs_within(p, &mask) {
        let mut sub: Vec<Vec<bool>> = p.states.iter().map(|s| vec![false; s.actions.len()]).collect();
        for (i, &s) in m.states.iter().enumerate() {
            for &a in &m.actions[i] {
                sub[s][a] = true;
            }
        }
        peel(p, &m.states, sub, out);
    }
}

/// States owning a `top` action take the lowest such; the others move
/// towards them layer by layer.
fn sweep(p: &Product, states: &[usize], mask: &[Vec<bool>], top: u32) -> Vec<usize> {
    let n = p.len();
    let mut choice = vec![usize::MAX; n];
    let mut done = vec![false; n];
    for &s in states {
        if let Some(a) = (0..mask[s].len()).find(|&a| mask[s][a] && p.states[s].actions[a].priority == top) {
            choice[s] = a;
            done[s] = true;
        }
    }
    loop {
        let snapshot = done.clone();
        let mut grew = false;
        for &s in states {
            if done[s] {
                continue;
            }
            if let Some(a) = (0..mask[s].len()).find(|&a| mask[s][a] && p.states[s].actions[a].successors.iter().any(|e| snapshot[e.1])) {
                choice[s] = a;
                done[s] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    states.iter().map(|&s| choice[s]).collect()
}

fn q_value(p: &Product, x: &[f64], s: usize, a: usize) -> f64 {
    p.states[s].actions[a].successors.iter().map(|&(pr, t)| pr * x[t]).sum()
}

fn evaluate(p: &Product, choice: &[usize], target: &[bool]) -> Vec<f64> {
    let rows: Vec<&[(f64, usize)]> = (0..p.len()).map(|s| p.states[s].actions[choice[s]].successors.as_slice()).collect();
    linear::reach_probabilities(&rows, target)
}

/// One Gauss-Seidel sweep of the Bellman update over `open`; returns the
/// largest change.
fn vi_sweep(p: &Product, open: &[usize], x: &mut [f64]) -> f64 {
    let mut delta: f64 = 0.0;
    for &s in open {
        let best = (0..p.states[s].actions.len()).map(|a| q_value(p, x, s, a)).fold(0.0, f64::max);
        delta = delta.max(best - x[s]);
        x[s] = best;
    }
    delta
}

/// Maximal probability of the parity objective when every state is
/// controlled by the maximizer, with a strategy attaining it.
pub(crate) fn max_parity(p: &Product) -> (Vec<f64>, Vec<usize>) {
    let n = p.len();
    let mut target = vec![false; n];
    let mut choice = vec![0usize; n];
    for w in winning_mecs(p) {
        for (i, &s) in w.states.iter().enumerate() {
            target[s] = true;
            choice[s] = w.choice[i];
        }
    }

    let mut pred = vec![Vec::new(); n];
    for (s, st) in p.states.iter().enumerate() {
        for a in &st.actions {
            for &(_, t) in &a.successors {
                pred[t].push(s);
            }
        }
    }
    let start: Vec<usize> = (0..n).filter(|&s| target[s]).collect();
    let positive = graph::reachable(n, &start, |s| pred[s].clone());
    let open: Vec<usize> = (0..n).filter(|&s| positive[s] && !target[s]).collect();

    // value iteration from below
    let mut x: Vec<f64> = target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    for _ in 0..VI_MAX_SWEEPS {
        if vi_sweep(p, &open, &mut x) < VI_TOLERANCE {
            break;
        }
    }

    // near-optimal actions that make progress towards the target
    let mut done = target.clone();
    let mut layer_found = true;
    while layer_found {
        layer_found = false;
        let snapshot = done.clone();
        for &s in &open {
            if done[s] {
                continue;
            }
            let best = (0..p.states[s].actions.len()).map(|a| q_value(p, &x, s, a)).fold(0.0, f64::max);
            let good = (0..p.states[s].actions.len())
                .find(|&a| q_value(p, &x, s, a) >= best - 1e-8 && p.states[s].actions[a].successors.iter().any(|e| snapshot[e.1]));
            if let Some(a) = good {
                choice[s] = a;
                done[s] = true;
                layer_found = true;
            }
        }
    }
    for &s in &open {
        if !done[s] {
            // only reachable through actions VI did not rate optimal
            choice[s] = (0..p.states[s].actions.len()).find(|&a| p.states[s].actions[a].successors.iter().any(|e| done[e.1])).unwrap_or(0);
            done[s] = true;
        }
    }

    // policy improvement with exact evaluation
    let mut v = evaluate(p, &choice, &target);
    loop {
        let mut changed = false;
        for &s in &open {
            let best = (0..p.states[s].actions.len()).map(|a| q_value(p, &v, s, a)).fold(0.0, f64::max);
            if best > v[s] + IMPROVE_EPS && q_value(p, &v, s, choice[s]) < best - IMPROVE_EPS {
                choice[s] = (0..p.states[s].actions.len()).find(|&a| q_value(p, &v, s, a) >= best - IMPROVE_EPS).unwrap_or(choice[s]);
                changed = true;
            }
        }
        if !changed {
            break;
        }
        v = evaluate(p, &choice, &target);
    }
    (v, choice)
}

/// Whether taking `a` in `s` moves the automaton to another state on a
/// non-accepting edge, or into the sink.
fn regresses(p: &Product, s: usize, a: usize) -> bool {
    let act = &p.states[s].actions[a];
    match (act.kind, p.states[s].pair) {
        (ActionKind::Model { edge: None, .. }, _) => true,
        (ActionKind::Model { .. } | ActionKind::Jump { .. }, Some((_, q))) => {
            act.priority % 2 == 0 && act.successors.iter().any(|&(_, t)| p.states[t].pair.is_some_and(|(_, r)| r != q))
        }
        _ => false,
    }
}

/// Tie-break among optimal actions: where possible, keep the run away from
/// non-accepting automaton moves for good. Falls back to `choice` when the
/// refined strategy would lose value anywhere.
fn prefer_steady(p: &Product, v: &[f64], choice: &[usize], target: &[bool]) -> Vec<usize> {
    let n = p.len();
    let open: Vec<bool> = (0..n).map(|s| !target[s] && v[s] > 0.0).collect();
    let optimal = |s: usize, a: usize| q_value(p, v, s, a) >= v[s] - 1e-9;
    let steady = |s: usize, a: usize| optimal(s, a) && !regresses(p, s, a);
    // greatest set of open states that can stay steady forever
    let mut safe = open.clone();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !safe[s] {
                continue;
            }
            let ok = (0..p.states[s].actions.len()).any(|a| steady(s, a) && p.states[s].actions[a].successors.iter().all(|e| safe[e.1] || !open[e.1]));
            if !ok {
                safe[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // within it, move towards the states that are already settled
    let mut refined = choice.to_vec();
    let mut done: Vec<bool> = (0..n).map(|s| !safe[s]).collect();
    loop {
        let snapshot = done.clone();
        let mut grew = false;
        for s in 0..n {
            if done[s] {
                continue;
            }
            let pick = (0..p.states[s].actions.len()).find(|&a| {
                let succ = &p.states[s].actions[a].successors;
                steady(s, a) && succ.iter().all(|e| safe[e.1] || !open[e.1]) && succ.iter().any(|e| snapshot[e.1])
            });
            if let Some(a) = pick {
                refined[s] = a;
                done[s] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let w = evaluate(p, &refined, target);
    if (0..n).all(|s| w[s] >= v[s] - 1e-9) {
        refined
    } else {
        choice.to_vec()
    }
}

/// Maximal satisfaction probability on a product with no Min states.
pub fn solve_mdp_parity(p: &Product) -> Result<ValueVector, CheckError> {
    if let Some(s) = (0..p.len()).find(|&s| p.states[s].owner == Player::Min) {
        return Err(CheckError::MinState(s));
    }
    let (values, choice) = max_parity(p);
    let mut target = vec![false; p.len()];
    for w in winning_mecs(p) {
        for &s in &w.states {
            target[s] = true;
        }
    }
    let choice = prefer_steady(p, &values, &choice, &target);
    Ok(ValueVector {
        values,
        max_strategy: Strategy::new(Player::Max, choice.into_iter().map(Some).collect()),
        min_strategy: Strategy::new(Player::Min, vec![None; p.len()]),
        iterations: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::{ProductAction, ProductState};
    use proptest::prelude::{prop, prop_assert, proptest};
    use proptest::strategy::Strategy as Gen;

    fn arb_product() -> impl Gen<Value = Product> {
        (1usize..8).prop_flat_map(|n| {
            let action = (prop::collection::vec((1u32..4, 0..n), 1..4), 0u32..4);
            prop::collection::vec(prop::collection::vec(action, 1..4), n).prop_map(|rows| {
                let states = rows
                    .into_iter()
                    .map(|acts| ProductState {
                        pair: None,
                        owner: Player::Max,
                        actions: acts
                            .into_iter()
                            .map(|(succ, priority)| {
                                let total: u32 = succ.iter().map(|e| e.0).sum();
                                let mut successors: Vec<(f64, usize)> = Vec::new();
                                for (w, t) in succ {
                                    match successors.iter_mut().find(|e| e.1 == t) {
                                        Some(e) => e.0 += w as f64 / total as f64,
                                        None => successors.push((w as f64 / total as f64, t)),
                                    }
                                }
                                ProductAction { name: "a".into(), kind: ActionKind::Sink, priority, successors }
                            })
                            .collect(),
                    })
                    .collect();
                Product::from_parts(states, 0).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn value_iteration_climbs_from_zero(p in arb_product()) {
            let mut target = vec![false; p.len()];
            for w in winning_mecs(&p) {
                for &s in &w.states {
                    target[s] = true;
                }
            }
            let open: Vec<usize> = (0..p.len()).filter(|&s| !target[s]).collect();
            let mut x: Vec<f64> = target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
            for _ in 0..50 {
                let before = x.clone();
                vi_sweep(&p, &open, &mut x);
                prop_assert!(x.iter().zip(&before).all(|(a, b)| a >= b && *a <= 1.0 + 1e-12));
            }
        }
    }
}
