use alloc::vec;
use alloc::vec::Vec;

use super::Product;
use crate::graph;

/// A maximal end component: states with, for each, the actions that stay
/// inside. `actions[i]` belongs to `states[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mec {
    pub states: Vec<usize>,
    pub actions: Vec<Vec<usize>>,
}

impl Mec {
    pub fn contains(&self, s: usize) -> bool {
        self.states.binary_search(&s).is_ok()
    }
}

/// MECs of the product with every action available.
pub fn mec_decompose(p: &Product) -> Vec<Mec> {
    let mask: Vec<Vec<bool>> = p.states.iter().map(|s| vec![true; s.actions.len()]).collect();
    mecs_within(p, &mask)
}

/// MECs of the sub-MDP that only uses actions flagged in `mask`. States
/// with no flagged action are excluded.
pub fn mecs_within(p: &Product, mask: &[Vec<bool>]) -> Vec<Mec> {
    let n = p.len();
    let mut mask: Vec<Vec<bool>> = mask.to_vec();
    let mut alive: Vec<bool> = mask.iter().map(|m| m.iter().any(|&b| b)).collect();
    loop {
        let comps = graph::sccs(n, &alive, |s| {
            let mut out = Vec::new();
            for (a, act) in p.states[s].actions.iter().enumerate() {
                if mask[s][a] {
                    out.extend(act.successors.iter().map(|x| x.1).filter(|&t| alive[t]));
                }
            }
            out
        });
        let id = graph::component_ids(n, &comps);
        let mut changed = false;
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            for (a, act) in p.states[s].actions.iter().enumerate() {
                if mask[s][a] && act.successors.iter().any(|&(_, t)| !alive[t] || id[t] != id[s]) {
                    mask[s][a] = false;
                    changed = true;
                }
            }
            if !mask[s].iter().any(|&b| b) {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            return comps
                .into_iter()
                .filter(|c| alive[c[0]])
                .map(|c| {
                    let actions = c.iter().map(|&s| (0..mask[s].len()).filter(|&a| mask[s][a]).collect()).collect();
                    Mec { states: c, actions }
                })
                .collect();
        }
    }
}
