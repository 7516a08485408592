use alloc::vec::Vec;

use super::{linear, ChainValue, CheckError};
use crate::graph;
use crate::product::Product;

/// Value of a product in which every state has exactly one action. A bottom
/// SCC accepts when the largest priority on its edges is odd.
pub fn evaluate_markov_chain(p: &Product) -> Result<ChainValue, CheckError> {
    if let Some(s) = (0..p.len()).find(|&s| p.states[s].actions.len() != 1) {
        return Err(CheckError::NotAChain { state: s, actions: p.states[s].actions.len() });
    }
    let n = p.len();
    let row = |s: usize| &p.states[s].actions[0];
    let all = alloc::vec![true; n];
    let comps = graph::sccs(n, &all, |s| row(s).successors.iter().map(|e| e.1).collect::<Vec<_>>());
    let id = graph::component_ids(n, &comps);
    let mut target = alloc::vec![false; n];
    let mut bsccs = Vec::new();
    for (c, comp) in comps.iter().enumerate() {
        if comp.iter().any(|&s| row(s).successors.iter().any(|e| id[e.1] != c)) {
            continue;
        }
        let top = comp.iter().map(|&s| row(s).priority).max().unwrap_or(0);
        let accepting = top % 2 == 1;
        if accepting {
            for &s in comp {
                target[s] = true;
            }
        }
        bsccs.push((comp.clone(), accepting));
    }
    let rows: Vec<&[(f64, usize)]> = (0..n).map(|s| row(s).successors.as_slice()).collect();
    let values = linear::reach_probabilities(&rows, &target);
    Ok(ChainValue { initial: values[p.initial], values, bsccs })
}
