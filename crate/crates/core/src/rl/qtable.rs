use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::env::StateKey;
use crate::model::{Player, Strategy};
use crate::product::Product;

/// Action values per visited product state, indexed like the state's menu.
/// Double Q-learning keeps two tables; their mean is the combined estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    pub tables: Vec<BTreeMap<StateKey, Vec<f64>>>,
}

impl QTable {
    pub fn new(double: bool) -> QTable {
        QTable { tables: vec![BTreeMap::new(); if double { 2 } else { 1 }] }
    }

    pub fn is_double(&self) -> bool {
        self.tables.len() == 2
    }

    /// Number of states with entries.
    pub fn len(&self) -> usize {
        self.tables[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables[0].is_empty()
    }

    /// Adds zero entries for a state with `n` actions if it has none.
    pub fn ensure(&mut self, k: StateKey, n: usize) {
        for t in &mut self.tables {
            t.entry(k).or_insert_with(|| vec![0.0; n]);
        }
    }

    pub fn combined(&self, k: StateKey) -> Option<Vec<f64>> {
        let first = self.tables[0].get(&k)?;
        let mut out = first.clone();
        for t in &self.tables[1..] {
            for (o, x) in out.iter_mut().zip(&t[&k]) {
                *o += x;
            }
        }
        let w = self.tables.len() as f64;
        out.iter_mut().for_each(|x| *x /= w);
        Some(out)
    }

    /// Greedy action: argmax for Max, argmin for Min, lowest index on ties.
    /// Unvisited states pick action 0.
    pub fn greedy(&self, k: StateKey, owner: Player) -> usize {
        self.combined(k).map_or(0, |row| best_index(&row, owner))
    }

    /// Greedy strategies of both players over an explicit product whose
    /// action order matches the environment menus.
    pub fn strategies(&self, p: &Product) -> (Strategy, Strategy) {
        let pick = |player: Player| {
            let choices = p.states.iter().map(|st| (st.owner == player).then(|| self.greedy(st.pair, player).min(st.actions.len() - 1))).collect();
            Strategy::new(player, choices)
        };
        (pick(Player::Max), pick(Player::Min))
    }
}

pub fn best_index(row: &[f64], owner: Player) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate().skip(1) {
        let better = match owner {
            Player::Max => x > row[best],
            Player::Min => x < row[best],
        };
        if better {
            best = i;
        }
    }
    best
}

/// All indices attaining the best value.
pub fn best_indices(row: &[f64], owner: Player) -> Vec<usize> {
    let b = row[best_index(row, owner)];
    (0..row.len()).filter(|&i| row[i] == b).collect()
}
