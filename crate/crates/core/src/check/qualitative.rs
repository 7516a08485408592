//! Almost-sure winning for Max in turn-based stochastic parity games.
//!
//! Nodes are product states (owned by a player) and action nodes (random,
//! colored by the action's priority). A sub-arena keeps an action node only
//! together with all its successors and every state with at least one of
//! its action nodes. The recursion follows Zielonka's scheme with positive
//! attractors; every state ends up either almost-surely winning for Max or
//! winning with positive probability for Min, and a positional strategy for
//! the respective player is recorded.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::Player;
use crate::product::Product;

#[derive(Clone, Debug, Default)]
pub struct QualGame {
    pub owner: Vec<Player>,
    /// Action nodes of each state.
    pub actions: Vec<Vec<usize>>,
    pub color: Vec<u32>,
    /// Successor states of each action node.
    pub succ: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct QualSolution {
    pub max_wins: Vec<bool>,
    /// Action node chosen by the winner of each state (`usize::MAX` where
    /// the owner is not the winner).
    pub choice: Vec<usize>,
}

impl QualGame {
    pub fn add_state(&mut self, owner: Player) -> usize {
        self.owner.push(owner);
        self.actions.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn add_action(&mut self, state: usize, color: u32, succ: Vec<usize>) -> usize {
        self.color.push(color);
        self.succ.push(succ);
        let a = self.color.len() - 1;
        self.actions[state].push(a);
        a
    }

    pub fn num_states(&self) -> usize {
        self.owner.len()
    }
}

struct Solver<'a> {
    g: &'a QualGame,
    parent: Vec<usize>,
    /// Action nodes leading into each state.
    pred: Vec<Vec<usize>>,
    choice: Vec<usize>,
}

/// A region: flags over states and over action nodes.
#[derive(Clone)]
struct Region {
    states: Vec<bool>,
    acts: Vec<bool>,
}

impl<'a> Solver<'a> {
    /// Closes a state set into a sub-arena: keeps action nodes whose parent
    /// and successors are all present, then drops states left without one,
    /// until stable.
    fn arena(&self, states: &[bool]) -> Region {
        let mut s = states.to_vec();
        loop {
            let acts: Vec<bool> = (0..self.g.color.len()).map(|a| s[self.parent[a]] && self.g.succ[a].iter().all(|&t| s[t])).collect();
            let mut changed = false;
            for v in 0..s.len() {
                if s[v] && !self.g.actions[v].iter().any(|&a| acts[a]) {
                    s[v] = false;
                    changed = true;
                }
            }
            if !changed {
                return Region { states: s, acts };
            }
        }
    }

    /// Positive attractor for `side` inside `u`, seeded with the given
    /// states and action nodes. Records moves for `side`'s states.
    fn attractor(&mut self, u: &Region, seed_states: &[bool], seed_acts: &[bool], side: Player) -> Region {
        let ns = self.g.num_states();
        let na = self.g.color.len();
        let mut st = vec![false; ns];
        let mut ac = vec![false; na];
        let mut count: Vec<usize> = (0..ns).map(|v| self.g.actions[v].iter().filter(|&&a| u.acts[a]).count()).collect();
        let mut queue_s: Vec<usize> = Vec::new();
        let mut queue_a: Vec<usize> = Vec::new();
        for v in 0..ns {
            if u.states[v] && seed_states[v] {
                st[v] = true;
                queue_s.push(v);
            }
        }
        for a in 0..na {
            if u.acts[a] && seed_acts[a] {
                ac[a] = true;
                queue_a.push(a);
            }
        }
        while !queue_s.is_empty() || !queue_a.is_empty() {
            while let Some(a) = queue_a.pop() {
                let v = self.parent[a];
                if st[v] {
                    continue;
                }
                if self.g.owner[v] == side {
                    st[v] = true;
                    self.choice[v] = a;
                    queue_s.push(v);
                } else {
                    count[v] -= 1;
                    if count[v] == 0 {
                        st[v] = true;
                        queue_s.push(v);
                    }
                }
            }
            while let Some(v) = queue_s.pop() {
                for &a in &self.pred[v] {
                    if u.acts[a] && !ac[a] {
                        ac[a] = true;
                        queue_a.push(a);
                    }
                }
            }
        }
        Region { states: st, acts: ac }
    }

    /// Complement of an attractor: a trap for the attracting side, so every
    /// remaining action node keeps its successors inside.
    fn minus(&self, u: &Region, r: &Region) -> Region {
        let states: Vec<bool> = (0..u.states.len()).map(|v| u.states[v] && !r.states[v]).collect();
        let acts = (0..u.acts.len()).map(|a| u.acts[a] && !r.acts[a] && states[self.parent[a]]).collect();
        Region { states, acts }
    }

    /// Max's almost-sure region within the sub-arena `u`.
    fn solve(&mut self, u: &Region) -> Vec<bool> {
        let ns = self.g.num_states();
        let Some(d) = (0..self.g.color.len()).filter(|&a| u.acts[a]).map(|a| self.g.color[a]).max() else {
            return vec![false; ns];
        };
        let top: Vec<bool> = (0..self.g.color.len()).map(|a| u.acts[a] && self.g.color[a] == d).collect();
        let none = vec![false; ns];
        if d % 2 == 1 {
            let a = self.attractor(u, &none, &top, Player::Max);
            let sub = self.minus(u, &a);
            let x = self.solve(&sub);
            let lost: Vec<bool> = (0..ns).map(|v| sub.states[v] && !x[v]).collect();
            if !lost.iter().any(|&b| b) {
                return u.states.clone();
            }
            let b = self.attractor(u, &lost, &vec![false; self.g.color.len()], Player::Min);
            let rest = self.minus(u, &b);
            self.solve(&rest)
        } else {
            let a = self.attractor(u, &none, &top, Player::Min);
            let sub = self.minus(u, &a);
            let x = self.solve(&sub);
            if !x.iter().any(|&b| b) {
                return vec![false; ns];
            }
            let y = self.attractor(u, &x, &vec![false; self.g.color.len()], Player::Max);
            let u2 = self.minus(u, &y);
            let z = self.solve(&u2);
            let lost: Vec<bool> = (0..ns).map(|v| u2.states[v] && !z[v]).collect();
            if !lost.iter().any(|&b| b) {
                return u.states.clone();
            }
            let b = self.attractor(u, &lost, &vec![false; self.g.color.len()], Player::Min);
            let rest = self.minus(u, &b);
            self.solve(&rest)
        }
    }
}

/// Solves the almost-sure problem for Max on the whole game. Every state
/// needs at least one action node.
pub fn almost_sure(g: &QualGame) -> QualSolution {
    let ns = g.num_states();
    let mut parent = vec![0; g.color.len()];
    for (v, acts) in g.actions.iter().enumerate() {
        for &a in acts {
            parent[a] = v;
        }
    }
    let mut pred = vec![Vec::new(); ns];
    for (a, succ) in g.succ.iter().enumerate() {
        for &t in succ {
            pred[t].push(a);
        }
    }
    let mut solver = Solver { g, parent, pred, choice: vec![usize::MAX; ns] };
    let all = solver.arena(&vec![true; ns]);
    let max_wins = solver.solve(&all);
    let choice = (0..ns)
        .map(|v| {
            let mine = (g.owner[v] == Player::Max) == max_wins[v];
            if mine {
                solver.choice[v]
            } else {
                usize::MAX
            }
        })
        .collect();
    QualSolution { max_wins, choice }
}

/// One state per product state and one action node per action.
pub fn of_product(p: &Product) -> QualGame {
    let mut g = QualGame::default();
    for st in &p.states {
        g.add_state(st.owner);
    }
    for (s, st) in p.states.iter().enumerate() {
        for a in &st.actions {
            g.add_action(s, a.priority, a.successors.iter().map(|e| e.1).collect());
        }
    }
    g
}
