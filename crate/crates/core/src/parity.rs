//! Two-player parity games with colors on edges, solved by the classic
//! recursive algorithm (McNaughton, in Zielonka's formulation).
//!
//! Convention: the maximal color seen infinitely often decides the play;
//! `Even` wins when it is even.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Even,
    Odd,
}

impl Side {
    pub fn opponent(self) -> Side {
        match self {
            Side::Even => Side::Odd,
            Side::Odd => Side::Even,
        }
    }

    /// The side that likes `color` as the maximal recurring one.
    pub fn of_color(color: u32) -> Side {
        if color % 2 == 0 {
            Side::Even
        } else {
            Side::Odd
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Side>,
    /// Outgoing `(target, color)` pairs; every node needs at least one.
    pub edges: Vec<Vec<(usize, u32)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParitySolution {
    pub winner: Vec<Side>,
    /// Winning edge index for each node owned by the winner of that node.
    pub strategy: Vec<Option<usize>>,
}

impl ParityGame {
    pub fn add_node(&mut self, owner: Side) -> usize {
        self.owner.push(owner);
        self.edges.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, color: u32) {
        self.edges[from].push((to, color));
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn max_color(&self) -> u32 {
        self.edges.iter().flatten().map(|&(_, c)| c).max().unwrap_or(0)
    }
}

/// Vertex-colored arena: the game's nodes come first with color 0, then
/// one node per edge carrying that edge's color.
struct Arena {
    owner: Vec<Side>,
    color: Vec<u32>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Arena {
    fn new(g: &ParityGame) -> Arena {
        let n = g.len();
        let m: usize = g.edges.iter().map(Vec::len).sum();
        let mut owner = g.owner.clone();
        owner.resize(n + m, Side::Even);
        let mut color = vec![0; n + m];
        let mut succ = vec![Vec::new(); n + m];
        let mut pred = vec![Vec::new(); n + m];
        let mut next = n;
        for (v, es) in g.edges.iter().enumerate() {
            for &(t, c) in es {
                color[next] = c;
                succ[v].push(next);
                pred[next].push(v);
                succ[next].push(t);
                pred[t].push(next);
                next += 1;
            }
        }
        Arena { owner, color, succ, pred }
    }

    /// Attractor of `target` for `side` inside `alive`; fills `strat` for
    /// attracted nodes of `side`.
    fn attractor(&self, alive: &[bool], target: &[bool], side: Side, strat: &mut [usize]) -> Vec<bool> {
        let n = self.owner.len();
        let mut attr = vec![false; n];
        let mut count: Vec<usize> = (0..n).map(|v| if alive[v] { self.succ[v].iter().filter(|&&w| alive[w]).count() } else { 0 }).collect();
        let mut queue: Vec<usize> = Vec::new();
        for v in 0..n {
            if alive[v] && target[v] {
                attr[v] = true;
                queue.push(v);
            }
        }
        while let Some(w) = queue.pop() {
            for &v in &self.pred[w] {
                if !alive[v] || attr[v] {
                    continue;
                }
                if self.owner[v] == side {
                    attr[v] = true;
                    strat[v] = w;
                    queue.push(v);
                } else {
                    count[v] -= 1;
                    if count[v] == 0 {
                        attr[v] = true;
                        queue.push(v);
                    }
                }
            }
        }
        attr
    }

    /// Returns the winning set of `Even` within `alive`; `strat` receives
    /// a successor for every node owned by the winner of that node.
    fn solve(&self, alive: &[bool], strat: &mut [usize]) -> Vec<bool> {
        let n = self.owner.len();
        let Some(d) = (0..n).filter(|&v| alive[v]).map(|v| self.color[v]).max() else {
            return vec![false; n];
        };
        let p = Side::of_color(d);
        let top: Vec<bool> = (0..n).map(|v| alive[v] && self.color[v] == d).collect();
        let a = self.attractor(alive, &top, p, strat);
        let sub: Vec<bool> = (0..n).map(|v| alive[v] && !a[v]).collect();
        let even_sub = self.solve(&sub, strat);
        let opp_sub: Vec<bool> = (0..n).map(|v| sub[v] && even_sub[v] == (p.opponent() == Side::Even)).collect();
        if !opp_sub.iter().any(|&b| b) {
            for v in 0..n {
                if top[v] && self.owner[v] == p {
                    strat[v] = *self.succ[v].iter().find(|&&w| alive[w]).expect("dead end in subgame");
                }
            }
            return if p == Side::Even { alive.to_vec() } else { vec![false; n] };
        }
        let b = self.attractor(alive, &opp_sub, p.opponent(), strat);
        let rest: Vec<bool> = (0..n).map(|v| alive[v] && !b[v]).collect();
        let even_rest = self.solve(&rest, strat);
        (0..n).map(|v| alive[v] && if b[v] { p.opponent() == Side::Even } else { even_rest[v] }).collect()
    }
}

/// Solves the game; requires every node to have an outgoing edge.
pub fn solve(game: &ParityGame) -> ParitySolution {
    assert!(game.edges.iter().all(|e| !e.is_empty()), "parity game has a dead end");
    let arena = Arena::new(game);
    let total = arena.owner.len();
    let mut strat = vec![usize::MAX; total];
    let even = arena.solve(&vec![true; total], &mut strat);
    let n = game.len();
    let winner: Vec<Side> = (0..n).map(|v| if even[v] { Side::Even } else { Side::Odd }).collect();
    let strategy = (0..n)
        .map(|v| {
            if game.owner[v] != winner[v] {
                return None;
            }
            arena.succ[v].iter().position(|&e| e == strat[v])
        })
        .collect();
    ParitySolution { winner, strategy }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_even_loop() {
        let mut g = ParityGame::default();
        let v = g.add_node(Side::Odd);
        g.add_edge(v, v, 2);
        let s = solve(&g);
        assert_eq!(s.winner, [Side::Even]);
    }

    #[test]
    fn odd_escapes_to_its_loop() {
        let mut g = ParityGame::default();
        let a = g.add_node(Side::Odd);
        let b = g.add_node(Side::Even);
        g.add_edge(a, a, 2);
        g.add_edge(a, b, 0);
        g.add_edge(b, b, 1);
        let s = solve(&g);
        assert_eq!(s.winner, [Side::Odd, Side::Odd]);
        assert_eq!(s.strategy[a], Some(1));
    }
}
