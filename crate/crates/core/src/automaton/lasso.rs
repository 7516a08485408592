//! Membership of ultimately periodic words `u v^ω`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{Automaton, Valuation};
use crate::graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<Valuation>,
    /// Repeated forever; never empty.
    pub cycle: Vec<Valuation>,
}

impl Lasso {
    pub fn new(prefix: Vec<Valuation>, cycle: Vec<Valuation>) -> Lasso {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { prefix, cycle }
    }

    /// Prefix length in `0..=max_len`, cycle length in `1..=max_len`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, num_aps: usize, max_len: usize) -> Lasso {
        let letter = |rng: &mut R| rng.random_range(0..1u32 << num_aps);
        let u = rng.random_range(0..=max_len);
        let v = rng.random_range(1..=max_len);
        let prefix = (0..u).map(|_| letter(rng)).collect();
        let cycle = (0..v).map(|_| letter(rng)).collect();
        Lasso { prefix, cycle }
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letter(&self, i: usize) -> Valuation {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[i - self.prefix.len()]
        }
    }

    pub fn next_pos(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Whether some run of `aut` on the lasso has an odd maximal recurring
/// priority. Handles nondeterminism and ε-edges; ε-edges must not form
/// cycles on their own (true for every automaton built here).
pub fn accepts(aut: &Automaton, w: &Lasso) -> bool {
    let l = w.len();
    let n = aut.len() * l;
    // edges of the configuration graph: (target, priority)
    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    for (q, st) in aut.states.iter().enumerate() {
        for i in 0..l {
            let v = w.letter(i);
            let j = w.next_pos(i);
            let node = &mut adj[q * l + i];
            for e in st.edges.iter().filter(|e| e.guard.eval(v)) {
                node.push((e.target * l + j, e.priority));
            }
            for e in &st.epsilon {
                node.push((e.target * l + i, e.priority));
            }
        }
    }
    let reach = graph::reachable(n, &[aut.initial * l], |x| adj[x].iter().map(|&(t, _)| t).collect::<Vec<_>>());
    let max = adj.iter().flatten().map(|&(_, p)| p).max().unwrap_or(0);
    let mut d = if max % 2 == 1 { max } else { max.saturating_sub(1) };
    while d % 2 == 1 {
        let comps = graph::sccs(n, &reach, |x| adj[x].iter().filter(|&&(_, p)| p <= d).map(|&(t, _)| t).collect::<Vec<_>>());
        let id = graph::component_ids(n, &comps);
        let found = (0..n).filter(|&x| reach[x]).any(|x| adj[x].iter().any(|&(t, p)| p == d && id[t] == id[x]));
        if found {
            return true;
        }
        if d < 2 {
            break;
        }
        d -= 2;
    }
    false
}
