//! Limit-deterministic Büchi automata: construction from an NBA,
//! minimization passes and a simulation-based GFM certificate.

mod construct;
mod minimize;
mod simulation;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use construct::nba_to_sldba;
pub use minimize::{language_inclusion, minimize_sldba, MinimizePass};
pub use simulation::{build_simulation_game, certify, Certificate, Position, SimulationGame};

use crate::automaton::{AcceptanceKind, AutState, Automaton, Edge, EpsilonEdge, Guard, Valuation};

/// An automaton split into a nondeterministic-by-ε initial part and a
/// deterministic final part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sldba {
    pub aut: Automaton,
    pub is_final: Vec<bool>,
}

impl Sldba {
    pub fn len(&self) -> usize {
        self.aut.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aut.is_empty()
    }

    pub fn final_count(&self) -> usize {
        self.is_final.iter().filter(|f| **f).count()
    }

    /// Checks the structural invariants; returns a description of the
    /// first violation.
    pub fn check(&self) -> Result<(), String> {
        for (s, st) in self.aut.states.iter().enumerate() {
            if !self.aut.is_edge_deterministic(s) {
                return Err(format!("state {s} has overlapping guards"));
            }
            for e in &st.epsilon {
                if self.is_final[s] || !self.is_final[e.target] {
                    return Err(format!("ε-edge {s} -> {} does not go from the initial to the final part", e.target));
                }
            }
            for e in &st.edges {
                if self.is_final[s] && !self.is_final[e.target] {
                    return Err(format!("final state {s} leaves the final part"));
                }
                if e.priority > 0 && !self.is_final[s] {
                    return Err(format!("accepting edge in the initial part at state {s}"));
                }
            }
        }
        Ok(())
    }
}

/// Dense transition tables, one entry per valuation. Every state of an
/// SLDBA is deterministic on letters, so one `(target, priority)` per
/// valuation suffices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Table {
    pub n_aps: usize,
    pub names: Vec<Option<String>>,
    pub is_final: Vec<bool>,
    pub initial: usize,
    pub trans: Vec<Vec<Option<(usize, u32)>>>,
    pub eps: Vec<Vec<usize>>,
}

impl Table {
    pub fn from_sldba(s: &Sldba) -> Table {
        let n_aps = s.aut.num_aps();
        let trans = s
            .aut
            .states
            .iter()
            .map(|st| {
                (0..1u32 << n_aps)
                    .map(|v| st.edges.iter().find(|e| e.guard.eval(v)).map(|e| (e.target, e.priority)))
                    .collect()
            })
            .collect();
        Table {
            n_aps,
            names: s.aut.states.iter().map(|st| st.name.clone()).collect(),
            is_final: s.is_final.clone(),
            initial: s.aut.initial,
            trans,
            eps: s.aut.states.iter().map(|st| st.epsilon.iter().map(|e| e.target).collect()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.trans.len()
    }

    pub fn to_sldba(&self, ap_names: &[String]) -> Sldba {
        let states = (0..self.len())
            .map(|s| AutState { name: self.names[s].clone(), edges: edges_from_row(self.n_aps, &self.trans[s]), epsilon: self.eps[s].iter().map(|&t| EpsilonEdge { target: t, priority: 0 }).collect() })
            .collect();
        Sldba {
            aut: Automaton {
                name: None,
                ap_names: ap_names.to_vec(),
                initial: self.initial,
                states,
                acceptance: AcceptanceKind::Buchi { set: 0 },
                num_sets: 1,
            },
            is_final: self.is_final.clone(),
        }
    }

    pub fn reachable(&self) -> Vec<bool> {
        crate::graph::reachable(self.len(), &[self.initial], |s| {
            self.trans[s].iter().flatten().map(|&(t, _)| t).chain(self.eps[s].iter().copied()).collect::<Vec<_>>()
        })
    }

    /// Keeps flagged states, renumbering and dropping transitions into
    /// removed states.
    pub fn retain(&self, keep: &[bool]) -> Table {
        let mut map = vec![usize::MAX; self.len()];
        let mut next = 0;
        for s in 0..self.len() {
            if keep[s] {
                map[s] = next;
                next += 1;
            }
        }
        let pick = |s: usize| keep[s];
        Table {
            n_aps: self.n_aps,
            names: (0..self.len()).filter(|&s| pick(s)).map(|s| self.names[s].clone()).collect(),
            is_final: (0..self.len()).filter(|&s| pick(s)).map(|s| self.is_final[s]).collect(),
            initial: map[self.initial],
            trans: (0..self.len())
                .filter(|&s| pick(s))
                .map(|s| self.trans[s].iter().map(|x| x.filter(|&(t, _)| keep[t]).map(|(t, p)| (map[t], p))).collect())
                .collect(),
            eps: (0..self.len())
                .filter(|&s| pick(s))
                .map(|s| {
                    let mut e: Vec<usize> = self.eps[s].iter().filter(|&&t| keep[t]).map(|&t| map[t]).collect();
                    e.sort_unstable();
                    e.dedup();
                    e
                })
                .collect(),
        }
    }

    pub fn prune(&self) -> Table {
        self.retain(&self.reachable())
    }

    /// Redirects every transition according to `rep` and drops states that
    /// are not their own representative.
    pub fn quotient(&self, rep: &[usize]) -> Table {
        let mut t = self.clone();
        for row in &mut t.trans {
            for x in row.iter_mut().flatten() {
                x.0 = rep[x.0];
            }
        }
        for e in &mut t.eps {
            for x in e.iter_mut() {
                *x = rep[*x];
            }
            e.sort_unstable();
            e.dedup();
        }
        t.initial = rep[t.initial];
        let keep: Vec<bool> = (0..t.len()).map(|s| rep[s] == s).collect();
        t.retain(&keep)
    }
}

/// Groups a per-valuation row into guarded edges, ordered by target then
/// priority.
pub(crate) fn edges_from_row(n_aps: usize, row: &[Option<(usize, u32)>]) -> Vec<Edge> {
    let mut groups: BTreeMap<(usize, u32), Vec<Valuation>> = BTreeMap::new();
    for (v, x) in row.iter().enumerate() {
        if let Some(key) = x {
            groups.entry(*key).or_default().push(v as Valuation);
        }
    }
    groups
        .into_iter()
        .map(|((target, priority), vals)| Edge {
            guard: Guard::from_valuations(n_aps, &vals),
            target,
            priority,
            marks: if priority == 1 { vec![0] } else { Vec::new() },
        })
        .collect()
}
