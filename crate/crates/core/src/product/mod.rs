//! Synchronous product of a model and a parity automaton, plus end-component
//! analysis.
//!
//! The automaton reads the label of the state being left: a product state
//! `(m, q)` means the run is in `m` and the automaton is in `q` before
//! reading `L(m)`. An action pairs a model action with one automaton edge
//! enabled on `L(m)`, so the choice of edge is made together with the move
//! and before the random outcome. ε-edges become extra jump actions that
//! keep `m`. A letter with no enabled edge leads to an absorbing rejecting
//! sink.

mod mec;

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use mec::{mec_decompose, mecs_within, Mec};

use crate::automaton::{Automaton, Valuation};
use crate::model::{Model, ModelKind, Player, Strategy};

pub const SINK_ACTION: &str = "sink";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionKind {
    /// Model action `action` combined with automaton edge `edge` (`None`
    /// when no edge reads the letter).
    Model { action: usize, edge: Option<usize> },
    /// ε-edge of the automaton to `target`.
    Jump { target: usize },
    /// The self-loop of the rejecting sink.
    Sink,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductAction {
    pub name: String,
    pub kind: ActionKind,
    pub priority: u32,
    pub successors: Vec<(f64, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    /// `(model state, automaton state)`, `None` for the sink.
    pub pair: Option<(usize, usize)>,
    pub owner: Player,
    pub actions: Vec<ProductAction>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Product {
    pub states: Vec<ProductState>,
    pub initial: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductError {
    NondeterministicAutomatonOnGame,
    /// Nondeterminism is only supported for Büchi automata on MDPs.
    NondeterministicNonBuchi,
    UnknownProposition(String),
    /// A synthetic product violated an invariant.
    Invalid(String),
}

impl fmt::Display for ProductError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductError::NondeterministicAutomatonOnGame => f.write_str("games need a deterministic automaton"),
            ProductError::NondeterministicNonBuchi => f.write_str("a nondeterministic automaton must have Büchi acceptance"),
            ProductError::UnknownProposition(p) => write!(f, "automaton proposition {p:?} is not a model label"),
            ProductError::Invalid(msg) => write!(f, "invalid product: {msg}"),
        }
    }
}

impl core::error::Error for ProductError {}

/// One option available in a product state before the model's random
/// outcome is known. `next_q` is `None` when the run falls into the sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub name: String,
    pub kind: ActionKind,
    pub priority: u32,
    pub next_q: Option<usize>,
}

/// Transition semantics shared by the explicit product and the lazy
/// learning environment.
#[derive(Clone, Debug)]
pub struct Semantics<'a> {
    pub model: &'a Model,
    pub aut: &'a Automaton,
    /// Model proposition index of each automaton proposition.
    pub ap_map: Vec<usize>,
}

impl<'a> Semantics<'a> {
    pub fn new(model: &'a Model, aut: &'a Automaton) -> Result<Semantics<'a>, ProductError> {
        if !aut.is_deterministic() {
            if model.kind == ModelKind::Smg {
                return Err(ProductError::NondeterministicAutomatonOnGame);
            }
            if !aut.acceptance.is_buchi() {
                return Err(ProductError::NondeterministicNonBuchi);
            }
        }
        let ap_map = aut
            .ap_names
            .iter()
            .map(|a| model.ap_names.iter().position(|m| m == a).ok_or_else(|| ProductError::UnknownProposition(a.clone())))
            .collect::<Result<_, _>>()?;
        Ok(Semantics { model, aut, ap_map })
    }

    pub fn letter(&self, m: usize) -> Valuation {
        Automaton::valuation_of(self.model.states[m].label.0, &self.ap_map)
    }

    /// Menu of `(m, q)`: for each model action the enabled edges in order
    /// (or one sink-bound option), then the ε-jumps.
    pub fn moves(&self, m: usize, q: usize) -> Vec<Move> {
        let v = self.letter(m);
        let st = &self.aut.states[q];
        let mut out = Vec::new();
        for (a, act) in self.model.states[m].actions.iter().enumerate() {
            let enabled: Vec<usize> = (0..st.edges.len()).filter(|&i| st.edges[i].guard.eval(v)).collect();
            if enabled.is_empty() {
                out.push(Move { name: act.name.clone(), kind: ActionKind::Model { action: a, edge: None }, priority: 0, next_q: None });
            }
            for &i in &enabled {
                let e = &st.edges[i];
                let name = if enabled.len() == 1 { act.name.clone() } else { format!("{}/{}", act.name, i) };
                out.push(Move { name, kind: ActionKind::Model { action: a, edge: Some(i) }, priority: e.priority, next_q: Some(e.target) });
            }
        }
        for e in &st.epsilon {
            out.push(Move { name: format!("eps/{}", e.target), kind: ActionKind::Jump { target: e.target }, priority: e.priority, next_q: Some(e.target) });
        }
        out
    }

    /// Successor pairs of a move from model state `m`; `None` is the sink.
    pub fn outcomes(&self, m: usize, mv: &Move) -> Vec<(f64, Option<(usize, usize)>)> {
        match (mv.kind, mv.next_q) {
            (ActionKind::Model { .. }, None) | (ActionKind::Sink, _) => vec![(1.0, None)],
            (ActionKind::Jump { .. }, Some(q)) => vec![(1.0, Some((m, q)))],
            (ActionKind::Jump { .. }, None) => unreachable!("jump without target"),
            (ActionKind::Model { action, .. }, Some(q)) => {
                self.model.states[m].actions[action].distribution.support().iter().map(|&(p, t)| (p, Some((t, q)))).collect()
            }
        }
    }
}

/// Builds the reachable product.
pub fn build_product(model: &Model, aut: &Automaton) -> Result<Product, ProductError> {
    let sem = Semantics::new(model, aut)?;
    let mut index: BTreeMap<Option<(usize, usize)>, usize> = BTreeMap::new();
    let mut keys: Vec<Option<(usize, usize)>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |k: Option<(usize, usize)>, keys: &mut Vec<_>, queue: &mut VecDeque<usize>| {
        *index.entry(k).or_insert_with(|| {
            keys.push(k);
            queue.push_back(keys.len() - 1);
            keys.len() - 1
        })
    };
    let initial = intern(Some((model.initial, aut.initial)), &mut keys, &mut queue);
    let mut rows: Vec<Option<ProductState>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let state = match keys[i] {
            None => ProductState {
                pair: None,
                owner: Player::Max,
                actions: vec![ProductAction { name: SINK_ACTION.into(), kind: ActionKind::Sink, priority: 0, successors: vec![(1.0, i)] }],
            },
            Some((m, q)) => {
                let mut actions = Vec::new();
                for mv in sem.moves(m, q) {
                    let mut successors: Vec<(f64, usize)> = Vec::new();
                    for (p, k) in sem.outcomes(m, &mv) {
                        let t = intern(k, &mut keys, &mut queue);
                        match successors.iter_mut().find(|s| s.1 == t) {
                            Some(s) => s.0 += p,
                            None => successors.push((p, t)),
                        }
                    }
                    actions.push(ProductAction { name: mv.name, kind: mv.kind, priority: mv.priority, successors });
                }
                ProductState { pair: Some((m, q)), owner: model.states[m].owner, actions }
            }
        };
        if rows.len() <= i {
            rows.resize(i + 1, None);
        }
        rows[i] = Some(state);
    }
    let states = rows.into_iter().map(|r| r.expect("every interned state is expanded")).collect();
    Ok(Product { states, initial })
}

impl Product {
    /// Assembles a product from explicit parts, checking that each state has
    /// an action, each distribution sums to one and targets exist.
    pub fn from_parts(states: Vec<ProductState>, initial: usize) -> Result<Product, ProductError> {
        let n = states.len();
        if initial >= n {
            return Err(ProductError::Invalid(format!("initial state {initial} out of range")));
        }
        for (s, st) in states.iter().enumerate() {
            if st.actions.is_empty() {
                return Err(ProductError::Invalid(format!("state {s} has no action")));
            }
            for a in &st.actions {
                let sum: f64 = a.successors.iter().map(|x| x.0).sum();
                if (sum - 1.0).abs() > crate::model::PROB_TOLERANCE || a.successors.iter().any(|&(p, t)| p <= 0.0 || t >= n) {
                    return Err(ProductError::Invalid(format!("bad distribution for {} at state {s}", a.name)));
                }
            }
        }
        Ok(Product { states, initial })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn action_count(&self) -> usize {
        self.states.iter().map(|s| s.actions.len()).sum()
    }

    pub fn max_priority(&self) -> u32 {
        self.states.iter().flat_map(|s| &s.actions).map(|a| a.priority).max().unwrap_or(0)
    }

    pub fn has_min_states(&self) -> bool {
        self.states.iter().any(|s| s.owner == Player::Min)
    }

    pub fn index_of(&self, m: usize, q: usize) -> Option<usize> {
        self.states.iter().position(|s| s.pair == Some((m, q)))
    }

    /// States where `player` picks among several actions, in index order.
    pub fn decision_states(&self, player: Player) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.states[s].owner == player && self.states[s].actions.len() > 1).collect()
    }

    /// Keeps only the chosen action in each state owned by a player some
    /// strategy covers. States are not renumbered.
    pub fn restrict(&self, strategies: &[&Strategy]) -> Result<Product, ProductError> {
        let mut out = self.clone();
        for (s, st) in out.states.iter_mut().enumerate() {
            let Some(sigma) = strategies.iter().find(|x| x.player == st.owner) else {
                continue;
            };
            match sigma.choice(s) {
                Some(a) if a < st.actions.len() => {
                    let kept = st.actions.swap_remove(a);
                    st.actions = vec![kept];
                }
                _ if st.actions.len() == 1 => {}
                _ => return Err(ProductError::Invalid(format!("no decision for state {s}"))),
            }
        }
        Ok(out)
    }
}
