//! Transition-labelled ω-automata with max-odd parity priorities.
//!
//! Guards are kept as an irredundant sum of products computed from the
//! guard's truth table, so two guards denoting the same function are equal
//! and print identically.

mod hoa_emit;
mod hoa_parse;
pub mod lasso;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use hoa_emit::emit_hoa;
pub use hoa_parse::{parse_hoa, HoaError, HoaErrorKind};

/// Bit `i` is proposition `i`.
pub type Valuation = u32;

pub const MAX_APS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    pub pos: u32,
    pub neg: u32,
}

impl Cube {
    pub const TOP: Cube = Cube { pos: 0, neg: 0 };

    pub fn eval(self, v: Valuation) -> bool {
        v & self.pos == self.pos && v & self.neg == 0
    }

    fn meets(self, o: Cube) -> bool {
        (self.pos | o.pos) & (self.neg | o.neg) == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    cubes: Vec<Cube>,
}

impl Guard {
    pub fn top() -> Guard {
        Guard { cubes: vec![Cube::TOP] }
    }

    pub fn bottom() -> Guard {
        Guard { cubes: Vec::new() }
    }

    /// Canonical guard of the function `f` over `n` propositions.
    pub fn from_fn(n: usize, f: impl Fn(Valuation) -> bool) -> Guard {
        assert!(n <= MAX_APS);
        let table: Vec<bool> = (0..1u32 << n).map(f).collect();
        let (mut cubes, _) = isop(&table, &table, n);
        cubes.sort();
        Guard { cubes }
    }

    pub fn from_valuations(n: usize, vals: &[Valuation]) -> Guard {
        let mut table = vec![false; 1 << n];
        for &v in vals {
            table[v as usize] = true;
        }
        Guard::from_fn(n, |v| table[v as usize])
    }

    pub fn literal(n: usize, ap: usize, positive: bool) -> Guard {
        Guard::from_fn(n, |v| (v >> ap & 1 == 1) == positive)
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn eval(&self, v: Valuation) -> bool {
        self.cubes.iter().any(|c| c.eval(v))
    }

    pub fn is_false(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.cubes == [Cube::TOP]
    }

    /// Whether some valuation satisfies both guards.
    pub fn intersects(&self, o: &Guard) -> bool {
        self.cubes.iter().any(|a| o.cubes.iter().any(|b| a.meets(*b)))
    }

    pub fn and(&self, o: &Guard, n: usize) -> Guard {
        Guard::from_fn(n, |v| self.eval(v) && o.eval(v))
    }

    pub fn or(&self, o: &Guard, n: usize) -> Guard {
        Guard::from_fn(n, |v| self.eval(v) || o.eval(v))
    }

    pub fn not(&self, n: usize) -> Guard {
        Guard::from_fn(n, |v| !self.eval(v))
    }

    /// Satisfying valuations over `n` propositions, ascending.
    pub fn valuations(&self, n: usize) -> impl Iterator<Item = Valuation> + '_ {
        (0..1u32 << n).filter(move |&v| self.eval(v))
    }

    /// Formats with proposition names instead of indices.
    pub fn display_with<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        GuardNames { guard: self, names }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, ap: &dyn Fn(&mut fmt::Formatter<'_>, usize) -> fmt::Result, and: &str, or: &str) -> fmt::Result {
        if self.cubes.is_empty() {
            return f.write_str("f");
        }
        for (i, c) in self.cubes.iter().enumerate() {
            if i > 0 {
                f.write_str(or)?;
            }
            if *c == Cube::TOP {
                f.write_str("t")?;
                continue;
            }
            let mut first = true;
            for b in 0..32 {
                let bit = 1u32 << b;
                if (c.pos | c.neg) & bit == 0 {
                    continue;
                }
                if !first {
                    f.write_str(and)?;
                }
                first = false;
                if c.neg & bit != 0 {
                    f.write_str("!")?;
                }
                ap(f, b)?;
            }
        }
        Ok(())
    }
}

/// HOA syntax: proposition indices, `&`, `|`, `!`, `t`, `f`.
impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, &|f, i| write!(f, "{i}"), "&", " | ")
    }
}

struct GuardNames<'a, S> {
    guard: &'a Guard,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for GuardNames<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names;
        self.guard.write(
            f,
            &|f, i| match names.get(i) {
                Some(n) => f.write_str(n.as_ref()),
                None => write!(f, "p{i}"),
            },
            " & ",
            " | ",
        )
    }
}

/// Minato-Morreale irredundant sum of products for `lower <= f <= upper`.
/// Tables are indexed by valuation; the top variable is `n - 1`.
fn isop(lower: &[bool], upper: &[bool], n: usize) -> (Vec<Cube>, Vec<bool>) {
    if lower.iter().all(|b| !b) {
        return (Vec::new(), vec![false; lower.len()]);
    }
    if upper.iter().all(|b| *b) {
        return (vec![Cube::TOP], vec![true; lower.len()]);
    }
    let half = lower.len() / 2;
    let x = 1u32 << (n - 1);
    let (l0, l1) = lower.split_at(half);
    let (u0, u1) = upper.split_at(half);
    let l0_only: Vec<bool> = l0.iter().zip(u1).map(|(l, u)| *l && !*u).collect();
    let l1_only: Vec<bool> = l1.iter().zip(u0).map(|(l, u)| *l && !*u).collect();
    let (c0, f0) = isop(&l0_only, u0, n - 1);
    let (c1, f1) = isop(&l1_only, u1, n - 1);
    let rest_l: Vec<bool> = (0..half).map(|i| (l0[i] && !f0[i]) || (l1[i] && !f1[i])).collect();
    let rest_u: Vec<bool> = (0..half).map(|i| u0[i] && u1[i]).collect();
    let (cs, fs) = isop(&rest_l, &rest_u, n - 1);
    let mut cubes = Vec::with_capacity(c0.len() + c1.len() + cs.len());
    cubes.extend(c0.into_iter().map(|c| Cube { pos: c.pos, neg: c.neg | x }));
    cubes.extend(c1.into_iter().map(|c| Cube { pos: c.pos | x, neg: c.neg }));
    cubes.extend(cs);
    let mut cover = Vec::with_capacity(lower.len());
    cover.extend((0..half).map(|i| f0[i] || fs[i]));
    cover.extend((0..half).map(|i| f1[i] || fs[i]));
    (cubes, cover)
}

/// Acceptance condition as written in the input, with the acceptance-set
/// indices it mentions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcceptanceKind {
    /// `Inf(set)`
    Buchi { set: u32 },
    /// `Fin(set)`
    CoBuchi { set: u32 },
    /// `Fin(fin) & Inf(inf)`
    Rabin1 { fin: u32, inf: u32 },
    /// `Fin(fin) | Inf(inf)`
    Streett1 { fin: u32, inf: u32 },
    /// `parity max odd n`, sets `0..n` used directly as priorities.
    ParityMaxOdd { colors: u32 },
}

impl AcceptanceKind {
    pub fn is_buchi(self) -> bool {
        matches!(self, AcceptanceKind::Buchi { .. })
    }

    /// Number of priorities after normalization.
    pub fn num_priorities(self) -> u32 {
        match self {
            AcceptanceKind::Buchi { .. } => 2,
            AcceptanceKind::CoBuchi { .. } => 3,
            AcceptanceKind::Rabin1 { .. } => 3,
            AcceptanceKind::Streett1 { .. } => 4,
            AcceptanceKind::ParityMaxOdd { colors } => colors,
        }
    }

    /// Max-odd priority of an edge carrying the acceptance sets `marks`.
    pub fn priority(self, marks: &[u32]) -> u32 {
        let has = |s: u32| marks.contains(&s);
        match self {
            AcceptanceKind::Buchi { set } => has(set) as u32,
            AcceptanceKind::CoBuchi { set } => 1 + has(set) as u32,
            AcceptanceKind::Rabin1 { fin, inf } => {
                if has(fin) {
                    2
                } else if has(inf) {
                    1
                } else {
                    0
                }
            }
            AcceptanceKind::Streett1 { fin, inf } => {
                if has(inf) {
                    3
                } else if has(fin) {
                    2
                } else {
                    1
                }
            }
            AcceptanceKind::ParityMaxOdd { .. } => marks.first().copied().unwrap_or(0),
        }
    }

    /// Evaluates the original condition on the set of marks seen infinitely often.
    pub fn accepts_marks(self, recurring: &[u32]) -> bool {
        let has = |s: u32| recurring.contains(&s);
        match self {
            AcceptanceKind::Buchi { set } => has(set),
            AcceptanceKind::CoBuchi { set } => !has(set),
            AcceptanceKind::Rabin1 { fin, inf } => !has(fin) && has(inf),
            AcceptanceKind::Streett1 { fin, inf } => !has(fin) || has(inf),
            AcceptanceKind::ParityMaxOdd { .. } => recurring.iter().max().is_some_and(|m| m % 2 == 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub guard: Guard,
    pub target: usize,
    pub priority: u32,
    /// Acceptance sets from the input, sorted.
    pub marks: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonEdge {
    pub target: usize,
    pub priority: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AutState {
    pub name: Option<String>,
    pub edges: Vec<Edge>,
    pub epsilon: Vec<EpsilonEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    pub name: Option<String>,
    pub ap_names: Vec<String>,
    pub initial: usize,
    pub states: Vec<AutState>,
    pub acceptance: AcceptanceKind,
    /// Number of acceptance sets declared in the input.
    pub num_sets: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeterminismFailure {
    /// Two edges enabled under the valuation.
    Overlap,
    /// No edge enabled under the valuation.
    Missing,
    /// The state has ε-edges.
    Epsilon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeterminismWitness {
    pub state: usize,
    pub valuation: Valuation,
    pub failure: DeterminismFailure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutomatonError {
    UnsupportedAcceptance(String),
    /// Invalid priorities or marks for the declared acceptance.
    BadMarks { state: usize, edge: usize },
}

impl fmt::Display for AutomatonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutomatonError::UnsupportedAcceptance(m) => write!(f, "unsupported acceptance: {m}"),
            AutomatonError::BadMarks { state, edge } => write!(f, "edge {edge} of state {state} has acceptance marks that do not fit the condition"),
        }
    }
}

impl core::error::Error for AutomatonError {}

impl Automaton {
    pub fn num_aps(&self) -> usize {
        self.ap_names.len()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.states.iter().map(|s| s.edges.len() + s.epsilon.len()).sum()
    }

    pub fn num_priorities(&self) -> u32 {
        self.acceptance.num_priorities()
    }

    pub fn has_epsilon(&self) -> bool {
        self.states.iter().any(|s| !s.epsilon.is_empty())
    }

    /// Edges of `state` enabled under `v`.
    pub fn enabled(&self, state: usize, v: Valuation) -> impl Iterator<Item = &Edge> {
        self.states[state].edges.iter().filter(move |e| e.guard.eval(v))
    }

    /// Per-state guards pairwise disjoint and jointly total, and no ε-edges.
    pub fn check_deterministic(&self) -> Result<(), DeterminismWitness> {
        for (s, st) in self.states.iter().enumerate() {
            if !st.epsilon.is_empty() {
                return Err(DeterminismWitness { state: s, valuation: 0, failure: DeterminismFailure::Epsilon });
            }
            for v in 0..1u32 << self.num_aps() {
                let n = st.edges.iter().filter(|e| e.guard.eval(v)).count();
                if n != 1 {
                    let failure = if n == 0 { DeterminismFailure::Missing } else { DeterminismFailure::Overlap };
                    return Err(DeterminismWitness { state: s, valuation: v, failure });
                }
            }
        }
        Ok(())
    }

    pub fn is_deterministic(&self) -> bool {
        self.check_deterministic().is_ok()
    }

    /// Pairwise disjoint guards, ε-edges allowed, missing edges allowed.
    pub fn is_edge_deterministic(&self, state: usize) -> bool {
        let edges = &self.states[state].edges;
        edges.iter().enumerate().all(|(i, a)| edges[i + 1..].iter().all(|b| !a.guard.intersects(&b.guard)))
    }

    /// Recomputes every edge priority from its marks.
    pub fn normalize_to_parity(&self) -> Result<Automaton, AutomatonError> {
        let mut out = self.clone();
        for (s, st) in out.states.iter_mut().enumerate() {
            for (i, e) in st.edges.iter_mut().enumerate() {
                if let AcceptanceKind::ParityMaxOdd { colors } = self.acceptance {
                    if e.marks.len() != 1 || e.marks[0] >= colors {
                        return Err(AutomatonError::BadMarks { state: s, edge: i });
                    }
                }
                e.priority = self.acceptance.priority(&e.marks);
            }
        }
        Ok(out)
    }

    /// States reachable from the initial state through edges and ε-edges.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            let st = &self.states[s];
            for t in st.edges.iter().map(|e| e.target).chain(st.epsilon.iter().map(|e| e.target)) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Keeps the states flagged in `keep` (the initial state must be kept)
    /// and drops edges into removed states.
    pub fn retain_states(&self, keep: &[bool]) -> Automaton {
        let mut map = vec![usize::MAX; self.len()];
        let mut next = 0;
        for (s, k) in keep.iter().enumerate() {
            if *k {
                map[s] = next;
                next += 1;
            }
        }
        let states = self
            .states
            .iter()
            .enumerate()
            .filter(|(s, _)| keep[*s])
            .map(|(_, st)| AutState {
                name: st.name.clone(),
                edges: st
                    .edges
                    .iter()
                    .filter(|e| keep[e.target])
                    .map(|e| Edge { target: map[e.target], ..e.clone() })
                    .collect(),
                epsilon: st
                    .epsilon
                    .iter()
                    .filter(|e| keep[e.target])
                    .map(|e| EpsilonEdge { target: map[e.target], priority: e.priority })
                    .collect(),
            })
            .collect();
        Automaton { states, initial: map[self.initial], ..self.clone() }
    }

    pub fn prune_unreachable(&self) -> Automaton {
        self.retain_states(&self.reachable())
    }

    /// Maps a model label (bit per model proposition) to a valuation over
    /// this automaton's propositions. `map[i]` is the model index of
    /// automaton proposition `i`.
    pub fn valuation_of(label: u64, map: &[usize]) -> Valuation {
        map.iter().enumerate().fold(0, |v, (i, &m)| if label >> m & 1 == 1 { v | 1 << i } else { v })
    }
}
