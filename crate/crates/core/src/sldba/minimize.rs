use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{Sldba, Table};
use crate::graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MinimizePass {
    /// Drop final states whose language is empty.
    EmptySubsume,
    /// Merge strongly bisimilar final states.
    BisimFinal,
    /// Merge strongly bisimilar initial states.
    BisimInitial,
    /// Send ε-edges to one representative per language class of final states.
    LangEquivFinal,
    /// Replace an initial state by a single ε-edge to a final state with the
    /// same language.
    EpsJump,
}

impl MinimizePass {
    pub const ALL: [MinimizePass; 5] = [
        MinimizePass::EmptySubsume,
        MinimizePass::BisimFinal,
        MinimizePass::BisimInitial,
        MinimizePass::LangEquivFinal,
        MinimizePass::EpsJump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MinimizePass::EmptySubsume => "empty-subsume",
            MinimizePass::BisimFinal => "bisim-final",
            MinimizePass::BisimInitial => "bisim-initial",
            MinimizePass::LangEquivFinal => "lang-equiv-final",
            MinimizePass::EpsJump => "eps-jump",
        }
    }

    pub fn from_name(s: &str) -> Option<MinimizePass> {
        MinimizePass::ALL.into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for MinimizePass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Applies the passes in the given order.
pub fn minimize_sldba(s: &Sldba, passes: &[MinimizePass]) -> Sldba {
    let mut t = Table::from_sldba(s);
    for p in passes {
        t = match p {
            MinimizePass::EmptySubsume => empty_subsume(&t),
            MinimizePass::BisimFinal => bisim(&t, true),
            MinimizePass::BisimInitial => bisim(&t, false),
            MinimizePass::LangEquivFinal => lang_equiv_final(&t),
            MinimizePass::EpsJump => eps_jump(&t),
        };
    }
    let mut out = t.to_sldba(&s.aut.ap_names);
    out.aut.name = s.aut.name.clone();
    out
}

/// Explores the graph from `start` and reports whether some reachable cycle
/// takes an edge flagged `good` and no edge flagged `bad`.
fn bad_cycle<K: Ord + Clone>(start: K, succ: impl Fn(&K) -> Vec<(K, bool, bool)>) -> bool {
    let mut ids: BTreeMap<K, usize> = BTreeMap::new();
    let mut keys = vec![start.clone()];
    ids.insert(start, 0);
    let mut adj: Vec<Vec<(usize, bool, bool)>> = Vec::new();
    let mut k = 0;
    while k < keys.len() {
        let mut out = Vec::new();
        for (next, good, bad) in succ(&keys[k]) {
            let id = *ids.entry(next.clone()).or_insert_with(|| {
                keys.push(next);
                keys.len() - 1
            });
            out.push((id, good, bad));
        }
        adj.push(out);
        k += 1;
    }
    let n = keys.len();
    let comps = graph::sccs(n, &vec![true; n], |x| adj[x].iter().filter(|e| !e.2).map(|e| e.0).collect::<Vec<_>>());
    let id = graph::component_ids(n, &comps);
    (0..n).any(|x| adj[x].iter().any(|&(y, good, bad)| good && !bad && id[x] == id[y]))
}

/// Product step of two rows, `None` being a rejecting sink.
fn pair_succ(t: &Table, a: Option<usize>, b: Option<usize>) -> Vec<((Option<usize>, Option<usize>), bool, bool)> {
    if a.is_none() && b.is_none() {
        return Vec::new();
    }
    let step = |s: Option<usize>, v: usize| s.and_then(|s| t.trans[s][v]);
    let mut out: Vec<((Option<usize>, Option<usize>), bool, bool)> = (0..1usize << t.n_aps)
        .map(|v| {
            let (x, y) = (step(a, v), step(b, v));
            ((x.map(|e| e.0), y.map(|e| e.0)), x.is_some_and(|e| e.1 == 1), y.is_some_and(|e| e.1 == 1))
        })
        .filter(|((x, y), _, _)| x.is_some() || y.is_some())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Language equality of two states whose reachable parts are deterministic.
fn dba_equivalent(t: &Table, a: usize, b: usize) -> bool {
    let start = (Some(a), Some(b));
    !bad_cycle(start, |&(x, y)| pair_succ(t, x, y)) && !bad_cycle(start, |&(x, y)| pair_succ(t, x, y).into_iter().map(|(k, g, b)| (k, b, g)).collect())
}

/// `L(s) ⊆ L(d)` where `d` is a final state.
fn included(t: &Table, s: usize, d: usize) -> bool {
    !bad_cycle((s, Some(d)), |&(x, y)| {
        let mut out = Vec::new();
        for v in 0..1usize << t.n_aps {
            if let Some((x2, px)) = t.trans[x][v] {
                let ys = y.and_then(|y| t.trans[y][v]);
                out.push(((x2, ys.map(|e| e.0)), px == 1, ys.is_some_and(|e| e.1 == 1)));
            }
        }
        for &e in &t.eps[x] {
            out.push(((e, y), false, false));
        }
        out.sort();
        out.dedup();
        out
    })
}

/// Whether `L(state) ⊆ L(final_state)` in the given SLDBA.
pub fn language_inclusion(s: &Sldba, state: usize, final_state: usize) -> bool {
    assert!(s.is_final[final_state]);
    included(&Table::from_sldba(s), state, final_state)
}

fn final_nonempty(t: &Table) -> Vec<bool> {
    let n = t.len();
    let succ = |s: usize| t.trans[s].iter().flatten().map(|e| e.0).collect::<Vec<_>>();
    let comps = graph::sccs(n, &t.is_final, succ);
    let id = graph::component_ids(n, &comps);
    let mut good = vec![false; n];
    for s in 0..n {
        if t.is_final[s] && t.trans[s].iter().flatten().any(|&(x, p)| p == 1 && id[x] == id[s]) {
            good[s] = true;
        }
    }
    // components come sinks first, so one pass propagates backwards
    let mut nonempty = vec![false; n];
    for comp in &comps {
        let ok = comp.iter().any(|&s| good[s] || t.trans[s].iter().flatten().any(|&(x, _)| nonempty[x]));
        for &s in comp {
            nonempty[s] = ok;
        }
    }
    nonempty
}

fn empty_subsume(t: &Table) -> Table {
    let nonempty = final_nonempty(t);
    let keep: Vec<bool> = (0..t.len()).map(|s| !t.is_final[s] || nonempty[s] || s == t.initial).collect();
    t.retain(&keep).prune()
}

/// Coarsest strong bisimulation among the final (or initial) states; all
/// other states stay in singleton blocks.
fn bisim(t: &Table, final_part: bool) -> Table {
    let n = t.len();
    let member: Vec<bool> = (0..n).map(|s| t.is_final[s] == final_part).collect();
    let mut block: Vec<usize> = (0..n).map(|s| if member[s] { n } else { s }).collect();
    let mut count = 1;
    loop {
        let mut sigs: BTreeMap<(usize, Vec<Option<(usize, u32)>>, Vec<usize>), usize> = BTreeMap::new();
        let mut next = block.clone();
        for s in (0..n).filter(|&s| member[s]) {
            let row = t.trans[s].iter().map(|x| x.map(|(t, p)| (block[t], p))).collect();
            let mut eps: Vec<usize> = t.eps[s].iter().map(|&e| block[e]).collect();
            eps.sort_unstable();
            eps.dedup();
            let len = sigs.len();
            next[s] = n + *sigs.entry((block[s], row, eps)).or_insert(len);
        }
        block = next;
        if sigs.len() == count {
            break;
        }
        count = sigs.len();
    }
    let mut rep: Vec<usize> = (0..n).collect();
    let mut first: BTreeMap<usize, usize> = BTreeMap::new();
    for s in 0..n {
        if member[s] {
            rep[s] = *first.entry(block[s]).or_insert(s);
        }
    }
    t.quotient(&rep).prune()
}

/// Representative (lowest index) of each final state's language class.
fn language_classes(t: &Table) -> Vec<usize> {
    let n = t.len();
    let mut rep: Vec<usize> = (0..n).collect();
    for a in (0..n).filter(|&s| t.is_final[s]) {
        if rep[a] != a {
            continue;
        }
        for b in a + 1..n {
            if t.is_final[b] && rep[b] == b && dba_equivalent(t, a, b) {
                rep[b] = a;
            }
        }
    }
    rep
}

fn lang_equiv_final(t: &Table) -> Table {
    let rep = language_classes(t);
    let mut out = t.clone();
    for e in &mut out.eps {
        for x in e.iter_mut() {
            *x = rep[*x];
        }
        e.sort_unstable();
        e.dedup();
    }
    out.prune()
}

fn eps_jump(t: &Table) -> Table {
    let rep = language_classes(t);
    let mut out = t.clone();
    for s in (0..t.len()).filter(|&s| !t.is_final[s]) {
        let letters = out.trans[s].iter().any(Option::is_some);
        if !letters && out.eps[s].len() <= 1 {
            continue;
        }
        let mut cands: Vec<usize> = Vec::new();
        for &e in &out.eps[s] {
            cands.extend((0..t.len()).filter(|&f| t.is_final[f] && rep[f] == rep[e]));
        }
        cands.sort_unstable();
        cands.dedup();
        if let Some(&c) = cands.iter().find(|&&c| included(&out, s, c)) {
            out.trans[s].iter_mut().for_each(|x| *x = None);
            out.eps[s] = vec![c];
        }
    }
    out.prune()
}
