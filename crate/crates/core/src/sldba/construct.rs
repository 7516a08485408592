use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Sldba, Table};
use crate::automaton::{Automaton, Valuation};

type Set = Vec<usize>;

fn show(s: &Set) -> String {
    let items: Vec<String> = s.iter().map(|q| format!("{q}")).collect();
    format!("{{{}}}", items.join(","))
}

fn post(nba: &Automaton, set: &Set, v: Valuation, accepting_only: bool) -> Set {
    let mut out: Set = set
        .iter()
        .flat_map(|&q| nba.enabled(q, v))
        .filter(|e| !accepting_only || e.priority == 1)
        .map(|e| e.target)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Builds an SLDBA for a Büchi automaton.
///
/// The initial part is the subset construction without acceptance. From a
/// subset `R` there is an ε-edge to the breakpoint state `({q}, ∅)` for each
/// `q` in `R`. A breakpoint state `(S, B)` moves on `σ` to `S' = δ(S, σ)`
/// with `B'' = δ(B, σ) ∪ δ_acc(S, σ)`; when `B'' = S'` the edge is accepting
/// and `B` resets to `∅`.
pub fn nba_to_sldba(nba: &Automaton) -> Sldba {
    assert!(nba.acceptance.is_buchi(), "SLDBA construction needs Büchi acceptance");
    let n_aps = nba.num_aps();
    let letters = 1u32 << n_aps;

    let mut subsets: BTreeMap<Set, usize> = BTreeMap::new();
    let mut order: Vec<Set> = Vec::new();
    let mut queue = VecDeque::new();
    let start = alloc::vec![nba.initial];
    subsets.insert(start.clone(), 0);
    order.push(start);
    queue.push_back(0);
    let mut init_rows: Vec<Vec<Option<usize>>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let set = order[i].clone();
        let mut row = Vec::with_capacity(letters as usize);
        for v in 0..letters {
            let next = post(nba, &set, v, false);
            if next.is_empty() {
                row.push(None);
                continue;
            }
            let id = *subsets.entry(next.clone()).or_insert_with(|| {
                order.push(next);
                queue.push_back(order.len() - 1);
                order.len() - 1
            });
            row.push(Some(id));
        }
        init_rows.push(row);
    }
    let n_init = order.len();

    let mut finals: BTreeMap<(Set, Set), usize> = BTreeMap::new();
    let mut forder: Vec<(Set, Set)> = Vec::new();
    let mut eps: Vec<Vec<usize>> = Vec::new();
    for set in &order {
        let mut targets = Vec::new();
        for &q in set {
            let key = (alloc::vec![q], Vec::new());
            let id = *finals.entry(key.clone()).or_insert_with(|| {
                forder.push(key);
                forder.len() - 1
            });
            targets.push(n_init + id);
        }
        eps.push(targets);
    }
    let mut frows: Vec<Vec<Option<(usize, u32)>>> = Vec::new();
    let mut k = 0;
    while k < forder.len() {
        let (s, b) = forder[k].clone();
        let mut row = Vec::with_capacity(letters as usize);
        for v in 0..letters {
            let s2 = post(nba, &s, v, false);
            if s2.is_empty() {
                row.push(None);
                continue;
            }
            let mut b2 = post(nba, &b, v, false);
            b2.extend(post(nba, &s, v, true));
            b2.sort_unstable();
            b2.dedup();
            let (key, prio) = if b2 == s2 { ((s2, Vec::new()), 1) } else { ((s2, b2), 0) };
            let id = *finals.entry(key.clone()).or_insert_with(|| {
                forder.push(key);
                forder.len() - 1
            });
            row.push(Some((n_init + id, prio)));
        }
        frows.push(row);
        k += 1;
    }

    let mut names: Vec<Option<String>> = order.iter().map(|s| Some(show(s))).collect();
    names.extend(forder.iter().map(|(s, b)| Some(format!("({},{})", show(s), show(b)))));
    let mut trans: Vec<Vec<Option<(usize, u32)>>> = init_rows.into_iter().map(|r| r.into_iter().map(|x| x.map(|t| (t, 0))).collect()).collect();
    trans.extend(frows);
    eps.resize(trans.len(), Vec::new());
    let mut is_final = alloc::vec![false; n_init];
    is_final.resize(trans.len(), true);
    Table { n_aps, names, is_final, initial: 0, trans, eps }.to_sldba(&nba.ap_names)
}
