//! Shared oracles for integration tests. Nothing here calls the solvers
//! under test.
#![allow(dead_code)]

use omegarl_core::automaton::lasso::Lasso;
use omegarl_core::automaton::Automaton;
use omegarl_core::model::Player;
use omegarl_core::parity::{ParityGame, Side};
use omegarl_core::product::{ActionKind, Product, ProductAction, ProductState};
use rand::Rng;

pub const TOL: f64 = 1e-6;

/// Random product with at most `max_states` states, 1..=`max_actions`
/// actions, up to 3 successors per action and priorities in 0..=`max_prio`.
/// The number of positional strategy profiles stays below `budget`.
pub fn random_product<R: Rng>(rng: &mut R, max_states: usize, max_actions: usize, max_prio: u32, with_min: bool, budget: u64) -> Product {
    let n = rng.random_range(1..=max_states);
    let mut profiles: u64 = 1;
    let states = (0..n)
        .map(|_| {
            let mut k = rng.random_range(1..=max_actions);
            while k > 1 && profiles * k as u64 > budget {
                k -= 1;
            }
            profiles *= k as u64;
            let owner = if with_min && rng.random_bool(0.5) { Player::Min } else { Player::Max };
            let actions = (0..k)
                .map(|i| {
                    let m = rng.random_range(1..=3usize);
                    let weights: Vec<u32> = (0..m).map(|_| rng.random_range(1..=4)).collect();
                    let total: u32 = weights.iter().sum();
                    let mut successors: Vec<(f64, usize)> = Vec::new();
                    for w in weights {
                        let t = rng.random_range(0..n);
                        let p = w as f64 / total as f64;
                        match successors.iter_mut().find(|x| x.1 == t) {
                            Some(x) => x.0 += p,
                            None => successors.push((p, t)),
                        }
                    }
                    ProductAction { name: format!("a{i}"), kind: ActionKind::Sink, priority: rng.random_range(0..=max_prio), successors }
                })
                .collect();
            ProductState { pair: None, owner, actions }
        })
        .collect();
    Product::from_parts(states, 0).expect("generator builds valid products")
}

/// Value of every state of the chain picked by `choice`, via boolean
/// reachability closure and dense elimination over all states.
pub fn chain_values(p: &Product, choice: &[usize]) -> Vec<f64> {
    let n = p.len();
    let act = |s: usize| &p.states[s].actions[choice[s]];
    let mut reach = vec![vec![false; n]; n];
    for s in 0..n {
        reach[s][s] = true;
        for &(_, t) in &act(s).successors {
            reach[s][t] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    // s is in a bottom SCC iff everything it reaches reaches back
    let bottom: Vec<bool> = (0..n).map(|s| (0..n).all(|t| !reach[s][t] || reach[t][s])).collect();
    let good: Vec<bool> = (0..n)
        .map(|s| {
            bottom[s] && {
                let top = (0..n).filter(|&t| reach[s][t]).map(|t| act(t).priority).max().unwrap();
                top % 2 == 1
            }
        })
        .collect();
    let hopeless: Vec<bool> = (0..n).map(|s| !(0..n).any(|t| reach[s][t] && good[t])).collect();
    // x = P x + b on undecided states
    let mut a = vec![vec![0.0f64; n + 1]; n];
    for s in 0..n {
        a[s][s] = 1.0;
        if good[s] {
            a[s][n] = 1.0;
        } else if !hopeless[s] {
            for &(pr, t) in &act(s).successors {
                a[s][t] -= pr;
            }
        }
    }
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        a.swap(c, piv);
        let d = a[c][c];
        for r in 0..n {
            if r != c && a[r][c] != 0.0 {
                let f = a[r][c] / d;
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    (0..n).map(|s| a[s][n] / a[s][s]).collect()
}

/// Every assignment of one action per state in `states`.
pub fn choices(p: &Product, owner: Player) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0usize; p.len()]];
    for s in 0..p.len() {
        if p.states[s].owner != owner {
            continue;
        }
        let k = p.states[s].actions.len();
        out = out.into_iter().flat_map(|c| (0..k).map(move |a| {
            let mut c = c.clone();
            c[s] = a;
            c
        })).collect();
    }
    out
}

/// `max_σ min_ν` of the chain values, componentwise, over positional
/// strategies.
pub fn brute_force_values(p: &Product) -> Vec<f64> {
    let n = p.len();
    let mut best = vec![f64::NEG_INFINITY; n];
    for sigma in choices(p, Player::Max) {
        let mut worst = vec![f64::INFINITY; n];
        for nu in choices(p, Player::Min) {
            let merged: Vec<usize> = (0..n).map(|s| if p.states[s].owner == Player::Max { sigma[s] } else { nu[s] }).collect();
            let v = chain_values(p, &merged);
            for s in 0..n {
                worst[s] = worst[s].min(v[s]);
            }
        }
        for s in 0..n {
            best[s] = best[s].max(worst[s]);
        }
    }
    best
}

pub fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Strongly connected component id of every node (iterative Kosaraju).
pub fn scc_ids(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut radj = vec![Vec::new(); n];
    for (u, out) in adj.iter().enumerate() {
        for &w in out {
            radj[w].push(u);
        }
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < adj[u].len() {
                let w = adj[u][*i];
                *i += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(u);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = next;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &w in &radj[u] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Nodes reachable from `start` along colored edges.
pub fn reachable_from(adj: &[Vec<(usize, u32)>], start: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = start.to_vec();
    for &s in start {
        seen[s] = true;
    }
    while let Some(u) = stack.pop() {
        for &(w, _) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Whether some cycle reachable from `start` has an odd maximal color.
pub fn odd_cycle_reachable(adj: &[Vec<(usize, u32)>], start: usize) -> bool {
    let n = adj.len();
    let live = reachable_from(adj, &[start]);
    let top = adj.iter().flatten().map(|e| e.1).max().unwrap_or(0);
    (1..=top).step_by(2).any(|c| {
        let sub: Vec<Vec<usize>> = (0..n).map(|u| if live[u] { adj[u].iter().filter(|e| e.1 <= c).map(|e| e.0).collect() } else { Vec::new() }).collect();
        let comp = scc_ids(n, &sub);
        (0..n).any(|u| live[u] && adj[u].iter().any(|&(w, col)| col == c && comp[u] == comp[w]))
    })
}

/// Winner of every node of a parity game by enumerating positional
/// strategies of `side`: it wins where some strategy leaves the opponent no
/// reachable cycle of the opponent's parity.
pub fn parity_brute_force(g: &ParityGame, side: Side) -> Vec<bool> {
    let n = g.len();
    let mine: Vec<usize> = (0..n).filter(|&v| g.owner[v] == side).collect();
    let mut wins = vec![false; n];
    let mut pick = vec![0usize; n];
    loop {
        // the opponent wins a play when the max color has its parity
        let adj: Vec<Vec<(usize, u32)>> = (0..n)
            .map(|v| {
                let edges: Vec<(usize, u32)> = if g.owner[v] == side { vec![g.edges[v][pick[v]]] } else { g.edges[v].clone() };
                let shift = if side == Side::Odd { 1 } else { 0 };
                edges.into_iter().map(|(t, c)| (t, c + shift)).collect()
            })
            .collect();
        for v in 0..n {
            if !wins[v] && !odd_cycle_reachable(&adj, v) {
                wins[v] = true;
            }
        }
        // next strategy in mixed-radix order
        let mut i = 0;
        loop {
            if i == mine.len() {
                return wins;
            }
            let v = mine[i];
            pick[v] += 1;
            if pick[v] < g.edges[v].len() {
                break;
            }
            pick[v] = 0;
            i += 1;
        }
    }
}

/// Random game with 1..=`max_nodes` nodes, out-degree 1..=3 and colors
/// below `colors`, keeping each side's strategy count below `budget`.
pub fn random_parity_game<R: Rng>(rng: &mut R, max_nodes: usize, colors: u32, budget: u64) -> ParityGame {
    let n = rng.random_range(1..=max_nodes);
    let mut g = ParityGame::default();
    let mut profiles = [1u64, 1u64];
    for _ in 0..n {
        g.add_node(if rng.random_bool(0.5) { Side::Even } else { Side::Odd });
    }
    for v in 0..n {
        let side = (g.owner[v] == Side::Odd) as usize;
        let mut k = rng.random_range(1..=3u64);
        while k > 1 && profiles[side] * k > budget {
            k -= 1;
        }
        profiles[side] *= k;
        for _ in 0..k {
            let t = rng.random_range(0..n);
            g.add_edge(v, t, rng.random_range(0..colors));
        }
    }
    g
}

/// Lasso membership from the configuration graph `(state, position)`;
/// ε-edges keep the position and must not form cycles.
pub fn lasso_accepts(aut: &Automaton, w: &Lasso) -> bool {
    let l = w.len();
    let id = |q: usize, i: usize| q * l + i;
    let n = aut.len() * l;
    let mut adj = vec![Vec::new(); n];
    let mut eps = vec![Vec::new(); n];
    for (q, st) in aut.states.iter().enumerate() {
        for i in 0..l {
            for e in st.edges.iter().filter(|e| e.guard.eval(w.letter(i))) {
                adj[id(q, i)].push((id(e.target, w.next_pos(i)), e.priority));
            }
            for e in &st.epsilon {
                adj[id(q, i)].push((id(e.target, i), e.priority));
                eps[id(q, i)].push(id(e.target, i));
            }
        }
    }
    let comp = scc_ids(n, &eps);
    assert!((0..n).all(|u| eps[u].iter().all(|&t| comp[t] != comp[u])), "ε-cycle");
    odd_cycle_reachable(&adj, id(aut.initial, 0))
}

/// HOA text of a random Büchi automaton over `aps` propositions: every
/// state gets 1..=3 edges with a random nonempty set of letters, a random
/// target and an acceptance mark with probability 0.3.
pub fn random_nba_hoa<R: Rng>(rng: &mut R, max_states: usize, aps: usize) -> String {
    let n = rng.random_range(1..=max_states);
    let letters = 1u32 << aps;
    let mut body = String::new();
    for q in 0..n {
        body.push_str(&format!("State: {q}\n"));
        for _ in 0..rng.random_range(1..=3) {
            let set: Vec<u32> = loop {
                let s: Vec<u32> = (0..letters).filter(|_| rng.random_bool(0.5)).collect();
                if !s.is_empty() {
                    break s;
                }
            };
            let guard: Vec<String> = set
                .iter()
                .map(|v| (0..aps).map(|a| if v >> a & 1 == 1 { format!("{a}") } else { format!("!{a}") }).collect::<Vec<_>>().join("&"))
                .collect();
            let mark = if rng.random_bool(0.3) { " {0}" } else { "" };
            body.push_str(&format!("[{}] {}{mark}\n", guard.join(" | "), rng.random_range(0..n)));
        }
    }
    let names: Vec<String> = (0..aps).map(|a| format!("\"p{a}\"")).collect();
    format!("HOA: v1\nStates: {n}\nStart: 0\nAP: {aps} {}\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\n{body}--END--\n", names.join(" "))
}

/// Maximal probability of the parity objective when one player controls
/// every state: end components by repeated SCC refinement, winning ones by
/// removing the top even priority, then almost-sure and quantitative
/// reachability.
pub fn mdp_parity_oracle(p: &Product) -> Vec<f64> {
    let n = p.len();
    let full: Vec<Vec<bool>> = p.states.iter().map(|s| vec![true; s.actions.len()]).collect();
    let mut target = vec![false; n];
    let mut work = vec![full];
    while let Some(mask) = work.pop() {
        for ec in end_components(p, &mask) {
            let top = ec.iter().flat_map(|&(s, ref acts)| acts.iter().map(move |&a| p.states[s].actions[a].priority)).max().unwrap();
            if top % 2 == 1 {
                for &(s, _) in &ec {
                    target[s] = true;
                }
            } else {
                let mut sub: Vec<Vec<bool>> = p.states.iter().map(|s| vec![false; s.actions.len()]).collect();
                for (s, acts) in &ec {
                    for &a in acts {
                        sub[*s][a] = p.states[*s].actions[a].priority != top;
                    }
                }
                work.push(sub);
            }
        }
    }
    // almost-sure reachability: shrink the candidate set until it is closed
    let mut cand = vec![true; n];
    loop {
        let stays = |s: usize, a: usize, cand: &[bool]| p.states[s].actions[a].successors.iter().all(|e| cand[e.1]);
        let mut hit = target.clone();
        loop {
            let mut grew = false;
            for s in 0..n {
                if cand[s] && !hit[s] && (0..p.states[s].actions.len()).any(|a| stays(s, a, &cand) && p.states[s].actions[a].successors.iter().any(|e| hit[e.1])) {
                    hit[s] = true;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        if hit == cand {
            break;
        }
        cand = hit;
    }
    let mut x: Vec<f64> = cand.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
    for _ in 0..1_000_000 {
        let mut delta: f64 = 0.0;
        for s in (0..n).filter(|&s| !cand[s]) {
            let best = p.states[s].actions.iter().map(|a| a.successors.iter().map(|&(pr, t)| pr * x[t]).sum::<f64>()).fold(0.0, f64::max);
            delta = delta.max(best - x[s]);
            x[s] = best;
        }
        if delta < 1e-13 {
            break;
        }
    }
    x
}

/// Maximal end components inside `mask`, as `(state, actions)` lists.
fn end_components(p: &Product, mask: &[Vec<bool>]) -> Vec<Vec<(usize, Vec<usize>)>> {
    let n = p.len();
    let mut mask = mask.to_vec();
    loop {
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|s| (0..mask[s].len()).filter(|&a| mask[s][a]).flat_map(|a| p.states[s].actions[a].successors.iter().map(|e| e.1)).collect())
            .collect();
        let comp = scc_ids(n, &adj);
        let mut changed = false;
        for s in 0..n {
            for a in 0..mask[s].len() {
                if mask[s][a] && p.states[s].actions[a].successors.iter().any(|e| comp[e.1] != comp[s] || !mask[e.1].iter().any(|&b| b)) {
                    mask[s][a] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            let mut groups: std::collections::BTreeMap<usize, Vec<(usize, Vec<usize>)>> = Default::default();
            for s in 0..n {
                let acts: Vec<usize> = (0..mask[s].len()).filter(|&a| mask[s][a]).collect();
                if !acts.is_empty() {
                    groups.entry(comp[s]).or_default().push((s, acts));
                }
            }
            return groups.into_values().collect();
        }
    }
}

/// Copy of `p` with every priority raised by one, so the maximizer of the
/// copy plays for the complement objective.
pub fn complement(p: &Product) -> Product {
    let mut q = p.clone();
    for st in &mut q.states {
        for a in &mut st.actions {
            a.priority += 1;
        }
    }
    q
}
