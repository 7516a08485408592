//! GraphViz export. Decision states are boxes and probabilistic choices
//! are small circles; an action with one successor is drawn as a direct
//! edge. Action edges carry the action name and, in products, the priority
//! in parentheses; edges out of a circle carry the probability.

use std::fmt::Write;

use omegarl_core::automaton::Automaton;
use omegarl_core::model::{Model, Player};
use omegarl_core::parity::Side;
use omegarl_core::product::Product;
use omegarl_core::sldba::{Position, SimulationGame};

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

struct Action<'a> {
    label: String,
    successors: &'a [(f64, usize)],
}

/// Draws the states flagged in `keep`; actions only lead to kept states
/// when `keep` is closed under successors.
fn mdp_dot(name: &str, labels: &[String], owners: &[Player], actions: &[Vec<Action>], initial: usize, keep: &[bool]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    out.push_str("  node [fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\"];\n");
    out.push_str("  init [shape=point];\n");
    let _ = writeln!(out, "  init -> s{initial};");
    for (i, l) in labels.iter().enumerate().filter(|(i, _)| keep[*i]) {
        let style = if owners[i] == Player::Min { " style=dashed" } else { "" };
        let _ = writeln!(out, "  s{i} [shape=box{style} label=\"{}\"];", esc(l));
    }
    for (i, acts) in actions.iter().enumerate().filter(|(i, _)| keep[*i]) {
        for (a, act) in acts.iter().enumerate() {
            let label = esc(&act.label);
            if let [(_, t)] = act.successors {
                let _ = writeln!(out, "  s{i} -> s{t} [label=\"{label}\"];");
                continue;
            }
            let _ = writeln!(out, "  c{i}_{a} [shape=circle label=\"\" width=0.15];");
            let _ = writeln!(out, "  s{i} -> c{i}_{a} [label=\"{label}\"];");
            for (p, t) in act.successors {
                let _ = writeln!(out, "  c{i}_{a} -> s{t} [label=\"{p}\"];");
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn model_dot(m: &Model) -> String {
    let labels: Vec<String> = (0..m.len()).map(|s| m.describe_state(s)).collect();
    let owners: Vec<Player> = m.states.iter().map(|s| s.owner).collect();
    let actions: Vec<Vec<Action>> = m
        .states
        .iter()
        .map(|s| s.actions.iter().map(|a| Action { label: a.name.clone(), successors: a.distribution.support() }).collect())
        .collect();
    mdp_dot("model", &labels, &owners, &actions, m.initial, &vec![true; m.len()])
}

/// Product or induced chain; decision states show the model valuation and
/// the automaton state.
pub fn product_dot(m: &Model, p: &Product) -> String {
    product_dot_within(m, p, &vec![true; p.len()])
}

/// Induced chain of a restricted product, drawn from the initial state only.
pub fn induced_dot(m: &Model, chain: &Product) -> String {
    let mut keep = vec![false; chain.len()];
    keep[chain.initial] = true;
    let mut stack = vec![chain.initial];
    while let Some(s) = stack.pop() {
        for a in &chain.states[s].actions {
            for &(_, t) in &a.successors {
                if !keep[t] {
                    keep[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    product_dot_within(m, chain, &keep)
}

fn product_dot_within(m: &Model, p: &Product, keep: &[bool]) -> String {
    let labels: Vec<String> = p
        .states
        .iter()
        .map(|st| match st.pair {
            Some((s, q)) => format!("{}\nq{q}", m.describe_state(s)),
            None => "sink".into(),
        })
        .collect();
    let owners: Vec<Player> = p.states.iter().map(|s| s.owner).collect();
    let actions: Vec<Vec<Action>> = p
        .states
        .iter()
        .map(|s| s.actions.iter().map(|a| Action { label: format!("{} ({})", a.name, a.priority), successors: &a.successors }).collect())
        .collect();
    mdp_dot("product", &labels, &owners, &actions, p.initial, keep)
}

pub fn automaton_dot(a: &Automaton) -> String {
    let mut out = String::from("digraph automaton {\n  node [shape=circle fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\"];\n");
    out.push_str("  init [shape=point];\n");
    let _ = writeln!(out, "  init -> q{};", a.initial);
    for (i, st) in a.states.iter().enumerate() {
        let name = st.name.clone().unwrap_or_else(|| i.to_string());
        let _ = writeln!(out, "  q{i} [label=\"{}\"];", esc(&name));
    }
    for (i, st) in a.states.iter().enumerate() {
        for e in &st.edges {
            let g = e.guard.display_with(&a.ap_names).to_string();
            let _ = writeln!(out, "  q{i} -> q{} [label=\"{} ({})\"];", e.target, esc(&g), e.priority);
        }
        for e in &st.epsilon {
            let _ = writeln!(out, "  q{i} -> q{} [label=\"ε ({})\" style=dashed];", e.target, e.priority);
        }
    }
    out.push_str("}\n");
    out
}

/// Duplicator positions are boxes, spoiler positions diamonds; edges carry
/// the color.
pub fn simulation_dot(g: &SimulationGame) -> String {
    let mut out = String::from("digraph simulation {\n  node [fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\"];\n");
    out.push_str("  init [shape=point];\n");
    let _ = writeln!(out, "  init -> n{};", g.initial);
    for (i, pos) in g.positions.iter().enumerate() {
        let shape = if g.game.owner[i] == Side::Even { "box" } else { "diamond" };
        let label = match *pos {
            Position::Spoiler { nba, sldba } => format!("{nba},{sldba}"),
            Position::Duplicator { nba, sldba, letter } => format!("{nba},{sldba},{letter}"),
            Position::DuplicatorStuck => "duplicator stuck".into(),
            Position::SpoilerStuck => "spoiler stuck".into(),
        };
        let _ = writeln!(out, "  n{i} [shape={shape} label=\"{}\"];", esc(&label));
    }
    for (i, es) in g.game.edges.iter().enumerate() {
        for (t, c) in es {
            let _ = writeln!(out, "  n{i} -> n{t} [label=\"{c}\"];");
        }
    }
    out.push_str("}\n");
    out
}
