//! Breadth-first reachable-state exploration of an elaborated program.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::elab::{eval_expr, ElabCommand, ElaboratedProgram, Value};
use super::{ErrorKind, Pos, PrismError};
use crate::model::{Action, Distribution, Label, Model, ModelKind, Player, RewardStruct, StateRecord, PROB_TOLERANCE};

/// Name given to transitions of unlabelled commands.
pub const UNLABELLED: &str = "tau";

fn eval(e: &super::Expr, val: &[i64], pos: Pos) -> Result<Value, PrismError> {
    eval_expr(e, val, &[]).map_err(|err| PrismError::new(pos, err.kind))
}

fn holds(e: &super::Expr, val: &[i64], pos: Pos) -> Result<bool, PrismError> {
    Ok(eval(e, val, pos)?.as_bool().unwrap_or(false))
}

fn describe(prog: &ElaboratedProgram, val: &[i64]) -> String {
    let parts: Vec<String> = prog.vars.iter().zip(val).map(|(v, x)| format!("{}={x}", v.name)).collect();
    format!("({})", parts.join(","))
}

/// One evaluated branch of a command: probability and assignments.
type Branches = Vec<(f64, Vec<(usize, i64)>)>;

fn command_branches(cmd: &ElabCommand, val: &[i64]) -> Result<Branches, PrismError> {
    let mut out = Vec::new();
    let mut sum = 0.0;
    for b in &cmd.branches {
        let p = eval(&b.prob, val, cmd.pos)?.as_f64().unwrap_or(f64::NAN);
        if p.is_nan() || p < 0.0 {
            return Err(PrismError::new(cmd.pos, ErrorKind::Type(format!("probability {p} is not a valid probability"))));
        }
        sum += p;
        if p == 0.0 {
            continue;
        }
        let mut ups = Vec::with_capacity(b.updates.len());
        for (slot, e) in &b.updates {
            let v = eval(e, val, cmd.pos)?.as_int().ok_or_else(|| PrismError::new(cmd.pos, ErrorKind::Type("update must be an integer".into())))?;
            ups.push((*slot, v));
        }
        out.push((p, ups));
    }
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(PrismError::new(cmd.pos, ErrorKind::ProbabilitySum(sum)));
    }
    Ok(out)
}

/// Combines the branches of synchronizing commands.
fn product(a: &Branches, b: &Branches) -> Branches {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (p, u) in a {
        for (q, v) in b {
            let mut w = u.clone();
            w.extend_from_slice(v);
            out.push((p * q, w));
        }
    }
    out
}

struct Transition {
    base: String,
    pos: Pos,
    branches: Branches,
}

fn transitions(prog: &ElaboratedProgram, val: &[i64]) -> Result<Vec<Transition>, PrismError> {
    let nmod = prog.module_names.len();
    let mut out = Vec::new();
    let mut done_labels: Vec<&str> = Vec::new();
    for cmd in &prog.commands {
        match &cmd.action {
            None => {
                if holds(&cmd.guard, val, cmd.pos)? {
                    out.push(Transition { base: UNLABELLED.to_string(), pos: cmd.pos, branches: command_branches(cmd, val)? });
                }
            }
            Some(a) => {
                if done_labels.contains(&a.as_str()) {
                    continue;
                }
                done_labels.push(a);
                // enabled commands for label `a`, per participating module
                let mut per_module: Vec<Vec<&ElabCommand>> = alloc::vec![Vec::new(); nmod];
                let mut participates = alloc::vec![false; nmod];
                for c in prog.commands.iter().filter(|c| c.action.as_deref() == Some(a.as_str())) {
                    participates[c.module] = true;
                    if holds(&c.guard, val, c.pos)? {
                        per_module[c.module].push(c);
                    }
                }
                if (0..nmod).any(|m| participates[m] && per_module[m].is_empty()) {
                    continue;
                }
                let mut combos: Vec<(Pos, Branches)> = alloc::vec![(cmd.pos, alloc::vec![(1.0, Vec::new())])];
                for m in (0..nmod).filter(|&m| participates[m]) {
                    let mut next = Vec::new();
                    for (_, acc) in &combos {
                        for c in &per_module[m] {
                            next.push((c.pos, product(acc, &command_branches(c, val)?)));
                        }
                    }
                    combos = next;
                }
                for (pos, branches) in combos {
                    out.push(Transition { base: a.clone(), pos, branches });
                }
            }
        }
    }
    Ok(out)
}

/// Explores the reachable state space breadth-first.
///
/// States are numbered in discovery order, successors in command order, so
/// two builds of the same program agree exactly. Repeated action names in a
/// state (nondeterminism inside one label, or several unlabelled commands)
/// are suffixed `#2`, `#3`, ...
pub fn build_model(prog: &ElaboratedProgram) -> Result<Model, PrismError> {
    let init: Vec<i64> = prog.vars.iter().map(|v| v.init).collect();
    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut vals: Vec<Vec<i64>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(init.clone(), 0);
    vals.push(init);
    queue.push_back(0usize);

    let owner_of = |base: &str| -> Option<Player> {
        prog.players.iter().position(|(_, acts)| acts.iter().any(|a| a == base)).map(|i| if i == 0 { Player::Max } else { Player::Min })
    };

    let mut states: Vec<StateRecord> = Vec::new();
    let mut bases: Vec<Vec<String>> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let val = vals[s].clone();
        let trans = transitions(prog, &val)?;
        if trans.is_empty() {
            return Err(PrismError::new(Pos::default(), ErrorKind::Deadlock(describe(prog, &val))));
        }
        let mut owner = None;
        if prog.kind == ModelKind::Smg {
            for t in &trans {
                let o = owner_of(&t.base).ok_or_else(|| PrismError::new(t.pos, ErrorKind::UnassignedAction(t.base.clone())))?;
                if owner.is_some_and(|p| p != o) {
                    return Err(PrismError::new(t.pos, ErrorKind::MixedOwnership(describe(prog, &val))));
                }
                owner = Some(o);
            }
        }
        let mut actions: Vec<Action> = Vec::new();
        let mut state_bases = Vec::new();
        for t in trans {
            let mut entries = Vec::with_capacity(t.branches.len());
            for (p, ups) in t.branches {
                let mut next = val.clone();
                for (slot, v) in ups {
                    let var = &prog.vars[slot];
                    if v < var.low || v > var.high {
                        return Err(PrismError::new(t.pos, ErrorKind::OutOfRange { var: var.name.clone(), value: v }));
                    }
                    next[slot] = v;
                }
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = vals.len();
                        index.insert(next.clone(), id);
                        vals.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                entries.push((p, id));
            }
            let distribution = Distribution::new(entries).map_err(|e| PrismError::new(t.pos, ErrorKind::Model(e)))?;
            let dup = actions.iter().zip(&state_bases).filter(|(_, b): &(_, &String)| **b == t.base).count();
            let name = if dup == 0 { t.base.clone() } else { format!("{}#{}", t.base, dup + 1) };
            actions.push(Action { name, distribution });
            state_bases.push(t.base);
        }
        let mut label = Label::EMPTY;
        for (i, (_, e)) in prog.labels.iter().enumerate() {
            if holds(e, &val, Pos::default())? {
                label = label.with(i);
            }
        }
        states.push(StateRecord { owner: owner.unwrap_or(Player::Max), label, actions, valuation: val });
        bases.push(state_bases);
    }

    let mut reward_structs = Vec::new();
    for r in &prog.rewards {
        let mut entries = Vec::new();
        for (s, st) in states.iter().enumerate() {
            for (a, base) in st.actions.iter().zip(&bases[s]) {
                let mut total = 0.0;
                for it in &r.items {
                    let applies = match &it.action {
                        None => true,
                        Some(x) if x.is_empty() => base == UNLABELLED,
                        Some(x) => x == base,
                    };
                    if applies && holds(&it.guard, &st.valuation, Pos::default())? {
                        total += eval(&it.value, &st.valuation, Pos::default())?.as_f64().unwrap_or(0.0);
                    }
                }
                if total != 0.0 {
                    entries.push((s, a.name.clone(), total));
                }
            }
        }
        reward_structs.push(RewardStruct::new(r.name.clone(), entries).map_err(|e| PrismError::new(Pos::default(), ErrorKind::Model(e)))?);
    }

    Model::new(
        prog.kind,
        prog.labels.iter().map(|(n, _)| n.clone()).collect(),
        prog.vars.iter().map(|v| v.name.clone()).collect(),
        states,
        0,
        reward_structs,
    )
    .map_err(|e| PrismError::new(Pos::default(), ErrorKind::Model(e)))
}
