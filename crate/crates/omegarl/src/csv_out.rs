//! CSV outputs: strategies and per-episode learning statistics.

use std::io::Write;

use omegarl_core::model::{Model, ModelKind, Strategy};
use omegarl_core::product::Product;
use omegarl_core::rl::EpisodeStats;

/// One row per decision state (owner has two or more actions and a
/// strategy for that owner is given): the model variables, the automaton
/// state, for games the player, and the chosen action. Rows are sorted by
/// valuation, then automaton state.
pub fn write_strategy<W: Write>(w: W, model: &Model, p: &Product, strategies: &[&Strategy]) -> csv::Result<()> {
    let game = model.kind == ModelKind::Smg;
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = model.var_names.iter().map(String::as_str).collect();
    header.push("aut_state");
    if game {
        header.push("player");
    }
    header.push("action");
    out.write_record(&header)?;
    let mut rows: Vec<(&[i64], usize, Vec<String>)> = Vec::new();
    for (s, st) in p.states.iter().enumerate() {
        let Some((m, q)) = st.pair else { continue };
        if st.actions.len() < 2 {
            continue;
        }
        let Some(a) = strategies.iter().find(|x| x.player == st.owner).and_then(|x| x.choice(s)) else {
            continue;
        };
        let val = &model.states[m].valuation;
        let mut rec: Vec<String> = val.iter().map(i64::to_string).collect();
        rec.push(q.to_string());
        if game {
            rec.push(st.owner.to_string());
        }
        rec.push(st.actions[a].name.clone());
        rows.push((val, q, rec));
    }
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for (_, _, rec) in rows {
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_stats<W: Write>(w: W, stats: &[EpisodeStats]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["episode", "return", "steps"])?;
    for s in stats {
        out.write_record([s.episode.to_string(), format!("{:?}", s.ret), s.steps.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
