use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::{AcceptanceKind, Automaton};

/// `Acceptance:` formula for `parity max odd n` in the form common tools print.
fn parity_formula(k: u32) -> String {
    if k == 0 {
        return String::from("Fin(0)");
    }
    let inner = parity_formula(k - 1);
    let wrap = |s: String| if s.contains(' ') { format!("({s})") } else { s };
    if k % 2 == 1 {
        format!("Inf({k}) | {}", wrap(inner))
    } else {
        format!("Fin({k}) & {}", wrap(inner))
    }
}

/// Prints the automaton as HOA v1 with its original acceptance condition.
///
/// ε-edges go into an `X-epsilon:` header as `source target priority`
/// triples; tools that do not know the header ignore it.
pub fn emit_hoa(aut: &Automaton) -> String {
    let mut out = String::new();
    let _ = write_hoa(aut, &mut out);
    out
}

fn write_hoa(aut: &Automaton, out: &mut String) -> core::fmt::Result {
    writeln!(out, "HOA: v1")?;
    if let Some(n) = &aut.name {
        writeln!(out, "name: \"{}\"", escape(n))?;
    }
    writeln!(out, "States: {}", aut.len())?;
    writeln!(out, "Start: {}", aut.initial)?;
    write!(out, "AP: {}", aut.ap_names.len())?;
    for a in &aut.ap_names {
        write!(out, " \"{}\"", escape(a))?;
    }
    writeln!(out)?;
    let n = aut.num_sets;
    match aut.acceptance {
        AcceptanceKind::Buchi { set } => {
            if set == 0 && n == 1 {
                writeln!(out, "acc-name: Buchi")?;
            }
            writeln!(out, "Acceptance: {n} Inf({set})")?;
        }
        AcceptanceKind::CoBuchi { set } => {
            if set == 0 && n == 1 {
                writeln!(out, "acc-name: co-Buchi")?;
            }
            writeln!(out, "Acceptance: {n} Fin({set})")?;
        }
        AcceptanceKind::Rabin1 { fin, inf } => writeln!(out, "Acceptance: {n} Fin({fin}) & Inf({inf})")?,
        AcceptanceKind::Streett1 { fin, inf } => writeln!(out, "Acceptance: {n} Fin({fin}) | Inf({inf})")?,
        AcceptanceKind::ParityMaxOdd { colors } => {
            writeln!(out, "acc-name: parity max odd {colors}")?;
            writeln!(out, "Acceptance: {n} {}", parity_formula(colors - 1))?;
        }
    }
    write!(out, "properties: trans-labels explicit-labels trans-acc")?;
    if aut.is_deterministic() {
        write!(out, " deterministic")?;
    }
    writeln!(out)?;
    if aut.has_epsilon() {
        write!(out, "X-epsilon:")?;
        for (s, st) in aut.states.iter().enumerate() {
            for e in &st.epsilon {
                write!(out, " {s} {} {}", e.target, e.priority)?;
            }
        }
        writeln!(out)?;
    }
    writeln!(out, "--BODY--")?;
    for (s, st) in aut.states.iter().enumerate() {
        write!(out, "State: {s}")?;
        if let Some(n) = &st.name {
            write!(out, " \"{}\"", escape(n))?;
        }
        writeln!(out)?;
        for e in &st.edges {
            write!(out, "[{}] {}", e.guard, e.target)?;
            if !e.marks.is_empty() {
                write!(out, " {{")?;
                for (i, m) in e.marks.iter().enumerate() {
                    write!(out, "{}{m}", if i > 0 { " " } else { "" })?;
                }
                write!(out, "}}")?;
            }
            writeln!(out)?;
        }
    }
    writeln!(out, "--END--")
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
