//! Content digests that tie saved Q-tables to the inputs they were learned
//! on. Both digests cover the parsed objects, so layout and comments in
//! the input files do not matter.

use std::fmt::Write;

use omegarl_core::automaton::{emit_hoa, Automaton};
use omegarl_core::model::Model;
use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn model_digest(m: &Model) -> String {
    let mut h = Sha256::new();
    let mut line = format!("{} {} {}\n{}\n", m.kind, m.initial, m.ap_names.join(","), m.var_names.join(","));
    h.update(line.as_bytes());
    for st in &m.states {
        line.clear();
        let _ = write!(line, "{} {} {:?}", st.owner, st.label.0, st.valuation);
        for a in &st.actions {
            let _ = write!(line, " [{}", a.name);
            for (p, t) in a.distribution.support() {
                let _ = write!(line, " {p:?}:{t}");
            }
            line.push(']');
        }
        line.push('\n');
        h.update(line.as_bytes());
    }
    hex(&h.finalize())
}

pub fn automaton_digest(a: &Automaton) -> String {
    hex(&Sha256::digest(emit_hoa(a).as_bytes()))
}
