//! Q-table text format.
//!
//! ```text
//! # omegarl q-table v1
//! # scheme: zeta-buchi
//! # ... one `# key: value` line per hyperparameter ...
//! # model: <sha256>
//! # automaton: <sha256>
//! # tables: 1
//! state_id,action_id,value
//! 5:0,0,0.5
//! sink,0,0.0
//! ```
//!
//! `state_id` is `m:q` (model state, automaton state) or `sink`; `action_id`
//! indexes the state's menu. A Double Q-learning table has two blocks, the
//! second introduced by `# table 1`. Values use the shortest round-trip
//! decimal form, so load followed by save reproduces the file exactly.

use std::fmt::Write;
use std::fs;
use std::path::Path;

use omegarl_core::rl::{Hyperparams, QTable, StateKey};

pub const MAGIC: &str = "# omegarl q-table v1";
const COLUMNS: &str = "state_id,action_id,value";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum QFileError {
    #[error("{which} digest mismatch: table has {found}, input has {expected}")]
    DigestMismatch { which: &'static str, expected: String, found: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct QFile {
    /// Header entries in file order.
    pub meta: Vec<(String, String)>,
    pub q: QTable,
}

pub fn hyperparam_meta(hp: &Hyperparams) -> Vec<(String, String)> {
    let mut m: Vec<(&str, String)> = vec![
        ("scheme", hp.scheme.name().into()),
        ("learner", hp.learner.name().into()),
        ("alpha", format!("{:?}", hp.alpha)),
        ("gamma", format!("{:?}", hp.gamma)),
        ("gamma_b", format!("{:?}", hp.gamma_b)),
        ("epsilon", format!("{:?}", hp.epsilon)),
        ("anneal", hp.anneal.to_string()),
        ("zeta", format!("{:?}", hp.zeta)),
        ("lambda", format!("{:?}", hp.lambda)),
        ("trace", hp.trace.name().into()),
        ("episodes", hp.episodes.to_string()),
        ("max_ep_length", hp.max_ep_length.to_string()),
        ("seed", hp.seed.to_string()),
    ];
    if let Some(r) = &hp.reward_struct {
        m.push(("reward_struct", r.clone()));
    }
    m.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn show_key(k: StateKey) -> String {
    match k {
        Some((m, q)) => format!("{m}:{q}"),
        None => "sink".into(),
    }
}

fn parse_key(s: &str) -> Option<StateKey> {
    if s == "sink" {
        return Some(None);
    }
    let (m, q) = s.split_once(':')?;
    Some(Some((m.parse().ok()?, q.parse().ok()?)))
}

impl QFile {
    pub fn new(q: QTable, hp: &Hyperparams, model_digest: &str, automaton_digest: &str) -> QFile {
        let mut meta = hyperparam_meta(hp);
        meta.push(("model".into(), model_digest.into()));
        meta.push(("automaton".into(), automaton_digest.into()));
        QFile { meta, q }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "# tables: {}", self.q.tables.len());
        out.push_str(COLUMNS);
        out.push('\n');
        for (i, t) in self.q.tables.iter().enumerate() {
            if i > 0 {
                let _ = writeln!(out, "# table {i}");
            }
            for (k, row) in t {
                for (a, v) in row.iter().enumerate() {
                    let _ = writeln!(out, "{},{a},{v:?}", show_key(*k));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<QFile, QFileError> {
        let err = |line: usize, msg: &str| QFileError::Parse { line, msg: msg.into() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, MAGIC)) => {}
            _ => return Err(err(1, "not an omegarl q-table")),
        }
        let mut meta = Vec::new();
        let mut tables = None;
        for (n, l) in lines.by_ref() {
            if l == COLUMNS {
                break;
            }
            let (k, v) = l.strip_prefix("# ").and_then(|r| r.split_once(": ")).ok_or_else(|| err(n, "expected `# key: value`"))?;
            if k == "tables" {
                tables = Some(v.parse::<usize>().map_err(|_| err(n, "bad table count"))?);
            } else {
                meta.push((k.to_string(), v.to_string()));
            }
        }
        let count = tables.filter(|&t| t == 1 || t == 2).ok_or_else(|| err(0, "missing or bad `# tables:` header"))?;
        let mut q = QTable::new(count == 2);
        let mut current = 0;
        for (n, l) in lines {
            if let Some(rest) = l.strip_prefix("# table ") {
                current = rest.parse().ok().filter(|&t| t > current && t < count).ok_or_else(|| err(n, "bad table marker"))?;
                continue;
            }
            let mut f = l.split(',');
            let (Some(k), Some(a), Some(v), None) = (f.next(), f.next(), f.next(), f.next()) else {
                return Err(err(n, "expected three fields"));
            };
            let k = parse_key(k).ok_or_else(|| err(n, "bad state id"))?;
            let a: usize = a.parse().map_err(|_| err(n, "bad action id"))?;
            let v: f64 = v.parse().map_err(|_| err(n, "bad value"))?;
            if !v.is_finite() {
                return Err(err(n, "value is not finite"));
            }
            let row = q.tables[current].entry(k).or_default();
            if a != row.len() {
                return Err(err(n, "action ids must count up from 0 per state"));
            }
            row.push(v);
        }
        if count == 2 && q.tables[0].iter().map(|(k, r)| (k, r.len())).ne(q.tables[1].iter().map(|(k, r)| (k, r.len()))) {
            return Err(err(0, "the two tables cover different entries"));
        }
        Ok(QFile { meta, q })
    }

    pub fn check_digests(&self, model_digest: &str, automaton_digest: &str) -> Result<(), QFileError> {
        for (which, expected) in [("model", model_digest), ("automaton", automaton_digest)] {
            let found = self.get(which).unwrap_or("");
            if found != expected {
                return Err(QFileError::DigestMismatch { which, expected: expected.into(), found: found.into() });
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_text())
    }

    pub fn load(path: &Path) -> anyhow::Result<QFile> {
        Ok(QFile::parse(&fs::read_to_string(path)?)?)
    }
}
