use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{AcceptanceKind, AutState, Automaton, Edge, EpsilonEdge, Guard, Valuation, MAX_APS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HoaErrorKind {
    Syntax(String),
    UnsupportedFeature(String),
    UnsupportedAcceptance(String),
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoaError {
    pub line: usize,
    pub col: usize,
    pub kind: HoaErrorKind,
}

impl fmt::Display for HoaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match &self.kind {
            HoaErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            HoaErrorKind::UnsupportedFeature(m) => write!(f, "unsupported feature: {m}"),
            HoaErrorKind::UnsupportedAcceptance(m) => write!(f, "unsupported acceptance: {m}"),
            HoaErrorKind::Invalid(m) => write!(f, "{m}"),
        }
    }
}

impl core::error::Error for HoaError {}

#[derive(Clone, Debug, PartialEq)]
enum T {
    /// `name:` header keyword
    Header(String),
    Ident(String),
    Alias(String),
    Int(u32),
    Str(String),
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Body,
    End,
    Eof,
}

fn lex(src: &str) -> Result<Vec<(T, usize, usize)>, HoaError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, m: &str| HoaError { line, col, kind: HoaErrorKind::Syntax(m.to_string()) };
    while i < b.len() {
        let (l, c) = (line, col);
        let start = i;
        let ch = b[i];
        let tok = match ch {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
                continue;
            }
            b'/' if b.get(i + 1) == Some(&b'*') => {
                i += 2;
                while i < b.len() && !(b[i] == b'*' && b.get(i + 1) == Some(&b'/')) {
                    if b[i] == b'\n' {
                        line += 1;
                        col = 0;
                    }
                    i += 1;
                    col += 1;
                }
                if i >= b.len() {
                    return Err(err(l, c, "unterminated comment"));
                }
                i += 2;
                col += 2;
                continue;
            }
            b'"' => {
                let mut s = String::new();
                i += 1;
                while i < b.len() && b[i] != b'"' {
                    if b[i] == b'\\' && i + 1 < b.len() {
                        i += 1;
                    }
                    if b[i] == b'\n' {
                        line += 1;
                        col = 0;
                    }
                    s.push(b[i] as char);
                    i += 1;
                }
                if i >= b.len() {
                    return Err(err(l, c, "unterminated string"));
                }
                i += 1;
                T::Str(s)
            }
            b'0'..=b'9' => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                T::Int(src[start..i].parse().map_err(|_| err(l, c, "integer too large"))?)
            }
            b'-' if src[i..].starts_with("--BODY--") => {
                i += 8;
                T::Body
            }
            b'-' if src[i..].starts_with("--END--") => {
                i += 7;
                T::End
            }
            b'@' => {
                i += 1;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'-') {
                    i += 1;
                }
                T::Alias(src[start + 1..i].to_string())
            }
            c0 if c0.is_ascii_alphabetic() || c0 == b'_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'-') {
                    i += 1;
                }
                let word = src[start..i].to_string();
                if b.get(i) == Some(&b':') {
                    i += 1;
                    T::Header(word)
                } else {
                    T::Ident(word)
                }
            }
            _ => {
                i += 1;
                match ch {
                    b'[' => T::LBrack,
                    b']' => T::RBrack,
                    b'{' => T::LBrace,
                    b'}' => T::RBrace,
                    b'(' => T::LParen,
                    b')' => T::RParen,
                    b'!' => T::Not,
                    b'&' => T::And,
                    b'|' => T::Or,
                    _ => return Err(err(l, c, &format!("unexpected character `{}`", src[start..].chars().next().unwrap_or('?')))),
                }
            }
        };
        col += i - start;
        out.push((tok, l, c));
    }
    out.push((T::Eof, line, col));
    Ok(out)
}

/// Boolean formula over acceptance sets.
#[derive(Clone, Debug, PartialEq)]
enum Acc {
    Bool(bool),
    Inf(u32),
    Fin(u32),
    And(Box<Acc>, Box<Acc>),
    Or(Box<Acc>, Box<Acc>),
}

/// Label expression before canonicalization.
#[derive(Clone, Debug)]
enum Lbl {
    Const(bool),
    Ap(u32),
    Not(Box<Lbl>),
    And(Box<Lbl>, Box<Lbl>),
    Or(Box<Lbl>, Box<Lbl>),
}

impl Lbl {
    fn eval(&self, v: Valuation) -> bool {
        match self {
            Lbl::Const(b) => *b,
            Lbl::Ap(i) => v >> i & 1 == 1,
            Lbl::Not(x) => !x.eval(v),
            Lbl::And(a, b) => a.eval(v) && b.eval(v),
            Lbl::Or(a, b) => a.eval(v) || b.eval(v),
        }
    }
}

struct P {
    toks: Vec<(T, usize, usize)>,
    at: usize,
    aliases: Vec<(String, Lbl)>,
    num_aps: Option<usize>,
}

impl P {
    fn peek(&self) -> &T {
        &self.toks[self.at].0
    }

    fn next(&mut self) -> T {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail(&self, kind: HoaErrorKind) -> HoaError {
        let (_, line, col) = self.toks[self.at];
        HoaError { line, col, kind }
    }

    fn syntax(&self, expected: &str) -> HoaError {
        self.fail(HoaErrorKind::Syntax(format!("expected {expected}, found {:?}", self.peek())))
    }

    fn unsupported(&self, what: &str) -> HoaError {
        self.fail(HoaErrorKind::UnsupportedFeature(what.to_string()))
    }

    fn int(&mut self) -> Result<u32, HoaError> {
        match self.peek() {
            T::Int(i) => {
                let i = *i;
                self.next();
                Ok(i)
            }
            _ => Err(self.syntax("integer")),
        }
    }

    fn string(&mut self) -> Result<String, HoaError> {
        match self.peek().clone() {
            T::Str(s) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.syntax("string")),
        }
    }

    fn expect(&mut self, t: T) -> Result<(), HoaError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            Err(self.syntax(&format!("{t:?}")))
        }
    }

    fn acc_or(&mut self) -> Result<Acc, HoaError> {
        let mut l = self.acc_and()?;
        while *self.peek() == T::Or {
            self.next();
            l = Acc::Or(Box::new(l), Box::new(self.acc_and()?));
        }
        Ok(l)
    }

    fn acc_and(&mut self) -> Result<Acc, HoaError> {
        let mut l = self.acc_atom()?;
        while *self.peek() == T::And {
            self.next();
            l = Acc::And(Box::new(l), Box::new(self.acc_atom()?));
        }
        Ok(l)
    }

    fn acc_atom(&mut self) -> Result<Acc, HoaError> {
        match self.next() {
            T::Ident(s) if s == "t" => Ok(Acc::Bool(true)),
            T::Ident(s) if s == "f" => Ok(Acc::Bool(false)),
            T::Ident(s) if s == "Inf" || s == "Fin" => {
                self.expect(T::LParen)?;
                if *self.peek() == T::Not {
                    return Err(self.unsupported("negated acceptance sets"));
                }
                let i = self.int()?;
                self.expect(T::RParen)?;
                Ok(if s == "Inf" { Acc::Inf(i) } else { Acc::Fin(i) })
            }
            T::LParen => {
                let a = self.acc_or()?;
                self.expect(T::RParen)?;
                Ok(a)
            }
            _ => {
                self.at -= 1;
                Err(self.syntax("acceptance condition"))
            }
        }
    }

    fn lbl_or(&mut self) -> Result<Lbl, HoaError> {
        let mut l = self.lbl_and()?;
        while *self.peek() == T::Or {
            self.next();
            l = Lbl::Or(Box::new(l), Box::new(self.lbl_and()?));
        }
        Ok(l)
    }

    fn lbl_and(&mut self) -> Result<Lbl, HoaError> {
        let mut l = self.lbl_atom()?;
        while *self.peek() == T::And {
            self.next();
            l = Lbl::And(Box::new(l), Box::new(self.lbl_atom()?));
        }
        Ok(l)
    }

    fn lbl_atom(&mut self) -> Result<Lbl, HoaError> {
        match self.peek().clone() {
            T::Ident(s) if s == "t" || s == "f" => {
                self.next();
                Ok(Lbl::Const(s == "t"))
            }
            T::Int(i) => {
                if self.num_aps.is_some_and(|n| i as usize >= n) {
                    return Err(self.fail(HoaErrorKind::Invalid(format!("proposition {i} is not declared"))));
                }
                self.next();
                Ok(Lbl::Ap(i))
            }
            T::Not => {
                self.next();
                Ok(Lbl::Not(Box::new(self.lbl_atom()?)))
            }
            T::Alias(a) => {
                let found = self.aliases.iter().find(|(n, _)| *n == a).map(|(_, l)| l.clone());
                match found {
                    Some(l) => {
                        self.next();
                        Ok(l)
                    }
                    None => Err(self.fail(HoaErrorKind::Invalid(format!("undefined alias @{a}")))),
                }
            }
            T::LParen => {
                self.next();
                let l = self.lbl_or()?;
                self.expect(T::RParen)?;
                Ok(l)
            }
            _ => Err(self.syntax("label expression")),
        }
    }

    /// Skips the values of an ignored header.
    fn skip_values(&mut self) {
        while !matches!(self.peek(), T::Header(_) | T::Body | T::Eof) {
            self.next();
        }
    }
}

fn classify(acc: &Acc, acc_name: &Option<(String, Vec<String>)>) -> Result<AcceptanceKind, String> {
    if let Some((name, args)) = acc_name {
        if name == "parity" {
            let ok = args.len() == 3 && args[0] == "max" && args[1] == "odd";
            let colors = args.get(2).and_then(|c| c.parse::<u32>().ok());
            return match (ok, colors) {
                (true, Some(n)) if n >= 1 => Ok(AcceptanceKind::ParityMaxOdd { colors: n }),
                _ => Err(format!("parity {} (only `parity max odd n` is accepted)", args.join(" "))),
            };
        }
    }
    use Acc::*;
    Ok(match acc {
        Inf(i) => AcceptanceKind::Buchi { set: *i },
        Fin(i) => AcceptanceKind::CoBuchi { set: *i },
        And(a, b) => match (&**a, &**b) {
            (Fin(f), Inf(i)) | (Inf(i), Fin(f)) => AcceptanceKind::Rabin1 { fin: *f, inf: *i },
            (Inf(_), Inf(_)) => return Err("generalized Büchi".to_string()),
            _ => return Err("conjunctions beyond a single Rabin pair".to_string()),
        },
        Or(a, b) => match (&**a, &**b) {
            (Fin(f), Inf(i)) | (Inf(i), Fin(f)) => AcceptanceKind::Streett1 { fin: *f, inf: *i },
            _ => return Err("disjunctions beyond a single Streett pair".to_string()),
        },
        Bool(_) => return Err("constant acceptance".to_string()),
    })
}

/// Parses a HOA v1 automaton with transition-based acceptance and explicit
/// labels, and normalizes its acceptance to max-odd parity priorities.
pub fn parse_hoa(src: &str) -> Result<Automaton, HoaError> {
    let mut p = P { toks: lex(src)?, at: 0, aliases: Vec::new(), num_aps: None };
    match p.next() {
        T::Header(h) if h == "HOA" => {}
        _ => {
            p.at = 0;
            return Err(p.syntax("`HOA:` header"));
        }
    }
    match p.next() {
        T::Ident(v) if v == "v1" => {}
        _ => {
            p.at -= 1;
            return Err(p.syntax("version `v1`"));
        }
    }
    let mut name = None;
    let mut num_states: Option<usize> = None;
    let mut start: Option<usize> = None;
    let mut ap_names: Vec<String> = Vec::new();
    let mut acc: Option<(u32, Acc)> = None;
    let mut acc_name: Option<(String, Vec<String>)> = None;
    let mut eps: Vec<(usize, usize, u32)> = Vec::new();
    loop {
        let header = match p.peek().clone() {
            T::Header(h) => h,
            T::Body => break,
            _ => return Err(p.syntax("header or `--BODY--`")),
        };
        p.next();
        match header.as_str() {
            "States" => num_states = Some(p.int()? as usize),
            "Start" => {
                if start.is_some() {
                    return Err(p.unsupported("multiple initial states"));
                }
                start = Some(p.int()? as usize);
                if *p.peek() == T::And {
                    return Err(p.unsupported("conjunctive initial states"));
                }
            }
            "AP" => {
                let n = p.int()? as usize;
                if n > MAX_APS {
                    return Err(p.unsupported(&format!("{n} atomic propositions (at most {MAX_APS})")));
                }
                for _ in 0..n {
                    ap_names.push(p.string()?);
                }
                p.num_aps = Some(n);
            }
            "Alias" => {
                let a = match p.next() {
                    T::Alias(a) => a,
                    _ => {
                        p.at -= 1;
                        return Err(p.syntax("alias name"));
                    }
                };
                let l = p.lbl_or()?;
                p.aliases.push((a, l));
            }
            "Acceptance" => {
                let n = p.int()?;
                acc = Some((n, p.acc_or()?));
            }
            "acc-name" => {
                let n = match p.next() {
                    T::Ident(n) => n,
                    _ => {
                        p.at -= 1;
                        return Err(p.syntax("acceptance name"));
                    }
                };
                let mut args = Vec::new();
                loop {
                    match p.peek().clone() {
                        T::Ident(a) => args.push(a),
                        T::Int(i) => args.push(i.to_string()),
                        _ => break,
                    }
                    p.next();
                }
                acc_name = Some((n, args));
            }
            "name" => name = Some(p.string()?),
            "tool" | "properties" => p.skip_values(),
            "X-epsilon" => {
                let mut vals = Vec::new();
                while let T::Int(i) = p.peek() {
                    vals.push(*i);
                    p.next();
                }
                if vals.len() % 3 != 0 {
                    return Err(p.syntax("triples `source target priority` in X-epsilon"));
                }
                eps.extend(vals.chunks(3).map(|c| (c[0] as usize, c[1] as usize, c[2])));
            }
            h if h.starts_with(|c: char| c.is_ascii_uppercase()) => {
                p.at -= 1;
                return Err(p.unsupported(&format!("header `{h}:`")));
            }
            _ => p.skip_values(),
        }
    }
    p.next();

    let (num_sets, acc) = acc.ok_or_else(|| p.fail(HoaErrorKind::Syntax("missing `Acceptance:` header".into())))?;
    let acceptance = classify(&acc, &acc_name).map_err(|m| p.fail(HoaErrorKind::UnsupportedAcceptance(m)))?;
    let n_aps = ap_names.len();
    let mut states: Vec<AutState> = vec![AutState::default(); num_states.unwrap_or(0)];
    let mut declared: Vec<bool> = vec![false; states.len()];
    let mut targets: Vec<(usize, usize, usize)> = Vec::new();

    while *p.peek() != T::End {
        match p.next() {
            T::Header(h) if h == "State" => {}
            _ => {
                p.at -= 1;
                return Err(p.syntax("`State:` or `--END--`"));
            }
        }
        if *p.peek() == T::LBrack {
            return Err(p.unsupported("state labels"));
        }
        let s = p.int()? as usize;
        if s >= states.len() {
            if num_states.is_some() {
                return Err(p.fail(HoaErrorKind::Invalid(format!("state {s} exceeds the declared state count"))));
            }
            states.resize(s + 1, AutState::default());
            declared.resize(s + 1, false);
        }
        if declared[s] {
            return Err(p.fail(HoaErrorKind::Invalid(format!("state {s} declared twice"))));
        }
        declared[s] = true;
        if let T::Str(n) = p.peek().clone() {
            p.next();
            states[s].name = Some(n);
        }
        if *p.peek() == T::LBrace {
            return Err(p.unsupported("state-based acceptance"));
        }
        loop {
            match p.peek() {
                T::LBrack => {}
                T::Int(_) => return Err(p.unsupported("implicit labels")),
                _ => break,
            }
            p.next();
            let (_, line, col) = p.toks[p.at];
            let lbl = p.lbl_or()?;
            p.expect(T::RBrack)?;
            let guard = Guard::from_fn(n_aps, |v| lbl.eval(v));
            if guard.is_false() {
                return Err(HoaError { line, col, kind: HoaErrorKind::UnsupportedFeature("unsatisfiable edge label".into()) });
            }
            let target = p.int()? as usize;
            if *p.peek() == T::And {
                return Err(p.unsupported("universal branching"));
            }
            let mut marks = Vec::new();
            if *p.peek() == T::LBrace {
                p.next();
                while let T::Int(i) = p.peek() {
                    if *i >= num_sets {
                        return Err(p.fail(HoaErrorKind::Invalid(format!("acceptance set {i} not declared"))));
                    }
                    marks.push(*i);
                    p.next();
                }
                p.expect(T::RBrace)?;
            }
            marks.sort_unstable();
            marks.dedup();
            targets.push((s, states[s].edges.len(), line));
            states[s].edges.push(Edge { guard, target, priority: 0, marks });
        }
    }
    let end = p.toks[p.at].clone();

    let n = states.len();
    let invalid = |line, m: String| HoaError { line, col: 1, kind: HoaErrorKind::Invalid(m) };
    for (s, e, line) in targets {
        let t = states[s].edges[e].target;
        if t >= n {
            return Err(invalid(line, format!("edge target {t} is not a state")));
        }
    }
    for (src, tgt, prio) in eps {
        if src >= n || tgt >= n {
            return Err(invalid(1, format!("X-epsilon edge {src} -> {tgt} mentions an unknown state")));
        }
        states[src].epsilon.push(EpsilonEdge { target: tgt, priority: prio });
    }
    let initial = start.ok_or_else(|| invalid(1, "missing `Start:` header".into()))?;
    if initial >= n {
        return Err(invalid(1, format!("initial state {initial} is not a state")));
    }
    let aut = Automaton { name, ap_names, initial, states, acceptance, num_sets };
    let aut = aut.normalize_to_parity().map_err(|e| HoaError { line: end.1, col: end.2, kind: HoaErrorKind::UnsupportedAcceptance(e.to_string()) })?;
    if !acceptance.is_buchi() && !aut.is_deterministic() && !aut.has_epsilon() {
        return Err(HoaError {
            line: end.1,
            col: end.2,
            kind: HoaErrorKind::UnsupportedFeature("nondeterministic automata must use Büchi acceptance".into()),
        });
    }
    Ok(aut)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG3: &str = r#"HOA: v1
States: 4
Start: 0
AP: 2 "rich" "poor"
acc-name: Buchi
Acceptance: 1 Inf(0)
--BODY--
State: 0
[!0&!1] 0
[0] 1 {0}
[!0&1] 2
State: 1
[t] 1 {0}
State: 2
[!0&!1] 2
[0] 1 {0}
[!0&1] 3
State: 3
[t] 3
--END--
"#;

    #[test]
    fn gambler_dba() {
        let a = parse_hoa(FIG3).unwrap();
        assert_eq!(a.len(), 4);
        assert!(a.is_deterministic());
        assert_eq!(a.acceptance, AcceptanceKind::Buchi { set: 0 });
        let accepting: Vec<(usize, usize)> = a
            .states
            .iter()
            .enumerate()
            .flat_map(|(s, st)| st.edges.iter().filter(|e| e.priority == 1).map(move |e| (s, e.target)))
            .collect();
        assert_eq!(accepting, [(0, 1), (1, 1), (2, 1)]);
    }

    #[test]
    fn trivial_accepting_loop() {
        let a = parse_hoa("HOA: v1 States: 1 Start: 0 AP: 0 Acceptance: 1 Inf(0) --BODY-- State: 0 [t] 0 {0} --END--").unwrap();
        assert_eq!(a.states[0].edges[0].priority, 1);
    }

    #[test]
    fn rejections() {
        let cases = [
            ("HOA: v1 States: 1 Start: 0 AP: 0 Acceptance: 1 Inf(0) --BODY-- State: 0 {0} [t] 0 --END--", "state-based"),
            ("HOA: v1 States: 1 Start: 0 Start: 0 AP: 0 Acceptance: 1 Inf(0) --BODY-- State: 0 [t] 0 --END--", "multiple"),
            ("HOA: v1 States: 1 Start: 0 AP: 1 \"a\" Acceptance: 1 Inf(0) --BODY-- State: 0 0 0 --END--", "implicit"),
            ("HOA: v1 States: 1 Start: 0 AP: 0 Acceptance: 2 Inf(0)&Inf(1) --BODY-- State: 0 [t] 0 --END--", "generalized"),
            ("HOA: v1 States: 1 Start: 0 AP: 0 acc-name: parity min even 2 Acceptance: 2 Inf(0) | Fin(1) --BODY-- State: 0 [t] 0 {0} --END--", "parity"),
        ];
        for (src, what) in cases {
            let e = parse_hoa(src).unwrap_err();
            assert!(
                matches!(e.kind, HoaErrorKind::UnsupportedFeature(_) | HoaErrorKind::UnsupportedAcceptance(_)),
                "{what}: {e}"
            );
        }
    }
}
