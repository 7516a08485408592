use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Pos, PrismError};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// `x'` on the left of an update.
    Primed(String),
    Int(i64),
    Real(f64),
    Str(String),
    LBrack,
    RBrack,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Question,
    DotDot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Primed(s) => write!(f, "`{s}'`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Real(r) => write!(f, "`{r}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Eof => f.write_str("end of input"),
            other => {
                let s = match other {
                    Tok::LBrack => "[",
                    Tok::RBrack => "]",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::Semi => ";",
                    Tok::Colon => ":",
                    Tok::Comma => ",",
                    Tok::Arrow => "->",
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Slash => "/",
                    Tok::Lt => "<",
                    Tok::Le => "<=",
                    Tok::Gt => ">",
                    Tok::Ge => ">=",
                    Tok::Eq => "=",
                    Tok::Ne => "!=",
                    Tok::Not => "!",
                    Tok::And => "&",
                    Tok::Or => "|",
                    Tok::Implies => "=>",
                    Tok::Iff => "<=>",
                    Tok::Question => "?",
                    Tok::DotDot => "..",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, PrismError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        ($n:expr) => {{
            i += $n;
            col += $n;
        }};
    }
    while i < bytes.len() {
        let c = bytes[i];
        let pos = Pos { line, col };
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b' ' | b'\t' | b'\r' => bump!(1),
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'"' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j] != b'"' && bytes[j] != b'\n' {
                    j += 1;
                }
                if j >= bytes.len() || bytes[j] != b'"' {
                    return Err(PrismError::syntax(pos, "closing `\"`", "end of line"));
                }
                out.push((Tok::Str(String::from(&src[start..j])), pos));
                bump!(j + 1 - i);
            }
            b'0'..=b'9' => {
                let start = i;
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let mut real = false;
                // `..` after an integer is a range, not a fraction
                if j + 1 < bytes.len() && bytes[j] == b'.' && bytes[j + 1] != b'.' {
                    real = true;
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        real = true;
                        j = k;
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let text = &src[start..j];
                let tok = if real {
                    Tok::Real(text.parse().map_err(|_| PrismError::syntax(pos, "number", text))?)
                } else {
                    Tok::Int(text.parse().map_err(|_| PrismError::syntax(pos, "integer in range", text))?)
                };
                out.push((tok, pos));
                bump!(j - i);
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let name = String::from(&src[start..j]);
                if j < bytes.len() && bytes[j] == b'\'' {
                    out.push((Tok::Primed(name), pos));
                    bump!(j + 1 - i);
                } else {
                    out.push((Tok::Ident(name), pos));
                    bump!(j - i);
                }
            }
            _ => {
                let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
                let three = if i + 2 < bytes.len() { &src[i..i + 3] } else { "" };
                let (tok, n) = if three == "<=>" {
                    (Tok::Iff, 3)
                } else {
                    match two {
                        "->" => (Tok::Arrow, 2),
                        "<=" => (Tok::Le, 2),
                        ">=" => (Tok::Ge, 2),
                        "!=" => (Tok::Ne, 2),
                        "=>" => (Tok::Implies, 2),
                        ".." => (Tok::DotDot, 2),
                        _ => {
                            let t = match c {
                                b'[' => Tok::LBrack,
                                b']' => Tok::RBrack,
                                b'(' => Tok::LParen,
                                b')' => Tok::RParen,
                                b';' => Tok::Semi,
                                b':' => Tok::Colon,
                                b',' => Tok::Comma,
                                b'+' => Tok::Plus,
                                b'-' => Tok::Minus,
                                b'*' => Tok::Star,
                                b'/' => Tok::Slash,
                                b'<' => Tok::Lt,
                                b'>' => Tok::Gt,
                                b'=' => Tok::Eq,
                                b'!' => Tok::Not,
                                b'&' => Tok::And,
                                b'|' => Tok::Or,
                                b'?' => Tok::Question,
                                _ => {
                                    let ch = src[i..].chars().next().unwrap_or('?');
                                    return Err(PrismError::syntax(pos, "a token", &alloc::format!("`{ch}`")));
                                }
                            };
                            (t, 1)
                        }
                    }
                };
                out.push((tok, pos));
                bump!(n);
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn ranges_and_primes() {
        assert_eq!(
            toks("x:[0..7] (x'=x+1)"),
            [
                Tok::Ident("x".into()),
                Tok::Colon,
                Tok::LBrack,
                Tok::Int(0),
                Tok::DotDot,
                Tok::Int(7),
                Tok::RBrack,
                Tok::LParen,
                Tok::Primed("x".into()),
                Tok::Eq,
                Tok::Ident("x".into()),
                Tok::Plus,
                Tok::Int(1),
                Tok::RParen,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reals_and_comments() {
        assert_eq!(toks("0.5 1e-3 2 // c\n<=>"), [
            Tok::Real(0.5),
            Tok::Real(1e-3),
            Tok::Int(2),
            Tok::Iff,
            Tok::Eof
        ]);
    }

    #[test]
    fn bad_character_has_position() {
        let err = tokenize("mdp\n  #").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 3 });
    }
}
