//! Front-end for the subset of the PRISM language used by the corpus.
//!
//! Grammar (EBNF, `//` comments allowed anywhere):
//!
//! ```text
//! program   ::= ("mdp" | "smg") item*
//! item      ::= const | module | label | player | rewards
//! const     ::= "const" ("int" | "double" | "bool") ID "=" expr ";"
//! module    ::= "module" ID (var | command)* "endmodule"
//! var       ::= ID ":" "[" expr ".." expr "]" ("init" expr)? ";"
//! command   ::= "[" ID? "]" expr "->" branches ";"
//! branches  ::= updates | expr ":" updates ("+" expr ":" updates)*
//! updates   ::= "true" | "(" ID' "=" expr ")" ("&" "(" ID' "=" expr ")")*
//! label     ::= "label" STRING "=" expr ";"
//! player    ::= "player" ID "[" ID "]" ("," "[" ID "]")* "endplayer"
//! rewards   ::= "rewards" STRING? (("[" ID? "]")? expr ":" expr ";")* "endrewards"
//! ```
//!
//! `+` is arithmetic inside expressions and separates probabilistic
//! branches after an update list. Modules synchronize on shared action
//! labels; unlabelled commands interleave. Formulas, global variables,
//! module renaming and other model types are rejected.
//!
//! Player blocks follow the PRISM-games syntax restricted to action lists;
//! the first player declared is Max, the second Min.

mod ast;
mod elab;
mod explore;
mod lexer;
mod parser;

use alloc::string::String;
use core::fmt;

pub use ast::{
    BinOp, Branch, Command, ConstDecl, Expr, Func, LabelDecl, Module, PlayerDecl, Program,
    RewardItem, RewardsDecl, Type, UnOp, Update, VarDecl,
};
pub use elab::{elaborate, eval_expr, ElabCommand, ElabVar, ElaboratedProgram, Value};
pub use explore::build_model;

/// Source position, 1-based.
///
/// Positions never take part in structural comparison, so two programs
/// that differ only in layout compare equal.
#[derive(Clone, Copy, Debug, Default, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ErrorKind {
    Syntax { expected: String, found: String },
    Type(String),
    UnknownIdentifier(String),
    BadModelKind(String),
    Unsupported(String),
    DivisionByZero,
    Deadlock(String),
    ProbabilitySum(f64),
    OutOfRange { var: String, value: i64 },
    UnassignedAction(String),
    MixedOwnership(String),
    Model(crate::model::ModelError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrismError {
    pub pos: Pos,
    pub kind: ErrorKind,
}

impl PrismError {
    pub(crate) fn new(pos: Pos, kind: ErrorKind) -> Self {
        PrismError { pos, kind }
    }

    pub(crate) fn syntax(pos: Pos, expected: &str, found: &str) -> Self {
        PrismError::new(
            pos,
            ErrorKind::Syntax {
                expected: String::from(expected),
                found: String::from(found),
            },
        )
    }
}

impl fmt::Display for PrismError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.pos)?;
        match &self.kind {
            ErrorKind::Syntax { expected, found } => write!(f, "expected {expected}, found {found}"),
            ErrorKind::Type(m) => write!(f, "type error: {m}"),
            ErrorKind::UnknownIdentifier(n) => write!(f, "unknown identifier `{n}`"),
            ErrorKind::BadModelKind(k) => write!(f, "model type `{k}` is not supported (use mdp or smg)"),
            ErrorKind::Unsupported(m) => write!(f, "unsupported: {m}"),
            ErrorKind::DivisionByZero => f.write_str("division by zero"),
            ErrorKind::Deadlock(s) => write!(f, "deadlock in state {s}"),
            ErrorKind::ProbabilitySum(s) => write!(f, "branch probabilities sum to {s}, expected 1"),
            ErrorKind::OutOfRange { var, value } => write!(f, "update sets `{var}` to {value}, outside its range"),
            ErrorKind::UnassignedAction(a) => write!(f, "action `{a}` is not assigned to a player"),
            ErrorKind::MixedOwnership(s) => write!(f, "state {s} enables actions of both players"),
            ErrorKind::Model(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PrismError {}

/// Parses and elaborates PRISM source text.
pub fn parse_prism(src: &str) -> Result<ElaboratedProgram, PrismError> {
    elaborate(&parse_program(src)?)
}

/// Parses PRISM source text into an AST without elaborating it.
pub fn parse_program(src: &str) -> Result<Program, PrismError> {
    parser::Parser::new(lexer::tokenize(src)?).program()
}
