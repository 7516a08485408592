use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::Pos;
use crate::model::ModelKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Type {
    Int,
    Double,
    Bool,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Int => "int",
            Type::Double => "double",
            Type::Bool => "bool",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Mul,
    Div,
    Add,
    Sub,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Iff,
    Implies,
}

impl BinOp {
    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Implies => 2,
            BinOp::Iff => 3,
            BinOp::Or => 4,
            BinOp::And => 5,
            BinOp::Eq | BinOp::Ne => 7,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 8,
            BinOp::Add | BinOp::Sub => 9,
            BinOp::Mul | BinOp::Div => 10,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Iff => "<=>",
            BinOp::Implies => "=>",
        }
    }

    /// `=>` groups to the right, everything else to the left.
    pub fn right_assoc(self) -> bool {
        self == BinOp::Implies
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Min,
    Max,
    Floor,
    Ceil,
    Mod,
    Pow,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Min => "min",
            Func::Max => "max",
            Func::Floor => "floor",
            Func::Ceil => "ceil",
            Func::Mod => "mod",
            Func::Pow => "pow",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "min" => Func::Min,
            "max" => Func::Max,
            "floor" => Func::Floor,
            "ceil" => Func::Ceil,
            "mod" => Func::Mod,
            "pow" => Func::Pow,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Real(f64),
    Bool(bool),
    Ident(String),
    /// A resolved variable slot; only produced by elaboration.
    Var(usize),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Ite(..) => 1,
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Unary(UnOp::Not, _) => 6,
            Expr::Unary(UnOp::Neg, _) => 11,
            _ => 12,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(i) => write!(f, "{i}"),
            Expr::Real(r) => write!(f, "{r:?}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Ident(n) => f.write_str(n),
            Expr::Var(i) => write!(f, "#{i}"),
            Expr::Unary(UnOp::Neg, e) => {
                f.write_str("-")?;
                e.fmt_child(f, 12)
            }
            Expr::Unary(UnOp::Not, e) => {
                f.write_str("!")?;
                e.fmt_child(f, 7)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let (lmin, rmin) = if op.right_assoc() { (p + 1, p) } else { (p, p + 1) };
                l.fmt_child(f, lmin)?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_child(f, rmin)
            }
            Expr::Ite(c, t, e) => {
                c.fmt_child(f, 2)?;
                f.write_str(" ? ")?;
                t.fmt_child(f, 2)?;
                f.write_str(" : ")?;
                e.fmt_child(f, 1)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstDecl {
    pub ty: Type,
    pub name: String,
    pub value: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub low: Expr,
    pub high: Expr,
    pub init: Option<Expr>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Update {
    pub var: String,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// `None` for the single-branch shorthand with probability one.
    pub prob: Option<Expr>,
    /// Empty for `true`.
    pub updates: Vec<Update>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Command {
    pub action: Option<String>,
    pub guard: Expr,
    pub branches: Vec<Branch>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Module {
    pub name: String,
    pub vars: Vec<VarDecl>,
    pub commands: Vec<Command>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelDecl {
    pub name: String,
    pub expr: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlayerDecl {
    pub name: String,
    pub actions: Vec<String>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardItem {
    /// `None` for a state reward, which applies to every action.
    pub action: Option<String>,
    pub guard: Expr,
    pub value: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardsDecl {
    pub name: Option<String>,
    pub items: Vec<RewardItem>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub kind: ModelKind,
    pub constants: Vec<ConstDecl>,
    pub modules: Vec<Module>,
    pub labels: Vec<LabelDecl>,
    pub players: Vec<PlayerDecl>,
    pub rewards: Vec<RewardsDecl>,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.prob {
            write!(f, "{p} : ")?;
        }
        if self.updates.is_empty() {
            return f.write_str("true");
        }
        for (i, u) in self.updates.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "({}'={})", u.var, u.value)?;
        }
        Ok(())
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.kind)?;
        if !self.constants.is_empty() {
            writeln!(f)?;
        }
        for c in &self.constants {
            writeln!(f, "const {} {} = {};", c.ty, c.name, c.value)?;
        }
        for p in &self.players {
            writeln!(f)?;
            write!(f, "player {}", p.name)?;
            for (i, a) in p.actions.iter().enumerate() {
                f.write_str(if i == 0 { " " } else { ", " })?;
                write!(f, "[{a}]")?;
            }
            writeln!(f, " endplayer")?;
        }
        for m in &self.modules {
            writeln!(f)?;
            writeln!(f, "module {}", m.name)?;
            for v in &m.vars {
                write!(f, "  {} : [{}..{}]", v.name, v.low, v.high)?;
                if let Some(init) = &v.init {
                    write!(f, " init {init}")?;
                }
                writeln!(f, ";")?;
            }
            for c in &m.commands {
                write!(f, "  [{}] {} -> ", c.action.as_deref().unwrap_or(""), c.guard)?;
                for (i, b) in c.branches.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{b}")?;
                }
                writeln!(f, ";")?;
            }
            writeln!(f, "endmodule")?;
        }
        if !self.labels.is_empty() {
            writeln!(f)?;
        }
        for l in &self.labels {
            writeln!(f, "label \"{}\" = {};", l.name, l.expr)?;
        }
        for r in &self.rewards {
            writeln!(f)?;
            match &r.name {
                Some(n) => writeln!(f, "rewards \"{n}\"")?,
                None => writeln!(f, "rewards")?,
            }
            for it in &r.items {
                f.write_str("  ")?;
                if let Some(a) = &it.action {
                    write!(f, "[{a}] ")?;
                }
                writeln!(f, "{} : {};", it.guard, it.value)?;
            }
            writeln!(f, "endrewards")?;
        }
        Ok(())
    }
}
