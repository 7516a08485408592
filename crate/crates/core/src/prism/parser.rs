use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::Tok;
use super::{ErrorKind, Pos, PrismError};
use crate::model::ModelKind;

pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

const REJECTED_KEYWORDS: &[(&str, &str)] = &[
    ("formula", "formulas"),
    ("global", "global variables"),
    ("init", "init blocks"),
    ("system", "system composition blocks"),
    ("module_renaming", "module renaming"),
];

impl Parser {
    pub fn new(toks: Vec<(Tok, Pos)>) -> Self {
        Parser { toks, at: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> PrismError {
        PrismError::syntax(self.pos(), expected, &self.peek().to_string())
    }

    fn expect(&mut self, tok: Tok) -> Result<(), PrismError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.err(&tok.to_string()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), PrismError> {
        if self.is_kw(kw) {
            self.next();
            Ok(())
        } else {
            Err(self.err(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self) -> Result<String, PrismError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.err("identifier")),
        }
    }

    pub fn program(&mut self) -> Result<Program, PrismError> {
        let pos = self.pos();
        let kind = match self.next() {
            Tok::Ident(s) if s == "mdp" => ModelKind::Mdp,
            Tok::Ident(s) if s == "smg" => ModelKind::Smg,
            Tok::Ident(s) if ["dtmc", "ctmc", "pta", "probabilistic", "nondeterministic", "stochastic", "csg", "pomdp", "popta", "lts"].contains(&s.as_str()) => {
                return Err(PrismError::new(pos, ErrorKind::BadModelKind(s)));
            }
            other => return Err(PrismError::syntax(pos, "model type `mdp` or `smg`", &other.to_string())),
        };
        let mut prog = Program {
            kind,
            constants: Vec::new(),
            modules: Vec::new(),
            labels: Vec::new(),
            players: Vec::new(),
            rewards: Vec::new(),
        };
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(kw) => match kw.as_str() {
                    "const" => prog.constants.push(self.constant()?),
                    "module" => prog.modules.push(self.module()?),
                    "label" => prog.labels.push(self.label()?),
                    "player" => prog.players.push(self.player()?),
                    "rewards" => prog.rewards.push(self.rewards()?),
                    other => {
                        if let Some((_, what)) = REJECTED_KEYWORDS.iter().find(|(k, _)| *k == other) {
                            return Err(PrismError::new(pos, ErrorKind::Unsupported(format!("{what} are outside the supported subset"))));
                        }
                        return Err(self.err("`const`, `module`, `label`, `player` or `rewards`"));
                    }
                },
                _ => return Err(self.err("`const`, `module`, `label`, `player` or `rewards`")),
            }
        }
        Ok(prog)
    }

    fn constant(&mut self) -> Result<ConstDecl, PrismError> {
        let pos = self.pos();
        self.expect_kw("const")?;
        let ty = match self.peek() {
            Tok::Ident(s) if s == "int" => Type::Int,
            Tok::Ident(s) if s == "double" => Type::Double,
            Tok::Ident(s) if s == "bool" => Type::Bool,
            // PRISM defaults untyped constants to int
            Tok::Ident(_) if matches!(self.peek_at(1), Tok::Eq) => {
                let name = self.ident()?;
                self.expect(Tok::Eq)?;
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                return Ok(ConstDecl { ty: Type::Int, name, value, pos });
            }
            _ => return Err(self.err("`int`, `double` or `bool`")),
        };
        self.next();
        let name = self.ident()?;
        if *self.peek() != Tok::Eq {
            return Err(PrismError::new(
                self.pos(),
                ErrorKind::Unsupported(format!("constant `{name}` has no value; undefined constants are not supported")),
            ));
        }
        self.next();
        let value = self.expr()?;
        self.expect(Tok::Semi)?;
        Ok(ConstDecl { ty, name, value, pos })
    }

    fn module(&mut self) -> Result<Module, PrismError> {
        let pos = self.pos();
        self.expect_kw("module")?;
        let name = self.ident()?;
        if *self.peek() == Tok::Eq {
            return Err(PrismError::new(self.pos(), ErrorKind::Unsupported("module renaming".into())));
        }
        let mut vars = Vec::new();
        let mut commands = Vec::new();
        loop {
            if self.is_kw("endmodule") {
                self.next();
                break;
            }
            match self.peek() {
                Tok::LBrack => commands.push(self.command()?),
                Tok::Ident(_) if matches!(self.peek_at(1), Tok::Colon) => vars.push(self.var()?),
                _ => return Err(self.err("variable declaration, command or `endmodule`")),
            }
        }
        Ok(Module { name, vars, commands, pos })
    }

    fn var(&mut self) -> Result<VarDecl, PrismError> {
        let pos = self.pos();
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        if self.is_kw("bool") {
            return Err(PrismError::new(self.pos(), ErrorKind::Unsupported("boolean variables; use an int range".into())));
        }
        self.expect(Tok::LBrack)?;
        let low = self.expr()?;
        self.expect(Tok::DotDot)?;
        let high = self.expr()?;
        self.expect(Tok::RBrack)?;
        let init = if self.is_kw("init") {
            self.next();
            Some(self.expr()?)
        } else {
            None
        };
        self.expect(Tok::Semi)?;
        Ok(VarDecl { name, low, high, init, pos })
    }

    fn command(&mut self) -> Result<Command, PrismError> {
        let pos = self.pos();
        self.expect(Tok::LBrack)?;
        let action = match self.peek().clone() {
            Tok::Ident(a) => {
                self.next();
                Some(a)
            }
            _ => None,
        };
        self.expect(Tok::RBrack)?;
        let guard = self.expr()?;
        self.expect(Tok::Arrow)?;
        let mut branches = Vec::new();
        loop {
            branches.push(self.branch()?);
            if *self.peek() == Tok::Plus {
                self.next();
            } else {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        Ok(Command { action, guard, branches, pos })
    }

    fn starts_updates(&self) -> bool {
        match self.peek() {
            Tok::LParen => matches!(self.peek_at(1), Tok::Primed(_)),
            Tok::Ident(s) if s == "true" => matches!(self.peek_at(1), Tok::Semi | Tok::Plus),
            _ => false,
        }
    }

    fn branch(&mut self) -> Result<Branch, PrismError> {
        if self.starts_updates() {
            return Ok(Branch { prob: None, updates: self.updates()? });
        }
        let prob = self.expr()?;
        self.expect(Tok::Colon)?;
        if !self.starts_updates() {
            return Err(self.err("update `(x'=...)` or `true`"));
        }
        Ok(Branch { prob: Some(prob), updates: self.updates()? })
    }

    fn updates(&mut self) -> Result<Vec<Update>, PrismError> {
        if self.is_kw("true") {
            self.next();
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        loop {
            self.expect(Tok::LParen)?;
            let var = match self.next() {
                Tok::Primed(v) => v,
                _ => return Err(PrismError::syntax(self.toks[self.at - 1].1, "primed variable", "something else")),
            };
            self.expect(Tok::Eq)?;
            let value = self.expr()?;
            self.expect(Tok::RParen)?;
            out.push(Update { var, value });
            if *self.peek() == Tok::And {
                self.next();
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn label(&mut self) -> Result<LabelDecl, PrismError> {
        let pos = self.pos();
        self.expect_kw("label")?;
        let name = match self.next() {
            Tok::Str(s) => s,
            _ => return Err(PrismError::syntax(pos, "quoted label name", "something else")),
        };
        self.expect(Tok::Eq)?;
        let expr = self.expr()?;
        self.expect(Tok::Semi)?;
        Ok(LabelDecl { name, expr, pos })
    }

    fn player(&mut self) -> Result<PlayerDecl, PrismError> {
        let pos = self.pos();
        self.expect_kw("player")?;
        let name = self.ident()?;
        let mut actions = Vec::new();
        loop {
            if *self.peek() != Tok::LBrack {
                return Err(self.err("`[action]`; player blocks list actions only"));
            }
            self.next();
            actions.push(self.ident()?);
            self.expect(Tok::RBrack)?;
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        self.expect_kw("endplayer")?;
        Ok(PlayerDecl { name, actions, pos })
    }

    fn rewards(&mut self) -> Result<RewardsDecl, PrismError> {
        let pos = self.pos();
        self.expect_kw("rewards")?;
        let name = match self.peek().clone() {
            Tok::Str(s) => {
                self.next();
                Some(s)
            }
            _ => None,
        };
        let mut items = Vec::new();
        while !self.is_kw("endrewards") {
            let ipos = self.pos();
            let action = if *self.peek() == Tok::LBrack {
                self.next();
                let a = match self.peek().clone() {
                    Tok::Ident(a) => {
                        self.next();
                        a
                    }
                    _ => String::new(),
                };
                self.expect(Tok::RBrack)?;
                Some(a)
            } else {
                None
            };
            let guard = self.expr()?;
            self.expect(Tok::Colon)?;
            let value = self.expr()?;
            self.expect(Tok::Semi)?;
            items.push(RewardItem { action, guard, value, pos: ipos });
        }
        self.next();
        Ok(RewardsDecl { name, items, pos })
    }

    pub fn expr(&mut self) -> Result<Expr, PrismError> {
        let cond = self.binary(2)?;
        if *self.peek() == Tok::Question {
            self.next();
            let then = self.binary(2)?;
            self.expect(Tok::Colon)?;
            let other = self.expr()?;
            return Ok(Expr::Ite(Box::new(cond), Box::new(then), Box::new(other)));
        }
        Ok(cond)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::And => BinOp::And,
            Tok::Or => BinOp::Or,
            Tok::Iff => BinOp::Iff,
            Tok::Implies => BinOp::Implies,
            _ => return None,
        })
    }

    /// Precedence climbing over binary operators binding at least `min`.
    fn binary(&mut self, min: u8) -> Result<Expr, PrismError> {
        let mut lhs = self.unary(min)?;
        while let Some(op) = self.binop() {
            let p = op.precedence();
            if p < min {
                break;
            }
            self.next();
            let rhs = self.binary(if op.right_assoc() { p } else { p + 1 })?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self, min: u8) -> Result<Expr, PrismError> {
        match self.peek() {
            Tok::Not if min <= 6 => {
                self.next();
                Ok(Expr::Unary(UnOp::Not, Box::new(self.binary(7)?)))
            }
            Tok::Minus => {
                self.next();
                Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary(11)?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, PrismError> {
        let pos = self.pos();
        match self.next() {
            Tok::Int(i) => Ok(Expr::Int(i)),
            Tok::Real(r) => Ok(Expr::Real(r)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Not => Ok(Expr::Unary(UnOp::Not, Box::new(self.atom()?))),
            Tok::Ident(s) => match s.as_str() {
                "true" => Ok(Expr::Bool(true)),
                "false" => Ok(Expr::Bool(false)),
                _ => match Func::from_name(&s) {
                    Some(func) if *self.peek() == Tok::LParen => {
                        self.next();
                        let mut args = Vec::new();
                        loop {
                            args.push(self.expr()?);
                            if *self.peek() == Tok::Comma {
                                self.next();
                            } else {
                                break;
                            }
                        }
                        self.expect(Tok::RParen)?;
                        Ok(Expr::Call(func, args))
                    }
                    _ => Ok(Expr::Ident(s)),
                },
            },
            other => Err(PrismError::syntax(pos, "expression", &other.to_string())),
        }
    }
}
