//! Name resolution, type checking and constant folding.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::ast::*;
use super::{ErrorKind, Pos, PrismError};
use crate::model::ModelKind;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl Value {
    pub fn ty(self) -> Type {
        match self {
            Value::Int(_) => Type::Int,
            Value::Real(_) => Type::Double,
            Value::Bool(_) => Type::Bool,
        }
    }

    pub fn as_f64(self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(i as f64),
            Value::Real(r) => Some(r),
            Value::Bool(_) => None,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }

    fn into_expr(self) -> Expr {
        match self {
            Value::Int(i) => Expr::Int(i),
            Value::Real(r) => Expr::Real(r),
            Value::Bool(b) => Expr::Bool(b),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElabVar {
    pub name: String,
    pub module: usize,
    pub low: i64,
    pub high: i64,
    pub init: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElabBranch {
    pub prob: Expr,
    /// (variable slot, new value)
    pub updates: Vec<(usize, Expr)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElabCommand {
    pub module: usize,
    pub action: Option<String>,
    pub guard: Expr,
    pub branches: Vec<ElabBranch>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElabRewardItem {
    /// `None` for state rewards, `Some("")` for unlabelled commands.
    pub action: Option<String>,
    pub guard: Expr,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElabRewards {
    pub name: String,
    pub items: Vec<ElabRewardItem>,
}

/// A program with every identifier resolved: constants are folded away
/// and variables appear as `Expr::Var(slot)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElaboratedProgram {
    pub kind: ModelKind,
    pub constants: Vec<(String, Value)>,
    pub module_names: Vec<String>,
    pub vars: Vec<ElabVar>,
    pub commands: Vec<ElabCommand>,
    pub labels: Vec<(String, Expr)>,
    /// Max first, then Min.
    pub players: Vec<(String, Vec<String>)>,
    pub rewards: Vec<ElabRewards>,
}

impl ElaboratedProgram {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }
}

fn type_err(pos: Pos, msg: impl Into<String>) -> PrismError {
    PrismError::new(pos, ErrorKind::Type(msg.into()))
}

fn numeric(t: Type) -> bool {
    matches!(t, Type::Int | Type::Double)
}

struct Scope<'a> {
    constants: &'a [(String, Value)],
    vars: &'a [ElabVar],
    pos: Pos,
}

impl Scope<'_> {
    /// Resolves identifiers, type checks and folds constant subterms.
    fn resolve(&self, e: &Expr) -> Result<(Expr, Type), PrismError> {
        let pos = self.pos;
        let (out, ty) = match e {
            Expr::Int(_) => (e.clone(), Type::Int),
            Expr::Real(_) => (e.clone(), Type::Double),
            Expr::Bool(_) => (e.clone(), Type::Bool),
            Expr::Var(i) => (e.clone(), if *i < self.vars.len() { Type::Int } else { return Err(type_err(pos, "bad variable slot")) }),
            Expr::Ident(n) => {
                if let Some((_, v)) = self.constants.iter().find(|(c, _)| c == n) {
                    return Ok((v.into_expr(), v.ty()));
                }
                match self.vars.iter().position(|v| &v.name == n) {
                    Some(i) => (Expr::Var(i), Type::Int),
                    None => return Err(PrismError::new(pos, ErrorKind::UnknownIdentifier(n.clone()))),
                }
            }
            Expr::Unary(op, x) => {
                let (x, t) = self.resolve(x)?;
                let ty = match op {
                    UnOp::Neg if numeric(t) => t,
                    UnOp::Not if t == Type::Bool => t,
                    UnOp::Neg => return Err(type_err(pos, "unary `-` needs a number")),
                    UnOp::Not => return Err(type_err(pos, "`!` needs a boolean")),
                };
                (Expr::Unary(*op, Box::new(x)), ty)
            }
            Expr::Binary(op, l, r) => {
                let (l, lt) = self.resolve(l)?;
                let (r, rt) = self.resolve(r)?;
                let ty = binary_type(*op, lt, rt).ok_or_else(|| {
                    type_err(pos, format!("operator `{}` cannot combine {lt} and {rt}", op.symbol()))
                })?;
                (Expr::binary(*op, l, r), ty)
            }
            Expr::Ite(c, t, f) => {
                let (c, ct) = self.resolve(c)?;
                if ct != Type::Bool {
                    return Err(type_err(pos, "condition of `?:` must be boolean"));
                }
                let (t, tt) = self.resolve(t)?;
                let (f, ft) = self.resolve(f)?;
                let ty = if tt == ft {
                    tt
                } else if numeric(tt) && numeric(ft) {
                    Type::Double
                } else {
                    return Err(type_err(pos, "branches of `?:` have incompatible types"));
                };
                (Expr::Ite(Box::new(c), Box::new(t), Box::new(f)), ty)
            }
            Expr::Call(func, args) => {
                let mut out = Vec::with_capacity(args.len());
                let mut tys = Vec::with_capacity(args.len());
                for a in args {
                    let (a, t) = self.resolve(a)?;
                    if !numeric(t) {
                        return Err(type_err(pos, format!("`{}` needs numeric arguments", func.name())));
                    }
                    out.push(a);
                    tys.push(t);
                }
                let arity_ok = match func {
                    Func::Min | Func::Max => !args.is_empty(),
                    Func::Floor | Func::Ceil => args.len() == 1,
                    Func::Mod | Func::Pow => args.len() == 2,
                };
                if !arity_ok {
                    return Err(type_err(pos, format!("wrong number of arguments to `{}`", func.name())));
                }
                let all_int = tys.iter().all(|t| *t == Type::Int);
                let ty = match func {
                    Func::Floor | Func::Ceil => Type::Int,
                    Func::Mod if !all_int => return Err(type_err(pos, "`mod` needs integer arguments")),
                    _ if all_int => Type::Int,
                    _ => Type::Double,
                };
                (Expr::Call(*func, out), ty)
            }
        };
        if !has_vars(&out) {
            let v = eval_expr(&out, &[], &[]).map_err(|e| PrismError::new(pos, e.kind))?;
            return Ok((v.into_expr(), ty));
        }
        Ok((out, ty))
    }

    fn expect(&self, e: &Expr, want: Type, what: &str) -> Result<Expr, PrismError> {
        let (e, t) = self.resolve(e)?;
        let ok = t == want || (want == Type::Double && t == Type::Int);
        if !ok {
            return Err(type_err(self.pos, format!("{what} must be {want}, found {t}")));
        }
        Ok(e)
    }

    fn constant_int(&self, e: &Expr, what: &str) -> Result<i64, PrismError> {
        match self.expect(e, Type::Int, what)? {
            Expr::Int(i) => Ok(i),
            _ => Err(type_err(self.pos, format!("{what} must be constant"))),
        }
    }
}

fn binary_type(op: BinOp, l: Type, r: Type) -> Option<Type> {
    use BinOp::*;
    match op {
        Add | Sub | Mul if numeric(l) && numeric(r) => Some(if l == Type::Int && r == Type::Int { Type::Int } else { Type::Double }),
        Div if numeric(l) && numeric(r) => Some(Type::Double),
        Lt | Le | Gt | Ge if numeric(l) && numeric(r) => Some(Type::Bool),
        Eq | Ne if (numeric(l) && numeric(r)) || (l == Type::Bool && r == Type::Bool) => Some(Type::Bool),
        And | Or | Iff | Implies if l == Type::Bool && r == Type::Bool => Some(Type::Bool),
        _ => None,
    }
}

fn has_vars(e: &Expr) -> bool {
    match e {
        Expr::Var(_) | Expr::Ident(_) => true,
        Expr::Int(_) | Expr::Real(_) | Expr::Bool(_) => false,
        Expr::Unary(_, x) => has_vars(x),
        Expr::Binary(_, l, r) => has_vars(l) || has_vars(r),
        Expr::Ite(c, t, f) => has_vars(c) || has_vars(t) || has_vars(f),
        Expr::Call(_, a) => a.iter().any(has_vars),
    }
}

fn eval_err(kind: ErrorKind) -> PrismError {
    PrismError::new(Pos::default(), kind)
}

fn num(v: Value) -> Result<f64, PrismError> {
    v.as_f64().ok_or_else(|| eval_err(ErrorKind::Type("expected a number".into())))
}

fn boolean(v: Value) -> Result<bool, PrismError> {
    v.as_bool().ok_or_else(|| eval_err(ErrorKind::Type("expected a boolean".into())))
}

/// Evaluates an expression. `Var(i)` reads `valuation[i]`; identifiers are
/// looked up in `constants`.
pub fn eval_expr(expr: &Expr, valuation: &[i64], constants: &[(String, Value)]) -> Result<Value, PrismError> {
    let ev = |e: &Expr| eval_expr(e, valuation, constants);
    Ok(match expr {
        Expr::Int(i) => Value::Int(*i),
        Expr::Real(r) => Value::Real(*r),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Var(i) => Value::Int(
            *valuation.get(*i).ok_or_else(|| eval_err(ErrorKind::UnknownIdentifier(format!("#{i}"))))?,
        ),
        Expr::Ident(n) => constants
            .iter()
            .find(|(c, _)| c == n)
            .map(|(_, v)| *v)
            .ok_or_else(|| eval_err(ErrorKind::UnknownIdentifier(n.clone())))?,
        Expr::Unary(UnOp::Neg, x) => match ev(x)? {
            Value::Int(i) => Value::Int(i.wrapping_neg()),
            v => Value::Real(-num(v)?),
        },
        Expr::Unary(UnOp::Not, x) => Value::Bool(!boolean(ev(x)?)?),
        Expr::Binary(op, l, r) => {
            use BinOp::*;
            // short-circuit so guards like `x>0 & 1/x<1` stay safe
            match op {
                And => return Ok(Value::Bool(boolean(ev(l)?)? && boolean(ev(r)?)?)),
                Or => return Ok(Value::Bool(boolean(ev(l)?)? || boolean(ev(r)?)?)),
                Implies => return Ok(Value::Bool(!boolean(ev(l)?)? || boolean(ev(r)?)?)),
                _ => {}
            }
            let (a, b) = (ev(l)?, ev(r)?);
            match (op, a, b) {
                (Iff, _, _) => Value::Bool(boolean(a)? == boolean(b)?),
                (Eq, Value::Bool(x), Value::Bool(y)) => Value::Bool(x == y),
                (Ne, Value::Bool(x), Value::Bool(y)) => Value::Bool(x != y),
                (Add, Value::Int(x), Value::Int(y)) => Value::Int(x.wrapping_add(y)),
                (Sub, Value::Int(x), Value::Int(y)) => Value::Int(x.wrapping_sub(y)),
                (Mul, Value::Int(x), Value::Int(y)) => Value::Int(x.wrapping_mul(y)),
                (Eq, Value::Int(x), Value::Int(y)) => Value::Bool(x == y),
                (Ne, Value::Int(x), Value::Int(y)) => Value::Bool(x != y),
                (Lt, Value::Int(x), Value::Int(y)) => Value::Bool(x < y),
                (Le, Value::Int(x), Value::Int(y)) => Value::Bool(x <= y),
                (Gt, Value::Int(x), Value::Int(y)) => Value::Bool(x > y),
                (Ge, Value::Int(x), Value::Int(y)) => Value::Bool(x >= y),
                _ => {
                    let (x, y) = (num(a)?, num(b)?);
                    match op {
                        Add => Value::Real(x + y),
                        Sub => Value::Real(x - y),
                        Mul => Value::Real(x * y),
                        Div if y == 0.0 => return Err(eval_err(ErrorKind::DivisionByZero)),
                        Div => Value::Real(x / y),
                        Eq => Value::Bool(x == y),
                        Ne => Value::Bool(x != y),
                        Lt => Value::Bool(x < y),
                        Le => Value::Bool(x <= y),
                        Gt => Value::Bool(x > y),
                        Ge => Value::Bool(x >= y),
                        _ => unreachable!(),
                    }
                }
            }
        }
        Expr::Ite(c, t, f) => {
            if boolean(ev(c)?)? {
                ev(t)?
            } else {
                ev(f)?
            }
        }
        Expr::Call(func, args) => {
            let vals = args.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
            let all_int = vals.iter().all(|v| matches!(v, Value::Int(_)));
            match func {
                Func::Min | Func::Max if all_int => {
                    let it = vals.iter().filter_map(|v| v.as_int());
                    Value::Int(if *func == Func::Min { it.min() } else { it.max() }.unwrap_or(0))
                }
                Func::Min | Func::Max => {
                    let mut acc = num(vals[0])?;
                    for v in &vals[1..] {
                        let x = num(*v)?;
                        acc = if *func == Func::Min { acc.min(x) } else { acc.max(x) };
                    }
                    Value::Real(acc)
                }
                Func::Floor => Value::Int(libm::floor(num(vals[0])?) as i64),
                Func::Ceil => Value::Int(libm::ceil(num(vals[0])?) as i64),
                Func::Mod => match (vals[0], vals[1]) {
                    (Value::Int(_), Value::Int(0)) => return Err(eval_err(ErrorKind::DivisionByZero)),
                    (Value::Int(x), Value::Int(y)) => Value::Int(x.rem_euclid(y)),
                    _ => return Err(eval_err(ErrorKind::Type("`mod` needs integers".into()))),
                },
                Func::Pow => match (vals[0], vals[1]) {
                    (Value::Int(x), Value::Int(y)) if y >= 0 => Value::Int(x.wrapping_pow(y.min(u32::MAX as i64) as u32)),
                    (a, b) => Value::Real(libm::pow(num(a)?, num(b)?)),
                },
            }
        }
    })
}

/// Resolves and type checks a parsed program.
pub fn elaborate(prog: &Program) -> Result<ElaboratedProgram, PrismError> {
    let mut constants: Vec<(String, Value)> = Vec::new();
    for c in &prog.constants {
        if constants.iter().any(|(n, _)| *n == c.name) {
            return Err(type_err(c.pos, format!("constant `{}` declared twice", c.name)));
        }
        let scope = Scope { constants: &constants, vars: &[], pos: c.pos };
        let e = scope.expect(&c.value, c.ty, &format!("constant `{}`", c.name))?;
        let v = eval_expr(&e, &[], &[]).map_err(|err| PrismError::new(c.pos, err.kind))?;
        let v = match (c.ty, v) {
            (Type::Double, Value::Int(i)) => Value::Real(i as f64),
            _ => v,
        };
        constants.push((c.name.clone(), v));
    }

    if prog.modules.is_empty() {
        return Err(PrismError::syntax(Pos::default(), "at least one module", "none"));
    }
    let mut vars: Vec<ElabVar> = Vec::new();
    let mut module_names: Vec<String> = Vec::new();
    for (mi, m) in prog.modules.iter().enumerate() {
        if module_names.contains(&m.name) {
            return Err(type_err(m.pos, format!("module `{}` declared twice", m.name)));
        }
        module_names.push(m.name.clone());
        for v in &m.vars {
            if vars.iter().any(|w| w.name == v.name) || constants.iter().any(|(n, _)| *n == v.name) {
                return Err(type_err(v.pos, format!("`{}` declared twice", v.name)));
            }
            let scope = Scope { constants: &constants, vars: &[], pos: v.pos };
            let low = scope.constant_int(&v.low, "lower bound")?;
            let high = scope.constant_int(&v.high, "upper bound")?;
            if low > high {
                return Err(type_err(v.pos, format!("empty range for `{}`", v.name)));
            }
            let init = match &v.init {
                Some(e) => scope.constant_int(e, "initial value")?,
                None => low,
            };
            if init < low || init > high {
                return Err(PrismError::new(v.pos, ErrorKind::OutOfRange { var: v.name.clone(), value: init }));
            }
            vars.push(ElabVar { name: v.name.clone(), module: mi, low, high, init });
        }
    }

    let mut commands = Vec::new();
    for (mi, m) in prog.modules.iter().enumerate() {
        for c in &m.commands {
            let scope = Scope { constants: &constants, vars: &vars, pos: c.pos };
            let guard = scope.expect(&c.guard, Type::Bool, "guard")?;
            let mut branches = Vec::new();
            for b in &c.branches {
                let prob = match &b.prob {
                    Some(p) => scope.expect(p, Type::Double, "probability")?,
                    None => Expr::Real(1.0),
                };
                let mut updates = Vec::new();
                for u in &b.updates {
                    let slot = vars
                        .iter()
                        .position(|v| v.name == u.var)
                        .ok_or_else(|| PrismError::new(c.pos, ErrorKind::UnknownIdentifier(u.var.clone())))?;
                    if vars[slot].module != mi {
                        return Err(type_err(c.pos, format!("module `{}` cannot update `{}` of another module", m.name, u.var)));
                    }
                    if updates.iter().any(|(s, _)| *s == slot) {
                        return Err(type_err(c.pos, format!("`{}` updated twice", u.var)));
                    }
                    updates.push((slot, scope.expect(&u.value, Type::Int, &format!("update of `{}`", u.var))?));
                }
                branches.push(ElabBranch { prob, updates });
            }
            commands.push(ElabCommand { module: mi, action: c.action.clone(), guard, branches, pos: c.pos });
        }
    }

    let mut labels: Vec<(String, Expr)> = Vec::new();
    for l in &prog.labels {
        if labels.iter().any(|(n, _)| *n == l.name) {
            return Err(type_err(l.pos, format!("label \"{}\" declared twice", l.name)));
        }
        let scope = Scope { constants: &constants, vars: &vars, pos: l.pos };
        labels.push((l.name.clone(), scope.expect(&l.expr, Type::Bool, "label")?));
    }

    let mut players: Vec<(String, Vec<String>)> = Vec::new();
    match prog.kind {
        ModelKind::Mdp => {
            if let Some(p) = prog.players.first() {
                return Err(type_err(p.pos, "player blocks are only allowed in smg models"));
            }
        }
        ModelKind::Smg => {
            if prog.players.len() != 2 {
                let pos = prog.players.get(2).map(|p| p.pos).unwrap_or_default();
                return Err(type_err(pos, format!("smg models need exactly two players, found {}", prog.players.len())));
            }
            for p in &prog.players {
                for a in &p.actions {
                    if !commands.iter().any(|c| c.action.as_deref() == Some(a.as_str())) {
                        return Err(PrismError::new(p.pos, ErrorKind::UnknownIdentifier(a.clone())));
                    }
                    if players.iter().any(|(_, acts)| acts.contains(a)) || p.actions.iter().filter(|b| *b == a).count() > 1 {
                        return Err(type_err(p.pos, format!("action `{a}` assigned twice")));
                    }
                }
                players.push((p.name.clone(), p.actions.clone()));
            }
        }
    }

    let mut rewards = Vec::new();
    for (ri, r) in prog.rewards.iter().enumerate() {
        let name = r.name.clone().unwrap_or_else(|| if ri == 0 { String::new() } else { ri.to_string() });
        if rewards.iter().any(|x: &ElabRewards| x.name == name) {
            return Err(type_err(r.pos, format!("reward structure \"{name}\" declared twice")));
        }
        let mut items = Vec::new();
        for it in &r.items {
            let scope = Scope { constants: &constants, vars: &vars, pos: it.pos };
            items.push(ElabRewardItem {
                action: it.action.clone(),
                guard: scope.expect(&it.guard, Type::Bool, "reward guard")?,
                value: scope.expect(&it.value, Type::Double, "reward")?,
            });
        }
        rewards.push(ElabRewards { name, items });
    }

    Ok(ElaboratedProgram { kind: prog.kind, constants, module_names, vars, commands, labels, players, rewards })
}
