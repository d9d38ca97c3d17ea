//! Expression language for problem files.
//!
//! ```text
//! cmp   := sum (('<' | '<=' | '>' | '>=' | '==') sum)?
//! sum   := prod (('+' | '-') prod)*
//! prod  := unary (('*' | '/') unary)*
//! unary := '-' unary | pow
//! pow   := atom ('^' unary)?
//! atom  := number | 'inf' | name | name '(' args ')' | '(' cmp ')'
//! ```
//!
//! Built-in functions: `exp ln abs sqrt` (one argument), `max min` (two),
//! `if(cond, a, b)` (lazy), and `dot(v, w)` where `v` and `w` are variable
//! groups (`x` stands for `x1, x2, ...`) or bracketed lists `[a, b, ...]`.
//! Comparisons evaluate to 1 or 0.

use std::fmt;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Abs,
    Sqrt,
    Max,
    Min,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "max" => Func::Max,
            "min" => Func::Min,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Max => "max",
            Func::Min => "min",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Max | Func::Min => 2,
            _ => 1,
        }
    }
}

/// One side of a `dot`: a named variable group or an explicit list.
#[derive(Debug, Clone, PartialEq)]
pub enum VecArg {
    Group { prefix: String, indices: Vec<usize> },
    List(Vec<Expr>),
}

impl VecArg {
    fn len(&self) -> usize {
        match self {
            VecArg::Group { indices, .. } => indices.len(),
            VecArg::List(items) => items.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Inf,
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    Dot(VecArg, VecArg),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Depth of the tree, leaves counting as 1.
    pub fn depth(&self) -> usize {
        1 + match self {
            Expr::Num(_) | Expr::Inf | Expr::Var(_) => 0,
            Expr::Neg(a) => a.depth(),
            Expr::Bin(_, a, b) | Expr::Cmp(_, a, b) => a.depth().max(b.depth()),
            Expr::Call(_, args) => args.iter().map(Expr::depth).max().unwrap_or(0),
            Expr::Dot(a, b) => [a, b]
                .iter()
                .map(|v| match v {
                    VecArg::Group { .. } => 1,
                    VecArg::List(items) => items.iter().map(Expr::depth).max().unwrap_or(0),
                })
                .max()
                .unwrap_or(0),
            Expr::If(c, a, b) => c.depth().max(a.depth()).max(b.depth()),
        }
    }

    fn max_var(&self) -> Option<usize> {
        let list_max = |items: &[Expr]| items.iter().filter_map(Expr::max_var).max();
        match self {
            Expr::Num(_) | Expr::Inf => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) => a.max_var(),
            Expr::Bin(_, a, b) | Expr::Cmp(_, a, b) => a.max_var().max(b.max_var()),
            Expr::Call(_, args) => list_max(args),
            Expr::Dot(a, b) => [a, b]
                .iter()
                .filter_map(|v| match v {
                    VecArg::Group { indices, .. } => indices.iter().copied().max(),
                    VecArg::List(items) => list_max(items),
                })
                .max(),
            Expr::If(c, a, b) => c.max_var().max(a.max_var()).max(b.max_var()),
        }
    }
}

/// A parsed expression bound to an ordered list of variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprFn {
    vars: Vec<String>,
    body: Expr,
}

/// `prefix1, ..., prefixN`.
pub fn var_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Parses `text` over the variables `declared_vars` (in binding order).
pub fn parse<S: AsRef<str>>(text: &str, declared_vars: &[S]) -> Result<ExprFn> {
    let vars: Vec<String> = declared_vars.iter().map(|s| s.as_ref().to_string()).collect();
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, vars: &vars, end: text.len() };
    let body = p.cmp()?;
    if let Some(tok) = p.tokens.get(p.pos) {
        return Err(Error::Syntax { offset: tok.offset, message: format!("unexpected {}", tok.kind) });
    }
    Ok(ExprFn { vars, body })
}

impl ExprFn {
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn depth(&self) -> usize {
        self.body.depth()
    }

    /// Highest variable index actually referenced.
    pub fn max_var_index(&self) -> Option<usize> {
        self.body.max_var()
    }

    pub fn eval<T: Scalar>(&self, env: &[T]) -> Result<ExtReal<T>> {
        if env.len() != self.vars.len() {
            return Err(Error::Dimension { expected: self.vars.len(), got: env.len() });
        }
        eval(&self.body, env)
    }

    /// Fully parenthesized canonical form; parsing it yields the same tree.
    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        self.write(&self.body, &mut s);
        s
    }

    fn write(&self, e: &Expr, out: &mut String) {
        match e {
            Expr::Num(v) if *v < 0.0 => out.push_str(&format!("(-{:?})", -v)),
            Expr::Num(v) => out.push_str(&format!("{v:?}")),
            Expr::Inf => out.push_str("inf"),
            Expr::Var(i) => out.push_str(&self.vars[*i]),
            Expr::Neg(a) => {
                out.push_str("(-");
                self.write(a, out);
                out.push(')');
            }
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => " * ",
                    BinOp::Div => " / ",
                    BinOp::Pow => " ^ ",
                };
                out.push('(');
                self.write(a, out);
                out.push_str(sym);
                self.write(b, out);
                out.push(')');
            }
            Expr::Cmp(op, a, b) => {
                let sym = match op {
                    CmpOp::Lt => " < ",
                    CmpOp::Le => " <= ",
                    CmpOp::Gt => " > ",
                    CmpOp::Ge => " >= ",
                    CmpOp::Eq => " == ",
                };
                out.push('(');
                self.write(a, out);
                out.push_str(sym);
                self.write(b, out);
                out.push(')');
            }
            Expr::Call(f, args) => {
                out.push_str(f.name());
                self.write_args(args, out);
            }
            Expr::Dot(a, b) => {
                out.push_str("dot(");
                self.write_vec(a, out);
                out.push_str(", ");
                self.write_vec(b, out);
                out.push(')');
            }
            Expr::If(c, a, b) => {
                out.push_str("if");
                self.write_args(&[(**c).clone(), (**a).clone(), (**b).clone()], out);
            }
        }
    }

    fn write_args(&self, args: &[Expr], out: &mut String) {
        out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.write(a, out);
        }
        out.push(')');
    }

    fn write_vec(&self, v: &VecArg, out: &mut String) {
        match v {
            VecArg::Group { prefix, .. } => out.push_str(prefix),
            VecArg::List(items) => {
                out.push('[');
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    self.write(a, out);
                }
                out.push(']');
            }
        }
    }
}

impl fmt::Display for ExprFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Op(s) => write!(f, "`{s}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    offset: usize,
}

const OPS: [&str; 16] = ["<=", ">=", "==", "<", ">", "+", "-", "*", "/", "^", "(", ")", ",", "[", "]", "="];

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit
                .parse()
                .map_err(|_| Error::Syntax { offset: start, message: format!("malformed number `{lit}`") })?;
            out.push(Token { kind: Tok::Num(v), offset: start });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { kind: Tok::Ident(text[start..i].to_string()), offset: start });
        } else {
            let op = OPS
                .iter()
                .find(|op| text[i..].starts_with(**op))
                .filter(|op| **op != "=")
                .ok_or_else(|| Error::Syntax {
                    offset: i,
                    message: format!("unexpected character `{}`", text[i..].chars().next().unwrap_or('?')),
                })?;
            out.push(Token { kind: Tok::Op(op), offset: i });
            i += op.len();
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- parsing

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    end: usize,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<&'static str> {
        match self.tokens.get(self.pos) {
            Some(Token { kind: Tok::Op(op), .. }) => Some(op),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn unexpected(&self, wanted: &str) -> Error {
        match self.tokens.get(self.pos) {
            Some(t) => Error::Syntax { offset: t.offset, message: format!("expected {wanted}, found {}", t.kind) },
            None => Error::Syntax { offset: self.end, message: format!("expected {wanted}, found end of input") },
        }
    }

    fn expect(&mut self, op: &'static str) -> Result<()> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{op}`")))
        }
    }

    fn cmp(&mut self) -> Result<Expr> {
        let lhs = self.sum()?;
        let op = match self.peek_op() {
            Some("<") => CmpOp::Lt,
            Some("<=") => CmpOp::Le,
            Some(">") => CmpOp::Gt,
            Some(">=") => CmpOp::Ge,
            Some("==") => CmpOp::Eq,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.sum()?;
        Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut acc = self.prod()?;
        loop {
            let op = match self.peek_op() {
                Some("+") => BinOp::Add,
                Some("-") => BinOp::Sub,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.prod()?;
            acc = Expr::Bin(op, Box::new(acc), Box::new(rhs));
        }
    }

    fn prod(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            let op = match self.peek_op() {
                Some("*") => BinOp::Mul,
                Some("/") => BinOp::Div,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            acc = Expr::Bin(op, Box::new(acc), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some("-") {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.pow()
    }

    fn pow(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() == Some("^") {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(tok) = self.tokens.get(self.pos).cloned() else {
            return Err(self.unexpected("an operand"));
        };
        match tok.kind {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::Op("(") => {
                self.pos += 1;
                let inner = self.cmp()?;
                self.expect(")")?;
                Ok(inner)
            }
            Tok::Op(_) => Err(self.unexpected("an operand")),
            Tok::Ident(name) => {
                self.pos += 1;
                if self.peek_op() == Some("(") {
                    return self.call(&name, tok.offset);
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(i));
                }
                if name == "inf" {
                    return Ok(Expr::Inf);
                }
                Err(Error::UnknownIdentifier { name, offset: tok.offset })
            }
        }
    }

    fn call(&mut self, name: &str, offset: usize) -> Result<Expr> {
        self.expect("(")?;
        if name == "dot" {
            let a = self.vec_arg()?;
            self.expect(",")?;
            let b = self.vec_arg()?;
            self.expect(")")?;
            if a.len() != b.len() || a.len() == 0 {
                return Err(Error::Arity { name: "dot".into(), expected: a.len(), got: b.len() });
            }
            return Ok(Expr::Dot(a, b));
        }
        let args = self.arg_list(")")?;
        if name == "if" {
            if args.len() != 3 {
                return Err(Error::Arity { name: "if".into(), expected: 3, got: args.len() });
            }
            let mut it = args.into_iter();
            let (c, a, b) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
            return Ok(Expr::If(Box::new(c), Box::new(a), Box::new(b)));
        }
        let Some(func) = Func::lookup(name) else {
            return Err(Error::UnknownIdentifier { name: name.to_string(), offset });
        };
        if args.len() != func.arity() {
            return Err(Error::Arity { name: name.to_string(), expected: func.arity(), got: args.len() });
        }
        Ok(Expr::Call(func, args))
    }

    fn arg_list(&mut self, close: &'static str) -> Result<Vec<Expr>> {
        let mut args = Vec::new();
        if self.peek_op() == Some(close) {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            args.push(self.cmp()?);
            match self.peek_op() {
                Some(",") => self.pos += 1,
                Some(op) if op == close => {
                    self.pos += 1;
                    return Ok(args);
                }
                _ => return Err(self.unexpected(&format!("`,` or `{close}`"))),
            }
        }
    }

    fn vec_arg(&mut self) -> Result<VecArg> {
        if self.peek_op() == Some("[") {
            self.pos += 1;
            return Ok(VecArg::List(self.arg_list("]")?));
        }
        let offset = self.offset();
        match self.tokens.get(self.pos).map(|t| t.kind.clone()) {
            Some(Tok::Ident(prefix)) => {
                self.pos += 1;
                let mut indices = Vec::new();
                for k in 1.. {
                    match self.vars.iter().position(|v| *v == format!("{prefix}{k}")) {
                        Some(i) => indices.push(i),
                        None => break,
                    }
                }
                if indices.is_empty() {
                    return Err(Error::UnknownIdentifier { name: prefix, offset });
                }
                Ok(VecArg::Group { prefix, indices })
            }
            _ => Err(self.unexpected("a variable group or `[`")),
        }
    }
}

// ---------------------------------------------------------------- evaluation

fn domain<T>(what: &str) -> Result<T> {
    Err(Error::Domain(what.to_string()))
}

fn lift<T: Scalar>(v: T, what: &str) -> Result<ExtReal<T>> {
    ExtReal::checked(v, what)
}

fn add<T: Scalar>(a: ExtReal<T>, b: ExtReal<T>) -> Result<ExtReal<T>> {
    use ExtReal::*;
    match (a, b) {
        (Finite(x), Finite(y)) => lift(x + y, "addition"),
        (PosInf, NegInf) | (NegInf, PosInf) => domain("inf - inf"),
        (PosInf, _) | (_, PosInf) => Ok(PosInf),
        _ => Ok(NegInf),
    }
}

fn sign<T: Scalar>(a: ExtReal<T>) -> i8 {
    match a {
        ExtReal::NegInf => -1,
        ExtReal::PosInf => 1,
        ExtReal::Finite(v) if v > T::zero() => 1,
        ExtReal::Finite(v) if v < T::zero() => -1,
        ExtReal::Finite(_) => 0,
    }
}

fn signed_inf<T: Scalar>(s: i8) -> ExtReal<T> {
    if s > 0 {
        ExtReal::PosInf
    } else {
        ExtReal::NegInf
    }
}

fn mul<T: Scalar>(a: ExtReal<T>, b: ExtReal<T>) -> Result<ExtReal<T>> {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => lift(x * y, "multiplication"),
        _ => match sign(a) * sign(b) {
            0 => domain("0 * inf"),
            s => Ok(signed_inf(s)),
        },
    }
}

fn div<T: Scalar>(a: ExtReal<T>, b: ExtReal<T>) -> Result<ExtReal<T>> {
    match (a, b) {
        (ExtReal::Finite(_), ExtReal::Finite(y)) if y.is_zero() => match sign(a) {
            0 => domain("0 / 0"),
            s => Ok(signed_inf(s)),
        },
        (ExtReal::Finite(x), ExtReal::Finite(y)) => lift(x / y, "division"),
        (ExtReal::Finite(_), _) => Ok(ExtReal::zero()),
        (_, ExtReal::Finite(y)) if y.is_zero() => Ok(a),
        (_, ExtReal::Finite(_)) => Ok(signed_inf(sign(a) * sign(b))),
        _ => domain("inf / inf"),
    }
}

fn pow<T: Scalar>(a: ExtReal<T>, b: ExtReal<T>) -> Result<ExtReal<T>> {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => {
            if x.is_zero() && y < T::zero() {
                let odd = y.fract().is_zero() && (y / T::lit(2.0)).fract() != T::zero();
                return Ok(if odd && x.is_sign_negative() { ExtReal::NegInf } else { ExtReal::PosInf });
            }
            lift(x.powf(y), "power")
        }
        (ExtReal::PosInf, ExtReal::Finite(y)) => Ok(if y > T::zero() {
            ExtReal::PosInf
        } else if y < T::zero() {
            ExtReal::zero()
        } else {
            ExtReal::finite(T::one())
        }),
        (ExtReal::NegInf, ExtReal::Finite(y)) if y.fract().is_zero() => {
            let odd = (y / T::lit(2.0)).fract() != T::zero();
            if y > T::zero() {
                Ok(if odd { ExtReal::NegInf } else { ExtReal::PosInf })
            } else if y < T::zero() {
                Ok(ExtReal::zero())
            } else {
                Ok(ExtReal::finite(T::one()))
            }
        }
        (ExtReal::Finite(x), ExtReal::PosInf) if x >= T::zero() => Ok(if x > T::one() {
            ExtReal::PosInf
        } else if x < T::one() {
            ExtReal::zero()
        } else {
            domain("1 ^ inf")?
        }),
        (ExtReal::Finite(x), ExtReal::NegInf) if x >= T::zero() => Ok(if x > T::one() {
            ExtReal::zero()
        } else if x < T::one() {
            ExtReal::PosInf
        } else {
            domain("1 ^ -inf")?
        }),
        (ExtReal::PosInf, ExtReal::PosInf) => Ok(ExtReal::PosInf),
        (ExtReal::PosInf, ExtReal::NegInf) => Ok(ExtReal::zero()),
        _ => domain("power with infinite operand"),
    }
}

fn eval<T: Scalar>(e: &Expr, env: &[T]) -> Result<ExtReal<T>> {
    Ok(match e {
        Expr::Num(v) => ExtReal::from_float(T::lit(*v))?,
        Expr::Inf => ExtReal::PosInf,
        Expr::Var(i) => ExtReal::from_float(env[*i])?,
        Expr::Neg(a) => -eval(a, env)?,
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval(a, env)?, eval(b, env)?);
            match op {
                BinOp::Add => add(a, b)?,
                BinOp::Sub => add(a, -b)?,
                BinOp::Mul => mul(a, b)?,
                BinOp::Div => div(a, b)?,
                BinOp::Pow => pow(a, b)?,
            }
        }
        Expr::Cmp(op, a, b) => {
            let (a, b) = (eval(a, env)?, eval(b, env)?);
            let holds = match op {
                CmpOp::Lt => a < b,
                CmpOp::Le => a <= b,
                CmpOp::Gt => a > b,
                CmpOp::Ge => a >= b,
                CmpOp::Eq => a == b,
            };
            ExtReal::finite(if holds { T::one() } else { T::zero() })
        }
        Expr::Call(f, args) => {
            let a = eval(&args[0], env)?;
            match f {
                Func::Exp => match a {
                    ExtReal::NegInf => ExtReal::zero(),
                    ExtReal::PosInf => ExtReal::PosInf,
                    ExtReal::Finite(v) => lift(v.exp(), "exp")?,
                },
                Func::Ln => match a {
                    ExtReal::Finite(v) if v > T::zero() => lift(v.ln(), "ln")?,
                    ExtReal::PosInf => ExtReal::PosInf,
                    _ => ExtReal::NegInf,
                },
                Func::Abs => match a {
                    ExtReal::Finite(v) => ExtReal::finite(v.abs()),
                    _ => ExtReal::PosInf,
                },
                Func::Sqrt => match a {
                    ExtReal::Finite(v) if v >= T::zero() => ExtReal::finite(v.sqrt()),
                    ExtReal::PosInf => ExtReal::PosInf,
                    _ => return domain("sqrt of a negative number"),
                },
                Func::Max => a.max(eval(&args[1], env)?),
                Func::Min => a.min(eval(&args[1], env)?),
            }
        }
        Expr::Dot(a, b) => {
            let (u, v) = (vec_values(a, env)?, vec_values(b, env)?);
            let mut acc = ExtReal::zero();
            for (x, y) in u.into_iter().zip(v) {
                acc = add(acc, mul(x, y)?)?;
            }
            acc
        }
        Expr::If(c, a, b) => {
            if eval(c, env)? != ExtReal::zero() {
                eval(a, env)?
            } else {
                eval(b, env)?
            }
        }
    })
}

fn vec_values<T: Scalar>(v: &VecArg, env: &[T]) -> Result<Vec<ExtReal<T>>> {
    match v {
        VecArg::Group { indices, .. } => indices.iter().map(|&i| ExtReal::from_float(env[i])).collect(),
        VecArg::List(items) => items.iter().map(|e| eval(e, env)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, vars: &[&str]) -> ExprFn {
        parse(text, vars).unwrap()
    }

    #[test]
    fn parses_and_evaluates() {
        let e = p("x1^2 + exp(x2)", &["x1", "x2"]);
        assert_eq!(e.depth(), 3);
        assert_eq!(e.eval(&[2.0, 0.0]).unwrap(), ExtReal::finite(5.0));
        let f = p("if(x1>=0, x1^2, inf)", &["x1"]);
        assert_eq!(f.eval(&[-1.0]).unwrap(), ExtReal::PosInf);
        assert_eq!(f.eval(&[3.0]).unwrap(), ExtReal::finite(9.0));
        let g = p("1/(x1*x2+1)", &["x1", "x2"]);
        assert_eq!(g.eval(&[0.0, 5.0]).unwrap(), ExtReal::finite(1.0));
    }

    #[test]
    fn syntax_error_offset() {
        match parse("x1 + ", &["x1"]).unwrap_err() {
            Error::Syntax { offset, .. } => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x1 + (x1", &["x1"]), Err(Error::Syntax { offset: 8, .. })));
        assert!(matches!(parse("x1 $ 2", &["x1"]), Err(Error::Syntax { offset: 3, .. })));
    }

    #[test]
    fn identifier_and_arity_errors() {
        assert!(matches!(parse("x3 + 1", &["x1"]), Err(Error::UnknownIdentifier { offset: 0, .. })));
        assert!(matches!(parse("foo(1)", &["x1"]), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse("exp(1, 2)", &["x1"]), Err(Error::Arity { .. })));
        assert!(matches!(parse("max(1)", &["x1"]), Err(Error::Arity { .. })));
        assert!(matches!(parse("dot(x, y)", &["x1", "x2", "y1"]), Err(Error::Arity { .. })));
    }

    #[test]
    fn precedence() {
        let e = p("-x1^2", &["x1"]);
        assert_eq!(e.eval(&[3.0]).unwrap(), ExtReal::finite(-9.0));
        let e = p("2^3^2", &[] as &[&str]);
        assert_eq!(e.eval::<f64>(&[]).unwrap(), ExtReal::finite(512.0));
        let e = p("2^-1", &[] as &[&str]);
        assert_eq!(e.eval::<f64>(&[]).unwrap(), ExtReal::finite(0.5));
        let e = p("1 + 2 * 3 - 4 / 2 < 6", &[] as &[&str]);
        assert_eq!(e.eval::<f64>(&[]).unwrap(), ExtReal::finite(1.0));
    }

    #[test]
    fn extended_semantics() {
        let e = p("ln(x1)", &["x1"]);
        assert_eq!(e.eval(&[0.0]).unwrap(), ExtReal::NegInf);
        assert_eq!(e.eval(&[-2.0]).unwrap(), ExtReal::NegInf);
        let d = p("x1 / x2", &["x1", "x2"]);
        assert_eq!(d.eval(&[1.0, 0.0]).unwrap(), ExtReal::PosInf);
        assert_eq!(d.eval(&[-1.0, 0.0]).unwrap(), ExtReal::NegInf);
        assert!(matches!(d.eval(&[0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(p("x1 * inf", &["x1"]).eval(&[0.0]), Err(Error::Domain(_))));
        assert!(matches!(p("inf - inf", &["x1"]).eval(&[0.0]), Err(Error::Domain(_))));
        assert!(matches!(p("sqrt(x1)", &["x1"]).eval(&[-1.0]), Err(Error::Domain(_))));
        assert!(matches!(p("x1 ^ 0.5", &["x1"]).eval(&[-1.0]), Err(Error::Domain(_))));
        assert_eq!(p("exp(-inf)", &["x1"]).eval(&[0.0]).unwrap(), ExtReal::zero());
        // Lazy branches: the untaken 0/0 is never evaluated.
        assert_eq!(p("if(x1 > 0, 0/0, 1)", &["x1"]).eval(&[-1.0]).unwrap(), ExtReal::finite(1.0));
    }

    #[test]
    fn dot_groups_and_lists() {
        let vars = var_names("x", 2).into_iter().chain(var_names("y", 2)).collect::<Vec<_>>();
        let e = parse("dot(x, y)", &vars).unwrap();
        assert_eq!(e.eval(&[1.0, 2.0, 3.0, 4.0]).unwrap(), ExtReal::finite(11.0));
        let e = parse("dot([2*x1, 1], y)", &vars).unwrap();
        assert_eq!(e.eval(&[1.0, 2.0, 3.0, 4.0]).unwrap(), ExtReal::finite(10.0));
        assert_eq!(e.to_canonical(), "dot([(2.0 * x1), 1.0], y)");
    }

    #[test]
    fn dimension_checked() {
        assert!(matches!(p("x1", &["x1"]).eval(&[1.0, 2.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn f32_evaluation() {
        let e = p("x1^2 + exp(x2)", &["x1", "x2"]);
        assert_eq!(e.eval(&[2.0f32, 0.0]).unwrap(), ExtReal::finite(5.0f32));
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|v| format!("{}", v as f64 / 8.0)),
            Just("x1".to_string()),
            Just("x2".to_string()),
            Just("inf".to_string()),
        ];
        leaf.prop_recursive(5, 48, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "^", "<", ">="]))
                    .prop_map(|(a, b, op)| format!("{a} {op} {b}")),
                inner.clone().prop_map(|a| format!("-{a}")),
                inner.clone().prop_map(|a| format!("({a})")),
                (inner.clone(), prop::sample::select(vec!["exp", "ln", "abs", "sqrt"]))
                    .prop_map(|(a, f)| format!("{f}({a})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("max({a}, {b})")),
                (inner.clone(), inner.clone(), inner).prop_map(|(c, a, b)| format!("if({c}, {a}, {b})")),
            ]
        })
    }

    proptest! {
        #[test]
        fn canonical_round_trip(text in arb_expr()) {
            if let Ok(first) = parse(&text, &["x1", "x2"]) {
                let again = parse(&first.to_canonical(), &["x1", "x2"]).unwrap();
                prop_assert_eq!(&again, &first);
                prop_assert_eq!(again.to_canonical(), first.to_canonical());
            }
        }

        #[test]
        fn never_nan(text in arb_expr(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
            if let Ok(e) = parse(&text, &["x1", "x2"]) {
                if let Ok(v) = e.eval(&[a, b]) {
                    prop_assert!(!v.to_float().is_nan());
                }
            }
        }
    }
}
