//! A small expression language for right-hand sides.
//!
//! Grammar (whitespace insensitive, byte offsets reported in errors):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?            right associative
//! atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! so `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`. Numbers are unsigned
//! decimal literals with an optional exponent part; a leading minus always
//! parses as negation. Identifiers not followed by `(` are variables and
//! are resolved at evaluation time through a [`Bindings`] lookup, which
//! lets the same parsed tree serve scalar equations (`t`, `x`, `d1`, ...)
//! and systems (`t`, `x1`, ..., `xk`).
//!
//! Arithmetic follows IEEE semantics (`1/0` is infinite, `0/0` is NaN);
//! only the special functions raise domain errors, carrying the byte
//! offset of the offending call.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::specfun::{gamma, mittag_leffler};

/// Built-in functions callable from expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Gamma,
    Mlf,
    Exp,
    Sin,
    Cos,
    Abs,
    Sqrt,
    Pow,
}

impl Builtin {
    fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "gamma" => Some(Builtin::Gamma),
            "mlf" => Some(Builtin::Mlf),
            "exp" => Some(Builtin::Exp),
            "sin" => Some(Builtin::Sin),
            "cos" => Some(Builtin::Cos),
            "abs" => Some(Builtin::Abs),
            "sqrt" => Some(Builtin::Sqrt),
            "pow" => Some(Builtin::Pow),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Gamma => "gamma",
            Builtin::Mlf => "mlf",
            Builtin::Exp => "exp",
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Abs => "abs",
            Builtin::Sqrt => "sqrt",
            Builtin::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::Mlf => 3,
            Builtin::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Var(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Builtin, Vec<Expr>),
}

/// A parsed expression node. `offset` is the byte position of the node's
/// first token in the source; it participates in error messages but not in
/// equality.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub offset: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

/// Variable lookup used by [`Expr::eval`].
pub trait Bindings {
    fn get(&self, name: &str) -> Option<f64>;
}

impl Bindings for HashMap<String, f64> {
    fn get(&self, name: &str) -> Option<f64> {
        HashMap::get(self, name).copied()
    }
}

/// Bindings over parallel name and value slices, cheap to rebuild per call
/// inside solver right-hand sides.
pub struct SliceBindings<'a> {
    pub names: &'a [String],
    pub values: &'a [f64],
}

impl Bindings for SliceBindings<'_> {
    fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

// ---------------------------------------------------------------- lexing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let start = self.pos;
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                }
                b'+' => self.push1(&mut out, Tok::Plus),
                b'-' => self.push1(&mut out, Tok::Minus),
                b'*' => self.push1(&mut out, Tok::Star),
                b'/' => self.push1(&mut out, Tok::Slash),
                b'^' => self.push1(&mut out, Tok::Caret),
                b'(' => self.push1(&mut out, Tok::LParen),
                b')' => self.push1(&mut out, Tok::RParen),
                b',' => self.push1(&mut out, Tok::Comma),
                b'0'..=b'9' | b'.' => {
                    let tok = self.lex_number()?;
                    out.push((tok, start));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    while self.pos < self.src.len()
                        && matches!(self.src[self.pos], b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'_')
                    {
                        self.pos += 1;
                    }
                    let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                    out.push((Tok::Ident(name), start));
                }
                other => {
                    return Err(Error::Syntax {
                        offset: start,
                        message: format!("unexpected character `{}`", other as char),
                    });
                }
            }
        }
        Ok(out)
    }

    fn push1(&mut self, out: &mut Vec<(Tok, usize)>, tok: Tok) {
        out.push((tok, self.pos));
        self.pos += 1;
    }

    fn lex_number(&mut self) -> Result<Tok> {
        let start = self.pos;
        let mut saw_digit = false;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
            saw_digit = true;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
                saw_digit = true;
            }
        }
        if !saw_digit {
            return Err(Error::Syntax { offset: start, message: "malformed number".into() });
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // Not an exponent after all; `2e` lexes as `2` then ident `e`.
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        Ok(Tok::Num(value))
    }
}

// --------------------------------------------------------------- parsing

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.at).map(|&(_, o)| o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<usize> {
        match self.toks.get(self.at) {
            Some((t, o)) if t == want => {
                let o = *o;
                self.at += 1;
                Ok(o)
            }
            _ => Err(Error::Syntax { offset: self.offset(), message: format!("expected {what}") }),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            let offset = lhs.offset;
            lhs = Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), offset };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            let offset = lhs.offset;
            lhs = Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), offset };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Tok::Minus) = self.peek() {
            let (_, offset) = self.bump().unwrap();
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), offset });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            let offset = base.offset;
            return Ok(Expr {
                kind: ExprKind::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)),
                offset,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some((Tok::Num(v), offset)) => Ok(Expr { kind: ExprKind::Number(v), offset }),
            Some((Tok::Ident(name), offset)) => {
                if let Some(Tok::LParen) = self.peek() {
                    let builtin = Builtin::from_name(&name)
                        .ok_or(Error::UnknownIdentifier { name: name.clone(), offset })?;
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while let Some(Tok::Comma) = self.peek() {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(&Tok::RParen, "`)`")?;
                    if args.len() != builtin.arity() {
                        return Err(Error::ArityMismatch {
                            name: name.clone(),
                            expected: builtin.arity(),
                            got: args.len(),
                            offset,
                        });
                    }
                    Ok(Expr { kind: ExprKind::Call(builtin, args), offset })
                } else {
                    Ok(Expr { kind: ExprKind::Var(name), offset })
                }
            }
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some((_, offset)) => {
                Err(Error::Syntax { offset, message: "expected a number, name, or `(`".into() })
            }
            None => Err(Error::Syntax {
                offset: self.end,
                message: "unexpected end of expression".into(),
            }),
        }
    }
}

/// Parses an expression, reporting errors with byte offsets.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser { toks, at: 0, end: src.len() };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(Error::Syntax {
            offset: p.offset(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}

// ------------------------------------------------------------ evaluation

impl Expr {
    pub fn eval(&self, bindings: &dyn Bindings) -> Result<f64> {
        match &self.kind {
            ExprKind::Number(v) => Ok(*v),
            ExprKind::Var(name) => {
                bindings.get(name).ok_or_else(|| Error::UnboundVariable(name.clone()))
            }
            ExprKind::Neg(inner) => Ok(-inner.eval(bindings)?),
            ExprKind::Binary(op, l, r) => {
                let a = l.eval(bindings)?;
                let b = r.eval(bindings)?;
                Ok(match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                })
            }
            ExprKind::Call(builtin, args) => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(a.eval(bindings)?);
                }
                let domain =
                    |e: Error| Error::EvalDomain { offset: self.offset, message: e.to_string() };
                Ok(match builtin {
                    Builtin::Gamma => gamma(values[0]).map_err(domain)?,
                    Builtin::Mlf => {
                        mittag_leffler(values[0], values[1], values[2]).map_err(domain)?
                    }
                    Builtin::Exp => values[0].exp(),
                    Builtin::Sin => values[0].sin(),
                    Builtin::Cos => values[0].cos(),
                    Builtin::Abs => values[0].abs(),
                    Builtin::Sqrt => values[0].sqrt(),
                    Builtin::Pow => values[0].powf(values[1]),
                })
            }
        }
    }

    /// Free variable names, each reported once.
    pub fn free_variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.kind {
            ExprKind::Number(_) => {}
            ExprKind::Var(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            ExprKind::Neg(inner) => inner.collect_vars(out),
            ExprKind::Binary(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            ExprKind::Call(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            ExprKind::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            ExprKind::Neg(_) => 3,
            ExprKind::Binary(BinOp::Pow, ..) => 4,
            ExprKind::Number(_) | ExprKind::Var(_) | ExprKind::Call(..) => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, needs_parens: bool) -> fmt::Result {
        if needs_parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    /// Renders with the fewest parentheses that reparse to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Number(v) => write!(f, "{v}"),
            ExprKind::Var(name) => write!(f, "{name}"),
            ExprKind::Neg(inner) => {
                write!(f, "-")?;
                inner.fmt_child(f, inner.precedence() < 3)
            }
            ExprKind::Binary(op, l, r) => {
                let (sym, prec, spaced) = match op {
                    BinOp::Add => ("+", 1, true),
                    BinOp::Sub => ("-", 1, true),
                    BinOp::Mul => ("*", 2, false),
                    BinOp::Div => ("/", 2, false),
                    BinOp::Pow => ("^", 4, false),
                };
                if *op == BinOp::Pow {
                    l.fmt_child(f, l.precedence() <= prec)?;
                } else {
                    l.fmt_child(f, l.precedence() < prec)?;
                }
                if spaced {
                    write!(f, " {sym} ")?;
                } else {
                    write!(f, "{sym}")?;
                }
                if *op == BinOp::Pow {
                    r.fmt_child(f, r.precedence() < prec)
                } else {
                    r.fmt_child(f, r.precedence() <= prec)
                }
            }
            ExprKind::Call(builtin, args) => {
                write!(f, "{}(", builtin.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
