//! A small arithmetic language for meridian components `x(s)`, `y(s)`.
//!
//! Grammar (no implicit multiplication):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number | 's' | 'pi' | 'e' | param | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | ln | sqrt | neg
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, ParseError, Result};
use crate::jet::Jet3;

/// Named parameter bindings, e.g. `lambda = 2`.
pub type Params = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Neg,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "neg" => Func::Neg,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Neg => "neg",
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

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Param(String),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Parameter names referenced by the tree, sorted and deduplicated.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self {
            Expr::Param(n) => out.push(n.clone()),
            Expr::Call(_, a) => a.collect_params(out),
            Expr::Binary(_, l, r) => {
                l.collect_params(out);
                r.collect_params(out);
            }
            Expr::Num(_) | Expr::Var => {}
        }
    }

    pub fn depends_on_s(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Num(_) | Expr::Param(_) => false,
            Expr::Call(_, a) => a.depends_on_s(),
            Expr::Binary(_, l, r) => l.depends_on_s() || r.depends_on_s(),
        }
    }

    /// Value and first three `s`-derivatives at `s`.
    pub fn eval_jet(&self, s: f64, params: &Params) -> Result<Jet3> {
        let j = self.jet(s, params)?;
        if !j.is_finite() {
            return Err(domain(s, "non-finite result"));
        }
        Ok(j)
    }

    pub fn eval(&self, s: f64, params: &Params) -> Result<f64> {
        self.eval_jet(s, params).map(|j| j.value)
    }

    fn jet(&self, s: f64, params: &Params) -> Result<Jet3> {
        Ok(match self {
            Expr::Num(v) => Jet3::constant(*v),
            Expr::Var => Jet3::variable(s),
            Expr::Param(name) => Jet3::constant(
                *params
                    .get(name)
                    .ok_or_else(|| Error::UnboundParameter(name.clone()))?,
            ),
            Expr::Call(f, a) => {
                let a = a.jet(s, params)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Neg => -a,
                    Func::Ln => {
                        if a.value <= 0.0 {
                            return Err(domain(s, format!("ln of non-positive value {}", a.value)));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a.value <= 0.0 {
                            return Err(domain(s, format!("sqrt of non-positive value {}", a.value)));
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let l = l.jet(s, params)?;
                let r = r.jet(s, params)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r.value == 0.0 {
                            return Err(domain(s, "division by zero"));
                        }
                        l / r
                    }
                    BinOp::Pow => pow_checked(l, r, s)?,
                }
            }
        })
    }
}

fn domain(s: f64, message: impl Into<String>) -> Error {
    Error::Eval {
        s,
        message: message.into(),
    }
}

fn pow_checked(base: Jet3, exp: Jet3, s: f64) -> Result<Jet3> {
    if exp.is_constant() {
        let p = exp.value;
        let integral = p.fract() == 0.0 && p.abs() < i32::MAX as f64;
        if base.value == 0.0 && p < 3.0 && !(integral && p >= 0.0) {
            return Err(domain(s, format!("0^{p} is not differentiable")));
        }
        if base.value < 0.0 && !integral {
            return Err(domain(s, format!("negative base to non-integer power {p}")));
        }
        Ok(base.powf(p))
    } else {
        if base.value <= 0.0 {
            return Err(domain(s, "non-positive base with variable exponent"));
        }
        Ok(base.pow(exp))
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized; parses back to an equivalent tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => write!(f, "(-{})", -v),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "s"),
            Expr::Param(n) => write!(f, "{n}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parse_expr_with_params(text, &[])
}

/// Like [`parse_expr`] but additionally accepts the given identifiers as
/// parameters, bound at evaluation time.
pub fn parse_expr_with_params(text: &str, params: &[&str]) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        params,
    };
    if p.tokens.is_empty() {
        return Err(ParseError::new(0, "empty expression"));
    }
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::new(t.offset, format!("unexpected {}", t.kind)));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Num(v) => write!(f, "number {v}"),
            TokKind::Ident(n) => write!(f, "identifier `{n}`"),
            TokKind::Op(c) => write!(f, "`{c}`"),
            TokKind::LParen => write!(f, "`(`"),
            TokKind::RParen => write!(f, "`)`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when followed by digits, so `2e` stays `2` `e`
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
                    .map_err(|_| ParseError::new(start, format!("malformed number `{lit}`")))?;
                out.push(Token {
                    kind: TokKind::Num(v),
                    offset: start,
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: TokKind::Ident(text[start..i].to_string()),
                    offset: start,
                });
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token {
                    kind: TokKind::Op(c as char),
                    offset: start,
                });
                i += 1;
            }
            b'(' => {
                out.push(Token {
                    kind: TokKind::LParen,
                    offset: start,
                });
                i += 1;
            }
            b')' => {
                out.push(Token {
                    kind: TokKind::RParen,
                    offset: start,
                });
                i += 1;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(start, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    params: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek_op(&self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokKind::Op(c),
                ..
            }) if ops.contains(c) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek_op(&['+', '-']) {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek_op(&['*', '/']) {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_op(&['-']).is_some() {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::call(Func::Neg, inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek_op(&['^']).is_some() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self, open_at: usize) -> Result<(), ParseError> {
        match self.next() {
            Some(Token {
                kind: TokKind::RParen,
                ..
            }) => Ok(()),
            Some(t) => Err(ParseError::new(
                t.offset,
                format!("expected `)` to close `(` at {open_at}, found {}", t.kind),
            )),
            None => Err(ParseError::new(
                self.end,
                format!("unbalanced `(` at {open_at}: unexpected end of input"),
            )),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.next() else {
            return Err(ParseError::new(self.end, "unexpected end of input"));
        };
        match tok.kind {
            TokKind::Num(v) => Ok(Expr::Num(v)),
            TokKind::LParen => {
                let e = self.expr()?;
                self.expect_rparen(tok.offset)?;
                Ok(e)
            }
            TokKind::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    match self.next() {
                        Some(Token {
                            kind: TokKind::LParen,
                            offset,
                        }) => {
                            let arg = self.expr()?;
                            self.expect_rparen(offset)?;
                            Ok(Expr::call(f, arg))
                        }
                        Some(t) => Err(ParseError::new(
                            t.offset,
                            format!("expected `(` after `{name}`"),
                        )),
                        None => Err(ParseError::new(
                            self.end,
                            format!("expected `(` after `{name}`"),
                        )),
                    }
                } else {
                    match name.as_str() {
                        "s" => Ok(Expr::Var),
                        "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                        "e" => Ok(Expr::Num(std::f64::consts::E)),
                        _ if self.params.contains(&name.as_str()) => Ok(Expr::Param(name)),
                        _ => Err(ParseError::new(
                            tok.offset,
                            format!("unknown identifier `{name}`"),
                        )),
                    }
                }
            }
            other => Err(ParseError::new(tok.offset, format!("unexpected {other}"))),
        }
    }
}
