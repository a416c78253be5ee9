// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! A small expression language over the height `y`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := NUMBER | 'y' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
//! ```
//!
//! `FUNC` is one of `sqrt`, `sin`, `cos`, `exp`, `log` (natural). Exponentiation
//! binds tighter than unary minus and associates to the right, so `-y^2^3`
//! reads `-(y^(2^3))`.

use std::fmt;

use geodesica_core::ScalarFn;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at column {column}")]
pub struct ParseError {
    pub message: String,
    /// One-based character column.
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Y,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// Value and first derivative with respect to `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dual {
    v: f64,
    d: f64,
}

impl Dual {
    fn constant(v: f64) -> Dual {
        Dual { v, d: 0.0 }
    }
}

impl Node {
    fn eval(&self, y: f64) -> Dual {
        match self {
            Node::Num(c) => Dual::constant(*c),
            Node::Y => Dual { v: y, d: 1.0 },
            Node::Neg(a) => {
                let a = a.eval(y);
                Dual { v: -a.v, d: -a.d }
            }
            Node::Add(a, b) => {
                let (a, b) = (a.eval(y), b.eval(y));
                Dual { v: a.v + b.v, d: a.d + b.d }
            }
            Node::Sub(a, b) => {
                let (a, b) = (a.eval(y), b.eval(y));
                Dual { v: a.v - b.v, d: a.d - b.d }
            }
            Node::Mul(a, b) => {
                let (a, b) = (a.eval(y), b.eval(y));
                Dual { v: a.v * b.v, d: a.d * b.v + a.v * b.d }
            }
            Node::Div(a, b) => {
                let (a, b) = (a.eval(y), b.eval(y));
                Dual { v: a.v / b.v, d: (a.d * b.v - a.v * b.d) / (b.v * b.v) }
            }
            Node::Pow(a, b) => pow(a.eval(y), b.eval(y)),
            Node::Call(f, a) => {
                let a = a.eval(y);
                let (v, slope) = match f {
                    Func::Sqrt => {
                        let s = a.v.sqrt();
                        (s, 0.5 / s)
                    }
                    Func::Sin => (a.v.sin(), a.v.cos()),
                    Func::Cos => (a.v.cos(), -a.v.sin()),
                    Func::Exp => {
                        let e = a.v.exp();
                        (e, e)
                    }
                    Func::Log => (a.v.ln(), 1.0 / a.v),
                };
                // Keep constant subexpressions exact where the slope blows up.
                let d = if a.d == 0.0 { 0.0 } else { slope * a.d };
                Dual { v, d }
            }
        }
    }
}

fn pow(a: Dual, b: Dual) -> Dual {
    if b.d == 0.0 {
        let n = b.v;
        let v = if n.fract() == 0.0 && n.abs() <= i32::MAX as f64 { a.v.powi(n as i32) } else { a.v.powf(n) };
        let d = if a.d == 0.0 || n == 0.0 {
            0.0
        } else if n.fract() == 0.0 && n.abs() <= i32::MAX as f64 {
            n * a.v.powi(n as i32 - 1) * a.d
        } else {
            n * a.v.powf(n - 1.0) * a.d
        };
        return Dual { v, d };
    }
    let v = a.v.powf(b.v);
    Dual { v, d: v * (b.d * a.v.ln() + b.v * a.d / a.v) }
}

/// A parsed expression in `y`, with exact first derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Expr, ParseError> {
        let tokens = tokenize(source)?;
        let mut parser = Parser { tokens: &tokens, pos: 0, end: source.chars().count() + 1 };
        let root = parser.expr()?;
        if let Some(t) = parser.peek() {
            return Err(ParseError { message: format!("unexpected {}", t.kind), column: t.column });
        }
        Ok(Expr { source: source.trim().to_owned(), root })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.root.eval(y).v
    }

    pub fn derivative(&self, y: f64) -> f64 {
        self.root.eval(y).d
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Expr, ParseError> {
        Expr::parse(s)
    }
}

impl ScalarFn for Expr {
    fn eval(&self, y: f64) -> f64 {
        Expr::eval(self, y)
    }

    fn derivative(&self, y: f64) -> f64 {
        Expr::derivative(self, y)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Num(f64),
    Ident(String),
    Op(char),
    Open,
    Close,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Num(v) => write!(f, "number {v}"),
            Kind::Ident(s) => write!(f, "'{s}'"),
            Kind::Op(c) => write!(f, "'{c}'"),
            Kind::Open => f.write_str("'('"),
            Kind::Close => f.write_str("')'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    column: usize,
}

fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // Exponent, only when followed by digits so `2e` stays an error.
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v =
                    text.parse::<f64>().map_err(|_| ParseError { message: format!("bad number '{text}'"), column })?;
                tokens.push(Token { kind: Kind::Num(v), column });
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                tokens.push(Token { kind: Kind::Ident(name), column });
                continue;
            }
            '+' | '-' | '*' | '/' | '^' => Kind::Op(c),
            '−' => Kind::Op('-'),
            '×' => Kind::Op('*'),
            '÷' => Kind::Op('/'),
            '(' => Kind::Open,
            ')' => Kind::Close,
            other => return Err(ParseError { message: format!("unexpected character '{other}'"), column }),
        };
        tokens.push(Token { kind, column });
        i += 1;
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
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

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token { kind: Kind::Op(c), .. }) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn error(&self, message: &str) -> ParseError {
        let column = self.peek().map_or(self.end, |t| t.column);
        ParseError { message: message.to_owned(), column }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            lhs = if op == '+' { Node::Add(lhs.into(), rhs.into()) } else { Node::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            lhs = if op == '*' { Node::Mul(lhs.into(), rhs.into()) } else { Node::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Node::Neg(self.unary()?.into()));
        }
        if self.eat_op(&['+']).is_some() {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Node::Pow(base.into(), exponent.into()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let Some(token) = self.next() else {
            self.pos -= 1;
            return Err(self.error("unexpected end of expression"));
        };
        match token.kind {
            Kind::Num(v) => Ok(Node::Num(v)),
            Kind::Open => {
                let inner = self.expr()?;
                self.close()?;
                Ok(inner)
            }
            Kind::Ident(name) => match name.as_str() {
                "y" => Ok(Node::Y),
                "pi" => Ok(Node::Num(std::f64::consts::PI)),
                _ => {
                    let Some(f) = Func::from_name(&name) else {
                        return Err(ParseError { message: format!("unknown name '{name}'"), column: token.column });
                    };
                    match self.next() {
                        Some(Token { kind: Kind::Open, .. }) => {}
                        _ => {
                            self.pos -= 1;
                            return Err(self.error(&format!("expected '(' after {name}")));
                        }
                    }
                    let arg = self.expr()?;
                    self.close()?;
                    Ok(Node::Call(f, arg.into()))
                }
            },
            kind => Err(ParseError { message: format!("unexpected {kind}"), column: token.column }),
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token { kind: Kind::Close, .. }) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error("expected ')'")),
        }
    }
}
