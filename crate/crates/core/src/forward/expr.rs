//! Closed-form function descriptors in the variables `x` and `t`.
//!
//! Grammar (usual precedence, `^` binds tightest and is right-associative):
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := number | "x" | "t" | "pi" | "e" | call | "(" expr ")"
//! call    := name "(" expr ("," expr)* ")"
//! ```
//!
//! Functions: `exp ln sqrt sin cos abs gamma` (one argument),
//! `pow(a, b)`, `min(a, b)`, `max(a, b)` and `ind(v, lo, hi)` which is 1
//! when `lo <= v < hi` and 0 otherwise.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fraccalc::gamma::gamma;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    X,
    T,
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Abs,
    Gamma,
    Pow,
    Min,
    Max,
    Ind,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "exp" => (Func::Exp, 1),
            "ln" => (Func::Ln, 1),
            "sqrt" => (Func::Sqrt, 1),
            "sin" => (Func::Sin, 1),
            "cos" => (Func::Cos, 1),
            "abs" => (Func::Abs, 1),
            "gamma" => (Func::Gamma, 1),
            "pow" => (Func::Pow, 2),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            "ind" => (Func::Ind, 3),
            _ => return None,
        })
    }
}

impl Node {
    fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::X => x,
            Node::T => t,
            Node::Neg(a) => -a.eval(x, t),
            Node::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, t), b.eval(x, t));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => pow(a, b),
                }
            }
            Node::Call(f, args) => {
                let a = args[0].eval(x, t);
                match f {
                    Func::Exp => a.exp(),
                    Func::Ln => a.ln(),
                    Func::Sqrt => a.sqrt(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Abs => a.abs(),
                    Func::Gamma => gamma(a),
                    Func::Pow => pow(a, args[1].eval(x, t)),
                    Func::Min => a.min(args[1].eval(x, t)),
                    Func::Max => a.max(args[1].eval(x, t)),
                    Func::Ind => {
                        let (lo, hi) = (args[1].eval(x, t), args[2].eval(x, t));
                        if a >= lo && a < hi {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
        }
    }

    fn uses(&self, var: &Node) -> bool {
        match self {
            Node::Num(_) => false,
            Node::X | Node::T => self == var,
            Node::Neg(a) => a.uses(var),
            Node::Bin(_, a, b) => a.uses(var) || b.uses(var),
            Node::Call(_, args) => args.iter().any(|a| a.uses(var)),
        }
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b == b.trunc() && b.abs() < 64.0 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
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
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::input(format!("bad number '{text}' in expression '{src}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::input(format!("unexpected character '{c}' in expression '{src}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::input(format!("{msg} in expression '{}'", self.src))
    }

    fn peek_sym(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Sym(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_sym() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { Op::Add } else { Op::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { Op::Mul } else { Op::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek_sym() == Some('-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.peek_sym() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek_sym() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let tok = self.toks.get(self.pos).cloned().ok_or_else(|| self.err("unexpected end"))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(c) => Err(self.err(&format!("unexpected '{c}'"))),
            Tok::Ident(name) => {
                if self.peek_sym() == Some('(') {
                    let (f, arity) =
                        Func::lookup(&name).ok_or_else(|| self.err(&format!("unknown function '{name}'")))?;
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    while self.peek_sym() == Some(',') {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    if args.len() != arity {
                        return Err(self.err(&format!("'{name}' takes {arity} argument(s), got {}", args.len())));
                    }
                    return Ok(Node::Call(f, args));
                }
                match name.as_str() {
                    "x" => Ok(Node::X),
                    "t" => Ok(Node::T),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ => Err(self.err(&format!("unknown identifier '{name}'"))),
                }
            }
        }
    }
}

/// A parsed function of `x` and `t` that remembers its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let toks = tokenize(src)?;
        if toks.is_empty() {
            return Err(Error::input("empty expression"));
        }
        let mut p = Parser { toks, pos: 0, src };
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(Self { source: src.trim().to_string(), root })
    }

    pub fn constant(v: f64) -> Self {
        Self { source: format!("{v:?}"), root: Node::Num(v) }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.root.eval(x, t)
    }

    pub fn at_x(&self, x: f64) -> f64 {
        self.root.eval(x, 0.0)
    }

    pub fn at_t(&self, t: f64) -> f64 {
        self.root.eval(0.0, t)
    }

    pub fn depends_on_x(&self) -> bool {
        self.root.uses(&Node::X)
    }

    pub fn depends_on_t(&self) -> bool {
        self.root.uses(&Node::T)
    }

    /// True when the expression is the literal constant 0.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self.root, Node::Num(v) if v == 0.0)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expr::parse(&s).map_err(serde::de::Error::custom)
    }
}
