//! Polynomial expressions in `x`, `y` and named parameters.
//!
//! Grammar: sums and differences of products and quotients of powers, with
//! unary signs and parentheses. Exponents are non-negative integer literals.
//! Division is allowed only by expressions that evaluate to nonzero constants.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::Poly2;
use super::rat::Rat;
use crate::error::{QhError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rat),
    Var { name: String, line: usize, column: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize, usize),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Evaluates with `x`, `y` as polynomial variables and every other identifier
    /// looked up in `bindings`.
    pub fn eval(&self, bindings: &BTreeMap<String, Rat>) -> Result<Poly2> {
        Ok(match self {
            Expr::Num(r) => Poly2::constant(r.clone()),
            Expr::Var { name, .. } => match name.as_str() {
                "x" => Poly2::x(),
                "y" => Poly2::y(),
                other => Poly2::constant(
                    bindings
                        .get(other)
                        .cloned()
                        .ok_or_else(|| QhError::UnassignedParameter(other.to_string()))?,
                ),
            },
            Expr::Neg(e) => -&e.eval(bindings)?,
            Expr::Add(a, b) => &a.eval(bindings)? + &b.eval(bindings)?,
            Expr::Sub(a, b) => &a.eval(bindings)? - &b.eval(bindings)?,
            Expr::Mul(a, b) => &a.eval(bindings)? * &b.eval(bindings)?,
            Expr::Div(a, b, line, column) => {
                let num = a.eval(bindings)?;
                let den = b.eval(bindings)?;
                let c = constant_value(&den).filter(|c| !c.is_zero()).ok_or_else(|| QhError::Parse {
                    line: *line,
                    column: *column,
                    message: format!("divisor `{den}` is not a nonzero constant"),
                })?;
                num.scale(&(Rat::from_integer(BigInt::from(1)) / c))
            }
            Expr::Pow(e, k) => e.eval(bindings)?.pow(*k),
        })
    }

    /// Identifiers other than `x`, `y` that occur in the expression.
    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var { name, .. } => {
                if name != "x" && name != "y" {
                    out.push(name.clone());
                }
            }
            Expr::Neg(e) | Expr::Pow(e, _) => e.collect_params(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _, _) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }
}

fn constant_value(p: &Poly2) -> Option<Rat> {
    match p.len() {
        0 => Some(Rat::zero()),
        1 => {
            let (m, c) = p.terms().next()?;
            (m.total_degree() == 0).then(|| c.clone())
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(src: &str, line0: usize, col0: usize) -> Result<Vec<(Tok, usize, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (line0, col0);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (l, cc) = (line, col);
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Int(s.parse().expect("digits")), l, cc));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(s), l, cc));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), l, cc));
            i += 1;
            col += 1;
        } else {
            return Err(QhError::Parse { line: l, column: cc, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::End, line, col));
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> &(Tok, usize, usize) {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> (Tok, usize, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (_, line, column) = self.peek();
        Err(QhError::Parse { line: *line, column: *column, message: msg.into() })
    }
}

struct Parser<'a> {
    lx: Lexer,
    allowed: &'a [String],
}

impl Parser<'_> {
    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.lx.peek().0 {
                Tok::Sym('+') => {
                    self.lx.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.lx.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.lx.peek().0 {
                Tok::Sym('*') => {
                    self.lx.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    let (_, l, c) = self.lx.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), l, c);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.lx.peek().0 {
            Tok::Sym('-') => {
                self.lx.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.lx.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.lx.peek().0 == Tok::Sym('^') {
            self.lx.bump();
            match self.lx.peek().0.clone() {
                Tok::Int(k) => {
                    let e: u32 = k.try_into().or_else(|_| self.lx.err("exponent too large"))?;
                    self.lx.bump();
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => self.lx.err("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let (tok, line, column) = self.lx.peek().clone();
        match tok {
            Tok::Int(v) => {
                self.lx.bump();
                Ok(Expr::Num(Rat::from_integer(v)))
            }
            Tok::Ident(name) => {
                if name != "x" && name != "y" && !self.allowed.contains(&name) {
                    return Err(QhError::UndeclaredIdentifier { name, line, column });
                }
                self.lx.bump();
                Ok(Expr::Var { name, line, column })
            }
            Tok::Sym('(') => {
                self.lx.bump();
                let e = self.expr()?;
                if self.lx.peek().0 != Tok::Sym(')') {
                    return self.lx.err("expected `)`");
                }
                self.lx.bump();
                Ok(e)
            }
            Tok::End => self.lx.err("unexpected end of expression"),
            Tok::Sym(c) => self.lx.err(format!("unexpected `{c}`")),
        }
    }
}

/// Parses `src`, reporting positions offset to start at (`line`, `column`).
pub fn parse_expr_at(src: &str, line: usize, column: usize, params: &[String]) -> Result<Expr> {
    let toks = lex(src, line, column)?;
    let mut p = Parser { lx: Lexer { toks, pos: 0 }, allowed: params };
    let e = p.expr()?;
    if p.lx.peek().0 != Tok::End {
        return p.lx.err("unexpected trailing input");
    }
    Ok(e)
}

pub fn parse_expr(src: &str, params: &[String]) -> Result<Expr> {
    parse_expr_at(src, 1, 1, params)
}

/// Parses a parameter-free polynomial.
pub fn parse_poly(src: &str) -> Result<Poly2> {
    parse_expr(src, &[])?.eval(&BTreeMap::new())
}
