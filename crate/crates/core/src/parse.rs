//! Recursive-descent parser for scalar and graded expressions.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' integer)?
//! atom  := integer | identifier | '(' expr ')'
//! ```

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::rational::{Poly, RationalFunction};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Ident { name: String, pos: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            out.push((Tok::Int(s.parse().expect("digits")), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            out.push((Tok::Ident(s), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), pos));
            i += 1;
        } else {
            return Err(Error::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    let pos = self.bump().1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == &Tok::Sym('^') {
            self.bump();
            let pos = self.pos();
            match self.bump().0 {
                Tok::Int(k) => {
                    let k: u32 = k.try_into().map_err(|_| Error::Syntax {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    Ok(Expr::Pow(Box::new(base), k))
                }
                _ => Err(Error::Syntax { pos, msg: "expected a nonnegative integer exponent".into() }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump().0 {
            Tok::Int(v) => Ok(Expr::Int(v)),
            Tok::Ident(name) => Ok(Expr::Ident { name, pos }),
            Tok::Sym('(') => {
                let e = self.expr()?;
                if self.peek() != &Tok::Sym(')') {
                    return self.err("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(Error::Syntax { pos, msg: format!("unexpected `{c}`") }),
        }
    }
}

/// Parses an expression into a syntax tree.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(text)?, at: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Splits an identifier like `psi12` into (`psi`, 12). Indices start at 1.
pub fn split_ident(name: &str) -> Option<(&str, usize)> {
    let cut = name.find(|c: char| c.is_ascii_digit())?;
    let (head, tail) = name.split_at(cut);
    let idx: usize = tail.parse().ok()?;
    if idx == 0 || tail.starts_with('0') {
        return None;
    }
    Some((head, idx))
}

/// Evaluates an expression tree in the field of rational functions.
/// `n` bounds the admissible coordinates `x1..xn` when given.
pub fn eval_scalar(e: &Expr, n: Option<usize>) -> Result<RationalFunction> {
    Ok(match e {
        Expr::Int(v) => RationalFunction::from_poly(Poly::constant(v.clone().into())),
        Expr::Ident { name, pos } => match split_ident(name) {
            Some(("x", i)) if n.is_none_or(|n| i <= n) => RationalFunction::var(i - 1),
            _ => {
                return Err(Error::Syntax { pos: *pos, msg: format!("unknown identifier `{name}`") })
            }
        },
        Expr::Neg(a) => -eval_scalar(a, n)?,
        Expr::Add(a, b) => eval_scalar(a, n)? + eval_scalar(b, n)?,
        Expr::Sub(a, b) => eval_scalar(a, n)? - eval_scalar(b, n)?,
        Expr::Mul(a, b) => eval_scalar(a, n)? * eval_scalar(b, n)?,
        Expr::Div(a, b, _) => eval_scalar(a, n)?
            .checked_div(&eval_scalar(b, n)?)
            .ok_or(Error::DivisionByZero)?,
        Expr::Pow(a, k) => eval_scalar(a, n)?.pow(*k),
    })
}

/// Parses a scalar expression in `x1..xn` into canonical form.
pub fn parse_scalar(text: &str, n: Option<usize>) -> Result<RationalFunction> {
    eval_scalar(&parse_expr(text)?, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero() {
        assert!(parse_scalar("0", None).unwrap().is_zero());
    }

    #[test]
    fn quotient_literal() {
        let r = parse_scalar("(x1^2+1)/x2", Some(2)).unwrap();
        assert_eq!(r.numerator().to_string(), "x1^2 + 1");
        assert_eq!(r.denominator().to_string(), "x2");
    }

    #[test]
    fn self_quotient_cancels() {
        assert!(parse_scalar("x1/x1", Some(1)).unwrap().is_one());
    }

    #[test]
    fn precedence_and_unary_minus() {
        let a = parse_scalar("-x1^2 + 2*x1*x2 - 3", Some(2)).unwrap();
        let b = parse_scalar("2*(x2*x1) - (x1*x1) + (-3)", Some(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_scalar("x1 + * 2", None), Err(Error::Syntax { pos: 5, msg: "unexpected `*`".into() }));
        assert!(matches!(parse_scalar("x3", Some(2)), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_scalar("1/(x1-x1)", None), Err(Error::DivisionByZero)));
        assert!(matches!(parse_scalar("x1^-1", None), Err(Error::Syntax { .. })));
        assert!(matches!(parse_scalar("(x1", None), Err(Error::Syntax { .. })));
    }

    #[test]
    fn print_parse_roundtrip() {
        for s in ["(x1^2+1)/x2", "-3/(2*x1 - x2^3)", "x1/2 - 7/3*x2", "(x1+x2)^3/(x1*x2)"] {
            let r = parse_scalar(s, None).unwrap();
            let again = parse_scalar(&r.to_string(), None).unwrap();
            assert_eq!(r, again, "{s} -> {r}");
        }
    }
}
