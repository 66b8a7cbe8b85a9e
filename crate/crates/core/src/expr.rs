//! Surface syntax for rational-function components.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := ("-")* base ("^" integer)?
//! base   := integer | ident | "(" expr ")"
//! ident  := letter (letter|digit|"_")*
//! ```
//!
//! `^` binds tighter than unary minus, so `-x1^2` is `-(x1^2)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::scalar::{RationalFunction, VariableContext};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    /// Variable by index in the context, with its name.
    Var(usize, String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(u8),
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
    ctx: &'a VariableContext,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, ctx: &'a VariableContext) -> Result<Self> {
        let mut p = Parser { src, pos: 0, tok: Tok::End, tok_start: 0, ctx };
        p.advance()?;
        Ok(p)
    }

    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::SyntaxError { offset, message: message.into() })
    }

    fn advance(&mut self) -> Result<()> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos == bytes.len() {
            self.tok = Tok::End;
            return Ok(());
        }
        let b = bytes[self.pos];
        if b.is_ascii_digit() {
            let end = bytes[self.pos..].iter().position(|c| !c.is_ascii_digit()).map_or(bytes.len(), |e| self.pos + e);
            self.tok = Tok::Int(self.src[self.pos..end].parse().expect("digits"));
            self.pos = end;
        } else if b.is_ascii_alphabetic() {
            let end = bytes[self.pos..]
                .iter()
                .position(|c| !(c.is_ascii_alphanumeric() || *c == b'_'))
                .map_or(bytes.len(), |e| self.pos + e);
            self.tok = Tok::Ident(self.src[self.pos..end].to_string());
            self.pos = end;
        } else if b"+-*/^()".contains(&b) {
            self.tok = Tok::Sym(b);
            self.pos += 1;
        } else {
            let ch = self.src[self.pos..].chars().next().unwrap();
            return self.err(self.pos, format!("unexpected character `{ch}`"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Sym(op @ (b'+' | b'-')) = self.tok {
            self.advance()?;
            let rhs = self.term()?;
            lhs = if op == b'+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Tok::Sym(op @ (b'*' | b'/')) = self.tok {
            self.advance()?;
            let rhs = self.factor()?;
            lhs = if op == b'*' { Expr::Mul(lhs.into(), rhs.into()) } else { Expr::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let mut negations = 0;
        while self.tok == Tok::Sym(b'-') {
            negations += 1;
            self.advance()?;
        }
        let mut e = self.base()?;
        if self.tok == Tok::Sym(b'^') {
            self.advance()?;
            let at = self.tok_start;
            let Tok::Int(k) = &self.tok else {
                return self.err(at, "exponent must be a nonnegative integer literal");
            };
            let Some(k) = k.to_u32() else {
                return self.err(at, "exponent too large");
            };
            self.advance()?;
            e = Expr::Pow(e.into(), k);
        }
        for _ in 0..negations {
            e = Expr::Neg(e.into());
        }
        Ok(e)
    }

    fn base(&mut self) -> Result<Expr> {
        let at = self.tok_start;
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Int(v) => {
                self.advance()?;
                Ok(Expr::Int(v))
            }
            Tok::Ident(name) => {
                let idx = self.ctx.index_of(&name).ok_or_else(|| Error::UnknownIdentifier(name.clone()))?;
                self.advance()?;
                Ok(Expr::Var(idx, name))
            }
            Tok::Sym(b'(') => {
                self.advance()?;
                let e = self.expr()?;
                if self.tok != Tok::Sym(b')') {
                    return self.err(self.tok_start, "expected `)`");
                }
                self.advance()?;
                Ok(e)
            }
            Tok::End => self.err(at, "unexpected end of input"),
            Tok::Sym(c) => self.err(at, format!("unexpected `{}`", c as char)),
        }
    }
}

pub fn parse(text: &str, ctx: &VariableContext) -> Result<Expr> {
    let mut p = Parser::new(text, ctx)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return p.err(p.tok_start, "unexpected trailing input");
    }
    Ok(e)
}

impl Expr {
    pub fn to_rational_function(&self, ctx: &Arc<VariableContext>) -> Result<RationalFunction> {
        Ok(match self {
            Expr::Int(v) => RationalFunction::from_rational(ctx, &num_rational::BigRational::from_integer(v.clone())),
            Expr::Var(i, _) => RationalFunction::var(ctx, *i),
            Expr::Neg(a) => a.to_rational_function(ctx)?.neg(),
            Expr::Add(a, b) => a.to_rational_function(ctx)?.try_add(&b.to_rational_function(ctx)?)?,
            Expr::Sub(a, b) => a.to_rational_function(ctx)?.try_sub(&b.to_rational_function(ctx)?)?,
            Expr::Mul(a, b) => a.to_rational_function(ctx)?.try_mul(&b.to_rational_function(ctx)?)?,
            Expr::Div(a, b) => {
                let d = b.to_rational_function(ctx)?;
                if d.is_zero() {
                    return Err(Error::ZeroDenominator);
                }
                a.to_rational_function(ctx)?.try_div(&d)?
            }
            Expr::Pow(a, k) => {
                let base = a.to_rational_function(ctx)?;
                let mut acc = RationalFunction::one(ctx);
                for _ in 0..*k {
                    acc = acc.try_mul(&base)?;
                }
                acc
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Int(..) | Expr::Var(..) => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Var(_, name) => write!(f, "{name}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 4)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                wrap(f, b, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { '*' } else { '/' })?;
                wrap(f, b, 4)
            }
            Expr::Pow(a, k) => {
                wrap(f, a, 5)?;
                write!(f, "^{k}")
            }
        }
    }
}

/// Parses and evaluates in one step.
pub fn parse_rational(text: &str, ctx: &Arc<VariableContext>) -> Result<RationalFunction> {
    parse(text, ctx)?.to_rational_function(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<VariableContext> {
        VariableContext::standard(3, &["c"]).unwrap()
    }

    #[test]
    fn tree_shape() {
        let c = ctx();
        let e = parse("(x1+c)/(x3+c)", &c).unwrap();
        let v = |i: usize, s: &str| Box::new(Expr::Var(i, s.into()));
        assert_eq!(
            e,
            Expr::Div(Box::new(Expr::Add(v(0, "x1"), v(3, "c"))), Box::new(Expr::Add(v(2, "x3"), v(3, "c"))))
        );
        assert_eq!(parse("-x1^2", &c).unwrap(), Expr::Neg(Box::new(Expr::Pow(v(0, "x1"), 2))));
    }

    #[test]
    fn errors_carry_offsets() {
        let c = ctx();
        assert_eq!(parse("x4", &c).unwrap_err(), Error::UnknownIdentifier("x4".into()));
        assert!(matches!(parse("x1 + ", &c), Err(Error::SyntaxError { offset: 5, .. })));
        assert!(matches!(parse("x1 $ 2", &c), Err(Error::SyntaxError { offset: 3, .. })));
        assert!(matches!(parse("x1^x2", &c), Err(Error::SyntaxError { offset: 3, .. })));
        assert!(matches!(parse("(x1", &c), Err(Error::SyntaxError { offset: 3, .. })));
        assert_eq!(parse_rational("1/(x1-x1)", &c).unwrap_err(), Error::ZeroDenominator);
    }

    #[test]
    fn exact_values() {
        let c = ctx();
        assert!(parse_rational("x1^2 - x1*x1", &c).unwrap().is_zero());
        assert!(parse_rational("1/2 + 1/2", &c).unwrap().is_one());
        let a = parse_rational("x1/x2/x3", &c).unwrap();
        let b = parse_rational("x1/(x2*x3)", &c).unwrap();
        assert_eq!(a, b);
    }
}
