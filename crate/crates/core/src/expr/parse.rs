//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | IDENT | '(' expr ')'
//! ```
//!
//! Exponents are nonnegative integer literals; multiplication is explicit.

use num_bigint::BigInt;

use super::{ExprError, RatExpr, Rational, Vars};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ExprError> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = lx.src[start..i].parse().expect("digits");
                lx.toks.push((Tok::Int(n), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((Tok::Ident(lx.src[start..i].to_string()), start));
            } else if "+-*/^()".contains(c) {
                lx.toks.push((Tok::Op(c), i));
                i += 1;
            } else {
                return Err(ExprError::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
            }
        }
        lx.toks.push((Tok::End, src.len()));
        Ok(lx.toks)
    }
}

struct Parser<'v> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'v Vars,
}

impl Parser<'_> {
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

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<RatExpr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatExpr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let pos = self.pos();
                    let rhs = self.unary()?;
                    acc = acc.checked_div(&rhs).map_err(|_| ExprError::Syntax {
                        pos,
                        msg: "division by the zero polynomial".into(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatExpr, ExprError> {
        if let Tok::Op('-') = self.peek() {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatExpr, ExprError> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            match self.bump() {
                (Tok::Int(n), pos) => {
                    let e: u32 = n.try_into().map_err(|_| ExprError::Syntax {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    if let Tok::Op('^') = self.peek() {
                        return self.err("chained exponent; use parentheses");
                    }
                    return Ok(base.pow(e));
                }
                (_, pos) => {
                    return Err(ExprError::Syntax {
                        pos,
                        msg: "exponent must be a nonnegative integer literal".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatExpr, ExprError> {
        match self.bump() {
            (Tok::Int(n), _) => Ok(RatExpr::constant(self.vars, Rational::from_integer(n))),
            (Tok::Ident(name), pos) => match self.vars.index_of(&name) {
                Some(i) => Ok(RatExpr::var(self.vars, i)),
                None => Err(ExprError::UndeclaredVariable { name, pos }),
            },
            (Tok::Op('('), _) => {
                let inner = self.expr()?;
                match self.bump() {
                    (Tok::Op(')'), _) => Ok(inner),
                    (_, pos) => Err(ExprError::Syntax { pos, msg: "expected `)`".into() }),
                }
            }
            (Tok::End, pos) => Err(ExprError::Syntax { pos, msg: "unexpected end of input".into() }),
            (t, pos) => Err(ExprError::Syntax { pos, msg: format!("unexpected token {}", describe(&t)) }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("`{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

/// Parses `text` into a canonical rational function over `vars`.
pub fn parse(text: &str, vars: &Vars) -> Result<RatExpr, ExprError> {
    let toks = Lexer::run(text)?;
    let mut p = Parser { toks, at: 0, vars };
    let out = p.expr()?;
    match p.peek() {
        Tok::End => Ok(out),
        t => {
            let msg = format!("unexpected token {}", describe(t));
            p.err(msg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Monomial, Poly};

    fn xyz() -> Vars {
        Vars::xyz()
    }

    #[test]
    fn difference_of_squares() {
        let v = xyz();
        let e = parse("x^2 - y^2", &v).unwrap();
        let one = Rational::from_integer(1.into());
        let expected = Poly::from_terms(
            &v,
            [
                (Monomial::from_exponents(vec![2, 0, 0]), one.clone()),
                (Monomial::from_exponents(vec![0, 2, 0]), -one),
            ],
        );
        assert_eq!(e, RatExpr::from_poly(expected));
    }

    #[test]
    fn precedence() {
        let v = xyz();
        assert_eq!(parse("-x^2", &v).unwrap(), -parse("x*x", &v).unwrap());
        assert_eq!(parse("1/2*x", &v).unwrap(), parse("x/2", &v).unwrap());
        assert_eq!(parse("2^3", &v).unwrap(), parse("8", &v).unwrap());
        assert_eq!(parse("x-y-z", &v).unwrap(), parse("x-(y+z)", &v).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let v = xyz();
        assert_eq!(
            parse("x + w", &v),
            Err(ExprError::UndeclaredVariable { name: "w".into(), pos: 4 })
        );
        assert!(matches!(parse("x + * y", &v), Err(ExprError::Syntax { pos: 4, .. })));
        assert!(matches!(parse("2x", &v), Err(ExprError::Syntax { pos: 1, .. })));
        assert!(matches!(parse("x^-1", &v), Err(ExprError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("x/(y-y)", &v), Err(ExprError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("(x+y", &v), Err(ExprError::Syntax { pos: 4, .. })));
        assert!(matches!(parse("x $ y", &v), Err(ExprError::Syntax { pos: 2, .. })));
    }
}
