//! Reader for the ASCII polynomial grammar, e.g. `3/2*x1^2*x2 - x3 + 7`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*        division only by constants
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := number | name | '(' expr ')'
//! number := digits ('.' digits)? ('/' digits)?
//! ```

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct PolyParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Name(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, PolyParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int: String = chars[start..i].iter().collect();
            let mut value = if int.is_empty() {
                Rational::zero()
            } else {
                Rational::from_integer(int.parse::<BigInt>().unwrap())
            };
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let frac: String = chars[fs..i].iter().collect();
                if frac.is_empty() && int.is_empty() {
                    return Err(PolyParseError { column: start + 1, message: "malformed number".into() });
                }
                if !frac.is_empty() {
                    let den = num_traits::pow(BigInt::from(10), frac.len());
                    value += Rational::new(frac.parse::<BigInt>().unwrap(), den);
                }
            }
            out.push((start + 1, Tok::Num(value)));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start + 1, Tok::Name(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i + 1, Tok::Op(c)));
            i += 1;
        } else {
            return Err(PolyParseError { column: i + 1, message: format!("unexpected character '{}'", c) });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    names: &'a [String],
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end_col)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, PolyParseError> {
        Err(PolyParseError { column: self.col(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Poly, PolyParseError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, PolyParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let col = self.col();
            let t = self.unary()?;
            if c == '*' {
                acc = &acc * &t;
            } else {
                if !t.is_constant() || t.is_zero() {
                    return Err(PolyParseError {
                        column: col,
                        message: "division only by a nonzero constant".into(),
                    });
                }
                acc = acc.scale(&(Rational::one() / t.constant_term()));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, PolyParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, PolyParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n.is_integer() && n.numer() < &BigInt::from(10_000) => {
                    self.pos += 1;
                    let e: u32 = n.numer().try_into().unwrap();
                    return Ok(base.pow(e));
                }
                _ => return self.err("expected a nonnegative integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, PolyParseError> {
        let n = self.names.len();
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Poly::constant(n, r))
            }
            Some(Tok::Name(name)) => match self.names.iter().position(|v| *v == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Poly::var(n, i))
                }
                None => self.err(format!("unknown variable '{}'", name)),
            },
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(t) => self.err(format!("unexpected token {:?}", t)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse `src` as a polynomial in the variables `names` (in that order).
pub fn parse_poly(src: &str, names: &[String]) -> Result<Poly, PolyParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, names, end_col: src.chars().count() + 1 };
    if p.peek().is_none() {
        return p.err("empty polynomial");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parse a rational literal such as `-3/4`, `7` or `0.125`.
pub fn parse_rational(src: &str) -> Option<Rational> {
    let p = parse_poly(src, &[]).ok()?;
    if p.is_constant() {
        Some(p.constant_term())
    } else {
        None
    }
}
