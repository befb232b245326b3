//! Recursive-descent parser for scalar expressions.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/' | '·') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Identifiers resolve through a caller-supplied variable table; the
//! canonical rendering of [`SymbolicScalar`] parses back to an equal value.

use super::{SymError, SymbolicScalar};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// `q` and `pi`, the variables of the canonical text form.
pub fn default_variables() -> BTreeMap<String, SymbolicScalar> {
    let mut m = BTreeMap::new();
    m.insert("q".to_owned(), SymbolicScalar::q());
    m.insert("pi".to_owned(), SymbolicScalar::pi_pow(1));
    m
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Tok)>, SymError> {
    let mut out = Vec::new();
    let mut it = input.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                let n = digits.parse::<BigInt>().map_err(|_| SymError::Parse {
                    pos,
                    msg: "malformed integer".to_owned(),
                })?;
                out.push((pos, Tok::Int(n)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        name.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push((pos, Tok::Ident(name)));
            }
            '+' => {
                it.next();
                out.push((pos, Tok::Plus));
            }
            '-' => {
                it.next();
                out.push((pos, Tok::Minus));
            }
            '*' | '\u{b7}' => {
                it.next();
                out.push((pos, Tok::Star));
            }
            '/' => {
                it.next();
                out.push((pos, Tok::Slash));
            }
            '^' => {
                it.next();
                out.push((pos, Tok::Caret));
            }
            '(' => {
                it.next();
                out.push((pos, Tok::LParen));
            }
            ')' => {
                it.next();
                out.push((pos, Tok::RParen));
            }
            other => {
                return Err(SymError::Parse {
                    pos,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    vars: &'a BTreeMap<String, SymbolicScalar>,
}

/// Parses `input` resolving identifiers through `vars`.
pub fn parse_expression(
    input: &str,
    vars: &BTreeMap<String, SymbolicScalar>,
) -> Result<SymbolicScalar, SymError> {
    let toks = tokenize(input)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: input.len(),
        vars,
    };
    let value = p.expr()?;
    if let Some((pos, tok)) = p.peek_at() {
        return Err(SymError::Parse {
            pos,
            msg: format!("trailing input starting with {tok:?}"),
        });
    }
    Ok(value)
}

impl Parser<'_> {
    fn peek_at(&self) -> Option<(usize, Tok)> {
        self.toks.get(self.idx).cloned()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<SymbolicScalar, SymError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.try_add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.try_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SymbolicScalar, SymError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.try_mul(&self.unary()?)?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = acc.try_div(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SymbolicScalar, SymError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<SymbolicScalar, SymError> {
        let base = self.atom()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.bump();
        let negative = if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        match self.bump() {
            Some((_, Tok::Int(n))) => {
                let mag = i64::try_from(&n).map_err(|_| SymError::Parse {
                    pos,
                    msg: "exponent does not fit in 64 bits".to_owned(),
                })?;
                base.pow(if negative { -mag } else { mag })
            }
            other => Err(SymError::Parse {
                pos,
                msg: format!("expected an integer exponent, found {other:?}"),
            }),
        }
    }

    fn atom(&mut self) -> Result<SymbolicScalar, SymError> {
        let pos = self.pos();
        match self.bump() {
            Some((_, Tok::Int(n))) => Ok(SymbolicScalar::from_rational(
                num_rational::BigRational::from_integer(n),
            )),
            Some((_, Tok::Ident(name))) => {
                self.vars.get(&name).cloned().ok_or_else(|| SymError::Parse {
                    pos,
                    msg: format!("unknown variable `{name}`"),
                })
            }
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    other => Err(SymError::Parse {
                        pos: self.pos(),
                        msg: format!("expected `)`, found {other:?}"),
                    }),
                }
            }
            other => Err(SymError::Parse {
                pos,
                msg: format!("expected a value, found {other:?}"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_arithmetic() {
        let v = default_variables();
        let s = parse_expression("(q^2 - 1)/(q - 1)", &v).unwrap();
        assert_eq!(s, SymbolicScalar::q() + SymbolicScalar::one());
    }

    #[test]
    fn parses_pi_quotient() {
        let v = default_variables();
        let s = parse_expression("pi/3", &v).unwrap();
        assert_eq!(s, SymbolicScalar::rational(1, 3) * SymbolicScalar::pi_pow(1));
    }

    #[test]
    fn custom_variable_substitution() {
        let mut v = default_variables();
        v.insert("k".to_owned(), SymbolicScalar::from_int(7));
        let s = parse_expression("(k-1)/(4*pi)", &v).unwrap();
        assert_eq!(
            s,
            SymbolicScalar::rational(3, 2) * SymbolicScalar::pi_pow(-1)
        );
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let v = default_variables();
        assert!(matches!(
            parse_expression("x + 1", &v),
            Err(SymError::Parse { pos: 0, .. })
        ));
    }

    #[test]
    fn negative_exponents() {
        let v = default_variables();
        assert_eq!(
            parse_expression("q^-3", &v).unwrap(),
            SymbolicScalar::q_pow(-3)
        );
        assert_eq!(
            parse_expression("2*pi^-2", &v).unwrap(),
            SymbolicScalar::from_int(2) * SymbolicScalar::pi_pow(-2)
        );
    }
}
